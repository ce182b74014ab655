//! Fixture writers and helpers shared by the CLI test targets.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use advtransport::numerics::RngStream;

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_advtransport"));
    cmd.env("RUST_LOG", "warn");
    cmd
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn advtransport")
}

/// Random pixel bytes, `per_class` images for each label in `classes`.
fn random_pixels(n: usize, dim: usize, seed: u64) -> Vec<u8> {
    let mut rng = RngStream::new(seed, 0);
    (0..n * dim).map(|_| rng.below(256) as u8).collect()
}

fn interleaved_labels(classes: &[u8], per_class: usize) -> Vec<u8> {
    (0..per_class)
        .flat_map(|_| classes.iter().copied())
        .collect()
}

/// Writes an IDX image/label pair of `side x side` images.
pub fn write_idx(
    dir: &Path,
    classes: &[u8],
    per_class: usize,
    side: u32,
    seed: u64,
) -> (PathBuf, PathBuf) {
    let n = classes.len() * per_class;
    let mut images = Vec::new();
    images.extend(0x0000_0803u32.to_be_bytes());
    images.extend((n as u32).to_be_bytes());
    images.extend(side.to_be_bytes());
    images.extend(side.to_be_bytes());
    images.extend(random_pixels(n, (side * side) as usize, seed));
    let mut labels = Vec::new();
    labels.extend(0x0000_0801u32.to_be_bytes());
    labels.extend((n as u32).to_be_bytes());
    labels.extend(interleaved_labels(classes, per_class));
    let (ip, lp) = (dir.join("images.idx"), dir.join("labels.idx"));
    std::fs::write(&ip, images).unwrap();
    std::fs::write(&lp, labels).unwrap();
    (ip, lp)
}

pub fn write_cifar(dir: &Path, classes: &[u8], per_class: usize, seed: u64) -> PathBuf {
    let labels = interleaved_labels(classes, per_class);
    let pixels = random_pixels(labels.len(), 3072, seed);
    let mut bytes = Vec::new();
    for (i, l) in labels.iter().enumerate() {
        bytes.push(*l);
        bytes.extend_from_slice(&pixels[i * 3072..(i + 1) * 3072]);
    }
    let p = dir.join("data_batch_1.bin");
    std::fs::write(&p, bytes).unwrap();
    p
}

pub fn write_csv(dir: &Path, classes: &[i64], per_class: usize, dim: usize, seed: u64) -> PathBuf {
    let mut rng = RngStream::new(seed, 0);
    let mut text = String::from("label");
    for c in 0..dim {
        text.push_str(&format!(",x{c}"));
    }
    text.push('\n');
    for _ in 0..per_class {
        for &c in classes {
            text.push_str(&c.to_string());
            for _ in 0..dim {
                text.push_str(&format!(",{}", rng.gaussian() + c as f64));
            }
            text.push('\n');
        }
    }
    let p = dir.join("points.csv");
    std::fs::write(&p, text).unwrap();
    p
}

/// Parses a CSV written by the CLI into its header and numeric rows.
pub fn read_output(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}
