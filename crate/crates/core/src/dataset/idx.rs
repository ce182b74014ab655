use std::path::Path;

use super::{read_maybe_gzip, LabeledDataset};
use crate::{Error, Result};

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

fn be_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_be_bytes(bytes[at..at + 4].try_into().unwrap())
}

/// Parses an unsigned-byte IDX payload with the given magic. Returns the
/// dimension sizes and the payload bytes.
fn parse<'a>(
    path: &Path,
    bytes: &'a [u8],
    magic: u32,
    ndims: usize,
) -> Result<(Vec<usize>, &'a [u8])> {
    let truncated = |expected: u64| Error::Truncated {
        path: path.to_path_buf(),
        expected,
        actual: bytes.len() as u64,
    };
    if bytes.len() < 4 {
        return Err(truncated(4));
    }
    let found = be_u32(bytes, 0);
    if found != magic {
        return Err(Error::IdxMagic {
            path: path.to_path_buf(),
            magic: found,
        });
    }
    let header = 4 + 4 * ndims;
    if bytes.len() < header {
        return Err(truncated(header as u64));
    }
    let dims: Vec<usize> = (0..ndims)
        .map(|i| be_u32(bytes, 4 + 4 * i) as usize)
        .collect();
    let payload = dims.iter().product::<usize>();
    if bytes.len() < header + payload {
        return Err(truncated((header + payload) as u64));
    }
    Ok((dims, &bytes[header..header + payload]))
}

/// Loads an IDX image file (magic `0x00000803`) and its label file
/// (`0x00000801`). Either may be gzip-compressed.
pub fn load_idx(
    images_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
) -> Result<LabeledDataset> {
    let images_path = images_path.as_ref();
    let labels_path = labels_path.as_ref();
    let image_bytes = read_maybe_gzip(images_path)?;
    let label_bytes = read_maybe_gzip(labels_path)?;

    let (dims, pixels) = parse(images_path, &image_bytes, IMAGES_MAGIC, 3)?;
    let (ldims, labels) = parse(labels_path, &label_bytes, LABELS_MAGIC, 1)?;
    if dims[0] != ldims[0] {
        return Err(Error::CountMismatch {
            images: dims[0],
            labels: ldims[0],
        });
    }
    let dim = dims[1] * dims[2];
    let features = pixels.iter().map(|&b| f64::from(b) / 255.0).collect();
    let labels = labels.iter().map(|&l| i64::from(l)).collect();
    LabeledDataset::new(dim, features, labels)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use std::io::Write;

    pub(crate) fn idx_bytes(magic: u32, dims: &[u32], payload: &[u8]) -> Vec<u8> {
        let mut out = magic.to_be_bytes().to_vec();
        for d in dims {
            out.extend_from_slice(&d.to_be_bytes());
        }
        out.extend_from_slice(payload);
        out
    }

    fn write(dir: &tempfile::TempDir, name: &str, bytes: &[u8]) -> std::path::PathBuf {
        let p = dir.path().join(name);
        std::fs::File::create(&p).unwrap().write_all(bytes).unwrap();
        p
    }

    #[test]
    fn two_image_fixture() {
        let dir = tempfile::tempdir().unwrap();
        let img = write(
            &dir,
            "img",
            &idx_bytes(IMAGES_MAGIC, &[2, 2, 2], &[0, 255, 51, 102, 1, 2, 3, 4]),
        );
        let lab = write(&dir, "lab", &idx_bytes(LABELS_MAGIC, &[2], &[3, 7]));
        let ds = load_idx(&img, &lab).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.dim(), 4);
        assert_eq!(ds.labels(), &[3, 7]);
        assert_eq!(ds.row(0), &[0.0, 1.0, 0.2, 0.4]);
        assert_eq!(
            ds.row(1),
            &[1.0 / 255.0, 2.0 / 255.0, 3.0 / 255.0, 4.0 / 255.0]
        );
    }

    #[test]
    fn empty_payload() {
        let dir = tempfile::tempdir().unwrap();
        let img = write(&dir, "img", &idx_bytes(IMAGES_MAGIC, &[0, 28, 28], &[]));
        let lab = write(&dir, "lab", &idx_bytes(LABELS_MAGIC, &[0], &[]));
        let ds = load_idx(&img, &lab).unwrap();
        assert!(ds.is_empty());
        assert_eq!(ds.dim(), 784);
    }

    #[test]
    fn wrong_magic() {
        let dir = tempfile::tempdir().unwrap();
        let img = write(&dir, "img", &idx_bytes(0x0802, &[1, 1], &[0]));
        let lab = write(&dir, "lab", &idx_bytes(LABELS_MAGIC, &[1], &[0]));
        let err = load_idx(&img, &lab).unwrap_err();
        assert!(matches!(err, Error::IdxMagic { magic: 0x0802, .. }));
        assert!(err.to_string().contains("unsupported IDX element type"));
    }

    #[test]
    fn truncated_and_mismatched() {
        let dir = tempfile::tempdir().unwrap();
        let img = write(&dir, "img", &idx_bytes(IMAGES_MAGIC, &[2, 2, 2], &[0; 7]));
        let lab = write(&dir, "lab", &idx_bytes(LABELS_MAGIC, &[2], &[0, 1]));
        assert!(matches!(
            load_idx(&img, &lab),
            Err(Error::Truncated {
                expected: 24,
                actual: 23,
                ..
            })
        ));
        let img = write(&dir, "img2", &idx_bytes(IMAGES_MAGIC, &[2, 1, 1], &[0, 0]));
        let lab = write(&dir, "lab2", &idx_bytes(LABELS_MAGIC, &[3], &[0, 1, 2]));
        assert!(matches!(
            load_idx(&img, &lab),
            Err(Error::CountMismatch {
                images: 2,
                labels: 3
            })
        ));
    }

    #[test]
    fn gzip_is_transparent() {
        use flate2::{write::GzEncoder, Compression};
        let dir = tempfile::tempdir().unwrap();
        let mut enc = GzEncoder::new(Vec::new(), Compression::default());
        enc.write_all(&idx_bytes(IMAGES_MAGIC, &[1, 1, 2], &[255, 0]))
            .unwrap();
        let img = write(&dir, "img.gz", &enc.finish().unwrap());
        let lab = write(&dir, "lab", &idx_bytes(LABELS_MAGIC, &[1], &[9]));
        let ds = load_idx(&img, &lab).unwrap();
        assert_eq!(ds.row(0), &[1.0, 0.0]);
        assert_eq!(ds.labels(), &[9]);
    }
}
