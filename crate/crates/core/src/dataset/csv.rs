use std::fmt::Write as _;
use std::path::Path;

use super::{BinaryTask, LabeledDataset};
use crate::{Error, Result};

/// Loads `label,feature,feature,...` rows. No quoting; blank lines are
/// skipped; a first line that does not parse is taken as a header.
pub fn load_csv(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let err = |line: usize, message: String| Error::Csv {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut dim = None;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut first = true;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let label = cells[0].parse::<i64>();
        let values: std::result::Result<Vec<f64>, _> =
            cells[1..].iter().map(|c| c.parse::<f64>()).collect();

        if first {
            first = false;
            if label.is_err() || values.is_err() {
                log::warn!(
                    "{}:{line_no}: skipping non-numeric header row",
                    path.display()
                );
                continue;
            }
        }

        let label =
            label.map_err(|_| err(line_no, format!("label {:?} is not an integer", cells[0])))?;
        let values = values.map_err(|_| {
            let bad = cells[1..]
                .iter()
                .find(|c| c.parse::<f64>().is_err())
                .unwrap();
            err(line_no, format!("cell {bad:?} is not a number"))
        })?;
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(err(
                    line_no,
                    format!("row has {} features, expected {d}", values.len()),
                ))
            }
            _ => {}
        }
        labels.push(label);
        features.extend(values);
    }
    LabeledDataset::new(dim.unwrap_or(0), features, labels)
}

/// Writes a task as CSV, class-pos rows first, labelled with the task's
/// class labels. Floats use the shortest round-tripping representation so a
/// reload is bit-exact.
pub fn write_task_csv(task: &BinaryTask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    let prov = task.provenance();
    for (label, samples) in [(prov.class_a, task.pos()), (prov.class_b, task.neg())] {
        for row in samples.rows() {
            write!(out, "{label}").unwrap();
            for v in row {
                write!(out, ",{v:?}").unwrap();
            }
            out.push('\n');
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
