//! Dataset ingestion and two-class task construction.
//!
//! Pixel formats (IDX, CIFAR-10) are rescaled to `[0, 1]` by dividing each
//! byte by 255. CSV features are taken as-is.

mod cifar;
mod csv;
mod idx;
mod task;

pub use self::cifar::load_cifar10;
pub use self::csv::{load_csv, write_task_csv};
pub use self::idx::load_idx;
pub use self::task::{gaussian_mixture_task, make_binary_task, BinaryTask, Provenance, Samples};

use std::path::Path;

use crate::{Error, Result};

/// Feature vectors with integer class labels, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    dim: usize,
    features: Vec<f64>,
    labels: Vec<i64>,
}

impl LabeledDataset {
    pub fn new(dim: usize, features: Vec<f64>, labels: Vec<i64>) -> Result<Self> {
        if features.len() != dim * labels.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * labels.len(),
                actual: features.len(),
            });
        }
        Ok(LabeledDataset {
            dim,
            features,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    /// Number of examples carrying `label`.
    pub fn count(&self, label: i64) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}

/// Reads a whole file, inflating it first if it carries the gzip magic.
pub(crate) fn read_maybe_gzip(path: &Path) -> Result<Vec<u8>> {
    use std::io::Read;

    let raw = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        flate2::read::GzDecoder::new(raw.as_slice())
            .read_to_end(&mut out)
            .map_err(|e| Error::io(path, e))?;
        Ok(out)
    } else {
        Ok(raw)
    }
}
