use std::path::Path;

use super::LabeledDataset;
use crate::{Error, Result};

const RECORD: usize = 3073;
const PIXELS: usize = 3072;

/// Loads CIFAR-10 binary batches: 3073-byte records of one label byte
/// followed by the R, G and B planes of a 32x32 image.
pub fn load_cifar10<P: AsRef<Path>>(batch_paths: &[P]) -> Result<LabeledDataset> {
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for path in batch_paths {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let len = bytes.len() as u64;
        if bytes.len() % RECORD != 0 {
            return Err(Error::CifarTruncated {
                path: path.to_path_buf(),
                offset: (bytes.len() / RECORD * RECORD) as u64,
                len,
            });
        }
        for (i, record) in bytes.chunks_exact(RECORD).enumerate() {
            let label = record[0];
            if label > 9 {
                return Err(Error::CifarLabel {
                    path: path.to_path_buf(),
                    offset: (i * RECORD) as u64,
                    label,
                });
            }
            labels.push(i64::from(label));
            features.extend(record[1..].iter().map(|&b| f64::from(b) / 255.0));
        }
    }
    LabeledDataset::new(PIXELS, features, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(label: u8, fill: impl Fn(usize) -> u8) -> Vec<u8> {
        let mut r = vec![label];
        r.extend((0..PIXELS).map(fill));
        r
    }

    #[test]
    fn two_record_fixture() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("batch.bin");
        let mut bytes = record(4, |i| (i % 256) as u8);
        bytes.extend(record(0, |_| 0));
        std::fs::write(&p, &bytes).unwrap();
        let ds = load_cifar10(&[&p]).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.dim(), 3072);
        assert_eq!(ds.labels(), &[4, 0]);
        assert_eq!(ds.row(0)[255], 1.0);
        assert_eq!(ds.row(0)[1024], 0.0);
        assert_eq!(ds.row(0)[1025], 1.0 / 255.0);
        assert!(ds.row(1).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn truncated_record_names_offset() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("batch.bin");
        let mut bytes = record(1, |_| 7);
        bytes.extend_from_slice(&[2, 3, 4]);
        std::fs::write(&p, &bytes).unwrap();
        let err = load_cifar10(&[&p]).unwrap_err();
        assert!(matches!(err, Error::CifarTruncated { offset: 3073, .. }));
        assert!(err.to_string().contains("3073"));
    }

    #[test]
    fn bad_label() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("batch.bin");
        let mut bytes = record(1, |_| 0);
        bytes.extend(record(10, |_| 0));
        std::fs::write(&p, &bytes).unwrap();
        assert!(matches!(
            load_cifar10(&[&p]),
            Err(Error::CifarLabel {
                offset: 3073,
                label: 10,
                ..
            })
        ));
    }
}
