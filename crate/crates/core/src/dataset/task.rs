use super::LabeledDataset;
use crate::numerics::RngStream;
use crate::{Error, Result};

/// `k` feature vectors of a common dimension, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    dim: usize,
    data: Vec<f64>,
}

impl Samples {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidArgument(format!(
                "{} values do not form rows of dimension {dim}",
                data.len()
            )));
        }
        Ok(Samples { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.len(),
            });
        }
        Self::new(dim, rows.concat())
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    pub source: String,
    pub class_a: i64,
    pub class_b: i64,
    pub seed: Option<u64>,
}

/// Two equally sized classes: `pos` is the +1 class, `neg` the -1 class.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryTask {
    pos: Samples,
    neg: Samples,
    provenance: Provenance,
}

impl BinaryTask {
    pub fn new(pos: Samples, neg: Samples, provenance: Provenance) -> Result<Self> {
        if pos.is_empty() || pos.len() != neg.len() {
            return Err(Error::InvalidArgument(format!(
                "classes must be nonempty and equal in size (got {} and {})",
                pos.len(),
                neg.len()
            )));
        }
        if pos.dim() != neg.dim() {
            return Err(Error::DimensionMismatch {
                expected: pos.dim(),
                actual: neg.dim(),
            });
        }
        if pos
            .as_slice()
            .iter()
            .chain(neg.as_slice())
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidArgument("features must be finite".into()));
        }
        Ok(BinaryTask {
            pos,
            neg,
            provenance,
        })
    }

    /// Samples per class.
    pub fn k(&self) -> usize {
        self.pos.len()
    }

    pub fn dim(&self) -> usize {
        self.pos.dim()
    }

    pub fn pos(&self) -> &Samples {
        &self.pos
    }

    pub fn neg(&self) -> &Samples {
        &self.neg
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// The same task with the class roles exchanged.
    pub fn swapped(&self) -> Self {
        let p = &self.provenance;
        BinaryTask {
            pos: self.neg.clone(),
            neg: self.pos.clone(),
            provenance: Provenance {
                class_a: p.class_b,
                class_b: p.class_a,
                ..p.clone()
            },
        }
    }
}

/// Seeded uniform choice of `k` of the indices of `label`, returned sorted.
fn choose(data: &LabeledDataset, label: i64, k: usize, rng: &mut RngStream) -> Result<Vec<usize>> {
    let mut idx: Vec<usize> = (0..data.len())
        .filter(|&i| data.labels()[i] == label)
        .collect();
    if idx.len() < k {
        return Err(Error::InsufficientExamples {
            class: label,
            available: idx.len(),
            requested: k,
        });
    }
    // partial Fisher-Yates
    for i in 0..k {
        let j = i + rng.below(idx.len() - i);
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx.sort_unstable();
    Ok(idx)
}

/// Builds a balanced task of `k` examples each from `class_a` (+1) and
/// `class_b` (-1). The subsample depends only on the source order and the
/// seed, and keeps source order within each class.
pub fn make_binary_task(
    data: &LabeledDataset,
    class_a: i64,
    class_b: i64,
    k: usize,
    seed: u64,
) -> Result<BinaryTask> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let pick = |label, stream| -> Result<Samples> {
        let idx = choose(data, label, k, &mut RngStream::new(seed, stream))?;
        let mut rows = Vec::with_capacity(k * data.dim());
        for i in idx {
            rows.extend_from_slice(data.row(i));
        }
        Samples::new(data.dim(), rows)
    };
    let pos = pick(class_a, 0)?;
    let neg = pick(class_b, 1)?;
    BinaryTask::new(
        pos,
        neg,
        Provenance {
            source: String::new(),
            class_a,
            class_b,
            seed: Some(seed),
        },
    )
}

/// `k` draws each from `N(mu, I)` (+1) and `N(-mu, I)` (-1).
pub fn gaussian_mixture_task(mu: &[f64], k: usize, seed: u64) -> Result<BinaryTask> {
    let d = mu.len();
    let draw = |sign: f64, stream| -> Result<Samples> {
        let mut rng = RngStream::new(seed, stream);
        let mut data = vec![0.0; k * d];
        for row in data.chunks_exact_mut(d.max(1)) {
            rng.fill_gaussian(row);
            row.iter_mut().zip(mu).for_each(|(x, m)| *x += sign * m);
        }
        Samples::new(d, data)
    };
    BinaryTask::new(
        draw(1.0, 0)?,
        draw(-1.0, 1)?,
        Provenance {
            source: "gaussian-mixture".into(),
            class_a: 1,
            class_b: -1,
            seed: Some(seed),
        },
    )
}
