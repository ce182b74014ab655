//! The adversarial indistinguishability graph.
//!
//! With `N(x) = x + beta B` for a symmetric convex ball `B`, two points are
//! indistinguishable (their neighborhoods intersect) exactly when
//! `|x - x'|_B <= 2 beta`. Distances are computed once per task and ball and
//! then thresholded for every budget in a sweep.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::dataset::BinaryTask;
use crate::numerics::BallSpec;
use crate::{Error, Result};

/// `N(x) = x + beta B`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodSpec {
    pub ball: BallSpec,
    pub beta: f64,
}

impl NeighborhoodSpec {
    pub fn new(ball: BallSpec, beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "budget must be finite and >= 0, got {beta}"
            )));
        }
        Ok(NeighborhoodSpec { ball, beta })
    }
}

/// `k x k` cross-class distances; row `i` is class-pos sample `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    k: usize,
    dim: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_rows(k: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != k * k {
            return Err(Error::DimensionMismatch {
                expected: k * k,
                actual: data.len(),
            });
        }
        Ok(DistanceMatrix { k, dim, data })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Feature dimension of the task the distances came from.
    pub fn feature_dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.k + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Writes the cache format: `"ADVD"`, `k` as u64 LE, feature dimension
    /// as u32 LE, then `k*k` f64 LE row-major.
    pub fn write_cache(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::with_capacity(16 + 8 * self.data.len());
        buf.extend_from_slice(b"ADVD");
        buf.extend_from_slice(&(self.k as u64).to_le_bytes());
        buf.extend_from_slice(&(self.dim as u32).to_le_bytes());
        for v in &self.data {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        std::fs::File::create(path)
            .and_then(|mut f| f.write_all(&buf))
            .map_err(|e| Error::io(path, e))
    }

    pub fn read_cache(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut bytes = Vec::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| Error::io(path, e))?;
        let bad = |message: &str| Error::DistanceCache {
            path: path.to_path_buf(),
            message: message.to_string(),
        };
        if bytes.len() < 16 || &bytes[..4] != b"ADVD" {
            return Err(bad("missing ADVD header"));
        }
        let k = u64::from_le_bytes(bytes[4..12].try_into().unwrap()) as usize;
        let dim = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
        let body = &bytes[16..];
        if Some(body.len()) != k.checked_mul(k).and_then(|n| n.checked_mul(8)) {
            return Err(bad("payload length does not match k"));
        }
        let data = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(DistanceMatrix { k, dim, data })
    }
}

/// `D[i][j] = |pos_i - neg_j|_B`. Rows are computed in parallel; each entry
/// is an independent sequential sum, so the result does not depend on the
/// thread count.
pub fn pairwise_distances(task: &BinaryTask, ball: &BallSpec) -> Result<DistanceMatrix> {
    let k = task.k();
    let d = task.dim();
    if let BallSpec::Mahalanobis(s) = ball {
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: s.dim(),
            });
        }
    }
    let mut data = vec![0.0; k * k];
    data.par_chunks_mut(k).enumerate().for_each(|(i, out)| {
        let x = task.pos().row(i);
        let mut diff = vec![0.0; d];
        for (j, slot) in out.iter_mut().enumerate() {
            let y = task.neg().row(j);
            *slot = match ball {
                BallSpec::L2 => x
                    .iter()
                    .zip(y)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt(),
                BallSpec::L1 => x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum(),
                BallSpec::Linf => x
                    .iter()
                    .zip(y)
                    .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs())),
                BallSpec::Mahalanobis(_) => {
                    diff.iter_mut()
                        .zip(x.iter().zip(y))
                        .for_each(|(t, (a, b))| *t = a - b);
                    ball.norm_unchecked(&diff)
                }
            };
        }
    });
    Ok(DistanceMatrix { k, dim: d, data })
}

/// Bipartite adjacency between class-pos rows and class-neg columns, one bit
/// per pair. A set bit means zero adversarial cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndistGraph {
    k: usize,
    words: usize,
    bits: Vec<u64>,
}

impl IndistGraph {
    pub fn empty(k: usize) -> Self {
        let words = k.div_ceil(64);
        IndistGraph {
            k,
            words,
            bits: vec![0; k * words],
        }
    }

    pub fn from_fn(k: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Self::empty(k);
        for i in 0..k {
            for j in 0..k {
                if edge(i, j) {
                    g.set(i, j);
                }
            }
        }
        g
    }

    pub fn complete(k: usize) -> Self {
        Self::from_fn(k, |_, _| true)
    }

    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    /// Columns adjacent to row `i`, ascending.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.bits[i * self.words..(i + 1) * self.words];
        row.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + b)
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.k, |i, j| self.has_edge(j, i))
    }

    /// Every edge of `self` is an edge of `other`.
    pub fn is_subgraph_of(&self, other: &IndistGraph) -> bool {
        self.k == other.k && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }
}

/// Edge `(i, j)` iff `D[i][j] <= 2 beta`; the boundary counts because the
/// balls are closed.
pub fn threshold(distances: &DistanceMatrix, beta: f64) -> IndistGraph {
    let k = distances.k;
    let limit = 2.0 * beta;
    let mut g = IndistGraph::empty(k);
    g.bits
        .par_chunks_mut(g.words.max(1))
        .take(k)
        .enumerate()
        .for_each(|(i, row)| {
            for (j, &dij) in distances.data[i * k..(i + 1) * k].iter().enumerate() {
                if dij <= limit {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
        });
    g
}
