//! Optimal 0/1 transport between two empirical distributions.
//!
//! With uniform weights on `k` points per class and costs in `{0, 1}`, the
//! optimal coupling is a perfect matching and its cost is the number of
//! pairs it is forced to put on cost-1 pairs: `k - M` where `M` is a maximum
//! matching of the zero-cost graph. König's theorem supplies a vertex cover
//! of size `M`, which gives `{0, 1}`-valued dual potentials that certify it.

use std::collections::VecDeque;

use crate::cost::{IndistGraph, NeighborhoodSpec};
use crate::dataset::BinaryTask;
use crate::{Error, Result};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingResult {
    /// Column matched to each row.
    pub row_match: Vec<Option<usize>>,
    /// Row matched to each column.
    pub col_match: Vec<Option<usize>>,
    pub size: usize,
}

impl MatchingResult {
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.row_match
            .iter()
            .enumerate()
            .filter_map(|(i, m)| m.map(|j| (i, j)))
    }
}

/// Transport cost between the two classes and the induced minimum loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessBound {
    /// `(k - M) / k`.
    pub transport_cost: f64,
    /// `M / (2k)`: no classifier has adversarial 0-1 loss below this.
    pub min_loss: f64,
    pub matching_size: usize,
    pub k: usize,
}

/// Potentials `f` on class-pos samples and `g` on class-neg samples with
/// `g(j) - f(i) <= cost(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessPotentials {
    pub f: Vec<u8>,
    pub g: Vec<u8>,
}

impl WitnessPotentials {
    /// `sum(g) - sum(f)`, the dual objective scaled by `k`.
    pub fn dual_numerator(&self) -> i64 {
        let sg: i64 = self.g.iter().map(|&v| i64::from(v)).sum();
        let sf: i64 = self.f.iter().map(|&v| i64::from(v)).sum();
        sg - sf
    }

    pub fn dual_value(&self) -> f64 {
        self.dual_numerator() as f64 / self.f.len() as f64
    }

    /// Checks `g(j) - f(i) <= cost(i, j)` over all `k^2` pairs.
    pub fn is_admissible(&self, graph: &IndistGraph) -> bool {
        let k = graph.k();
        (0..k).all(|i| {
            (0..k).all(|j| {
                let cost = i32::from(!graph.has_edge(i, j));
                i32::from(self.g[j]) - i32::from(self.f[i]) <= cost
            })
        })
    }
}

/// Maximum-cardinality matching by Hopcroft-Karp. Rows and adjacency are
/// visited in index order, so the result is a function of the graph alone.
pub fn max_matching(graph: &IndistGraph) -> MatchingResult {
    let k = graph.k();
    let adj: Vec<Vec<usize>> = (0..k).map(|i| graph.neighbors(i).collect()).collect();
    let mut row_match = vec![NONE; k];
    let mut col_match = vec![NONE; k];
    let mut dist = vec![NONE; k];
    let mut next_edge = vec![0usize; k];
    let mut queue = VecDeque::with_capacity(k);
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    let mut size = 0;

    loop {
        // layer the rows by alternating BFS from the free rows
        queue.clear();
        for i in 0..k {
            if row_match[i] == NONE {
                dist[i] = 0;
                queue.push_back(i);
            } else {
                dist[i] = NONE;
            }
        }
        let mut reachable_free_col = false;
        while let Some(u) = queue.pop_front() {
            for &j in &adj[u] {
                let r = col_match[j];
                if r == NONE {
                    reachable_free_col = true;
                } else if dist[r] == NONE {
                    dist[r] = dist[u] + 1;
                    queue.push_back(r);
                }
            }
        }
        if !reachable_free_col {
            break;
        }

        // vertex-disjoint shortest augmenting paths by layered DFS
        next_edge.iter_mut().for_each(|e| *e = 0);
        for s in 0..k {
            if row_match[s] != NONE {
                continue;
            }
            rows.clear();
            cols.clear();
            rows.push(s);
            while let Some(&u) = rows.last() {
                if next_edge[u] == adj[u].len() {
                    dist[u] = NONE;
                    rows.pop();
                    cols.pop();
                    continue;
                }
                let j = adj[u][next_edge[u]];
                next_edge[u] += 1;
                let r = col_match[j];
                if r == NONE {
                    cols.push(j);
                    for (&row, &col) in rows.iter().zip(&cols) {
                        row_match[row] = col;
                        col_match[col] = row;
                    }
                    size += 1;
                    break;
                }
                if dist[r] != NONE && dist[r] == dist[u] + 1 {
                    cols.push(j);
                    rows.push(r);
                }
            }
        }
    }

    let wrap = |v: Vec<usize>| v.into_iter().map(|x| (x != NONE).then_some(x)).collect();
    MatchingResult {
        row_match: wrap(row_match),
        col_match: wrap(col_match),
        size,
    }
}

/// Bound from a matching of size `m` on `k` points per class.
pub fn transport_cost(m: usize, k: usize) -> Result<RobustnessBound> {
    if k == 0 || m > k {
        return Err(Error::InvalidArgument(format!(
            "matching size {m} must be at most k = {k} (k >= 1)"
        )));
    }
    Ok(RobustnessBound {
        transport_cost: (k - m) as f64 / k as f64,
        min_loss: m as f64 / (2 * k) as f64,
        matching_size: m,
        k,
    })
}

/// Convenience: matching plus bound.
pub fn robustness_bound(graph: &IndistGraph) -> Result<RobustnessBound> {
    transport_cost(max_matching(graph).size, graph.k())
}

/// Minimum number of cost-1 pairs over all `k!` perfect pairings.
/// Exhaustive; meant as an independent check for small graphs.
pub fn brute_force_min_cost(graph: &IndistGraph) -> Result<usize> {
    let k = graph.k();
    if k > 10 {
        return Err(Error::InvalidArgument(format!(
            "brute force limited to k <= 10, got {k}"
        )));
    }
    fn search(graph: &IndistGraph, row: usize, used: &mut [bool], cost: usize, best: &mut usize) {
        if cost >= *best {
            return;
        }
        if row == used.len() {
            *best = cost;
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                let c = usize::from(!graph.has_edge(row, j));
                search(graph, row + 1, used, cost + c, best);
                used[j] = false;
            }
        }
    }
    let mut best = usize::MAX;
    search(graph, 0, &mut vec![false; k], 0, &mut best);
    Ok(if k == 0 { 0 } else { best })
}

/// Average cost of the cheapest perfect pairing, `brute_force_min_cost / k`.
pub fn brute_force_min_weight(graph: &IndistGraph) -> Result<f64> {
    let c = brute_force_min_cost(graph)?;
    Ok(c as f64 / graph.k().max(1) as f64)
}

/// König potentials from a maximum matching.
///
/// `R` is the set of rows reachable from unmatched rows by alternating paths
/// and `Z` the columns reached on the way; `(rows \ R) + Z` is a minimum
/// vertex cover. Rows in `R` and columns outside `Z` are mutually
/// non-adjacent, so a classifier can be robustly correct on all of them:
/// `f(i) = 1[i not in R]`, `g(j) = 1[j not in Z]`.
pub fn witness_potentials(
    graph: &IndistGraph,
    matching: &MatchingResult,
) -> Result<WitnessPotentials> {
    let k = graph.k();
    let mut row_seen = vec![false; k];
    let mut col_seen = vec![false; k];
    let mut queue: VecDeque<usize> = (0..k)
        .filter(|&i| matching.row_match[i].is_none())
        .collect();
    for &i in &queue {
        row_seen[i] = true;
    }
    while let Some(i) = queue.pop_front() {
        for j in graph.neighbors(i) {
            if col_seen[j] {
                continue;
            }
            col_seen[j] = true;
            if let Some(r) = matching.col_match[j] {
                if !row_seen[r] {
                    row_seen[r] = true;
                    queue.push_back(r);
                }
            }
        }
    }
    let potentials = WitnessPotentials {
        f: row_seen.iter().map(|&s| u8::from(!s)).collect(),
        g: col_seen.iter().map(|&s| u8::from(!s)).collect(),
    };
    if potentials.dual_numerator() != (k - matching.size) as i64 {
        return Err(Error::NotMaximum {
            matching: matching.size,
        });
    }
    Ok(potentials)
}

/// Demonstration classifier induced by witness potentials.
///
/// The anchors are the class-pos samples with `f = 0` and the class-neg
/// samples with `g = 1`; no anchor pair is within `2 beta`, so labelling each
/// anchor with its class is robustly correct on all of them. A new point gets
/// the label of the nearest anchor under the ball norm, ties going to `+1`.
/// Returns `+1` or `-1`.
pub fn classify_with_witness(
    potentials: &WitnessPotentials,
    x_new: &[f64],
    task: &BinaryTask,
    spec: &NeighborhoodSpec,
) -> Result<i8> {
    if x_new.len() != task.dim() {
        return Err(Error::DimensionMismatch {
            expected: task.dim(),
            actual: x_new.len(),
        });
    }
    let nearest = |rows: &mut dyn Iterator<Item = &[f64]>| -> Result<f64> {
        let mut best = f64::INFINITY;
        let mut diff = vec![0.0; x_new.len()];
        for row in rows {
            diff.iter_mut()
                .zip(row.iter().zip(x_new))
                .for_each(|(t, (a, b))| *t = b - a);
            best = best.min(spec.ball.norm(&diff)?);
        }
        Ok(best)
    };
    let d_pos = nearest(
        &mut (0..task.k())
            .filter(|&i| potentials.f[i] == 0)
            .map(|i| task.pos().row(i)),
    )?;
    let d_neg = nearest(
        &mut (0..task.k())
            .filter(|&j| potentials.g[j] == 1)
            .map(|j| task.neg().row(j)),
    )?;
    Ok(if d_pos <= d_neg { 1 } else { -1 })
}
