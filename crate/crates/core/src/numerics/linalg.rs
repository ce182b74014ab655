use crate::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower Cholesky factor of a dense row-major matrix, or the failing pivot.
pub(crate) fn cholesky(dim: usize, a: &[f64]) -> Result<Vec<f64>> {
    let mut l = vec![0.0; dim * dim];
    for j in 0..dim {
        let row_j = &l[j * dim..j * dim + j];
        let diag = a[j * dim + j] - row_j.iter().map(|v| v * v).sum::<f64>();
        if !(diag.is_finite() && diag > 0.0) {
            return Err(Error::NotPositiveDefinite {
                index: j,
                pivot: diag,
            });
        }
        let ljj = diag.sqrt();
        l[j * dim + j] = ljj;
        for i in j + 1..dim {
            let s: f64 = (0..j).map(|k| l[i * dim + k] * l[j * dim + k]).sum();
            l[i * dim + j] = (a[i * dim + j] - s) / ljj;
        }
    }
    Ok(l)
}

/// Solves `L u = b` in place for lower-triangular `L`.
pub(crate) fn forward_solve(dim: usize, l: &[f64], b: &mut [f64]) {
    for i in 0..dim {
        let s: f64 = (0..i).map(|k| l[i * dim + k] * b[k]).sum();
        b[i] = (b[i] - s) / l[i * dim + i];
    }
}

/// Solves `L^T x = b` in place for lower-triangular `L`.
pub(crate) fn backward_solve(dim: usize, l: &[f64], b: &mut [f64]) {
    for i in (0..dim).rev() {
        let s: f64 = (i + 1..dim).map(|k| l[k * dim + i] * b[k]).sum();
        b[i] = (b[i] - s) / l[i * dim + i];
    }
}

pub(crate) fn mat_vec(dim: usize, a: &[f64], v: &[f64]) -> Vec<f64> {
    a.chunks_exact(dim).map(|row| dot(row, v)).collect()
}

/// Dense symmetric positive-definite matrix with its Cholesky factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    dim: usize,
    data: Vec<f64>,
    chol: Vec<f64>,
}

impl SpdMatrix {
    /// Validates symmetry (relative 1e-12) and factorizes.
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "matrix dimension must be positive".into(),
            ));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        let scale = data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..dim {
            for j in i + 1..dim {
                let (a, b) = (data[i * dim + j], data[j * dim + i]);
                if (a - b).abs() > 1e-12 * scale {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        let chol = cholesky(dim, &data)?;
        Ok(SpdMatrix { dim, data, chol })
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim]).expect("identity is SPD")
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        let mut data = vec![0.0; dim * dim];
        for (i, &v) in diag.iter().enumerate() {
            data[i * dim + i] = v;
        }
        Self::new(dim, data)
    }

    /// `A A^T / d + I / 2` for a standard Gaussian `d x d` matrix `A`:
    /// random, with eigenvalues concentrated in roughly `[0.5, 4.5]`.
    pub fn random(dim: usize, rng: &mut super::RngStream) -> Self {
        let mut a = vec![0.0; dim * dim];
        rng.fill_gaussian(&mut a);
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..=i {
                let v = dot(&a[i * dim..(i + 1) * dim], &a[j * dim..(j + 1) * dim]) / dim as f64;
                data[i * dim + j] = v;
                data[j * dim + i] = v;
            }
            data[i * dim + i] += 0.5;
        }
        Self::new(dim, data).expect("shifted Gram matrix is SPD")
    }

    pub fn is_identity(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| self.data[i * self.dim + j] == if i == j { 1.0 } else { 0.0 })
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        mat_vec(self.dim, &self.data, v)
    }

    /// `A^{-1} b` via two triangular solves.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        forward_solve(self.dim, &self.chol, &mut x);
        backward_solve(self.dim, &self.chol, &mut x);
        x
    }

    /// `v^T A v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        dot(v, &self.mul_vec(v))
    }

    /// `v^T A^{-1} v`, as `|L^{-1} v|^2`.
    pub fn inv_quad_form(&self, v: &[f64]) -> f64 {
        let mut u = v.to_vec();
        forward_solve(self.dim, &self.chol, &mut u);
        dot(&u, &u)
    }

    /// Largest eigenvalue of `A^{-1}` by power iteration.
    pub fn max_eigenvalue_of_inverse(&self) -> f64 {
        self.power_iteration(|v| self.solve(v))
    }

    /// Largest eigenvalue of `A` by power iteration.
    pub fn max_eigenvalue(&self) -> f64 {
        self.power_iteration(|v| self.mul_vec(v))
    }

    fn power_iteration(&self, apply: impl Fn(&[f64]) -> Vec<f64>) -> f64 {
        let n = self.dim;
        // deterministic start with no symmetry that could hide an eigenvector
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + (i as f64 * 0.618_034).fract())
            .collect();
        normalize(&mut v);
        let mut lambda = 0.0;
        for _ in 0..10_000 {
            let mut next = apply(&v);
            let rayleigh = dot(&v, &next);
            normalize(&mut next);
            let done = (rayleigh - lambda).abs() <= 1e-12 * rayleigh.abs();
            lambda = rayleigh;
            v = next;
            if done {
                break;
            }
        }
        lambda
    }
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric_and_indefinite() {
        assert!(matches!(
            SpdMatrix::new(2, vec![1.0, 0.5, 0.4, 1.0]),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(matches!(
            SpdMatrix::new(2, vec![1.0, 2.0, 2.0, 1.0]),
            Err(Error::NotPositiveDefinite { index: 1, .. })
        ));
        assert!(matches!(
            SpdMatrix::new(2, vec![1.0; 3]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn solve_and_quadratic_forms() {
        let a = SpdMatrix::new(2, vec![4.0, 2.0, 2.0, 3.0]).unwrap();
        let x = a.solve(&[2.0, 1.0]);
        let back = a.mul_vec(&x);
        assert!((back[0] - 2.0).abs() < 1e-14 && (back[1] - 1.0).abs() < 1e-14);
        // [1,1] A^{-1} [1,1] = (3 - 2 - 2 + 4) / 8
        assert!((a.inv_quad_form(&[1.0, 1.0]) - 3.0 / 8.0).abs() < 1e-15);
        assert_eq!(a.quad_form(&[1.0, 1.0]), 11.0);
    }

    #[test]
    fn power_iteration_eigenvalues() {
        let a = SpdMatrix::diagonal(&[4.0, 0.5, 2.0]).unwrap();
        assert!((a.max_eigenvalue() - 4.0).abs() < 1e-9);
        assert!((a.max_eigenvalue_of_inverse() - 2.0).abs() < 1e-9);
    }
}
