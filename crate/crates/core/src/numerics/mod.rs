//! Scalar and vector numerics shared by the bound engines.

mod ball;
mod erfc;
mod linalg;
mod rng;

pub use ball::BallSpec;
pub use erfc::{erfc, q_function};
pub use linalg::{dot, SpdMatrix};
pub use rng::RngStream;

use crate::{Error, Result};

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

/// `sqrt(y^T Sigma^{-1} y)`, evaluated with a triangular solve.
pub fn sigma_seminorm(y: &[f64], sigma: &SpdMatrix) -> Result<f64> {
    check_dim(sigma.dim(), y.len())?;
    Ok(sigma.inv_quad_form(y).sqrt())
}

/// The norm dual to `sigma_seminorm`: `sqrt(w^T Sigma w)`.
pub fn sigma_dual_norm(w: &[f64], sigma: &SpdMatrix) -> Result<f64> {
    check_dim(sigma.dim(), w.len())?;
    Ok(sigma.quad_form(w).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn seminorm_examples() {
        let id = SpdMatrix::identity(2);
        assert_eq!(sigma_seminorm(&[1.0, 0.0], &id).unwrap(), 1.0);
        assert_eq!(sigma_seminorm(&[0.0, 0.0], &id).unwrap(), 0.0);
        let s = SpdMatrix::diagonal(&[4.0, 1.0]).unwrap();
        assert_eq!(sigma_seminorm(&[2.0, 0.0], &s).unwrap(), 1.0);
        assert!(matches!(
            sigma_seminorm(&[1.0], &s),
            Err(Error::DimensionMismatch {
                expected: 2,
                actual: 1
            })
        ));
    }

    proptest! {
        #[test]
        fn identity_seminorm_is_euclidean(y in prop::collection::vec(-100.0f64..100.0, 1..12)) {
            let id = SpdMatrix::identity(y.len());
            let l2 = dot(&y, &y).sqrt();
            prop_assert!((sigma_seminorm(&y, &id).unwrap() - l2).abs() <= 1e-14 * (1.0 + l2));
        }
    }
}
