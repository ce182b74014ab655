//! Lower bounds on adversarial 0-1 loss for binary classification.
//!
//! The minimum adversarial loss achievable by *any* classifier against a
//! norm-bounded evasion adversary equals `(1 - C) / 2`, where `C` is an
//! optimal-transport cost between the two class-conditional distributions
//! under a 0/1 "indistinguishability" cost. This crate computes that cost in
//! three settings:
//!
//! - [`matching`]: empirical distributions, where the transport problem
//!   reduces to maximum bipartite matching on the graph built by [`cost`]
//!   from a dataset loaded by [`dataset`].
//! - [`gaussian`]: a symmetric Gaussian mixture, where the cost is
//!   `1 - 2 Q(alpha*)` and `alpha*` solves a small convex program.
//! - [`bayes`]: the expected loss of the best learning rule when the Gaussian
//!   mean has an isotropic Gaussian prior.

pub mod bayes;
pub mod cost;
pub mod dataset;
pub mod error;
pub mod gaussian;
pub mod matching;
pub mod numerics;

pub use error::{Error, Result};
