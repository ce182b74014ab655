//! Exact adversarial robustness for a symmetric Gaussian mixture.
//!
//! Classes are `N(mu, Sigma)` and `N(-mu, Sigma)` with equal priors, and the
//! adversary moves each point within `beta B`. The optimal loss is
//! `Q(alpha*)`, where
//!
//! ```text
//! alpha*(beta, mu) = min { |mu - z|_Sigma : |z|_B <= beta },   |y|_Sigma = sqrt(y^T Sigma^{-1} y)
//! ```
//!
//! A solution comes with a certificate `(z, y, w, gamma)`: `z` is the
//! adversary's optimal translation and `w` the normal of an optimal linear
//! classifier. Translating both classes by `z` gives a transport plan of
//! cost `1 - 2 Q(alpha)`, and `sgn(w^T x)` attains loss `Q(alpha)`, so the
//! two bounds meet.

use crate::numerics::{dot, q_function, BallSpec, SpdMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianProblem {
    pub mu: Vec<f64>,
    pub sigma: SpdMatrix,
    pub ball: BallSpec,
    pub beta: f64,
}

impl GaussianProblem {
    pub fn new(mu: Vec<f64>, sigma: SpdMatrix, ball: BallSpec, beta: f64) -> Result<Self> {
        if mu.len() != sigma.dim() {
            return Err(Error::DimensionMismatch {
                expected: sigma.dim(),
                actual: mu.len(),
            });
        }
        if let BallSpec::Mahalanobis(s) = &ball {
            if s.dim() != mu.len() {
                return Err(Error::DimensionMismatch {
                    expected: mu.len(),
                    actual: s.dim(),
                });
            }
        }
        if mu.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("mean must be finite".into()));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "budget must be finite and >= 0, got {beta}"
            )));
        }
        Ok(GaussianProblem {
            mu,
            sigma,
            ball,
            beta,
        })
    }

    /// Identity covariance.
    pub fn isotropic(mu: Vec<f64>, ball: BallSpec, beta: f64) -> Result<Self> {
        let d = mu.len();
        Self::new(mu, SpdMatrix::identity(d), ball, beta)
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.mu.clone(), self.sigma.clone(), self.ball.clone(), beta)
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    /// The adversary's ball is the covariance ellipsoid.
    pub fn is_matching_norm(&self) -> bool {
        match &self.ball {
            BallSpec::Mahalanobis(s) => s == &self.sigma,
            BallSpec::L2 => self.sigma.is_identity(),
            _ => false,
        }
    }
}

/// The complementary-slackness quantities, all zero at an exact solution:
/// `|y|_Sigma - alpha`, `|z|_B - beta`, `|w|_{Sigma*} - 1`, `|w|_{B*} - gamma`,
/// `w^T y - alpha`, `w^T z - beta gamma` (absolute values).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals(pub [f64; 6]);

impl Residuals {
    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaCertificate {
    pub alpha: f64,
    pub z: Vec<f64>,
    /// Always `mu - z`.
    pub y: Vec<f64>,
    /// `None` when `y = 0`: then `alpha = 0` and no normalized `w` exists.
    pub w: Option<Vec<f64>>,
    pub gamma: f64,
    pub residuals: Residuals,
    /// `|alpha - (mu^T w - beta gamma)|`; bounds the error in `alpha`.
    pub duality_gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl AlphaCertificate {
    pub fn is_degenerate(&self) -> bool {
        self.w.is_none()
    }

    /// Residuals within `tol (1 + alpha)`. A degenerate certificate instead
    /// needs `alpha = 0`, `y = 0` and a feasible `z`.
    pub fn is_valid(&self, problem: &GaussianProblem, tol: f64) -> bool {
        let scale = tol * (1.0 + self.alpha.abs());
        let sums_to_mu = self
            .y
            .iter()
            .zip(&self.z)
            .zip(&problem.mu)
            .all(|((y, z), m)| *y == m - z);
        if !sums_to_mu || self.alpha < 0.0 {
            return false;
        }
        match self.w {
            Some(_) => self.residuals.max() <= scale,
            None => {
                self.alpha == 0.0
                    && self.y.iter().all(|&v| v == 0.0)
                    && problem.ball.norm_unchecked(&self.z) <= problem.beta * (1.0 + tol)
            }
        }
    }
}

/// Builds the certificate for a candidate `z`, taking
/// `w = Sigma^{-1} y / |y|_Sigma` and `gamma = |w|_{B*}`.
fn certify(
    problem: &GaussianProblem,
    z: Vec<f64>,
    w_override: Option<Vec<f64>>,
) -> AlphaCertificate {
    let y: Vec<f64> = problem.mu.iter().zip(&z).map(|(m, zi)| m - zi).collect();
    let alpha = problem.sigma.inv_quad_form(&y).sqrt();
    let w = w_override.or_else(|| {
        (alpha > 0.0).then(|| {
            let mut w = problem.sigma.solve(&y);
            w.iter_mut().for_each(|v| *v /= alpha);
            w
        })
    });
    let (gamma, residuals, gap) = match &w {
        Some(w) => {
            let gamma = problem.ball.dual_norm_unchecked(w);
            let wz = dot(w, &z);
            let r = [
                0.0,
                (problem.ball.norm_unchecked(&z) - problem.beta).abs(),
                (problem.sigma.quad_form(w).max(0.0).sqrt() - 1.0).abs(),
                0.0,
                (dot(w, &y) - alpha).abs(),
                (wz - problem.beta * gamma).abs(),
            ];
            let gap = (alpha - (dot(w, &problem.mu) - problem.beta * gamma)).abs();
            (gamma, Residuals(r), gap)
        }
        None => (0.0, Residuals([0.0; 6]), 0.0),
    };
    AlphaCertificate {
        alpha,
        z,
        y,
        w,
        gamma,
        residuals,
        duality_gap: gap,
        iterations: 0,
        converged: true,
    }
}

/// Certificate for `mu` inside `beta B`: the adversary erases the signal.
fn erased(problem: &GaussianProblem) -> AlphaCertificate {
    AlphaCertificate {
        alpha: 0.0,
        z: problem.mu.clone(),
        y: vec![0.0; problem.dim()],
        w: None,
        gamma: 0.0,
        residuals: Residuals([0.0; 6]),
        duality_gap: 0.0,
        iterations: 0,
        converged: true,
    }
}

/// Closed form when `B` is the unit ball of `|.|_Sigma`:
/// `alpha = (|mu|_Sigma - beta)+`, `z = beta mu / |mu|_Sigma`.
pub fn alpha_star_matching_norm(problem: &GaussianProblem) -> Result<AlphaCertificate> {
    if !problem.is_matching_norm() {
        return Err(Error::InvalidArgument(
            "closed form needs the ball to be the covariance ellipsoid".into(),
        ));
    }
    let norm = problem.sigma.inv_quad_form(&problem.mu).sqrt();
    if norm <= problem.beta {
        return Ok(erased(problem));
    }
    let z: Vec<f64> = problem.mu.iter().map(|m| problem.beta * m / norm).collect();
    let mut w = problem.sigma.solve(&problem.mu);
    w.iter_mut().for_each(|v| *v /= norm);
    let mut cert = certify(problem, z, Some(w));
    cert.alpha = norm - problem.beta;
    cert.residuals.0[0] = (problem.sigma.inv_quad_form(&cert.y).sqrt() - cert.alpha).abs();
    cert.residuals.0[4] = (dot(cert.w.as_ref().unwrap(), &cert.y) - cert.alpha).abs();
    Ok(cert)
}

/// Closed form for `Sigma = I` and the `l_inf` ball: each coordinate of the
/// mean is shrunk towards zero by at most `beta`.
pub fn alpha_star_linf_explicit(problem: &GaussianProblem) -> Result<AlphaCertificate> {
    if problem.ball != BallSpec::Linf || !problem.sigma.is_identity() {
        return Err(Error::InvalidArgument(
            "explicit l_inf solution needs identity covariance and the l_inf ball".into(),
        ));
    }
    let beta = problem.beta;
    let z: Vec<f64> = problem
        .mu
        .iter()
        .map(|&m| m.signum() * m.abs().min(beta))
        .collect();
    Ok(certify(problem, z, None))
}

/// Projected gradient descent on `f(z) = (mu - z)^T Sigma^{-1} (mu - z)` over
/// `beta B` with step `1/L`, `L` the largest eigenvalue of `2 Sigma^{-1}`.
/// Stops once the certificate residuals are within `tol (1 + alpha)`;
/// otherwise returns the iterate with the smallest duality gap, flagged as
/// not converged.
pub fn alpha_star_generic(
    problem: &GaussianProblem,
    tol: f64,
    max_iters: usize,
) -> Result<AlphaCertificate> {
    let ball = &problem.ball;
    if ball.norm_unchecked(&problem.mu) <= problem.beta {
        return Ok(erased(problem));
    }
    if problem.beta == 0.0 {
        return Ok(certify(problem, vec![0.0; problem.dim()], None));
    }
    // Rayleigh quotients approach the top eigenvalue from below
    let lipschitz = 2.0 * problem.sigma.max_eigenvalue_of_inverse() * (1.0 + 1e-6);
    let step = 1.0 / lipschitz;

    let mut z = ball.project_unchecked(&problem.mu, problem.beta);
    let mut best: Option<AlphaCertificate> = None;
    for iter in 0..=max_iters {
        let mut cert = certify(problem, z.clone(), None);
        cert.iterations = iter;
        let done = cert.w.is_some() && cert.residuals.max() <= tol * (1.0 + cert.alpha);
        if done {
            return Ok(cert);
        }
        if best
            .as_ref()
            .is_none_or(|b| cert.duality_gap < b.duality_gap)
        {
            best = Some(cert);
        }
        if iter == max_iters {
            break;
        }
        // z <- P(z - step * grad f),  grad f = -2 Sigma^{-1} (mu - z)
        let y: Vec<f64> = problem.mu.iter().zip(&z).map(|(m, zi)| m - zi).collect();
        let g = problem.sigma.solve(&y);
        let moved: Vec<f64> = z
            .iter()
            .zip(&g)
            .map(|(zi, gi)| zi + 2.0 * step * gi)
            .collect();
        z = ball.project_unchecked(&moved, problem.beta);
    }
    let mut cert = best.expect("at least one iterate");
    cert.converged = false;
    log::debug!(
        "alpha* solver stopped after {max_iters} iterations with gap {:e}",
        cert.duality_gap
    );
    Ok(cert)
}

/// Default tolerance and iteration cap for [`alpha_star`].
pub const GENERIC_TOL: f64 = 1e-6;
pub const GENERIC_MAX_ITERS: usize = 100_000;

/// Closed form when one applies, otherwise the iterative solver.
pub fn alpha_star(problem: &GaussianProblem) -> Result<AlphaCertificate> {
    alpha_star_with(problem, GENERIC_TOL, GENERIC_MAX_ITERS)
}

/// [`alpha_star`] with explicit settings for the iterative solver.
pub fn alpha_star_with(
    problem: &GaussianProblem,
    tol: f64,
    max_iters: usize,
) -> Result<AlphaCertificate> {
    if problem.is_matching_norm() {
        alpha_star_matching_norm(problem)
    } else if problem.ball == BallSpec::Linf && problem.sigma.is_identity() {
        alpha_star_linf_explicit(problem)
    } else {
        alpha_star_generic(problem, tol, max_iters)
    }
}

/// Minimum adversarial 0-1 loss, `Q(alpha)`.
pub fn optimal_adv_loss(alpha: f64) -> f64 {
    q_function(alpha)
}

/// Transport cost paired with [`optimal_adv_loss`], `1 - 2 Q(alpha)`.
pub fn optimal_transport_cost(alpha: f64) -> f64 {
    1.0 - 2.0 * q_function(alpha)
}

/// Total variation between `N(m, Sigma)` and `N(-m, Sigma)`.
pub fn tv_gaussians_symmetric(mu_eff: &[f64], sigma: &SpdMatrix) -> Result<f64> {
    let n = crate::numerics::sigma_seminorm(mu_eff, sigma)?;
    Ok(optimal_transport_cost(n))
}

/// Cost of the coupling that translates class +1 by `-z` and class -1 by
/// `+z`, then pairs in place: an upper bound on the adversarial transport
/// cost for every feasible `z`.
pub fn translate_and_pair_upper_bound(problem: &GaussianProblem, z: &[f64]) -> Result<f64> {
    let zn = problem.ball.norm(z)?;
    if zn > problem.beta * (1.0 + 1e-9) {
        return Err(Error::InvalidArgument(format!(
            "translation has norm {zn}, exceeding the budget {}",
            problem.beta
        )));
    }
    let shifted: Vec<f64> = problem.mu.iter().zip(z).map(|(m, zi)| m - zi).collect();
    tv_gaussians_symmetric(&shifted, &problem.sigma)
}

/// Adversarial 0-1 loss of `x -> sgn(w^T x)`: the adversary subtracts
/// `beta |w|_{B*}` from every margin, so the loss is
/// `Q((w^T mu - beta |w|_{B*}) / sqrt(w^T Sigma w))`. `1 - 2 loss` lower
/// bounds the transport cost.
pub fn linear_classifier_adv_loss(problem: &GaussianProblem, w: &[f64]) -> Result<f64> {
    let dual = problem.ball.dual_norm(w)?;
    if w.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidArgument(
            "classifier normal must be nonzero".into(),
        ));
    }
    let spread = crate::numerics::sigma_dual_norm(w, &problem.sigma)?;
    let margin = dot(w, &problem.mu) - problem.beta * dual;
    Ok(q_function(margin / spread))
}
