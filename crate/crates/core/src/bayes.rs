//! Minimum expected loss of any learning rule for the Gaussian model with a
//! prior on the mean.
//!
//! The mean is drawn as `mu ~ N(0, I/m)` and the learner sees `n` labelled
//! samples from `N(y mu, I)`. Given the data, the next example is a
//! symmetric Gaussian problem with mean equal to the posterior mean
//! `mu_hat ~ N(0, I / rho^2)`, `rho^2 = m (m + n) / n`, so the best
//! achievable expected loss is `E[Q(alpha*(beta, mu_hat))]`. Two Monte-Carlo
//! estimators are provided for it, one averaging `Q` over posterior means and
//! one counting membership of a standard normal vector `(X, T)` in
//! `S(rho, beta rho) = {(x, t) : t >= 0, x in t rho A + beta rho B}` with
//! `A` the Euclidean unit ball. They agree in distribution by a change of
//! variables and serve as checks on each other.

use rayon::prelude::*;

use crate::gaussian::{alpha_star_generic, GaussianProblem, GENERIC_MAX_ITERS, GENERIC_TOL};
use crate::numerics::{q_function, BallSpec, RngStream};
use crate::{Error, Result};

/// Trials per independently seeded chunk.
const CHUNK: usize = 4096;

const POSTERIOR_STREAMS: u64 = 0;
const MEMBERSHIP_STREAMS: u64 = 1 << 40;
const SCHMIDT_STREAMS: u64 = 2 << 40;

pub const DEFAULT_TRIALS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BayesSetup {
    pub d: usize,
    /// Prior precision: `mu ~ N(0, I/m)`.
    pub m: f64,
    /// Training samples.
    pub n: u64,
    pub ball: BallSpec,
    pub beta: f64,
}

impl BayesSetup {
    pub fn new(d: usize, m: f64, n: u64, ball: BallSpec, beta: f64) -> Result<Self> {
        let valid_m = m.is_finite() && m > 0.0;
        let valid_beta = beta.is_finite() && beta >= 0.0;
        if d == 0 || n == 0 || !valid_m || !valid_beta {
            return Err(Error::InvalidArgument(format!(
                "need d >= 1, m > 0, n >= 1, beta >= 0 (got d={d}, m={m}, n={n}, beta={beta})"
            )));
        }
        if let BallSpec::Mahalanobis(s) = &ball {
            if s.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: s.dim(),
                });
            }
        }
        Ok(BayesSetup {
            d,
            m,
            n,
            ball,
            beta,
        })
    }

    pub fn rho(&self) -> f64 {
        rho_unchecked(self.m, self.n as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub trials: usize,
    pub seed: u64,
}

impl McEstimate {
    fn indicator(hits: f64, trials: usize, seed: u64) -> Self {
        let p = hits / trials as f64;
        McEstimate {
            value: p,
            standard_error: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
            seed,
        }
    }

    fn average(sum: f64, sum_sq: f64, trials: usize, seed: u64) -> Self {
        let n = trials as f64;
        let mean = sum / n;
        let var = if trials > 1 {
            ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        McEstimate {
            value: mean,
            standard_error: (var / n).sqrt(),
            trials,
            seed,
        }
    }

    fn scaled(self, c: f64) -> Self {
        McEstimate {
            value: c * self.value,
            standard_error: c * self.standard_error,
            ..self
        }
    }
}

fn rho_unchecked(m: f64, n: f64) -> f64 {
    (m * (m + n) / n).sqrt()
}

/// `sqrt(m (m + n) / n)`.
pub fn rho(m: f64, n: f64) -> Result<f64> {
    if !(m.is_finite() && m > 0.0 && n.is_finite() && n >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "rho needs m > 0 and n >= 1 (got m={m}, n={n})"
        )));
    }
    Ok(rho_unchecked(m, n))
}

/// `alpha*(beta, mu)` for identity covariance. Direct formulas for the
/// `l_inf` and `l_2` balls, the iterative solver otherwise.
pub fn isotropic_alpha(mu: &[f64], ball: &BallSpec, beta: f64) -> Result<f64> {
    match ball {
        BallSpec::Linf => Ok(mu
            .iter()
            .map(|m| {
                let r = (m.abs() - beta).max(0.0);
                r * r
            })
            .sum::<f64>()
            .sqrt()),
        BallSpec::L2 => Ok((mu.iter().map(|m| m * m).sum::<f64>().sqrt() - beta).max(0.0)),
        _ => {
            let p = GaussianProblem::isotropic(mu.to_vec(), ball.clone(), beta)?;
            Ok(alpha_star_generic(&p, GENERIC_TOL, GENERIC_MAX_ITERS)?.alpha)
        }
    }
}

/// Runs `trials` draws in fixed-size chunks, chunk `c` on stream
/// `stream_base + c`. Returns the per-draw sum and sum of squares, added in
/// chunk order.
fn run_chunks(
    trials: usize,
    seed: u64,
    stream_base: u64,
    draw: impl Fn(&mut RngStream, &mut [f64]) -> Result<f64> + Sync,
    scratch_len: usize,
) -> Result<(f64, f64)> {
    let chunks = trials.div_ceil(CHUNK);
    let partial: Vec<Result<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = RngStream::new(seed, stream_base + c as u64);
            let mut scratch = vec![0.0; scratch_len];
            let count = CHUNK.min(trials - c * CHUNK);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..count {
                let v = draw(&mut rng, &mut scratch)?;
                sum += v;
                sum_sq += v * v;
            }
            Ok((sum, sum_sq))
        })
        .collect();
    partial
        .into_iter()
        .try_fold((0.0, 0.0), |(s, q), r| r.map(|(a, b)| (s + a, q + b)))
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    Ok(())
}

/// Average of `Q(alpha*(beta, mu_hat))` over `mu_hat ~ N(0, I / rho^2)`.
pub fn bayes_loss_via_posterior(
    setup: &BayesSetup,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_trials(trials)?;
    let inv_rho = 1.0 / setup.rho();
    let (sum, sum_sq) = run_chunks(
        trials,
        seed,
        POSTERIOR_STREAMS,
        |rng, mu_hat| {
            rng.fill_gaussian(mu_hat);
            mu_hat.iter_mut().for_each(|v| *v *= inv_rho);
            Ok(q_function(isotropic_alpha(
                mu_hat,
                &setup.ball,
                setup.beta,
            )?))
        },
        setup.d,
    )?;
    Ok(McEstimate::average(sum, sum_sq, trials, seed))
}

/// Fraction of `(X, T) ~ N(0, I_{d+1})` in `S(rho, beta rho)`, decided as
/// `alpha*(beta rho, X) <= T rho`. Negative `T` never qualifies.
pub fn bayes_loss_via_membership(
    setup: &BayesSetup,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_trials(trials)?;
    let rho = setup.rho();
    let radius = setup.beta * rho;
    let (hits, _) = run_chunks(
        trials,
        seed,
        MEMBERSHIP_STREAMS,
        |rng, x| {
            rng.fill_gaussian(x);
            let t = rng.gaussian();
            if t < 0.0 {
                return Ok(0.0);
            }
            let alpha = isotropic_alpha(x, &setup.ball, radius)?;
            Ok(f64::from(u8::from(alpha <= t * rho)))
        },
        setup.d,
    )?;
    Ok(McEstimate::indicator(hits, trials, seed))
}

/// The comparison bound that ignores the residual Gaussian noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchmidtBound {
    /// `Pr[X in beta rho B]`, `X ~ N(0, I_d)`: the chance that the two
    /// posterior class distributions are adversarially indistinguishable.
    pub indistinguishable: McEstimate,
    /// `(1 - 2 Q(beta rho))^d` for the `l_inf` ball.
    pub indistinguishable_exact: Option<f64>,
    /// `Pr[V in S(0, beta rho)]`, half the above: guessing is all that is
    /// left on indistinguishable draws.
    pub loss: McEstimate,
    pub loss_exact: Option<f64>,
}

pub fn schmidt_lower_bound(setup: &BayesSetup, trials: usize, seed: u64) -> Result<SchmidtBound> {
    check_trials(trials)?;
    let radius = setup.beta * setup.rho();
    let (hits, _) = run_chunks(
        trials,
        seed,
        SCHMIDT_STREAMS,
        |rng, x| {
            rng.fill_gaussian(x);
            Ok(f64::from(u8::from(setup.ball.norm_unchecked(x) <= radius)))
        },
        setup.d,
    )?;
    let indistinguishable = McEstimate::indicator(hits, trials, seed);
    let exact = (setup.ball == BallSpec::Linf)
        .then(|| (1.0 - 2.0 * q_function(radius)).powi(setup.d as i32));
    Ok(SchmidtBound {
        indistinguishable,
        indistinguishable_exact: exact,
        loss: indistinguishable.scaled(0.5),
        loss_exact: exact.map(|p| 0.5 * p),
    })
}
