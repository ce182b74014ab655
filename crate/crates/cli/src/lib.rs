//! Sweep drivers behind the `advtransport` binary. Each command writes one
//! CSV file with a header row and one row per grid point, in grid order.

pub mod grid;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use rayon::prelude::*;

use advtransport::bayes::{
    bayes_loss_via_posterior, schmidt_lower_bound, BayesSetup, DEFAULT_TRIALS,
};
use advtransport::cost::{pairwise_distances, threshold, DistanceMatrix};
use advtransport::dataset::{load_cifar10, load_csv, load_idx, make_binary_task, LabeledDataset};
use advtransport::gaussian::{
    alpha_star_with, optimal_adv_loss, optimal_transport_cost, GaussianProblem, GENERIC_MAX_ITERS,
    GENERIC_TOL,
};
use advtransport::matching::robustness_bound;
use advtransport::numerics::{BallSpec, RngStream, SpdMatrix};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] advtransport::Error),
    #[error("{path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Data(advtransport::Error::InvalidArgument(_)) => 2,
            CliError::Data(_) | CliError::Output { .. } => 1,
        }
    }
}

/// What a successful run reports back.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// Rows were written but at least one solve did not converge.
    NotConverged,
}

#[derive(Debug, Parser)]
#[command(
    name = "advtransport",
    version,
    about = "Lower bounds on adversarial robustness via optimal transport"
)]
pub struct Cli {
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite-sample bound on a two-class subset of a dataset
    Empirical(EmpiricalArgs),
    /// Optimal loss for a pair of Gaussians N(mu, Sigma), N(-mu, Sigma)
    Gaussian(GaussianArgs),
    /// Minimum loss of any learning rule after n samples
    Bayes(BayesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Idx,
    Cifar10,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    fn ball(self) -> BallSpec {
        match self {
            Norm::L1 => BallSpec::L1,
            Norm::L2 => BallSpec::L2,
            Norm::Linf => BallSpec::Linf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GaussianNorm {
    L1,
    L2,
    Linf,
    /// The ellipsoid of the covariance itself
    Matching,
}

#[derive(Debug, Args)]
pub struct EmpiricalArgs {
    #[arg(long, value_enum)]
    pub format: Format,
    /// IDX image file, CSV file, or CIFAR-10 batch (repeatable for CIFAR-10)
    #[arg(long, required = true)]
    pub images: Vec<PathBuf>,
    /// IDX label file
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub class_a: i64,
    #[arg(long, allow_negative_numbers = true)]
    pub class_b: i64,
    /// Examples per class
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "l2")]
    pub norm: Norm,
    /// `a:b:step` (inclusive) or a comma list
    #[arg(long)]
    pub betas: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Distance matrix cache, read if present and written otherwise
    #[arg(long)]
    pub dist_cache: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GaussianArgs {
    /// Comma-separated mean
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["mu_file", "d"])]
    pub mu: Option<String>,
    /// File holding the mean, comma or whitespace separated
    #[arg(long, conflicts_with = "d")]
    pub mu_file: Option<PathBuf>,
    /// Sample the mean from N(0, I_d) instead
    #[arg(long)]
    pub d: Option<usize>,
    /// Rescale the mean to this Euclidean length
    #[arg(long)]
    pub mu_norm: Option<f64>,
    /// Covariance file: d rows of d numbers (default identity)
    #[arg(long)]
    pub sigma_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "linf")]
    pub norm: GaussianNorm,
    #[arg(long)]
    pub betas: String,
    /// Iteration cap for the iterative solver
    #[arg(long, default_value_t = GENERIC_MAX_ITERS)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BayesArgs {
    #[arg(long)]
    pub d: usize,
    /// Prior precision: mu ~ N(0, I/m)
    #[arg(long)]
    pub m: f64,
    /// Sample sizes, `a:b:step` or a comma list
    #[arg(long)]
    pub ns: String,
    #[arg(long, value_enum, default_value = "linf")]
    pub norm: Norm,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Empirical(a) => cmd_empirical(a),
        Command::Gaussian(a) => cmd_gaussian(a),
        Command::Bayes(a) => cmd_bayes(a),
    }
}

fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<(), CliError> {
    let wrap = |source| CliError::Output {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(wrap)?);
    writeln!(w, "{header}").map_err(wrap)?;
    for row in rows {
        writeln!(w, "{row}").map_err(wrap)?;
    }
    w.flush().map_err(wrap)
}

fn load_dataset(a: &EmpiricalArgs) -> Result<LabeledDataset, CliError> {
    let single = || match a.images.as_slice() {
        [p] => Ok(p),
        _ => Err(CliError::Usage(
            "--images takes exactly one file for this format".into(),
        )),
    };
    Ok(match a.format {
        Format::Idx => {
            let labels = a
                .labels
                .as_ref()
                .ok_or_else(|| CliError::Usage("--labels is required for idx".into()))?;
            load_idx(single()?, labels)?
        }
        Format::Cifar10 => load_cifar10(&a.images)?,
        Format::Csv => load_csv(single()?)?,
    })
}

pub fn cmd_empirical(a: &EmpiricalArgs) -> Result<Outcome, CliError> {
    let betas = grid::parse_grid(&a.betas)?;
    let ball = a.norm.ball();
    let distances = match &a.dist_cache {
        Some(path) if path.exists() => {
            info!("reading distances from {}", path.display());
            let d = DistanceMatrix::read_cache(path)?;
            if d.k() != a.k {
                return Err(CliError::Usage(format!(
                    "cache {} holds k = {}, but --k is {}",
                    path.display(),
                    d.k(),
                    a.k
                )));
            }
            d
        }
        cache => {
            let data = load_dataset(a)?;
            info!("loaded {} examples of dimension {}", data.len(), data.dim());
            let task = make_binary_task(&data, a.class_a, a.class_b, a.k, a.seed)?;
            info!("computing {} x {} {} distances", a.k, a.k, ball.name());
            let d = pairwise_distances(&task, &ball)?;
            if let Some(path) = cache {
                d.write_cache(path)?;
            }
            d
        }
    };
    let rows = betas
        .par_iter()
        .map(|&beta| {
            let bound = robustness_bound(&threshold(&distances, beta))?;
            info!(
                "beta {beta}: matching {} of {}",
                bound.matching_size, bound.k
            );
            Ok(format!(
                "{beta},{},{},{}",
                bound.matching_size, bound.transport_cost, bound.min_loss
            ))
        })
        .collect::<Result<Vec<_>, advtransport::Error>>()?;
    write_csv(&a.out, "beta,matching_size,transport_cost,min_loss", &rows)?;
    Ok(Outcome::Ok)
}

fn read_numbers(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| advtransport::Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            line.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<f64>().map_err(|_| {
                        CliError::Data(advtransport::Error::Csv {
                            path: path.to_path_buf(),
                            line: i + 1,
                            message: format!("not a number: {t:?}"),
                        })
                    })
                })
                .collect()
        })
        .collect()
}

fn gaussian_mean(a: &GaussianArgs) -> Result<Vec<f64>, CliError> {
    let mut mu = match (&a.mu, &a.mu_file, a.d) {
        (Some(s), None, None) => s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("--mu: not a number: {t:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?,
        (None, Some(p), None) => read_numbers(p)?.concat(),
        (None, None, Some(d)) if d > 0 => {
            let mut mu = vec![0.0; d];
            RngStream::new(a.seed, 0).fill_gaussian(&mut mu);
            mu
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --mu, --mu-file, --d (d >= 1)".into(),
            ))
        }
    };
    if let Some(len) = a.mu_norm {
        let cur = mu.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(len.is_finite() && len >= 0.0) || cur == 0.0 {
            return Err(CliError::Usage(
                "--mu-norm needs a nonzero mean and a length >= 0".into(),
            ));
        }
        mu.iter_mut().for_each(|v| *v *= len / cur);
    }
    Ok(mu)
}

pub fn cmd_gaussian(a: &GaussianArgs) -> Result<Outcome, CliError> {
    let betas = grid::parse_grid(&a.betas)?;
    let mu = gaussian_mean(a)?;
    let d = mu.len();
    let sigma = match &a.sigma_file {
        Some(p) => {
            let rows = read_numbers(p)?;
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(CliError::Data(advtransport::Error::DimensionMismatch {
                    expected: d * d,
                    actual: rows.iter().map(Vec::len).sum(),
                }));
            }
            SpdMatrix::new(d, rows.concat())?
        }
        None => SpdMatrix::identity(d),
    };
    let ball = match a.norm {
        GaussianNorm::L1 => BallSpec::L1,
        GaussianNorm::L2 => BallSpec::L2,
        GaussianNorm::Linf => BallSpec::Linf,
        GaussianNorm::Matching => BallSpec::Mahalanobis(sigma.clone()),
    };
    let base = GaussianProblem::new(mu, sigma, ball, 0.0)?;
    let rows = betas
        .par_iter()
        .map(|&beta| {
            let cert = alpha_star_with(&base.with_beta(beta)?, GENERIC_TOL, a.max_iters)?;
            if !cert.converged {
                log::warn!(
                    "beta {beta}: solver stopped at duality gap {}",
                    cert.duality_gap
                );
            }
            Ok((
                format!(
                    "{beta},{},{},{},{:e},{}",
                    cert.alpha,
                    optimal_adv_loss(cert.alpha),
                    optimal_transport_cost(cert.alpha),
                    cert.duality_gap,
                    u8::from(cert.converged)
                ),
                cert.converged,
            ))
        })
        .collect::<Result<Vec<_>, advtransport::Error>>()?;
    let all_converged = rows.iter().all(|r| r.1);
    let rows: Vec<String> = rows.into_iter().map(|r| r.0).collect();
    write_csv(
        &a.out,
        "beta,alpha_star,optimal_loss,transport_cost,duality_gap,converged",
        &rows,
    )?;
    Ok(if all_converged {
        Outcome::Ok
    } else {
        Outcome::NotConverged
    })
}

pub fn cmd_bayes(a: &BayesArgs) -> Result<Outcome, CliError> {
    let ns = grid::parse_grid(&a.ns)?;
    if let Some(n) = ns.iter().find(|n| n.fract() != 0.0 || **n < 1.0) {
        return Err(CliError::Usage(format!(
            "--ns must hold integers >= 1, got {n}"
        )));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in &ns {
        let setup = BayesSetup::new(a.d, a.m, n as u64, a.norm.ball(), a.beta)?;
        let loss = bayes_loss_via_posterior(&setup, a.trials, a.seed)?;
        let schmidt = schmidt_lower_bound(&setup, a.trials, a.seed)?.loss;
        info!(
            "n {n}: bayes loss {:.4}, schmidt {:.4}",
            loss.value, schmidt.value
        );
        rows.push(format!(
            "{},{},{},{},{},{}",
            setup.n,
            setup.rho(),
            loss.value,
            loss.standard_error,
            schmidt.value,
            schmidt.standard_error
        ));
    }
    write_csv(
        &a.out,
        "n,rho,bayes_loss,bayes_se,schmidt_bound,schmidt_se",
        &rows,
    )?;
    Ok(Outcome::Ok)
}
