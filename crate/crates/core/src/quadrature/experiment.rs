//! Estimators and replicated RMSE experiments.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{RateFit, DEFAULT_WINDOW};
use super::integrand::Integrand;
use crate::digitspace::default_precision;
use crate::error::{Error, Result};
use crate::fold::{FoldPlan, FoldScheme};
use crate::netgen::{faure_net, NetSpec};
use crate::pointset::PointSet;
use crate::rng::{derive_seed, keyed_rng, Role};
use crate::scramble::{Scramble, ScrambleKind};

/// Equal-weight average of `f` over the points of `set`.
pub fn estimate(f: &Integrand, set: &PointSet) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::Contract("estimate over an empty point set".into()));
    }
    if set.dim() != f.dim() {
        return Err(Error::Contract(format!(
            "integrand {} has d = {}, points have d = {}",
            f.name(),
            f.dim(),
            set.dim()
        )));
    }
    let mut total = 0.0;
    set.for_each_value(|x| total += f.eval(x));
    Ok(total / set.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointSource {
    /// Leading points of the Faure sequence.
    Faure,
    /// Independent uniform points, redrawn every replication.
    Uniform,
}

impl PointSource {
    pub fn name(self) -> &'static str {
        match self {
            PointSource::Faure => "faure",
            PointSource::Uniform => "uniform",
        }
    }
}

impl FromStr for PointSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "faure" => Ok(PointSource::Faure),
            "uniform" | "mc" => Ok(PointSource::Uniform),
            other => Err(Error::Unsupported(format!("unknown point source '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub integrand: String,
    pub base: u32,
    pub dim: usize,
    /// Base nets have `lambda b^m` points for `m` in `m_min..=m_max`.
    pub m_min: usize,
    pub m_max: usize,
    pub lambda: u64,
    pub source: PointSource,
    /// `None` runs the points unscrambled.
    pub scramble: Option<ScrambleKind>,
    pub seed: u64,
    pub fold: FoldScheme,
    /// Reflection orders for reflection and box folds; `None` uses the balanced split.
    pub rho: Option<Vec<usize>>,
    pub replications: usize,
    pub window: usize,
    pub precision: usize,
}

impl ExperimentConfig {
    /// Settings for the two-dimensional study: `b = 2`, `m = 6..=14`, 300 replications.
    pub fn new(integrand: &str, dim: usize) -> Self {
        ExperimentConfig {
            integrand: integrand.to_string(),
            base: 2,
            dim,
            m_min: 6,
            m_max: 14,
            lambda: 1,
            source: PointSource::Faure,
            scramble: Some(ScrambleKind::RandomLinear),
            seed: 0,
            fold: FoldScheme::None,
            rho: None,
            replications: 300,
            window: DEFAULT_WINDOW,
            precision: default_precision(2),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_min > self.m_max {
            return Err(Error::Contract(format!("m range {}..={} is empty", self.m_min, self.m_max)));
        }
        if self.is_random() && self.replications < 2 {
            return Err(Error::Contract("randomized runs need at least 2 replications".into()));
        }
        if self.source == PointSource::Uniform && self.scramble.is_some() {
            return Err(Error::Contract("uniform points are not scrambled".into()));
        }
        if self.replications > u32::MAX as usize || self.m_max > u32::MAX as usize {
            return Err(Error::Contract("replication count or m too large".into()));
        }
        Ok(())
    }

    /// Whether estimates vary between replications.
    pub fn is_random(&self) -> bool {
        self.scramble.is_some() || self.source == PointSource::Uniform
    }

    fn scramble_label(&self) -> &'static str {
        self.scramble.map_or("none", ScrambleKind::name)
    }
}

/// One sample size of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    /// Function evaluations per estimate, counting folded points.
    pub n: u64,
    pub m: usize,
    pub estimator: String,
    pub scramble: String,
    pub fold: String,
    /// Mean of the replicated estimates.
    pub mean: f64,
    /// Root mean squared error, or absolute error for deterministic runs.
    pub rmse: f64,
    /// Delta-method standard error of `rmse`; zero for deterministic runs.
    pub se: f64,
    pub seconds: f64,
}

fn uniform_points(base: u32, dim: usize, precision: usize, n: usize, seed: u64) -> Result<PointSet> {
    let mut rng = keyed_rng(seed, 0, Role::Points, 0);
    let digits: Vec<u8> = (0..n * dim * precision)
        .map(|_| rng.random_range(0..base) as u8)
        .collect();
    PointSet::from_flat(base, dim, precision, digits)
}

/// The `replications` estimates at one `m`, in replication order.
pub fn replicate_estimates(cfg: &ExperimentConfig, f: &Integrand, m: usize) -> Result<Vec<f64>> {
    let spec = NetSpec::new(cfg.base, cfg.dim, m, 0, cfg.lambda, true)?;
    let plan = FoldPlan::for_net(cfg.fold, m, 0, cfg.dim, cfg.rho.as_deref())?;
    let n = usize::try_from(spec.n()).map_err(|_| Error::Contract("n does not fit in memory".into()))?;
    match cfg.source {
        PointSource::Faure => {
            let base_points = faure_net(&spec, cfg.precision)?.points;
            match cfg.scramble {
                None => Ok(vec![estimate(f, &plan.apply(&base_points)?)?]),
                Some(kind) => (0..cfg.replications)
                    .into_par_iter()
                    .map(|r| {
                        let seed = derive_seed(cfg.seed, m as u32, r as u32);
                        let s = Scramble::new(kind, cfg.base, cfg.precision, cfg.dim, seed)?;
                        estimate(f, &plan.apply(&s.apply_set(&base_points)?)?)
                    })
                    .collect(),
            }
        }
        PointSource::Uniform => (0..cfg.replications)
            .into_par_iter()
            .map(|r| {
                let seed = derive_seed(cfg.seed, m as u32, r as u32);
                let pts = uniform_points(cfg.base, cfg.dim, cfg.precision, n, seed)?;
                estimate(f, &plan.apply(&pts)?)
            })
            .collect(),
    }
}

/// `(rmse, se)` of estimates around `truth`.
pub fn rmse_with_se(estimates: &[f64], truth: f64) -> (f64, f64) {
    let r = estimates.len() as f64;
    let sq: Vec<f64> = estimates.iter().map(|e| (e - truth) * (e - truth)).collect();
    let mse = sq.iter().sum::<f64>() / r;
    let rmse = mse.sqrt();
    if estimates.len() < 2 || rmse == 0.0 {
        return (rmse, 0.0);
    }
    let var_sq = sq.iter().map(|s| (s - mse) * (s - mse)).sum::<f64>() / (r - 1.0);
    let se_mse = (var_sq / r).sqrt();
    (rmse, se_mse / (2.0 * rmse))
}

/// Runs `cfg` against a given integrand, which must have a known mean.
pub fn rmse_experiment_with(cfg: &ExperimentConfig, f: &Integrand) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let truth = f
        .mean()
        .ok_or_else(|| Error::Contract(format!("integrand {} has no known mean", f.name())))?;
    let mut rows = Vec::with_capacity(cfg.m_max - cfg.m_min + 1);
    for m in cfg.m_min..=cfg.m_max {
        let start = Instant::now();
        let estimates = replicate_estimates(cfg, f, m)?;
        let seconds = start.elapsed().as_secs_f64();
        let plan = FoldPlan::for_net(cfg.fold, m, 0, cfg.dim, cfg.rho.as_deref())?;
        let n = NetSpec::new(cfg.base, cfg.dim, m, 0, cfg.lambda, true)?.n() * plan.multiplier() as u64;
        let (rmse, se) = rmse_with_se(&estimates, truth);
        rows.push(ResultRow {
            n,
            m,
            estimator: cfg.source.name().to_string(),
            scramble: cfg.scramble_label().to_string(),
            fold: cfg.fold.name().to_string(),
            mean: estimates.iter().sum::<f64>() / estimates.len() as f64,
            rmse,
            se,
            seconds,
        });
    }
    Ok(rows)
}

/// Runs `cfg` with its catalog integrand.
pub fn rmse_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let f = Integrand::from_name(&cfg.integrand, cfg.dim, cfg.base)?;
    rmse_experiment_with(cfg, &f)
}

/// CSV with header `n,estimator,scramble,fold,rmse,se,seconds`.
///
/// With `timing` off the `seconds` column is left empty so the output is a
/// function of the configuration alone. A fit, when given, becomes a
/// trailing `# slope=...,intercept=...` comment row.
pub fn write_csv(rows: &[ResultRow], fit: Option<&RateFit>, timing: bool) -> String {
    let mut s = String::from("n,estimator,scramble,fold,rmse,se,seconds\n");
    for r in rows {
        let seconds = if timing { format!("{:.16e}", r.seconds) } else { String::new() };
        let _ = writeln!(
            s,
            "{},{},{},{},{:.16e},{:.16e},{}",
            r.n, r.estimator, r.scramble, r.fold, r.rmse, r.se, seconds
        );
    }
    if let Some(fit) = fit {
        let _ = writeln!(s, "# slope={:.16e},intercept={:.16e}", fit.slope, fit.intercept);
        if !fit.exact.is_empty() {
            let exact: Vec<String> = fit.exact.iter().map(ToString::to_string).collect();
            let _ = writeln!(s, "# exact={}", exact.join(" "));
        }
    }
    s
}
