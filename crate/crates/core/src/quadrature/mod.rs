//! Estimators, replicated error studies and the integrand catalog.

pub mod experiment;
pub mod fit;
pub mod integrand;

pub use experiment::{
    estimate, replicate_estimates, rmse_experiment, rmse_experiment_with, rmse_with_se, write_csv,
    ExperimentConfig, PointSource, ResultRow,
};
pub use fit::{fit_points, fit_rate, RateFit};
pub use integrand::{Integrand, PiecewiseLinear, CATALOG};
