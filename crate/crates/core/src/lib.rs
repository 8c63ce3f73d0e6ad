//! Randomized quasi-Monte Carlo integration on `[0,1)^d` with base-b digital
//! nets, digit scrambles and local antithetic folds.
//!
//! Points are kept as exact base-b digits throughout, so net properties can
//! be verified by counting and scrambles and reflections never round.
//!
//! ```
//! use foldnet::{faure_net, FoldPlan, FoldScheme, Integrand, NetSpec, Scramble, ScrambleKind};
//!
//! let spec = NetSpec::net(2, 2, 8)?;
//! let base = faure_net(&spec, 53)?.points;
//! let scrambled = Scramble::new(ScrambleKind::RandomLinear, 2, 53, 2, 7)?.apply_set(&base)?;
//! let folded = FoldPlan::for_net(FoldScheme::Box, 8, 0, 2, None)?.apply(&scrambled)?;
//! let est = foldnet::estimate(&Integrand::sloan_joe_f(), &folded)?;
//! assert!((est - 1.0).abs() < 1e-3);
//! # Ok::<(), foldnet::Error>(())
//! ```

pub mod analysis;
pub mod cli;
pub mod digitspace;
pub mod error;
pub mod fold;
pub mod netgen;
pub mod pointset;
pub mod quadrature;
pub mod rng;
pub mod scramble;

pub use analysis::{
    anova_sigmas, check_net, gain_coefficient, predicted_variance, star_discrepancy, wavelet_sigma, AnovaTable,
    BalanceReport, GainTable, GridFunction, MultiresTable,
};
pub use digitspace::{
    default_precision, from_digits, interval_center, interval_index, to_digits, DigitExpansion, DigitPoint,
    ElementaryInterval,
};
pub use error::{Error, Result};
pub use fold::{
    balanced_split, box_fold, fold_sequence, monomial_net, reflect, reflect_coordinate, reflection_net, FoldPlan,
    FoldScheme, ReflectionVector,
};
pub use netgen::{faure_matrices, faure_net, generate_net, sequence_point, GeneratorMatrixSet, Net, NetSpec};
pub use pointset::PointSet;
pub use quadrature::{
    estimate, fit_rate, rmse_experiment, ExperimentConfig, Integrand, PiecewiseLinear, PointSource, RateFit, ResultRow,
};
pub use rng::derive_seed;
pub use scramble::{Scramble, ScrambleKind};
