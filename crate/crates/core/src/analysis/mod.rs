//! Net verification, discrepancy and variance analysis.

pub mod anova;
pub mod balance;
pub mod discrepancy;
pub mod gain;
pub mod multires;

pub use anova::{anova_sigmas, AnovaEntry, AnovaTable};
pub use balance::{check_net, compositions, BalanceReport, Violation, ViolationKind};
pub use discrepancy::star_discrepancy;
pub use gain::{gain_coefficient, gain_coefficient_pairwise, GainEntry, GainTable};
pub use multires::{predicted_variance, wavelet_sigma, GridFunction, MultiresEntry, MultiresTable};
