//! Least-squares convergence-rate fits on log-log axes.

use serde::Serialize;

use super::experiment::ResultRow;
use crate::error::{Error, Result};

/// Default number of largest sample sizes used in a fit.
pub const DEFAULT_WINDOW: usize = 6;

/// Minimum number of nonzero rows needed for a fit.
pub const MIN_ROWS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Sample sizes that entered the fit, ascending.
    pub n: Vec<u64>,
    /// `log(rmse) - (intercept + slope log n)` for each fitted row.
    pub residuals: Vec<f64>,
    /// Sample sizes dropped because their error was exactly zero.
    pub exact: Vec<u64>,
}

/// Fits `log(err) = intercept + slope log(n)` to `(n, err)` pairs.
///
/// Pairs with zero error are set aside in [`RateFit::exact`].
pub fn fit_points(points: &[(u64, f64)]) -> Result<RateFit> {
    let mut used: Vec<(u64, f64)> = Vec::new();
    let mut exact = Vec::new();
    for &(n, e) in points {
        if !(e.is_finite() && e >= 0.0) {
            return Err(Error::Contract(format!("error {e} at n = {n} is not a finite nonnegative value")));
        }
        if e == 0.0 {
            exact.push(n);
        } else {
            used.push((n, e));
        }
    }
    if used.len() < MIN_ROWS {
        return Err(Error::Contract(format!(
            "rate fit needs at least {MIN_ROWS} nonzero rows, got {}",
            used.len()
        )));
    }
    used.sort_by_key(|p| p.0);
    let xs: Vec<f64> = used.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = used.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Contract("rate fit needs at least two distinct n".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = xs.iter().zip(&ys).map(|(x, y)| y - (intercept + slope * x)).collect();
    Ok(RateFit {
        slope,
        intercept,
        n: used.iter().map(|p| p.0).collect(),
        residuals,
        exact,
    })
}

/// Fits the `window` rows with the largest `n`.
pub fn fit_rate(rows: &[ResultRow], window: usize) -> Result<RateFit> {
    let mut points: Vec<(u64, f64)> = rows.iter().map(|r| (r.n, r.rmse)).collect();
    points.sort_by_key(|p| p.0);
    let start = points.len().saturating_sub(window);
    fit_points(&points[start..])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(c: f64, p: f64) -> Vec<(u64, f64)> {
        (6..=14).map(|m| (1u64 << m, c * ((1u64 << m) as f64).powf(p))).collect()
    }

    #[test]
    fn exact_power_laws() {
        let fit = fit_points(&synthetic(1.0, -1.5)).unwrap();
        assert!((fit.slope + 1.5).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-10);
        for c in [1e-3, 1.0, 250.0] {
            let fit = fit_points(&synthetic(c, -2.0)).unwrap();
            assert!((fit.slope + 2.0).abs() < 1e-12);
            assert!((fit.intercept - c.ln()).abs() < 1e-10);
            assert!(fit.residuals.iter().all(|r| r.abs() < 1e-10));
        }
    }

    #[test]
    fn zero_rows_are_flagged() {
        let mut pts = synthetic(1.0, -1.0);
        pts[2].1 = 0.0;
        let fit = fit_points(&pts).unwrap();
        assert_eq!(fit.exact, vec![256]);
        assert_eq!(fit.n.len(), 8);
    }

    #[test]
    fn too_few_rows() {
        let pts = synthetic(1.0, -1.0);
        assert!(fit_points(&pts[..3]).is_err());
        let mut zeros = pts[..5].to_vec();
        zeros[0].1 = 0.0;
        zeros[1].1 = 0.0;
        assert!(fit_points(&zeros).is_err());
    }
}
