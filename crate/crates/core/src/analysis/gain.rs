//! Gain coefficients of a base point set.
//!
//! `Gamma_{u,kappa}` is
//!
//! ```text
//!   1 / (n (b-1)^|u|) * sum_i sum_i' prod_{j in u} (b [fine match] - [coarse match])
//! ```
//!
//! where a coarse match means points `i` and `i'` share the first `k_j`
//! digits of coordinate `j`, and a fine match means they share `k_j + 1`.
//! Expanding the product over subsets `w` of `u` turns the double sum into
//! sums of squared cell counts, which is what [`gain_coefficient`] evaluates.
//! [`gain_coefficient_pairwise`] evaluates the double sum directly.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pointset::PointSet;

fn validate(set: &PointSet, u: &[usize], kappa: &[usize]) -> Result<()> {
    if u.is_empty() {
        return Err(Error::Contract("gain coefficients need a nonempty u".into()));
    }
    if u.len() != kappa.len() {
        return Err(Error::Contract("u and kappa lengths differ".into()));
    }
    if u.windows(2).any(|w| w[0] >= w[1]) || u.iter().any(|&j| j >= set.dim()) {
        return Err(Error::Contract(format!(
            "u = {u:?} must be increasing coordinates below {}",
            set.dim()
        )));
    }
    if let Some(&k) = kappa.iter().find(|&&k| k + 1 > set.precision()) {
        return Err(Error::Precision(format!(
            "resolution {k} needs {} digits, precision is {}",
            k + 1,
            set.precision()
        )));
    }
    if set.is_empty() {
        return Err(Error::Contract("empty point set".into()));
    }
    Ok(())
}

fn denominator(set: &PointSet, u: &[usize]) -> f64 {
    set.len() as f64 * f64::from(set.base() - 1).powi(u.len() as i32)
}

/// `sum_cells count^2` at per-coordinate prefix lengths `lens` over `u`.
fn squared_counts(set: &PointSet, u: &[usize], lens: &[usize]) -> i128 {
    let key_len: usize = lens.iter().sum();
    let mut keys: Vec<u8> = Vec::with_capacity(set.len() * key_len);
    for i in 0..set.len() {
        for (&j, &len) in u.iter().zip(lens) {
            keys.extend_from_slice(&set.coord(i, j)[..len]);
        }
    }
    if key_len == 0 {
        let n = set.len() as i128;
        return n * n;
    }
    let mut rows: Vec<&[u8]> = keys.chunks(key_len).collect();
    rows.sort_unstable();
    let mut total: i128 = 0;
    let mut run: i128 = 0;
    for (idx, row) in rows.iter().enumerate() {
        run += 1;
        if idx + 1 == rows.len() || rows[idx + 1] != *row {
            total += run * run;
            run = 0;
        }
    }
    total
}

/// The integer double sum, so `Gamma = numerator / (n (b-1)^|u|)` exactly.
pub fn gain_numerator(set: &PointSet, u: &[usize], kappa: &[usize]) -> Result<i128> {
    validate(set, u, kappa)?;
    let b = i128::from(set.base());
    let mut total: i128 = 0;
    let mut lens = vec![0usize; u.len()];
    for w in 0u32..(1 << u.len()) {
        for (pos, len) in lens.iter_mut().enumerate() {
            *len = kappa[pos] + usize::from(w >> pos & 1 == 1);
        }
        let fine = w.count_ones();
        let coarse = u.len() as u32 - fine;
        let sign = if coarse.is_multiple_of(2) { 1 } else { -1 };
        total += sign * b.pow(fine) * squared_counts(set, u, &lens);
    }
    Ok(total)
}

/// `Gamma_{u,kappa}` for unscrambled base points.
///
/// `u` holds 0-based coordinates in increasing order and `kappa` one
/// resolution per entry of `u`.
pub fn gain_coefficient(set: &PointSet, u: &[usize], kappa: &[usize]) -> Result<f64> {
    let num = gain_numerator(set, u, kappa)?;
    Ok(num as f64 / denominator(set, u))
}

/// Direct `O(n^2 |u|)` evaluation of the pairwise double sum.
pub fn gain_coefficient_pairwise(set: &PointSet, u: &[usize], kappa: &[usize]) -> Result<f64> {
    validate(set, u, kappa)?;
    let b = i128::from(set.base());
    let mut total: i128 = 0;
    for i in 0..set.len() {
        for i2 in 0..set.len() {
            let mut prod: i128 = 1;
            for (&j, &k) in u.iter().zip(kappa) {
                let (x, y) = (set.coord(i, j), set.coord(i2, j));
                let coarse = x[..k] == y[..k];
                let fine = coarse && x[k] == y[k];
                prod *= b * i128::from(fine) - i128::from(coarse);
                if prod == 0 {
                    break;
                }
            }
            total += prod;
        }
    }
    Ok(total as f64 / denominator(set, u))
}

/// Nonempty subsets of `0..dim`, by size then lexicographically.
pub fn nonempty_subsets(dim: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..(1 << dim))
        .map(|mask| (0..dim).filter(|&j| mask >> j & 1 == 1).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b: &Vec<usize>| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// All `kappa >= 0` of length `len` with `|kappa| <= max_order`.
pub fn resolutions_up_to(len: usize, max_order: usize) -> Vec<Vec<usize>> {
    (0..=max_order)
        .flat_map(|total| super::balance::compositions(total, len))
        .collect()
}

/// Upper bound on `Gamma` for a `(0,m,d)`-net: `(b/(b-1))^min(d-1,m)`.
pub fn net_gain_bound(base: u32, dim: usize, m: usize) -> f64 {
    let r = f64::from(base) / f64::from(base - 1);
    r.powi((dim - 1).min(m) as i32)
}

/// Upper bound on `Gamma` for a `(lambda,0,m,d)`-net: `e + 1`.
pub fn lambda_net_gain_bound() -> f64 {
    std::f64::consts::E + 1.0
}

/// Upper bound on `Gamma` for a `(lambda,q,m,d)`-net: `b^q (b/(b-1))^(d-1)`.
pub fn quality_net_gain_bound(base: u32, q: usize, dim: usize) -> f64 {
    f64::from(base).powi(q as i32) * (f64::from(base) / f64::from(base - 1)).powi(dim as i32 - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainEntry {
    pub u: Vec<usize>,
    pub kappa: Vec<usize>,
    pub numerator: i128,
    pub gamma: f64,
}

/// `Gamma_{u,kappa}` for every nonempty `u` and every `kappa` with `|kappa| <= max_order`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainTable {
    pub n: usize,
    pub base: u32,
    pub entries: Vec<GainEntry>,
}

impl GainTable {
    pub fn compute(set: &PointSet, max_order: usize) -> Result<Self> {
        let mut entries = Vec::new();
        for u in nonempty_subsets(set.dim()) {
            for kappa in resolutions_up_to(u.len(), max_order) {
                let numerator = gain_numerator(set, &u, &kappa)?;
                let gamma = numerator as f64 / denominator(set, &u);
                entries.push(GainEntry {
                    u: u.clone(),
                    kappa,
                    numerator,
                    gamma,
                });
            }
        }
        Ok(GainTable {
            n: set.len(),
            base: set.base(),
            entries,
        })
    }

    pub fn get(&self, u: &[usize], kappa: &[usize]) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.u == u && e.kappa == kappa)
            .map(|e| e.gamma)
    }

    pub fn max_gamma(&self) -> f64 {
        self.entries.iter().map(|e| e.gamma).fold(0.0, f64::max)
    }

    /// One row per `(u, kappa)`; coordinates are written 1-based.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("u,kappa,gamma\n");
        for e in &self.entries {
            let u: Vec<String> = e.u.iter().map(|j| (j + 1).to_string()).collect();
            let k: Vec<String> = e.kappa.iter().map(ToString::to_string).collect();
            let _ = writeln!(s, "{},{},{:.16e}", u.join(" "), k.join(" "), e.gamma);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_has_unit_gain() {
        let set = PointSet::from_values(&[vec![0.3, 0.8]], 3, 10).unwrap();
        for u in nonempty_subsets(2) {
            for kappa in resolutions_up_to(u.len(), 4) {
                assert_eq!(gain_coefficient(&set, &u, &kappa).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn counting_matches_pairwise_on_arbitrary_points() {
        let pts: Vec<Vec<f64>> = (0..23)
            .map(|i| {
                let x = (i as f64 * 0.618_033_988_7).fract();
                let y = (i as f64 * 0.414_213_562_3 + 0.1).fract();
                vec![x, y]
            })
            .collect();
        for b in [2, 3] {
            let set = PointSet::from_values(&pts, b, 12).unwrap();
            for u in nonempty_subsets(2) {
                for kappa in resolutions_up_to(u.len(), 4) {
                    let a = gain_coefficient(&set, &u, &kappa).unwrap();
                    let p = gain_coefficient_pairwise(&set, &u, &kappa).unwrap();
                    assert!((a - p).abs() < 1e-12, "b={b} u={u:?} kappa={kappa:?}");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_subsets() {
        let set = PointSet::from_values(&[vec![0.3, 0.8]], 2, 4).unwrap();
        assert!(gain_coefficient(&set, &[1, 0], &[0, 0]).is_err());
        assert!(gain_coefficient(&set, &[2], &[0]).is_err());
        assert!(matches!(gain_coefficient(&set, &[0], &[4]), Err(Error::Precision(_))));
    }

    #[test]
    fn subset_order() {
        assert_eq!(
            nonempty_subsets(3),
            vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]]
        );
        assert_eq!(resolutions_up_to(2, 1), vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn bounds() {
        assert_eq!(net_gain_bound(2, 2, 5), 2.0);
        assert_eq!(net_gain_bound(3, 3, 0), 1.0);
        assert!((quality_net_gain_bound(2, 1, 2) - 4.0).abs() < 1e-15);
    }
}
