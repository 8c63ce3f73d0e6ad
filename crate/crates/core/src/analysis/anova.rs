//! Numeric ANOVA decomposition by tensor midpoint quadrature.

use std::fmt::Write as _;

use serde::Serialize;

use super::gain::nonempty_subsets;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaEntry {
    pub u: Vec<usize>,
    pub sigma2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaTable {
    pub dim: usize,
    pub resolution: usize,
    pub mean: f64,
    pub variance: f64,
    pub entries: Vec<AnovaEntry>,
}

impl AnovaTable {
    pub fn get(&self, u: &[usize]) -> Option<f64> {
        self.entries.iter().find(|e| e.u == u).map(|e| e.sigma2)
    }

    /// `sigma^2_u / sigma^2`.
    pub fn index(&self, u: &[usize]) -> Option<f64> {
        self.get(u).map(|s| s / self.variance)
    }

    /// Rows `u,sigma2,index`; coordinates are written 1-based.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("u,sigma2,index\n");
        let _ = writeln!(s, "mean,{:.16e},", self.mean);
        let _ = writeln!(s, "total,{:.16e},1", self.variance);
        for e in &self.entries {
            let u: Vec<String> = e.u.iter().map(|j| (j + 1).to_string()).collect();
            let _ = writeln!(s, "{},{:.16e},{:.16e}", u.join(" "), e.sigma2, e.sigma2 / self.variance);
        }
        s
    }
}

/// Default nodes per axis: about 4 million evaluations in total.
pub fn default_resolution(dim: usize) -> usize {
    match dim {
        1 => 1 << 16,
        2 => 2048,
        _ => 160,
    }
}

/// Accumulates `sum_i x_i` with Neumaier compensation.
#[derive(Default, Clone, Copy)]
struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    fn value(self) -> f64 {
        self.s + self.c
    }
}

/// ANOVA variances `sigma^2_u` of `f` on `[0,1)^d`, `d <= 3`.
///
/// Uses the midpoint rule with `resolution` nodes per axis. Effects of proper
/// subsets come from marginal means by inclusion-exclusion; the full-set
/// effect is the total variance minus all other effects.
pub fn anova_sigmas<F: Fn(&[f64]) -> f64>(f: F, dim: usize, resolution: usize) -> Result<AnovaTable> {
    if dim == 0 || dim > 3 {
        return Err(Error::Unsupported(format!("ANOVA is computed for 1 <= d <= 3, got {dim}")));
    }
    if resolution == 0 {
        return Err(Error::Contract("quadrature needs at least one node".into()));
    }
    let r = resolution;
    let nodes: Vec<f64> = (0..r).map(|i| (i as f64 + 0.5) / r as f64).collect();
    let subsets = nonempty_subsets(dim);
    let proper: Vec<&Vec<usize>> = subsets.iter().filter(|u| u.len() < dim).collect();
    let mut marginals: Vec<Vec<Sum>> = proper.iter().map(|u| vec![Sum::default(); r.pow(u.len() as u32)]).collect();

    let total_points = r.pow(dim as u32);
    let mut sum = Sum::default();
    let mut sum_sq = Sum::default();
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0; dim];
    for point in 0..total_points {
        let mut rest = point;
        for j in (0..dim).rev() {
            idx[j] = rest % r;
            x[j] = nodes[idx[j]];
            rest /= r;
        }
        let y = f(&x);
        sum.add(y);
        sum_sq.add(y * y);
        for (u, acc) in proper.iter().zip(marginals.iter_mut()) {
            let key = u.iter().fold(0usize, |a, &j| a * r + idx[j]);
            acc[key].add(y);
        }
    }
    let n = total_points as f64;
    let mean = sum.value() / n;
    let variance = (sum_sq.value() / n - mean * mean).max(0.0);

    // marginal means g_v over the grid of v, for v proper
    let means: Vec<Vec<f64>> = proper
        .iter()
        .zip(&marginals)
        .map(|(u, acc)| {
            let per = r.pow((dim - u.len()) as u32) as f64;
            acc.iter().map(|s| s.value() / per).collect()
        })
        .collect();

    let mut entries = Vec::with_capacity(subsets.len());
    let mut effects: Vec<(Vec<usize>, Vec<f64>)> = Vec::new();
    for (u, g) in proper.iter().zip(&means) {
        // f_u = g_u - mean - sum of effects of nonempty strict subsets
        let mut fu: Vec<f64> = g.iter().map(|v| v - mean).collect();
        for (v, fv) in &effects {
            if v.len() < u.len() && v.iter().all(|j| u.contains(j)) {
                let positions: Vec<usize> = v.iter().map(|j| u.iter().position(|k| k == j).unwrap()).collect();
                for (cell, slot) in fu.iter_mut().enumerate() {
                    let mut digits = vec![0usize; u.len()];
                    let mut rest = cell;
                    for dgt in digits.iter_mut().rev() {
                        *dgt = rest % r;
                        rest /= r;
                    }
                    let key = positions.iter().fold(0usize, |a, &p| a * r + digits[p]);
                    *slot -= fv[key];
                }
            }
        }
        let sigma2 = fu.iter().map(|v| v * v).sum::<f64>() / fu.len() as f64;
        entries.push(AnovaEntry {
            u: (*u).clone(),
            sigma2,
        });
        effects.push(((*u).clone(), fu));
    }
    let rest: f64 = entries.iter().map(|e| e.sigma2).sum();
    entries.push(AnovaEntry {
        u: (0..dim).collect(),
        sigma2: (variance - rest).max(0.0),
    });
    Ok(AnovaTable {
        dim,
        resolution,
        mean,
        variance,
        entries,
    })
}
