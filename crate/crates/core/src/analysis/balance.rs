//! Exact net-property verification by counting digit prefixes.

use std::fmt::Write as _;

use serde::Serialize;

use crate::digitspace::checked_power;
use crate::error::{Error, Result};
use crate::netgen::NetSpec;
use crate::pointset::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    /// A volume-`b^(q-m)` interval without exactly `lambda b^q` points.
    Balance,
    /// A volume-`b^(q-m-1)` box holding more than `b^q` points.
    Cap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub kappa: Vec<usize>,
    pub tau: Vec<u64>,
    pub observed: u64,
    pub expected: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BalanceReport {
    pub spec: NetSpec,
    pub passed: bool,
    pub intervals_checked: u64,
    /// Whether the fine-box cap was part of the check.
    pub cap_checked: bool,
    pub cap_passed: bool,
    pub violations: Vec<Violation>,
}

impl BalanceReport {
    /// One CSV row per violation.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,kappa,tau,observed,expected\n");
        for v in &self.violations {
            let kind = match v.kind {
                ViolationKind::Balance => "balance",
                ViolationKind::Cap => "cap",
            };
            let _ = writeln!(
                s,
                "{kind},{},{},{},{}",
                join(&v.kappa),
                join(&v.tau),
                v.observed,
                v.expected
            );
        }
        s
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

/// All vectors of `parts` nonnegative integers summing to `total`.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=total).rev() {
            prefix.push(first);
            rec(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    }
    out
}

/// Point counts for every interval at resolution `kappa`, indexed in mixed radix.
pub(crate) fn cell_counts(set: &PointSet, kappa: &[usize]) -> Result<Vec<u64>> {
    let order: usize = kappa.iter().sum();
    let cells = checked_power(set.base(), order)
        .filter(|&c| c <= 1 << 32)
        .ok_or_else(|| Error::Precision(format!("b^{order} intervals is too many to count")))?;
    if kappa.iter().any(|&k| k > set.precision()) {
        return Err(Error::Precision(format!(
            "resolution {kappa:?} exceeds precision {}",
            set.precision()
        )));
    }
    let b = u64::from(set.base());
    let mut counts = vec![0u64; cells as usize];
    for i in 0..set.len() {
        let mut key = 0u64;
        for (j, &k) in kappa.iter().enumerate() {
            for &d in &set.coord(i, j)[..k] {
                key = key * b + u64::from(d);
            }
        }
        counts[key as usize] += 1;
    }
    Ok(counts)
}

fn decode_tau(mut key: u64, kappa: &[usize], base: u32) -> Vec<u64> {
    let mut tau = vec![0; kappa.len()];
    for (slot, &k) in tau.iter_mut().zip(kappa).rev() {
        let width = checked_power(base, k).expect("counted resolution");
        *slot = key % width;
        key /= width;
    }
    tau
}

/// Checks every elementary interval of volume `b^(q-m)` for exactly `lambda b^q`
/// points and, for non-relaxed specs, every box of volume `b^(q-m-1)` for at
/// most `b^q` points.
pub fn check_net(set: &PointSet, spec: &NetSpec) -> Result<BalanceReport> {
    spec.validate()?;
    if set.base() != spec.base || set.dim() != spec.dim {
        return Err(Error::Contract(format!(
            "point set has base {} dim {}, spec has base {} dim {}",
            set.base(),
            set.dim(),
            spec.base,
            spec.dim
        )));
    }
    if set.len() as u64 != spec.n() {
        return Err(Error::Contract(format!(
            "spec needs {} points, set has {}",
            spec.n(),
            set.len()
        )));
    }
    let bq = checked_power(spec.base, spec.q).expect("q <= m");
    let expected = spec.lambda * bq;
    let mut violations = Vec::new();
    let mut checked = 0u64;
    for kappa in compositions(spec.m - spec.q, spec.dim) {
        let counts = cell_counts(set, &kappa)?;
        checked += counts.len() as u64;
        for (key, &c) in counts.iter().enumerate() {
            if c != expected {
                violations.push(Violation {
                    kind: ViolationKind::Balance,
                    tau: decode_tau(key as u64, &kappa, spec.base),
                    kappa: kappa.clone(),
                    observed: c,
                    expected,
                });
            }
        }
    }
    let balance_ok = violations.is_empty();
    let mut cap_passed = true;
    if !spec.relaxed {
        for kappa in compositions(spec.m - spec.q + 1, spec.dim) {
            let counts = cell_counts(set, &kappa)?;
            checked += counts.len() as u64;
            for (key, &c) in counts.iter().enumerate() {
                if c > bq {
                    cap_passed = false;
                    violations.push(Violation {
                        kind: ViolationKind::Cap,
                        tau: decode_tau(key as u64, &kappa, spec.base),
                        kappa: kappa.clone(),
                        observed: c,
                        expected: bq,
                    });
                }
            }
        }
    }
    Ok(BalanceReport {
        spec: *spec,
        passed: balance_ok && cap_passed,
        intervals_checked: checked,
        cap_checked: !spec.relaxed,
        cap_passed,
        violations,
    })
}
