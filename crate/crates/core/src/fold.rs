//! b-ary reflections and the folding schemes built from them.
//!
//! `R_k` keeps the first `k` digits of a coordinate and replaces each later
//! digit `x` by `b - 1 - x`, which reflects the point about the center of its
//! width-`b^-k` interval. `k = -1` leaves the coordinate alone. Flips stop at
//! the stored precision, so a reflected value is `2c - x` minus at most `b^-K`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::digitspace::{DigitExpansion, DigitPoint};
use crate::error::{Error, Result};
use crate::pointset::PointSet;

/// Per-coordinate reflection orders, each `>= -1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReflectionVector(Vec<i32>);

impl ReflectionVector {
    pub fn new(orders: Vec<i32>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::Contract("reflection vector is empty".into()));
        }
        if let Some(k) = orders.iter().find(|&&k| k < -1) {
            return Err(Error::Contract(format!("reflection order {k} below -1")));
        }
        Ok(ReflectionVector(orders))
    }

    /// Reflect every coordinate at the given nonnegative orders.
    pub fn uniform(orders: &[usize]) -> Result<Self> {
        Self::new(orders.iter().map(|&k| k as i32).collect())
    }

    pub fn identity(dim: usize) -> Self {
        ReflectionVector(vec![-1; dim])
    }

    /// Reflects only coordinate `j` at order `k`.
    pub fn single(dim: usize, j: usize, k: usize) -> Self {
        let mut v = vec![-1; dim];
        v[j] = k as i32;
        ReflectionVector(v)
    }

    pub fn orders(&self) -> &[i32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `kappa+`, with `-1` entries mapped to 0.
    pub fn positive_part(&self) -> Vec<usize> {
        self.0.iter().map(|&k| k.max(0) as usize).collect()
    }

    /// `|kappa+|`.
    pub fn positive_order(&self) -> usize {
        self.positive_part().iter().sum()
    }

    fn check(&self, dim: usize, precision: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::Contract(format!(
                "reflection vector has {} entries for dimension {dim}",
                self.dim()
            )));
        }
        if let Some(&k) = self.0.iter().find(|&&k| k > precision as i32) {
            return Err(Error::Precision(format!(
                "reflection order {k} exceeds precision {precision}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ReflectionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&k| if k < 0 { "-".to_string() } else { k.to_string() })
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

fn flip_tail(base: u32, digits: &mut [u8], k: i32) {
    if k < 0 {
        return;
    }
    let top = (base - 1) as u8;
    for d in &mut digits[k as usize..] {
        *d = top - *d;
    }
}

pub fn reflect_coordinate(e: &DigitExpansion, k: i32) -> Result<DigitExpansion> {
    if k < -1 {
        return Err(Error::Contract(format!("reflection order {k} below -1")));
    }
    if k > e.precision() as i32 {
        return Err(Error::Precision(format!(
            "reflection order {k} exceeds precision {}",
            e.precision()
        )));
    }
    let mut digits = e.digits().to_vec();
    flip_tail(e.base(), &mut digits, k);
    DigitExpansion::new(e.base(), digits)
}

/// `R_k(x) = 2 c_k(x) - x` on reals, with `R_k(1) = 1 - b^-k`.
pub fn reflect_real(x: f64, k: i32, base: u32) -> f64 {
    if k < 0 {
        return x;
    }
    let scale = f64::from(base).powi(k);
    if x >= 1.0 {
        return 1.0 - 1.0 / scale;
    }
    let t = (x * scale).floor();
    2.0 * (t + 0.5) / scale - x
}

pub fn reflect(x: &DigitPoint, kappa: &ReflectionVector) -> Result<DigitPoint> {
    kappa.check(x.dim(), x.precision())?;
    let mut digits = x.flat_digits().to_vec();
    for (coord, &k) in digits.chunks_mut(x.precision()).zip(kappa.orders()) {
        flip_tail(x.base(), coord, k);
    }
    Ok(DigitPoint::from_flat(x.base(), x.precision(), digits))
}

/// The reflections of every point of `set`, in order.
pub fn reflect_set(set: &PointSet, kappa: &ReflectionVector) -> Result<PointSet> {
    kappa.check(set.dim(), set.precision())?;
    let mut out = set.clone();
    let base = set.base();
    let precision = set.precision();
    for point in out.flat_digits_mut().chunks_mut(set.stride()) {
        for (coord, &k) in point.chunks_mut(precision).zip(kappa.orders()) {
            flip_tail(base, coord, k);
        }
    }
    Ok(out)
}

/// `F_kappa(P)`: the points of `P` followed by their reflections.
pub fn fold_sequence(set: &PointSet, kappa: &ReflectionVector) -> Result<PointSet> {
    if set.is_empty() {
        return Err(Error::Contract("cannot fold an empty point set".into()));
    }
    let reflected = reflect_set(set, kappa)?;
    let mut out = set.clone();
    out.extend_from(&reflected)?;
    Ok(out)
}

/// Splits `m - q` over `d` coordinates as evenly as possible, larger shares first.
///
/// For `d = 2, q = 0` this is `(floor((m+1)/2), m - floor((m+1)/2))`.
pub fn balanced_split(m: usize, q: usize, dim: usize) -> Result<Vec<usize>> {
    if q > m {
        return Err(Error::Contract(format!("q = {q} exceeds m = {m}")));
    }
    if dim == 0 {
        return Err(Error::Contract("dimension must be positive".into()));
    }
    let total = m - q;
    let floor = total / dim;
    let extra = total - dim * floor;
    Ok((0..dim).map(|j| if j < extra { floor + 1 } else { floor }).collect())
}

/// One fold at the balanced reflection vector for a `(lambda, q, m, d)`-net.
pub fn reflection_net(set: &PointSet, m: usize, q: usize) -> Result<PointSet> {
    let kappa = ReflectionVector::uniform(&balanced_split(m, q, set.dim())?)?;
    fold_sequence(set, &kappa)
}

/// Adjoins, for every point, all `2^d` coordinate-subset reflections at orders `rho`.
///
/// Folds are applied from the last coordinate to the first, so for `d = 2`
/// the output is `F_(r1,-)(F_(-,r2)(P))`.
pub fn box_fold(set: &PointSet, rho: &[usize]) -> Result<PointSet> {
    if rho.len() != set.dim() {
        return Err(Error::Contract(format!(
            "rho has {} entries for dimension {}",
            rho.len(),
            set.dim()
        )));
    }
    let mut out = set.clone();
    for j in (0..set.dim()).rev() {
        out = fold_sequence(&out, &ReflectionVector::single(set.dim(), j, rho[j]))?;
    }
    Ok(out)
}

/// The reflection vectors `(0,m), (1,m-1), ..., (m,0)`.
pub fn monomial_vectors(m: usize) -> Vec<ReflectionVector> {
    (0..=m)
        .map(|k| ReflectionVector(vec![k as i32, (m - k) as i32]))
        .collect()
}

/// Folds a two-dimensional `(0,m,2)`-net by every `(k, m-k)`, giving `2^(m+1)` times the points.
pub fn monomial_net(set: &PointSet, m: usize) -> Result<PointSet> {
    if set.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "monomial nets are two-dimensional, got d = {}",
            set.dim()
        )));
    }
    let mut out = set.clone();
    for kappa in monomial_vectors(m) {
        out = fold_sequence(&out, &kappa)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FoldScheme {
    None,
    Reflection,
    Box,
    Monomial,
}

impl FoldScheme {
    pub const ALL: [FoldScheme; 4] = [
        FoldScheme::None,
        FoldScheme::Reflection,
        FoldScheme::Box,
        FoldScheme::Monomial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FoldScheme::None => "none",
            FoldScheme::Reflection => "reflect",
            FoldScheme::Box => "box",
            FoldScheme::Monomial => "monomial",
        }
    }
}

impl fmt::Display for FoldScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FoldScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(FoldScheme::None),
            "reflect" | "reflection" => Ok(FoldScheme::Reflection),
            "box" => Ok(FoldScheme::Box),
            "monomial" => Ok(FoldScheme::Monomial),
            other => Err(Error::Unsupported(format!("unknown fold scheme '{other}'"))),
        }
    }
}

/// A resolved list of folds to apply in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub scheme: FoldScheme,
    pub vectors: Vec<ReflectionVector>,
}

impl FoldPlan {
    pub fn none() -> Self {
        FoldPlan {
            scheme: FoldScheme::None,
            vectors: Vec::new(),
        }
    }

    /// The standard plan for a `(lambda, q, m, d)`-net.
    ///
    /// `rho` overrides the balanced split for reflection and box folds.
    pub fn for_net(
        scheme: FoldScheme,
        m: usize,
        q: usize,
        dim: usize,
        rho: Option<&[usize]>,
    ) -> Result<Self> {
        let rho = match rho {
            Some(r) => {
                if r.len() != dim {
                    return Err(Error::Contract(format!(
                        "rho has {} entries for dimension {dim}",
                        r.len()
                    )));
                }
                r.to_vec()
            }
            None => balanced_split(m, q, dim)?,
        };
        let vectors = match scheme {
            FoldScheme::None => Vec::new(),
            FoldScheme::Reflection => vec![ReflectionVector::uniform(&rho)?],
            FoldScheme::Box => (0..dim)
                .rev()
                .map(|j| ReflectionVector::single(dim, j, rho[j]))
                .collect(),
            FoldScheme::Monomial => {
                if dim != 2 {
                    return Err(Error::Unsupported(format!(
                        "monomial nets are two-dimensional, got d = {dim}"
                    )));
                }
                monomial_vectors(m)
            }
        };
        Ok(FoldPlan { scheme, vectors })
    }

    /// Factor by which the plan multiplies the point count.
    pub fn multiplier(&self) -> usize {
        1 << self.vectors.len()
    }

    pub fn apply(&self, set: &PointSet) -> Result<PointSet> {
        let mut out = set.clone();
        for kappa in &self.vectors {
            out = fold_sequence(&out, kappa)?;
        }
        Ok(out)
    }
}
