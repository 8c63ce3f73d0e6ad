//! Base-b Haar multiresolution of grid-constant functions and the
//! scrambled-net variance prediction built from it.

use rand::Rng;
use serde::Serialize;

use super::gain::{gain_numerator, nonempty_subsets};
use crate::digitspace::{check_base, checked_power};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::rng::{keyed_rng, Role};

const MAX_CELLS: u64 = 1 << 26;

/// A function on `[0,1)^d` that is constant on each cell of the
/// `b^levels x ... x b^levels` grid.
///
/// Values are stored row-major with coordinate 0 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    base: u32,
    dim: usize,
    levels: usize,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn from_values(base: u32, dim: usize, levels: usize, values: Vec<f64>) -> Result<Self> {
        check_base(base)?;
        if dim == 0 {
            return Err(Error::Contract("grid function needs d >= 1".into()));
        }
        let cells = checked_power(base, levels * dim)
            .filter(|&c| c <= MAX_CELLS)
            .ok_or_else(|| Error::Precision(format!("grid of {base}^({levels}*{dim}) cells is too large")))?;
        if values.len() as u64 != cells {
            return Err(Error::Contract(format!(
                "grid needs {cells} values, got {}",
                values.len()
            )));
        }
        Ok(GridFunction {
            base,
            dim,
            levels,
            values,
        })
    }

    /// Builds values from per-axis cell indices.
    pub fn from_fn<F: FnMut(&[u64]) -> f64>(base: u32, dim: usize, levels: usize, mut f: F) -> Result<Self> {
        check_base(base)?;
        let side = checked_power(base, levels).ok_or_else(|| Error::Precision("grid side overflows".into()))?;
        let cells = checked_power(base, levels * dim)
            .filter(|&c| c <= MAX_CELLS)
            .ok_or_else(|| Error::Precision(format!("grid of {base}^({levels}*{dim}) cells is too large")))?;
        let mut idx = vec![0u64; dim];
        let mut values = Vec::with_capacity(cells as usize);
        for cell in 0..cells {
            let mut rest = cell;
            for slot in idx.iter_mut().rev() {
                *slot = rest % side;
                rest /= side;
            }
            values.push(f(&idx));
        }
        Self::from_values(base, dim, levels, values)
    }

    /// Independent `U[0,1)` cell values drawn from `seed`.
    pub fn random(base: u32, dim: usize, levels: usize, seed: u64) -> Result<Self> {
        let mut rng = keyed_rng(seed, 0, Role::Points, 0);
        Self::from_fn(base, dim, levels, |_| rng.random::<f64>())
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn side(&self) -> u64 {
        u64::from(self.base).pow(self.levels as u32)
    }

    /// Value at a point given by its leading digits per coordinate.
    pub fn eval_digits(&self, coords: impl IntoIterator<Item = impl AsRef<[u8]>>) -> f64 {
        let b = u64::from(self.base);
        let mut key = 0u64;
        for c in coords {
            for &d in &c.as_ref()[..self.levels] {
                key = key * b + u64::from(d);
            }
        }
        self.values[key as usize]
    }

    /// Value at point `i` of a point set with matching base and dimension.
    pub fn eval_point(&self, set: &PointSet, i: usize) -> f64 {
        self.eval_digits((0..self.dim).map(|j| set.coord(i, j)))
    }

    /// Value at a real point of `[0,1)^d`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let side = self.side();
        let mut key = 0u64;
        for &v in x {
            let t = ((v * side as f64).floor().max(0.0) as u64).min(side - 1);
            key = key * side + t;
        }
        self.values[key as usize]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `int f^2 - (int f)^2`.
    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / self.values.len() as f64
    }

    /// Mean of `f` over the coordinates outside `u`, as a grid over `u`.
    fn marginal(&self, u: &[usize]) -> Vec<f64> {
        let side = self.side() as usize;
        let out_len = side.pow(u.len() as u32);
        let mut out = vec![0.0; out_len];
        let mut idx = vec![0usize; self.dim];
        for (cell, &v) in self.values.iter().enumerate() {
            let mut rest = cell;
            for slot in idx.iter_mut().rev() {
                *slot = rest % side;
                rest /= side;
            }
            let key = u.iter().fold(0usize, |acc, &j| acc * side + idx[j]);
            out[key] += v;
        }
        let scale = out_len as f64 / self.values.len() as f64;
        for v in &mut out {
            *v *= scale;
        }
        out
    }
}

fn check_subset(dim: usize, u: &[usize], kappa: &[usize]) -> Result<()> {
    if u.is_empty() || u.len() != kappa.len() {
        return Err(Error::Contract("need a nonempty u with one resolution per coordinate".into()));
    }
    if u.windows(2).any(|w| w[0] >= w[1]) || u.iter().any(|&j| j >= dim) {
        return Err(Error::Contract(format!("u = {u:?} must be increasing coordinates below {dim}")));
    }
    Ok(())
}

/// `sigma^2_{u,kappa}`, the squared norm of the `(u, kappa)` Haar component.
///
/// Inner products with `psi_{ktc} = b^((k+1)/2) N_{ktc} - b^((k-1)/2) W_{kt}`
/// are summed exactly over grid cells, then combined through the Gram
/// factors `prod_j (1[c_j = c'_j] - 1/b)`.
pub fn wavelet_sigma(f: &GridFunction, u: &[usize], kappa: &[usize]) -> Result<f64> {
    check_subset(f.dim, u, kappa)?;
    if kappa.iter().any(|&k| k >= f.levels) {
        return Ok(0.0);
    }
    let b = f.base as usize;
    let bf = f64::from(f.base);
    let side = f.side() as usize;
    let s = u.len();
    let g = f.marginal(u);
    let cell_volume = (side as f64).powi(-(s as i32));

    let widths: Vec<usize> = kappa.iter().map(|&k| b.pow(k as u32)).collect();
    let n_tau: usize = widths.iter().product();
    let n_gamma = b.pow(s as u32);

    // sums[tau][delta] = integral of g over the sub-box at digit kappa+1 = delta
    let mut sums = vec![0.0; n_tau * n_gamma];
    let mut idx = vec![0usize; s];
    for (cell, &v) in g.iter().enumerate() {
        let mut rest = cell;
        for slot in idx.iter_mut().rev() {
            *slot = rest % side;
            rest /= side;
        }
        let mut tau = 0usize;
        let mut delta = 0usize;
        for (pos, &t) in idx.iter().enumerate() {
            let below = b.pow((f.levels - kappa[pos] - 1) as u32);
            tau = tau * widths[pos] + t / (below * b);
            delta = delta * b + (t / below) % b;
        }
        sums[tau * n_gamma + delta] += v * cell_volume;
    }

    let hi: Vec<f64> = kappa.iter().map(|&k| bf.powf((k as f64 + 1.0) / 2.0)).collect();
    let lo: Vec<f64> = kappa.iter().map(|&k| bf.powf((k as f64 - 1.0) / 2.0)).collect();
    let digits_of = |mut x: usize| {
        let mut out = vec![0usize; s];
        for slot in out.iter_mut().rev() {
            *slot = x % b;
            x /= b;
        }
        out
    };
    let all_digits: Vec<Vec<usize>> = (0..n_gamma).map(digits_of).collect();
    // psi weight of sub-box delta under wavelet gamma
    let mut weight = vec![0.0; n_gamma * n_gamma];
    // Gram factor between gamma and gamma'
    let mut gram = vec![0.0; n_gamma * n_gamma];
    for (gi, gd) in all_digits.iter().enumerate() {
        for (di, dd) in all_digits.iter().enumerate() {
            weight[gi * n_gamma + di] = (0..s)
                .map(|p| if gd[p] == dd[p] { hi[p] - lo[p] } else { -lo[p] })
                .product();
            gram[gi * n_gamma + di] = (0..s)
                .map(|p| f64::from(u8::from(gd[p] == dd[p])) - 1.0 / bf)
                .product();
        }
    }

    let mut total = 0.0;
    let mut coef = vec![0.0; n_gamma];
    for tau in 0..n_tau {
        let row = &sums[tau * n_gamma..(tau + 1) * n_gamma];
        for (gi, c) in coef.iter_mut().enumerate() {
            *c = row
                .iter()
                .zip(&weight[gi * n_gamma..(gi + 1) * n_gamma])
                .map(|(a, w)| a * w)
                .sum();
        }
        for gi in 0..n_gamma {
            for gj in 0..n_gamma {
                total += coef[gi] * coef[gj] * gram[gi * n_gamma + gj];
            }
        }
    }
    Ok(total.max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiresEntry {
    pub u: Vec<usize>,
    pub kappa: Vec<usize>,
    pub sigma2: f64,
}

/// Every nonzero-capable `sigma^2_{u,kappa}` of a grid function: nonempty `u`
/// and all `k_j < levels`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiresTable {
    pub base: u32,
    pub levels: usize,
    pub variance: f64,
    pub entries: Vec<MultiresEntry>,
}

impl MultiresTable {
    pub fn compute(f: &GridFunction) -> Result<Self> {
        let mut entries = Vec::new();
        for u in nonempty_subsets(f.dim) {
            for kappa in resolution_box(u.len(), f.levels) {
                let sigma2 = wavelet_sigma(f, &u, &kappa)?;
                entries.push(MultiresEntry {
                    u: u.clone(),
                    kappa,
                    sigma2,
                });
            }
        }
        Ok(MultiresTable {
            base: f.base,
            levels: f.levels,
            variance: f.variance(),
            entries,
        })
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|e| e.sigma2).sum()
    }
}

/// All `kappa` of length `len` with every entry below `levels`.
fn resolution_box(len: usize, levels: usize) -> Vec<Vec<usize>> {
    let count = levels.pow(len as u32);
    (0..count)
        .map(|mut x| {
            let mut k = vec![0; len];
            for slot in k.iter_mut().rev() {
                *slot = x % levels;
                x /= levels;
            }
            k
        })
        .collect()
}

/// Variance of the equal-weight estimator over scrambled copies of `set`:
/// `(1/n) sum Gamma_{u,kappa} sigma^2_{u,kappa}`.
pub fn predicted_variance(f: &GridFunction, set: &PointSet) -> Result<f64> {
    if f.base != set.base() || f.dim != set.dim() {
        return Err(Error::Contract(format!(
            "grid function has base {} dim {}, points have base {} dim {}",
            f.base,
            f.dim,
            set.base(),
            set.dim()
        )));
    }
    let table = MultiresTable::compute(f)?;
    let n = set.len() as f64;
    let mut total = 0.0;
    for e in &table.entries {
        if e.sigma2 == 0.0 {
            continue;
        }
        let num = gain_numerator(set, &e.u, &e.kappa)?;
        let gamma = num as f64 / (n * f64::from(set.base() - 1).powi(e.u.len() as i32));
        total += gamma * e.sigma2;
    }
    Ok(total / n)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Averages over blocks of b^(levels-k) cells along one axis.
    fn project(values: &[f64], base: usize, dim: usize, levels: usize, axis: usize, k: usize) -> Vec<f64> {
        let side = base.pow(levels as u32);
        let block = base.pow((levels - k) as u32);
        let stride = side.pow((dim - 1 - axis) as u32);
        let mut out = vec![0.0; values.len()];
        for (cell, slot) in out.iter_mut().enumerate() {
            let t = (cell / stride) % side;
            let start = t - t % block;
            let base_cell = cell - t * stride;
            let s: f64 = (start..start + block).map(|r| values[base_cell + r * stride]).sum();
            *slot = s / block as f64;
        }
        out
    }

    // nu_{u,kappa} = prod_{j in u} (E_{k_j+1} - E_{k_j}) prod_{j not in u} E_0 f
    fn projection_sigma(f: &GridFunction, u: &[usize], kappa: &[usize]) -> f64 {
        let (b, d, l) = (f.base() as usize, f.dim(), f.levels());
        let mut nu = vec![0.0; f.values().len()];
        for w in 0u32..(1 << u.len()) {
            let mut v = f.values().to_vec();
            for axis in 0..d {
                let k = match u.iter().position(|&j| j == axis) {
                    Some(p) => kappa[p] + usize::from(w >> p & 1 == 1),
                    None => 0,
                };
                v = project(&v, b, d, l, axis, k);
            }
            let sign = if (u.len() as u32 - w.count_ones()).is_multiple_of(2) { 1.0 } else { -1.0 };
            for (a, x) in nu.iter_mut().zip(&v) {
                *a += sign * x;
            }
        }
        nu.iter().map(|x| x * x).sum::<f64>() / nu.len() as f64
    }

    #[test]
    fn constant_has_no_components() {
        let f = GridFunction::from_fn(2, 2, 3, |_| 4.5).unwrap();
        let t = MultiresTable::compute(&f).unwrap();
        assert!(t.entries.iter().all(|e| e.sigma2.abs() < 1e-28));
    }

    #[test]
    fn indicator_of_first_digit_cell() {
        for b in [2u32, 3, 5] {
            let f = GridFunction::from_fn(b, 1, 1, |t| f64::from(u8::from(t[0] == 0))).unwrap();
            let expect = (1.0 / f64::from(b)) * (1.0 - 1.0 / f64::from(b));
            assert!((wavelet_sigma(&f, &[0], &[0]).unwrap() - expect).abs() < 1e-15);
            assert_eq!(wavelet_sigma(&f, &[0], &[1]).unwrap(), 0.0);
            assert!((f.variance() - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_projection_oracle() {
        for (b, l, seed) in [(2u32, 3usize, 1u64), (3, 2, 2), (2, 2, 3)] {
            let f = GridFunction::random(b, 2, l, seed).unwrap();
            let t = MultiresTable::compute(&f).unwrap();
            for e in &t.entries {
                let oracle = projection_sigma(&f, &e.u, &e.kappa);
                assert!((e.sigma2 - oracle).abs() < 1e-13, "{e:?} vs {oracle}");
            }
        }
    }

    #[test]
    fn components_sum_to_variance() {
        for (b, d, l) in [(2u32, 2usize, 3usize), (3, 2, 2), (2, 3, 2), (5, 1, 2)] {
            let f = GridFunction::random(b, d, l, 11).unwrap();
            let t = MultiresTable::compute(&f).unwrap();
            assert!((t.sum() - t.variance).abs() <= 1e-12 * t.variance, "b={b} d={d}");
        }
    }

    #[test]
    fn single_point_prediction_is_monte_carlo() {
        let f = GridFunction::random(2, 2, 3, 5).unwrap();
        let set = PointSet::from_values(&[vec![0.4, 0.9]], 2, 10).unwrap();
        let p = predicted_variance(&f, &set).unwrap();
        assert!((p - f.variance()).abs() < 1e-14);
    }

    #[test]
    fn evaluation_by_digits_and_reals_agree() {
        let f = GridFunction::random(3, 2, 2, 9).unwrap();
        let set = PointSet::from_values(&[vec![0.51, 0.07], vec![0.0, 0.999]], 3, 8).unwrap();
        for i in 0..set.len() {
            assert_eq!(f.eval_point(&set, i), f.eval(&set.values(i)));
        }
    }
}
