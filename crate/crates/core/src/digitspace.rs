//! Base-b digit arithmetic and elementary-interval geometry.
//!
//! Every point handled by the crate is stored as exact base-b digit vectors of
//! a fixed precision `K`. Real values are only produced at the very end, when
//! an integrand is evaluated.

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Largest base supported by the in-memory digit representation.
pub const MAX_BASE: u32 = 255;

/// Number of base-b digits needed to hold a double without loss.
pub fn default_precision(base: u32) -> usize {
    (53.0 / f64::from(base).log2()).ceil() as usize
}

pub fn is_prime(b: u32) -> bool {
    if b < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= b {
        if b.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

pub(crate) fn check_base(base: u32) -> Result<()> {
    if !(2..=MAX_BASE).contains(&base) {
        return Err(Error::Unsupported(format!(
            "base {base} outside 2..={MAX_BASE}"
        )));
    }
    Ok(())
}

pub(crate) fn check_prime_base(base: u32) -> Result<()> {
    check_base(base)?;
    if !is_prime(base) {
        return Err(Error::Unsupported(format!("base {base} is not prime")));
    }
    Ok(())
}

/// `b^k` if it fits in a `u64`.
pub(crate) fn checked_power(base: u32, k: usize) -> Option<u64> {
    u64::from(base).checked_pow(u32::try_from(k).ok()?)
}

/// A real in `[0, 1)` written as `K` base-b digits, most significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitExpansion {
    base: u32,
    digits: Vec<u8>,
}

impl DigitExpansion {
    pub fn new(base: u32, digits: Vec<u8>) -> Result<Self> {
        check_base(base)?;
        if digits.is_empty() {
            return Err(Error::Contract("precision must be at least 1".into()));
        }
        if let Some(d) = digits.iter().find(|&&d| u32::from(d) >= base) {
            return Err(Error::Contract(format!("digit {d} invalid in base {base}")));
        }
        Ok(DigitExpansion { base, digits })
    }

    pub(crate) fn from_raw(base: u32, digits: Vec<u8>) -> Self {
        debug_assert!(digits.iter().all(|&d| u32::from(d) < base));
        DigitExpansion { base, digits }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn value(&self) -> f64 {
        from_digits(self)
    }

    /// Integer formed by the leading `k` digits, i.e. `floor(b^k x)`.
    pub fn prefix(&self, k: usize) -> Result<u64> {
        prefix_value(self.base, &self.digits, k)
    }
}

/// Encodes `x` as `K` base-b digits.
///
/// The digits are those of the K-digit base-b rational nearest to `x`, so a
/// double that rounds a short base-b fraction (such as `1/3` in base 3) gets
/// the terminating expansion. Values that would round up to 1 keep the
/// all-`(b-1)` expansion instead.
pub fn to_digits(x: f64, base: u32, precision: usize) -> Result<DigitExpansion> {
    check_base(base)?;
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(x));
    }
    if precision == 0 {
        return Err(Error::Contract("precision must be at least 1".into()));
    }
    let mut digits = vec![0u8; precision];
    if x == 0.0 {
        return Ok(DigitExpansion::from_raw(base, digits));
    }

    // x = mantissa * 2^-shift exactly
    let bits = x.to_bits();
    let exponent = ((bits >> 52) & 0x7ff) as i64;
    let fraction = bits & ((1u64 << 52) - 1);
    let (mantissa, shift) = if exponent == 0 {
        (fraction, 1074u64)
    } else {
        (fraction | (1u64 << 52), (1075 - exponent) as u64)
    };

    let scale = BigUint::from(base).pow(precision as u32);
    let scaled = BigUint::from(mantissa) * &scale;
    // round half up: floor((scaled + 2^(shift-1)) / 2^shift)
    let half = BigUint::from(1u8) << (shift - 1);
    let mut nearest: BigUint = (scaled + half) >> shift;
    if nearest >= scale {
        nearest = scale - 1u8;
    }
    let radix = nearest.to_radix_be(base);
    let offset = precision - radix.len();
    if !(radix.len() == 1 && radix[0] == 0) {
        digits[offset..].copy_from_slice(&radix);
    }
    Ok(DigitExpansion::from_raw(base, digits))
}

/// Real value of a digit expansion.
pub fn from_digits(e: &DigitExpansion) -> f64 {
    digits_to_f64(e.base, &e.digits)
}

/// Largest `c` with `b^c < 2^64`, so `c` digits form a `u64`.
pub(crate) fn u64_chunk(base: u32) -> usize {
    let mut c = 0;
    let mut p: u64 = 1;
    while let Some(next) = p.checked_mul(u64::from(base)) {
        p = next;
        c += 1;
    }
    c
}

/// Rounds `(q + f) 2^-scale` to the nearest double, ties to even, where
/// `0 <= f < 1` and `sticky` says whether `f > 0`. `q` must have at least 54 bits.
fn round_quotient(q: u128, sticky: bool, scale: i32) -> f64 {
    let bits = 128 - q.leading_zeros() as i32;
    let shift = bits - 53;
    let mut m = (q >> shift) as u64;
    let rest = q & ((1u128 << shift) - 1);
    let half = 1u128 << (shift - 1);
    if rest > half || (rest == half && (sticky || m & 1 == 1)) {
        m += 1;
    }
    m as f64 * 2f64.powi(shift - scale)
}

/// Evaluates `sum digit_k b^-k`, correctly rounded to the nearest double.
///
/// The result is capped just below 1, since every digit string denotes a
/// value in `[0, 1)`.
pub fn digits_to_f64(base: u32, digits: &[u8]) -> f64 {
    let b = u64::from(base);
    let value = if digits.len() <= u64_chunk(base) {
        let mut n: u64 = 0;
        let mut d: u64 = 1;
        for &x in digits {
            n = n * b + u64::from(x);
            d *= b;
        }
        if n == 0 {
            return 0.0;
        }
        let lz = n.leading_zeros() as i32;
        let scale = 64 + lz;
        let num = u128::from(n) << scale;
        let den = u128::from(d);
        round_quotient(num / den, !num.is_multiple_of(den), scale)
    } else {
        let n = BigUint::from_radix_be(digits, base).unwrap_or_default();
        if n.bits() == 0 {
            return 0.0;
        }
        let d = BigUint::from(base).pow(digits.len() as u32);
        let scale = 55 + d.bits() as i32 - n.bits() as i32;
        let num = n << scale as u32;
        let q = &num / &d;
        let sticky = &q * &d != num;
        let q = q.iter_u64_digits().rev().fold(0u128, |acc, w| (acc << 64) | u128::from(w));
        round_quotient(q, sticky, scale)
    };
    value.min(1.0 - f64::EPSILON / 2.0)
}

fn prefix_value(base: u32, digits: &[u8], k: usize) -> Result<u64> {
    if k > digits.len() {
        return Err(Error::Precision(format!(
            "resolution {k} exceeds precision {}",
            digits.len()
        )));
    }
    let b = u64::from(base);
    let mut t: u64 = 0;
    for &d in &digits[..k] {
        t = t
            .checked_mul(b)
            .and_then(|t| t.checked_add(u64::from(d)))
            .ok_or_else(|| Error::Precision(format!("b^{k} overflows u64")))?;
    }
    Ok(t)
}

/// A point of `[0,1)^d` as `d` digit vectors sharing base and precision.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitPoint {
    base: u32,
    precision: usize,
    digits: Vec<u8>,
}

impl DigitPoint {
    pub fn new(coords: Vec<DigitExpansion>) -> Result<Self> {
        let first = coords
            .first()
            .ok_or_else(|| Error::Contract("a point needs at least one coordinate".into()))?;
        let (base, precision) = (first.base, first.precision());
        let mut digits = Vec::with_capacity(coords.len() * precision);
        for c in &coords {
            if c.base != base || c.precision() != precision {
                return Err(Error::Contract(
                    "coordinates must share base and precision".into(),
                ));
            }
            digits.extend_from_slice(&c.digits);
        }
        Ok(DigitPoint {
            base,
            precision,
            digits,
        })
    }

    pub fn from_values(values: &[f64], base: u32, precision: usize) -> Result<Self> {
        let coords = values
            .iter()
            .map(|&x| to_digits(x, base, precision))
            .collect::<Result<Vec<_>>>()?;
        DigitPoint::new(coords)
    }

    /// Wraps a flat `d * K` digit buffer.
    pub(crate) fn from_flat(base: u32, precision: usize, digits: Vec<u8>) -> Self {
        debug_assert_eq!(digits.len() % precision, 0);
        DigitPoint {
            base,
            precision,
            digits,
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn dim(&self) -> usize {
        self.digits.len() / self.precision
    }

    pub fn coord(&self, j: usize) -> &[u8] {
        &self.digits[j * self.precision..(j + 1) * self.precision]
    }

    pub fn expansion(&self, j: usize) -> DigitExpansion {
        DigitExpansion::from_raw(self.base, self.coord(j).to_vec())
    }

    pub fn flat_digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn values(&self) -> Vec<f64> {
        self.digits
            .chunks(self.precision)
            .map(|c| digits_to_f64(self.base, c))
            .collect()
    }
}

/// Translation vector of the resolution-`kappa` interval containing `x`.
pub fn interval_index(x: &DigitPoint, kappa: &[usize]) -> Result<Vec<u64>> {
    if kappa.len() != x.dim() {
        return Err(Error::Contract(format!(
            "resolution has {} entries for a {}-dimensional point",
            kappa.len(),
            x.dim()
        )));
    }
    kappa
        .iter()
        .enumerate()
        .map(|(j, &k)| prefix_value(x.base, x.coord(j), k))
        .collect()
}

/// Center of `B_{kappa,tau}` as a digit point of the given precision.
///
/// The center of a width-`b^-k` interval is its `k`-digit left end followed by
/// the expansion of `1/2`; for odd `b` that tail repeats and is truncated.
pub fn interval_center(
    kappa: &[usize],
    tau: &[u64],
    base: u32,
    precision: usize,
) -> Result<DigitPoint> {
    check_base(base)?;
    if kappa.len() != tau.len() || kappa.is_empty() {
        return Err(Error::Contract("kappa and tau must be nonempty and equal length".into()));
    }
    let mut digits = Vec::with_capacity(kappa.len() * precision);
    for (&k, &t) in kappa.iter().zip(tau) {
        if k >= precision {
            return Err(Error::Precision(format!(
                "center at resolution {k} needs more than {precision} digits"
            )));
        }
        let width = checked_power(base, k)
            .ok_or_else(|| Error::Precision(format!("b^{k} overflows u64")))?;
        if t >= width {
            return Err(Error::Contract(format!("translation {t} >= b^{k}")));
        }
        let start = digits.len();
        digits.resize(start + precision, 0);
        let coord = &mut digits[start..];
        let mut rest = t;
        for slot in coord[..k].iter_mut().rev() {
            *slot = (rest % u64::from(base)) as u8;
            rest /= u64::from(base);
        }
        let half = (base / 2) as u8;
        if base.is_multiple_of(2) {
            coord[k] = half;
        } else {
            coord[k..].fill(half);
        }
    }
    Ok(DigitPoint::from_flat(base, precision, digits))
}

/// Center coordinates `(t_j + 1/2) b^-k_j` as doubles.
pub fn interval_center_values(kappa: &[usize], tau: &[u64], base: u32) -> Vec<f64> {
    kappa
        .iter()
        .zip(tau)
        .map(|(&k, &t)| (t as f64 + 0.5) / f64::from(base).powi(k as i32))
        .collect()
}

/// A base-b elementary interval `prod_j [t_j b^-k_j, (t_j+1) b^-k_j)`.
///
/// Coordinates outside an active subset are stored with `k_j = 0`, which
/// makes them span `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ElementaryInterval {
    base: u32,
    kappa: Vec<usize>,
    tau: Vec<u64>,
}

impl ElementaryInterval {
    pub fn new(base: u32, kappa: Vec<usize>, tau: Vec<u64>) -> Result<Self> {
        check_base(base)?;
        if kappa.len() != tau.len() {
            return Err(Error::Contract("kappa and tau lengths differ".into()));
        }
        for (&k, &t) in kappa.iter().zip(&tau) {
            let width = checked_power(base, k)
                .ok_or_else(|| Error::Precision(format!("b^{k} overflows u64")))?;
            if t >= width {
                return Err(Error::Contract(format!("translation {t} >= b^{k}")));
            }
        }
        Ok(ElementaryInterval { base, kappa, tau })
    }

    /// `B_{u,kappa,tau}`: resolutions given only on the coordinates in `u`.
    pub fn on_subset(
        base: u32,
        dim: usize,
        u: &[usize],
        kappa: &[usize],
        tau: &[u64],
    ) -> Result<Self> {
        if u.len() != kappa.len() || u.len() != tau.len() {
            return Err(Error::Contract("u, kappa and tau lengths differ".into()));
        }
        let mut full_k = vec![0; dim];
        let mut full_t = vec![0; dim];
        for ((&j, &k), &t) in u.iter().zip(kappa).zip(tau) {
            if j >= dim {
                return Err(Error::Contract(format!("coordinate {j} >= dimension {dim}")));
            }
            full_k[j] = k;
            full_t[j] = t;
        }
        ElementaryInterval::new(base, full_k, full_t)
    }

    pub fn kappa(&self) -> &[usize] {
        &self.kappa
    }

    pub fn tau(&self) -> &[u64] {
        &self.tau
    }

    /// `|kappa|`, so that the volume is `b^-order`.
    pub fn order(&self) -> usize {
        self.kappa.iter().sum()
    }

    pub fn volume(&self) -> f64 {
        f64::from(self.base).powi(-(self.order() as i32))
    }

    pub fn contains(&self, x: &DigitPoint) -> Result<bool> {
        Ok(interval_index(x, &self.kappa)? == self.tau)
    }

    pub fn center(&self) -> Vec<f64> {
        interval_center_values(&self.kappa, &self.tau, self.base)
    }
}
