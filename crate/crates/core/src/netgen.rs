//! Faure digital nets and sequences in prime base.
//!
//! Coordinate `j` (1-based) uses the generator matrix `P^(j-1) mod b`, where
//! `P` is the upper-triangular Pascal matrix `P[r][c] = binom(c, r)`. The
//! base-b digits of the index, least significant first, multiply the matrix
//! columns; the product gives the output digits, most significant first.

use serde::{Deserialize, Serialize};

use crate::digitspace::{check_prime_base, checked_power, DigitPoint};
use crate::error::{Error, Result};
use crate::pointset::PointSet;

/// A claimed `(lambda, q, m, d)`-net property in base `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetSpec {
    pub base: u32,
    pub dim: usize,
    pub m: usize,
    pub q: usize,
    pub lambda: u64,
    /// Relaxed nets allow `lambda >= b` and drop the fine-box cap.
    pub relaxed: bool,
}

impl NetSpec {
    pub fn new(base: u32, dim: usize, m: usize, q: usize, lambda: u64, relaxed: bool) -> Result<Self> {
        let spec = NetSpec {
            base,
            dim,
            m,
            q,
            lambda,
            relaxed,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// A plain `(0, m, d)`-net.
    pub fn net(base: u32, dim: usize, m: usize) -> Result<Self> {
        Self::new(base, dim, m, 0, 1, false)
    }

    pub fn validate(&self) -> Result<()> {
        check_prime_base(self.base)?;
        if self.dim == 0 {
            return Err(Error::Contract("dimension must be at least 1".into()));
        }
        if self.q > self.m {
            return Err(Error::Contract(format!("q = {} exceeds m = {}", self.q, self.m)));
        }
        if self.lambda == 0 {
            return Err(Error::Contract("lambda must be at least 1".into()));
        }
        if !self.relaxed && self.lambda >= u64::from(self.base) {
            return Err(Error::Contract(format!(
                "lambda = {} requires a relaxed net in base {}",
                self.lambda, self.base
            )));
        }
        self.try_n()?;
        Ok(())
    }

    fn try_n(&self) -> Result<u64> {
        checked_power(self.base, self.m)
            .and_then(|p| p.checked_mul(self.lambda))
            .ok_or_else(|| Error::Contract("lambda * b^m overflows".into()))
    }

    /// Number of points, `lambda * b^m`.
    pub fn n(&self) -> u64 {
        self.lambda * checked_power(self.base, self.m).expect("validated spec")
    }
}

/// Generator matrices `C^(1), ..., C^(d)`, each `K x K` with entries mod `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrixSet {
    base: u32,
    dim: usize,
    precision: usize,
    // row-major
    matrices: Vec<Vec<u8>>,
}

impl GeneratorMatrixSet {
    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// Entry `C^(j)[r][c]` with 0-based `j`, `r`, `c`.
    pub fn entry(&self, j: usize, r: usize, c: usize) -> u8 {
        self.matrices[j][r * self.precision + c]
    }

    pub fn row(&self, j: usize, r: usize) -> &[u8] {
        &self.matrices[j][r * self.precision..(r + 1) * self.precision]
    }

    /// Number of points addressable before index digits exceed the precision.
    pub fn capacity(&self) -> Option<u64> {
        checked_power(self.base, self.precision)
    }

    fn write_point(&self, index: u64, out: &mut [u8]) {
        let b = u64::from(self.base);
        let k = self.precision;
        let mut index_digits = [0u8; 64];
        let mut len = 0;
        let mut rest = index;
        while rest > 0 {
            index_digits[len] = (rest % b) as u8;
            rest /= b;
            len += 1;
        }
        let mut acc = [0u32; 64];
        for (j, coord) in out.chunks_mut(k).enumerate() {
            let mat = &self.matrices[j];
            let acc = &mut acc[..len];
            acc.fill(0);
            for (c, &a) in index_digits[..len].iter().enumerate() {
                if a == 0 {
                    continue;
                }
                // upper triangular: rows 0..=c only
                for (r, slot) in acc.iter_mut().enumerate().take(c + 1) {
                    *slot += u32::from(mat[r * k + c]) * u32::from(a);
                }
            }
            coord.fill(0);
            for (slot, &v) in coord.iter_mut().zip(acc.iter()) {
                *slot = (v % self.base) as u8;
            }
        }
    }

    fn check_index(&self, index: u64) -> Result<()> {
        if let Some(cap) = self.capacity() {
            if index >= cap {
                return Err(Error::IndexOverflow {
                    index,
                    capacity: format!("{}^{}", self.base, self.precision),
                });
            }
        }
        Ok(())
    }
}

fn mat_mul_mod(a: &[u8], b: &[u8], k: usize, base: u32) -> Vec<u8> {
    let mut out = vec![0u8; k * k];
    for r in 0..k {
        for c in r..k {
            let s: u32 = (r..=c)
                .map(|t| u32::from(a[r * k + t]) * u32::from(b[t * k + c]))
                .sum();
            out[r * k + c] = (s % base) as u8;
        }
    }
    out
}

/// Faure generator matrices `C^(j) = P^(j-1) mod b`.
pub fn faure_matrices(base: u32, dim: usize, precision: usize) -> Result<GeneratorMatrixSet> {
    check_prime_base(base)?;
    if dim == 0 || dim > base as usize {
        return Err(Error::Unsupported(format!(
            "Faure construction needs 1 <= d <= b, got d = {dim}, b = {base}"
        )));
    }
    if precision == 0 || precision > 64 {
        return Err(Error::Unsupported(format!("precision {precision} outside 1..=64")));
    }
    let k = precision;
    let mut pascal = vec![0u8; k * k];
    for c in 0..k {
        pascal[c] = 1;
        pascal[c * k + c] = 1;
        for r in 1..c {
            let s = u32::from(pascal[(r - 1) * k + c - 1]) + u32::from(pascal[r * k + c - 1]);
            pascal[r * k + c] = (s % base) as u8;
        }
    }
    let mut identity = vec![0u8; k * k];
    for r in 0..k {
        identity[r * k + r] = 1;
    }
    let mut matrices = Vec::with_capacity(dim);
    let mut current = identity;
    for _ in 0..dim {
        let next = mat_mul_mod(&current, &pascal, k, base);
        matrices.push(current);
        current = next;
    }
    Ok(GeneratorMatrixSet {
        base,
        dim,
        precision,
        matrices,
    })
}

/// Point `index` (0-based) of the digital sequence.
pub fn sequence_point(index: u64, gen: &GeneratorMatrixSet) -> Result<DigitPoint> {
    gen.check_index(index)?;
    let mut digits = vec![0u8; gen.dim * gen.precision];
    gen.write_point(index, &mut digits);
    Ok(DigitPoint::from_flat(gen.base, gen.precision, digits))
}

/// Points `start..end` of the sequence.
pub fn sequence_range(start: u64, end: u64, gen: &GeneratorMatrixSet) -> Result<PointSet> {
    if end < start {
        return Err(Error::Contract("range end precedes start".into()));
    }
    if end > start {
        gen.check_index(end - 1)?;
    }
    let n = usize::try_from(end - start)
        .map_err(|_| Error::Contract("range too large".into()))?;
    let stride = gen.dim * gen.precision;
    let mut digits = vec![0u8; n * stride];
    for (i, chunk) in digits.chunks_mut(stride).enumerate() {
        gen.write_point(start + i as u64, chunk);
    }
    PointSet::from_flat(gen.base, gen.dim, gen.precision, digits)
}

/// A point set together with the net property it claims.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Net {
    pub spec: NetSpec,
    pub points: PointSet,
}

/// The first `lambda * b^m` points of the sequence generated by `gen`.
pub fn generate_net(spec: &NetSpec, gen: &GeneratorMatrixSet) -> Result<Net> {
    spec.validate()?;
    if spec.base != gen.base || spec.dim != gen.dim {
        return Err(Error::Contract(
            "net spec and generator matrices disagree on base or dimension".into(),
        ));
    }
    let points = sequence_range(0, spec.n(), gen)?;
    Ok(Net {
        spec: *spec,
        points,
    })
}

/// Convenience: a Faure net at the given precision.
pub fn faure_net(spec: &NetSpec, precision: usize) -> Result<Net> {
    let gen = faure_matrices(spec.base, spec.dim, precision)?;
    generate_net(spec, &gen)
}
