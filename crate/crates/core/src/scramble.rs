//! Digit scrambles that keep each point uniform and the point set a net.
//!
//! Three scrambles are affine digit maps `x_k = C_k + sum_{j<=k} M_kj a_j mod b`
//! with a random lower-triangular invertible `M`; they differ only in how `M`
//! is populated. The fourth is the nested uniform scramble, where digit `k`
//! goes through a random permutation chosen by the `k - 1` digits before it.
//! The permutation tree is never stored: each node is regenerated from a
//! stream keyed by its position.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::digitspace::{check_prime_base, DigitPoint};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::rng::{keyed_rng, Role};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScrambleKind {
    NestedUniform,
    RandomLinear,
    IBinomial,
    Asm,
}

impl ScrambleKind {
    pub const ALL: [ScrambleKind; 4] = [
        ScrambleKind::NestedUniform,
        ScrambleKind::RandomLinear,
        ScrambleKind::IBinomial,
        ScrambleKind::Asm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScrambleKind::NestedUniform => "nested",
            ScrambleKind::RandomLinear => "randomlinear",
            ScrambleKind::IBinomial => "ibinomial",
            ScrambleKind::Asm => "asm",
        }
    }
}

impl fmt::Display for ScrambleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScrambleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nested" | "nesteduniform" => Ok(ScrambleKind::NestedUniform),
            "randomlinear" | "linear" => Ok(ScrambleKind::RandomLinear),
            "ibinomial" | "i-binomial" => Ok(ScrambleKind::IBinomial),
            "asm" => Ok(ScrambleKind::Asm),
            other => Err(Error::Unsupported(format!("unknown scramble '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct AffineMap {
    // column-major lower triangle: column j holds rows j..K
    columns: Vec<Vec<u8>>,
    shift: Vec<u8>,
}

impl AffineMap {
    fn entry(&self, k: usize, j: usize) -> u8 {
        if k < j {
            0
        } else {
            self.columns[j][k - j]
        }
    }
}

/// A seeded, reusable randomization of `d`-dimensional digit points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scramble {
    kind: ScrambleKind,
    base: u32,
    precision: usize,
    dim: usize,
    seed: u64,
    maps: Vec<AffineMap>,
}

impl Scramble {
    pub fn new(kind: ScrambleKind, base: u32, precision: usize, dim: usize, seed: u64) -> Result<Self> {
        check_prime_base(base)?;
        if dim == 0 || precision == 0 || precision > 255 {
            return Err(Error::Contract("dimension must be positive and precision in 1..=255".into()));
        }
        if kind == ScrambleKind::NestedUniform {
            // level byte plus a prefix below b^(K-1) must fit the 128-bit node key
            let bits = (precision.saturating_sub(1)) as f64 * f64::from(base).log2();
            if bits >= 120.0 {
                return Err(Error::Precision(format!(
                    "nested scrambling supports at most 120 bits of prefix, got {precision} digits"
                )));
            }
        }
        let maps = match kind {
            ScrambleKind::NestedUniform => Vec::new(),
            _ => (0..dim)
                .map(|j| sample_affine(kind, base, precision, seed, j as u32))
                .collect(),
        };
        Ok(Scramble {
            kind,
            base,
            precision,
            dim,
            seed,
            maps,
        })
    }

    /// ASM scramble with explicit diagonals `h[j]` and shifts `c[j]` per coordinate.
    pub fn asm_from_parts(base: u32, h: Vec<Vec<u8>>, shift: Vec<Vec<u8>>) -> Result<Self> {
        check_prime_base(base)?;
        let dim = h.len();
        let precision = h.first().map_or(0, Vec::len);
        if dim == 0 || precision == 0 || shift.len() != dim {
            return Err(Error::Contract("need one nonempty h and shift per coordinate".into()));
        }
        let mut maps = Vec::with_capacity(dim);
        for (hj, cj) in h.into_iter().zip(shift) {
            if hj.len() != precision || cj.len() != precision {
                return Err(Error::Contract("all coordinates need K entries".into()));
            }
            if hj.iter().any(|&v| v == 0 || u32::from(v) >= base)
                || cj.iter().any(|&v| u32::from(v) >= base)
            {
                return Err(Error::Contract("h must lie in 1..b and shifts in 0..b".into()));
            }
            let columns = hj
                .iter()
                .enumerate()
                .map(|(j, &v)| vec![v; precision - j])
                .collect();
            maps.push(AffineMap { columns, shift: cj });
        }
        Ok(Scramble {
            kind: ScrambleKind::Asm,
            base,
            precision,
            dim,
            seed: 0,
            maps,
        })
    }

    /// A general affine scramble from explicit lower-triangular matrices.
    ///
    /// `matrices[j][k]` is row `k` of coordinate `j`'s matrix and must hold at
    /// least `k + 1` entries; entries above the diagonal are ignored. The
    /// result is reported as a random linear scramble.
    pub fn affine_from_parts(base: u32, matrices: Vec<Vec<Vec<u8>>>, shift: Vec<Vec<u8>>) -> Result<Self> {
        check_prime_base(base)?;
        let dim = matrices.len();
        let precision = matrices.first().map_or(0, Vec::len);
        if dim == 0 || precision == 0 || precision > 255 || shift.len() != dim {
            return Err(Error::Contract("need one nonempty matrix and shift per coordinate".into()));
        }
        let mut maps = Vec::with_capacity(dim);
        for (rows, cj) in matrices.into_iter().zip(shift) {
            if rows.len() != precision || cj.len() != precision {
                return Err(Error::Contract("all coordinates need K rows and K shifts".into()));
            }
            if cj.iter().any(|&v| u32::from(v) >= base) {
                return Err(Error::Contract("shifts must lie in 0..b".into()));
            }
            let mut columns: Vec<Vec<u8>> = (0..precision).map(|j| vec![0; precision - j]).collect();
            for (k, row) in rows.iter().enumerate() {
                if row.len() <= k {
                    return Err(Error::Contract(format!("row {k} is too short")));
                }
                for (j, col) in columns.iter_mut().enumerate().take(k + 1) {
                    if u32::from(row[j]) >= base {
                        return Err(Error::Contract("matrix entries must lie in 0..b".into()));
                    }
                    col[k - j] = row[j];
                }
                if row[k] == 0 {
                    return Err(Error::Contract(format!("zero diagonal in row {k}")));
                }
            }
            maps.push(AffineMap { columns, shift: cj });
        }
        Ok(Scramble {
            kind: ScrambleKind::RandomLinear,
            base,
            precision,
            dim,
            seed: 0,
            maps,
        })
    }

    /// The affine map with `M = I` and `C = 0`.
    pub fn identity(base: u32, precision: usize, dim: usize) -> Result<Self> {
        let eye: Vec<Vec<u8>> = (0..precision)
            .map(|k| (0..precision).map(|j| u8::from(j == k)).collect())
            .collect();
        Self::affine_from_parts(base, vec![eye; dim], vec![vec![0; precision]; dim])
    }

    pub fn kind(&self) -> ScrambleKind {
        self.kind
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `M_kj` for coordinate `coord` (0-based indices); `None` for nested scrambles.
    pub fn matrix_entry(&self, coord: usize, k: usize, j: usize) -> Option<u8> {
        self.maps.get(coord).map(|m| m.entry(k, j))
    }

    pub fn shift(&self, coord: usize) -> Option<&[u8]> {
        self.maps.get(coord).map(|m| m.shift.as_slice())
    }

    fn check_point(&self, base: u32, precision: usize, dim: usize) -> Result<()> {
        if base != self.base || precision != self.precision || dim != self.dim {
            return Err(Error::Contract(format!(
                "scramble is for base {} precision {} dim {}, got base {base} precision {precision} dim {dim}",
                self.base, self.precision, self.dim
            )));
        }
        Ok(())
    }

    pub fn apply(&self, a: &DigitPoint) -> Result<DigitPoint> {
        self.check_point(a.base(), a.precision(), a.dim())?;
        let mut out = vec![0u8; a.flat_digits().len()];
        self.apply_flat(a.flat_digits(), &mut out);
        Ok(DigitPoint::from_flat(self.base, self.precision, out))
    }

    /// Scrambles every point of `set`.
    pub fn apply_set(&self, set: &PointSet) -> Result<PointSet> {
        self.check_point(set.base(), set.precision(), set.dim())?;
        let mut out = set.clone();
        let stride = set.stride();
        for (src, dst) in set
            .flat_digits()
            .chunks(stride)
            .zip(out.flat_digits_mut().chunks_mut(stride))
        {
            self.apply_flat(src, dst);
        }
        Ok(out)
    }

    fn apply_flat(&self, a: &[u8], out: &mut [u8]) {
        let k = self.precision;
        for (j, (src, dst)) in a.chunks(k).zip(out.chunks_mut(k)).enumerate() {
            match self.kind {
                ScrambleKind::NestedUniform => self.apply_nested(j, src, dst),
                ScrambleKind::Asm => self.apply_striped(j, src, dst),
                _ => self.apply_affine(j, src, dst),
            }
        }
    }

    fn apply_affine(&self, coord: usize, a: &[u8], out: &mut [u8]) {
        let map = &self.maps[coord];
        let mut acc = [0u32; 256];
        let acc = &mut acc[..a.len()];
        for (j, &aj) in a.iter().enumerate() {
            if aj == 0 {
                continue;
            }
            let aj = u32::from(aj);
            for (slot, &m) in acc[j..].iter_mut().zip(&map.columns[j]) {
                *slot += u32::from(m) * aj;
            }
        }
        for ((o, &v), &c) in out.iter_mut().zip(acc.iter()).zip(&map.shift) {
            *o = self.reduce(v + u32::from(c)) as u8;
        }
    }

    #[inline]
    fn reduce(&self, v: u32) -> u32 {
        if self.base == 2 {
            v & 1
        } else {
            v % self.base
        }
    }

    // Column j is constant h_j from the diagonal down, so the digit sum is a running sum.
    fn apply_striped(&self, coord: usize, a: &[u8], out: &mut [u8]) {
        let map = &self.maps[coord];
        let mut running = 0u32;
        for (k, (o, &ak)) in out.iter_mut().zip(a).enumerate() {
            if ak != 0 {
                running = self.reduce(running + u32::from(map.columns[k][0]) * u32::from(ak));
            }
            let v = running + u32::from(map.shift[k]);
            *o = if v >= self.base { v - self.base } else { v } as u8;
        }
    }

    fn apply_nested(&self, coord: usize, a: &[u8], out: &mut [u8]) {
        let b = u128::from(self.base);
        let mut prefix: u128 = 0;
        let mut perm = vec![0u8; self.base as usize];
        for (level, (o, &ak)) in out.iter_mut().zip(a).enumerate() {
            let node = ((level as u128) << 120) | prefix;
            let mut rng = keyed_rng(self.seed, coord as u32, Role::Permutation, node);
            shuffle(&mut rng, &mut perm);
            *o = perm[ak as usize];
            prefix = prefix * b + u128::from(ak);
        }
    }

    /// Permutation applied at digit `level` (0-based) below the given input prefix.
    pub fn nested_permutation(&self, coord: usize, prefix: &[u8]) -> Option<Vec<u8>> {
        if self.kind != ScrambleKind::NestedUniform || prefix.len() >= self.precision {
            return None;
        }
        let b = u128::from(self.base);
        let value = prefix.iter().fold(0u128, |acc, &d| acc * b + u128::from(d));
        let node = ((prefix.len() as u128) << 120) | value;
        let mut rng = keyed_rng(self.seed, coord as u32, Role::Permutation, node);
        let mut perm = vec![0u8; self.base as usize];
        shuffle(&mut rng, &mut perm);
        Some(perm)
    }
}

/// Fisher-Yates shuffle of the identity permutation.
fn shuffle(rng: &mut ChaCha8Rng, perm: &mut [u8]) {
    for (i, p) in perm.iter_mut().enumerate() {
        *p = i as u8;
    }
    for i in (1..perm.len()).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
}

fn sample_affine(kind: ScrambleKind, base: u32, precision: usize, seed: u64, coord: u32) -> AffineMap {
    let b = base as u8;
    let mut rng = keyed_rng(seed, coord, Role::Matrix, 0);
    let k = precision;
    let columns = match kind {
        ScrambleKind::RandomLinear => {
            let mut cols: Vec<Vec<u8>> = (0..k).map(|j| vec![0u8; k - j]).collect();
            for (j, col) in cols.iter_mut().enumerate() {
                col[0] = rng.random_range(1..b);
                for slot in col.iter_mut().skip(1) {
                    *slot = rng.random_range(0..b);
                }
                debug_assert_eq!(col.len(), k - j);
            }
            cols
        }
        ScrambleKind::IBinomial => {
            let h = rng.random_range(1..b);
            let g: Vec<u8> = (1..k).map(|_| rng.random_range(0..b)).collect();
            (0..k)
                .map(|j| {
                    (0..k - j)
                        .map(|offset| if offset == 0 { h } else { g[offset - 1] })
                        .collect()
                })
                .collect()
        }
        ScrambleKind::Asm => (0..k)
            .map(|j| vec![rng.random_range(1..b); k - j])
            .collect(),
        ScrambleKind::NestedUniform => unreachable!("nested scrambles have no matrix"),
    };
    let mut shift_rng = keyed_rng(seed, coord, Role::Shift, 0);
    let shift = (0..k).map(|_| shift_rng.random_range(0..b)).collect();
    AffineMap { columns, shift }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digitspace::DigitExpansion;

    fn point(base: u32, coords: &[&[u8]]) -> DigitPoint {
        DigitPoint::new(
            coords
                .iter()
                .map(|c| DigitExpansion::new(base, c.to_vec()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    // Direct evaluation of x_k = C_k + sum_{j<=k} M_kj a_j mod b.
    fn reference_affine(s: &Scramble, a: &DigitPoint) -> Vec<u8> {
        let b = s.base();
        let k = s.precision();
        let mut out = Vec::new();
        for coord in 0..a.dim() {
            let digits = a.coord(coord);
            for row in 0..k {
                let mut v = u32::from(s.shift(coord).unwrap()[row]);
                for (col, &d) in digits[..=row].iter().enumerate() {
                    v += u32::from(s.matrix_entry(coord, row, col).unwrap()) * u32::from(d);
                }
                out.push((v % b) as u8);
            }
        }
        out
    }

    #[test]
    fn matrix_structures() {
        let k = 12;
        for seed in 0..20 {
            let rl = Scramble::new(ScrambleKind::RandomLinear, 5, k, 2, seed).unwrap();
            let ib = Scramble::new(ScrambleKind::IBinomial, 5, k, 2, seed).unwrap();
            let asm = Scramble::new(ScrambleKind::Asm, 5, k, 2, seed).unwrap();
            for c in 0..2 {
                for r in 0..k {
                    assert!(rl.matrix_entry(c, r, r).unwrap() >= 1);
                    assert_eq!(ib.matrix_entry(c, r, r), ib.matrix_entry(c, 0, 0));
                    for j in 0..k {
                        if j > r {
                            assert_eq!(rl.matrix_entry(c, r, j), Some(0));
                            assert_eq!(asm.matrix_entry(c, r, j), Some(0));
                        } else {
                            assert_eq!(asm.matrix_entry(c, r, j), asm.matrix_entry(c, j, j));
                            assert_eq!(ib.matrix_entry(c, r, j), ib.matrix_entry(c, r - j, 0));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fast_paths_match_definition() {
        let a = point(3, &[&[2, 1, 0, 2, 2, 1, 0, 0], &[0, 0, 1, 2, 0, 1, 1, 2]]);
        for kind in [ScrambleKind::RandomLinear, ScrambleKind::IBinomial, ScrambleKind::Asm] {
            for seed in 0..10 {
                let s = Scramble::new(kind, 3, 8, 2, seed).unwrap();
                assert_eq!(s.apply(&a).unwrap().flat_digits(), &reference_affine(&s, &a)[..]);
            }
        }
    }

    #[test]
    fn binary_random_linear_has_unit_diagonal() {
        let s = Scramble::new(ScrambleKind::RandomLinear, 2, 16, 1, 9).unwrap();
        assert!((0..16).all(|k| s.matrix_entry(0, k, k) == Some(1)));
    }

    #[test]
    fn deterministic_in_seed() {
        let a = point(2, &[&[1, 0, 1, 1, 0, 0], &[0, 1, 1, 0, 1, 0]]);
        for kind in ScrambleKind::ALL {
            let s1 = Scramble::new(kind, 2, 6, 2, 77).unwrap();
            let s2 = Scramble::new(kind, 2, 6, 2, 77).unwrap();
            assert_eq!(s1.apply(&a).unwrap(), s2.apply(&a).unwrap());
        }
    }

    #[test]
    fn identity_map() {
        let s = Scramble::identity(3, 5, 2).unwrap();
        let a = point(3, &[&[2, 1, 0, 2, 2], &[0, 0, 1, 2, 0]]);
        assert_eq!(s.apply(&a).unwrap(), a);
    }

    #[test]
    fn unit_striped_matrix_takes_running_sums() {
        let s = Scramble::asm_from_parts(3, vec![vec![1; 5]; 2], vec![vec![0; 5]; 2]).unwrap();
        let a = point(3, &[&[2, 1, 0, 2, 2], &[0, 0, 1, 2, 0]]);
        let x = s.apply(&a).unwrap();
        assert_eq!(x.coord(0), &[2, 0, 0, 2, 1]);
        assert_eq!(x.coord(1), &[0, 0, 1, 0, 0]);
        let one = Scramble::asm_from_parts(3, vec![vec![1; 5]], vec![vec![0; 5]]).unwrap();
        assert!(one.apply(&a).is_err());
    }

    #[test]
    fn injective_on_all_short_points() {
        for kind in ScrambleKind::ALL {
            let s = Scramble::new(kind, 3, 4, 1, 5).unwrap();
            let mut seen = std::collections::HashSet::new();
            for i in 0..81u32 {
                let digits: Vec<u8> = (0..4).rev().map(|p| ((i / 3u32.pow(p)) % 3) as u8).collect();
                let x = s.apply(&point(3, &[&digits])).unwrap();
                assert!(seen.insert(x), "{kind} collided");
            }
        }
    }

    #[test]
    fn nested_permutations_are_permutations() {
        let s = Scramble::new(ScrambleKind::NestedUniform, 5, 10, 1, 3).unwrap();
        let mut p = s.nested_permutation(0, &[1, 4]).unwrap();
        p.sort_unstable();
        assert_eq!(p, vec![0, 1, 2, 3, 4]);
        let a = point(5, &[&[1, 4, 2, 0, 0, 0, 0, 0, 0, 0]]);
        let x = s.apply(&a).unwrap();
        assert_eq!(x.coord(0)[2], s.nested_permutation(0, &[1, 4]).unwrap()[2]);
    }

    #[test]
    fn rejects_composite_base_and_mismatch() {
        assert!(matches!(
            Scramble::new(ScrambleKind::Asm, 4, 8, 1, 0),
            Err(Error::Unsupported(_))
        ));
        let s = Scramble::new(ScrambleKind::Asm, 2, 8, 1, 0).unwrap();
        let a = point(2, &[&[1, 0, 1]]);
        assert!(matches!(s.apply(&a), Err(Error::Contract(_))));
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in ScrambleKind::ALL {
            assert_eq!(kind.name().parse::<ScrambleKind>().unwrap(), kind);
        }
    }
}
