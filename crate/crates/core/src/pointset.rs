//! Point sets stored as one flat digit buffer, plus the text interchange format.
//!
//! The text format is a header line `base=<b> dim=<d> prec=<K> n=<n>`
//! followed by one point per line. Each coordinate is written as its `K`
//! digits, most significant first, with no separator between digits and a
//! single space between coordinates. Digits above 9 use `a..z`, which limits
//! the format to bases up to 36.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::digitspace::{check_base, digits_to_f64, DigitPoint};
use crate::error::{Error, Result};

/// Largest base the text format can express.
pub const MAX_TEXT_BASE: u32 = 36;

const DIGIT_CHARS: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

/// An ordered list of points in `[0,1)^d`, all with the same base and precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    base: u32,
    dim: usize,
    precision: usize,
    digits: Vec<u8>,
}

impl PointSet {
    pub fn new(base: u32, dim: usize, precision: usize) -> Result<Self> {
        Self::with_capacity(base, dim, precision, 0)
    }

    pub fn with_capacity(base: u32, dim: usize, precision: usize, n: usize) -> Result<Self> {
        check_base(base)?;
        if dim == 0 || precision == 0 {
            return Err(Error::Contract("dimension and precision must be positive".into()));
        }
        Ok(PointSet {
            base,
            dim,
            precision,
            digits: Vec::with_capacity(n * dim * precision),
        })
    }

    /// Builds a set from a flat buffer holding `n * dim * precision` digits.
    pub fn from_flat(base: u32, dim: usize, precision: usize, digits: Vec<u8>) -> Result<Self> {
        let mut set = Self::new(base, dim, precision)?;
        if !digits.len().is_multiple_of(dim * precision) {
            return Err(Error::Contract(format!(
                "buffer of {} digits is not a whole number of points",
                digits.len()
            )));
        }
        if digits.iter().any(|&d| u32::from(d) >= base) {
            return Err(Error::Contract(format!("digit out of range for base {base}")));
        }
        set.digits = digits;
        Ok(set)
    }

    pub fn from_points(points: &[DigitPoint]) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::Contract("empty point list".into()))?;
        let mut set = Self::with_capacity(first.base(), first.dim(), first.precision(), points.len())?;
        for p in points {
            set.push(p)?;
        }
        Ok(set)
    }

    pub fn from_values(points: &[Vec<f64>], base: u32, precision: usize) -> Result<Self> {
        let digit_points = points
            .iter()
            .map(|p| DigitPoint::from_values(p, base, precision))
            .collect::<Result<Vec<_>>>()?;
        Self::from_points(&digit_points)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn len(&self) -> usize {
        self.digits.len() / (self.dim * self.precision)
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub(crate) fn stride(&self) -> usize {
        self.dim * self.precision
    }

    pub fn flat_digits(&self) -> &[u8] {
        &self.digits
    }

    pub(crate) fn flat_digits_mut(&mut self) -> &mut [u8] {
        &mut self.digits
    }

    /// All digits of point `i`, coordinate after coordinate.
    pub fn point_digits(&self, i: usize) -> &[u8] {
        let s = self.stride();
        &self.digits[i * s..(i + 1) * s]
    }

    pub fn coord(&self, i: usize, j: usize) -> &[u8] {
        let start = i * self.stride() + j * self.precision;
        &self.digits[start..start + self.precision]
    }

    pub fn point(&self, i: usize) -> DigitPoint {
        DigitPoint::from_flat(self.base, self.precision, self.point_digits(i).to_vec())
    }

    pub fn points(&self) -> impl Iterator<Item = DigitPoint> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    pub fn push(&mut self, p: &DigitPoint) -> Result<()> {
        if p.base() != self.base || p.precision() != self.precision || p.dim() != self.dim {
            return Err(Error::Contract(
                "point does not match the set's base, precision or dimension".into(),
            ));
        }
        self.digits.extend_from_slice(p.flat_digits());
        Ok(())
    }

    /// Appends all points of `other`.
    pub fn extend_from(&mut self, other: &PointSet) -> Result<()> {
        if other.base != self.base || other.precision != self.precision || other.dim != self.dim {
            return Err(Error::Contract("point sets are not compatible".into()));
        }
        self.digits.extend_from_slice(&other.digits);
        Ok(())
    }

    /// The points `start..end` as a new set.
    pub fn slice(&self, start: usize, end: usize) -> PointSet {
        let s = self.stride();
        PointSet {
            base: self.base,
            dim: self.dim,
            precision: self.precision,
            digits: self.digits[start * s..end * s].to_vec(),
        }
    }

    pub fn values(&self, i: usize) -> Vec<f64> {
        self.point_digits(i)
            .chunks(self.precision)
            .map(|c| digits_to_f64(self.base, c))
            .collect()
    }

    /// Calls `f` with the real coordinates of every point in order.
    pub fn for_each_value<F: FnMut(&[f64])>(&self, mut f: F) {
        let mut buf = vec![0.0; self.dim];
        for point in self.digits.chunks(self.stride()) {
            for (slot, c) in buf.iter_mut().zip(point.chunks(self.precision)) {
                *slot = digits_to_f64(self.base, c);
            }
            f(&buf);
        }
    }

    pub fn to_values(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.values(i)).collect()
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(self.to_text()?.as_bytes())?;
        Ok(())
    }

    pub fn to_text(&self) -> Result<String> {
        if self.base > MAX_TEXT_BASE {
            return Err(Error::Unsupported(format!(
                "text format supports bases up to {MAX_TEXT_BASE}"
            )));
        }
        let mut s = String::with_capacity(32 + self.digits.len() + self.len() * self.dim);
        let _ = writeln!(
            s,
            "base={} dim={} prec={} n={}",
            self.base,
            self.dim,
            self.precision,
            self.len()
        );
        for point in self.digits.chunks(self.stride()) {
            for (j, c) in point.chunks(self.precision).enumerate() {
                if j > 0 {
                    s.push(' ');
                }
                s.extend(c.iter().map(|&d| DIGIT_CHARS[d as usize] as char));
            }
            s.push('\n');
        }
        Ok(s)
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = match lines.next() {
            Some(line) => line?,
            None => return Err(parse_error(1, "missing header")),
        };
        let (base, dim, precision, n) = parse_header(&header)?;
        if base > MAX_TEXT_BASE {
            return Err(parse_error(1, format!("base {base} exceeds {MAX_TEXT_BASE}")));
        }
        let mut set = Self::with_capacity(base, dim, precision, n)
            .map_err(|e| parse_error(1, e.to_string()))?;
        let mut count = 0;
        for (idx, line) in lines.enumerate() {
            let line_no = idx + 2;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let coords: Vec<&str> = line.split_whitespace().collect();
            if coords.len() != dim {
                return Err(parse_error(
                    line_no,
                    format!("expected {dim} coordinates, found {}", coords.len()),
                ));
            }
            for c in coords {
                if c.len() != precision {
                    return Err(parse_error(
                        line_no,
                        format!("coordinate has {} digits, expected {precision}", c.len()),
                    ));
                }
                for ch in c.chars() {
                    let d = ch
                        .to_digit(36)
                        .filter(|&d| d < base && !ch.is_ascii_uppercase())
                        .ok_or_else(|| parse_error(line_no, format!("invalid digit '{ch}'")))?;
                    set.digits.push(d as u8);
                }
            }
            count += 1;
        }
        if count != n {
            return Err(parse_error(
                count + 2,
                format!("header declares {n} points, found {count}"),
            ));
        }
        Ok(set)
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        Self::read_text(text.as_bytes())
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(header: &str) -> Result<(u32, usize, usize, usize)> {
    let mut fields = [None; 4];
    const KEYS: [&str; 4] = ["base", "dim", "prec", "n"];
    for token in header.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| parse_error(1, format!("malformed header field '{token}'")))?;
        let slot = KEYS
            .iter()
            .position(|&k| k == key)
            .ok_or_else(|| parse_error(1, format!("unknown header field '{key}'")))?;
        let value: usize = value
            .parse()
            .map_err(|_| parse_error(1, format!("bad value for '{key}'")))?;
        fields[slot] = Some(value);
    }
    let get = |i: usize| fields[i].ok_or_else(|| parse_error(1, format!("missing '{}'", KEYS[i])));
    Ok((get(0)? as u32, get(1)?, get(2)?, get(3)?))
}
