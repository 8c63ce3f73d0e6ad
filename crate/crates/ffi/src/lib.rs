//! C ABI over the foldnet library.
//!
//! Point sets cross the boundary as opaque `FoldnetPointSet` handles that the
//! caller releases with `foldnet_point_set_free`. Every fallible function
//! returns a `FoldnetStatus`; on failure `foldnet_last_error_message` gives a
//! description that stays valid until the next call on the same thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use foldnet::analysis::{check_net, gain_coefficient, star_discrepancy};
use foldnet::fold::{balanced_split, box_fold, fold_sequence, monomial_net, ReflectionVector};
use foldnet::{default_precision, faure_net, Error, NetSpec, PointSet, Scramble, ScrambleKind};

/// Opaque handle to a point set.
pub struct FoldnetPointSet {
    inner: PointSet,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoldnetStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Precision = 3,
    Unsupported = 4,
    Contract = 5,
    IndexOverflow = 6,
    Parse = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoldnetScramble {
    Nested = 0,
    RandomLinear = 1,
    IBinomial = 2,
    Asm = 3,
}

impl From<FoldnetScramble> for ScrambleKind {
    fn from(s: FoldnetScramble) -> Self {
        match s {
            FoldnetScramble::Nested => ScrambleKind::NestedUniform,
            FoldnetScramble::RandomLinear => ScrambleKind::RandomLinear,
            FoldnetScramble::IBinomial => ScrambleKind::IBinomial,
            FoldnetScramble::Asm => ScrambleKind::Asm,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FoldnetStatus {
    match e {
        Error::Domain(_) => FoldnetStatus::Domain,
        Error::Precision(_) => FoldnetStatus::Precision,
        Error::Unsupported(_) => FoldnetStatus::Unsupported,
        Error::Contract(_) => FoldnetStatus::Contract,
        Error::IndexOverflow { .. } => FoldnetStatus::IndexOverflow,
        Error::Parse { .. } => FoldnetStatus::Parse,
        Error::Io(_) => FoldnetStatus::Io,
    }
}

enum Failure {
    Lib(Error),
    Status(FoldnetStatus, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(FoldnetStatus::NullPointer, format!("{what} is null"))
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> FoldnetStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FoldnetStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            let status = status_of(&e);
            set_error(e.to_string());
            status
        }
        Ok(Err(Failure::Status(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            FoldnetStatus::Panic
        }
    }
}

unsafe fn handle<'a>(set: *const FoldnetPointSet) -> Result<&'a PointSet, Failure> {
    set.as_ref().map(|h| &h.inner).ok_or_else(|| null("point set"))
}

unsafe fn array<'a, T>(data: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(data, len))
}

unsafe fn store(out: *mut *mut FoldnetPointSet, set: PointSet) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(FoldnetPointSet { inner: set }));
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    *out = value;
    Ok(())
}

/// Description of the most recent failure on this thread, or NULL.
#[no_mangle]
pub extern "C" fn foldnet_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Default digits per coordinate for `base`: `ceil(53 / log2 base)`.
#[no_mangle]
pub extern "C" fn foldnet_default_precision(base: u32) -> usize {
    if base < 2 {
        return 0;
    }
    default_precision(base)
}

/// The first `lambda * base^m` Faure points. `precision` 0 selects the default.
#[no_mangle]
pub unsafe extern "C" fn foldnet_faure_net(
    base: u32,
    dim: usize,
    m: usize,
    lambda: u64,
    precision: usize,
    out: *mut *mut FoldnetPointSet,
) -> FoldnetStatus {
    guard(|| {
        let k = if precision == 0 { default_precision(base.max(2)) } else { precision };
        let spec = NetSpec::new(base, dim, m, 0, lambda, lambda >= u64::from(base))?;
        store(out, faure_net(&spec, k)?.points)
    })
}

/// A point set from `n * dim` row-major values in `[0,1)`.
#[no_mangle]
pub unsafe extern "C" fn foldnet_point_set_from_values(
    base: u32,
    dim: usize,
    precision: usize,
    values: *const f64,
    n: usize,
    out: *mut *mut FoldnetPointSet,
) -> FoldnetStatus {
    guard(|| {
        if dim == 0 {
            return Err(Failure::Status(FoldnetStatus::Contract, "dimension must be positive".into()));
        }
        let total = n
            .checked_mul(dim)
            .ok_or_else(|| Failure::Status(FoldnetStatus::Contract, "n * dim overflows".into()))?;
        let flat = array(values, total, "values")?;
        let rows: Vec<Vec<f64>> = flat.chunks(dim).map(<[f64]>::to_vec).collect();
        let set = if rows.is_empty() {
            PointSet::new(base, dim, precision)?
        } else {
            PointSet::from_values(&rows, base, precision)?
        };
        store(out, set)
    })
}

/// Parses the point-set text format from a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn foldnet_point_set_parse(text: *const c_char, out: *mut *mut FoldnetPointSet) -> FoldnetStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Failure::Status(FoldnetStatus::Parse, format!("text is not UTF-8: {e}")))?;
        store(out, PointSet::parse_text(text)?)
    })
}

/// Releases a handle. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn foldnet_point_set_free(set: *mut FoldnetPointSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of points, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn foldnet_point_set_len(set: *const FoldnetPointSet) -> usize {
    set.as_ref().map_or(0, |h| h.inner.len())
}

/// Dimension, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn foldnet_point_set_dim(set: *const FoldnetPointSet) -> usize {
    set.as_ref().map_or(0, |h| h.inner.dim())
}

/// Base, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn foldnet_point_set_base(set: *const FoldnetPointSet) -> u32 {
    set.as_ref().map_or(0, |h| h.inner.base())
}

/// Writes `len * dim` row-major coordinates into `out`, which holds `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn foldnet_point_set_values(
    set: *const FoldnetPointSet,
    out: *mut f64,
    capacity: usize,
) -> FoldnetStatus {
    guard(|| {
        let set = handle(set)?;
        let needed = set.len() * set.dim();
        if capacity < needed {
            return Err(Failure::Status(
                FoldnetStatus::BufferTooSmall,
                format!("need room for {needed} values, got {capacity}"),
            ));
        }
        if needed == 0 {
            return Ok(());
        }
        if out.is_null() {
            return Err(null("output buffer"));
        }
        let dst = slice::from_raw_parts_mut(out, needed);
        let mut at = 0;
        set.for_each_value(|x| {
            dst[at..at + x.len()].copy_from_slice(x);
            at += x.len();
        });
        Ok(())
    })
}

/// A seeded scramble of every point.
#[no_mangle]
pub unsafe extern "C" fn foldnet_scramble(
    set: *const FoldnetPointSet,
    kind: FoldnetScramble,
    seed: u64,
    out: *mut *mut FoldnetPointSet,
) -> FoldnetStatus {
    guard(|| {
        let set = handle(set)?;
        let s = Scramble::new(kind.into(), set.base(), set.precision(), set.dim(), seed)?;
        store(out, s.apply_set(set)?)
    })
}

/// Adjoins the reflection of every point at the given per-coordinate orders (`-1` keeps a coordinate).
#[no_mangle]
pub unsafe extern "C" fn foldnet_fold_reflection(
    set: *const FoldnetPointSet,
    orders: *const i32,
    len: usize,
    out: *mut *mut FoldnetPointSet,
) -> FoldnetStatus {
    guard(|| {
        let set = handle(set)?;
        let kappa = ReflectionVector::new(array(orders, len, "orders")?.to_vec())?;
        store(out, fold_sequence(set, &kappa)?)
    })
}

/// Box fold at orders `rho`; with `rho` NULL the balanced split of `m` is used.
#[no_mangle]
pub unsafe extern "C" fn foldnet_fold_box(
    set: *const FoldnetPointSet,
    rho: *const usize,
    m: usize,
    out: *mut *mut FoldnetPointSet,
) -> FoldnetStatus {
    guard(|| {
        let set = handle(set)?;
        let rho = if rho.is_null() {
            balanced_split(m, 0, set.dim())?
        } else {
            slice::from_raw_parts(rho, set.dim()).to_vec()
        };
        store(out, box_fold(set, &rho)?)
    })
}

/// Folds a two-dimensional net by every `(k, m-k)`.
#[no_mangle]
pub unsafe extern "C" fn foldnet_fold_monomial(
    set: *const FoldnetPointSet,
    m: usize,
    out: *mut *mut FoldnetPointSet,
) -> FoldnetStatus {
    guard(|| {
        let set = handle(set)?;
        store(out, monomial_net(set, m)?)
    })
}

/// Exact check of the `(lambda, q, m, d)`-net property; `violations` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn foldnet_check_net(
    set: *const FoldnetPointSet,
    m: usize,
    q: usize,
    lambda: u64,
    relaxed: bool,
    passed: *mut bool,
    violations: *mut usize,
) -> FoldnetStatus {
    guard(|| {
        let set = handle(set)?;
        let spec = NetSpec::new(set.base(), set.dim(), m, q, lambda, relaxed)?;
        let report = check_net(set, &spec)?;
        write(passed, report.passed, "passed")?;
        if !violations.is_null() {
            *violations = report.violations.len();
        }
        Ok(())
    })
}

/// Star discrepancy of a one- or two-dimensional set.
#[no_mangle]
pub unsafe extern "C" fn foldnet_star_discrepancy(set: *const FoldnetPointSet, out: *mut f64) -> FoldnetStatus {
    guard(|| {
        let set = handle(set)?;
        write(out, star_discrepancy(set)?, "output")
    })
}

/// Gain coefficient for 0-based increasing coordinates `u` and resolutions `kappa`, both of length `len`.
#[no_mangle]
pub unsafe extern "C" fn foldnet_gain_coefficient(
    set: *const FoldnetPointSet,
    u: *const usize,
    kappa: *const usize,
    len: usize,
    out: *mut f64,
) -> FoldnetStatus {
    guard(|| {
        let set = handle(set)?;
        let u = array(u, len, "u")?;
        let kappa = array(kappa, len, "kappa")?;
        write(out, gain_coefficient(set, u, kappa)?, "output")
    })
}
