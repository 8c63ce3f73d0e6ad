use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use foldnet_ffi::*;

struct Handle(*mut FoldnetPointSet);

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { foldnet_point_set_free(self.0) }
    }
}

fn ok(status: FoldnetStatus) {
    if status != FoldnetStatus::Ok {
        let msg = unsafe { CStr::from_ptr(foldnet_last_error_message()) };
        panic!("{status:?}: {}", msg.to_string_lossy());
    }
}

fn faure(base: u32, dim: usize, m: usize) -> Handle {
    let mut out = ptr::null_mut();
    ok(unsafe { foldnet_faure_net(base, dim, m, 1, 0, &mut out) });
    Handle(out)
}

fn values(h: &Handle) -> Vec<f64> {
    let n = unsafe { foldnet_point_set_len(h.0) * foldnet_point_set_dim(h.0) };
    let mut v = vec![0.0; n];
    ok(unsafe { foldnet_point_set_values(h.0, v.as_mut_ptr(), v.len()) });
    v
}

fn is_net(h: &Handle, m: usize, lambda: u64, relaxed: bool) -> bool {
    let mut passed = false;
    let mut violations = usize::MAX;
    ok(unsafe { foldnet_check_net(h.0, m, 0, lambda, relaxed, &mut passed, &mut violations) });
    assert_eq!(passed, violations == 0);
    passed
}

fn header() -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/foldnet.h");
    std::fs::read_to_string(path).expect("generated header")
}

#[test]
fn faure_net_metadata_and_values() {
    let h = faure(3, 2, 2);
    unsafe {
        assert_eq!(foldnet_point_set_len(h.0), 9);
        assert_eq!(foldnet_point_set_dim(h.0), 2);
        assert_eq!(foldnet_point_set_base(h.0), 3);
    }
    let v = values(&h);
    assert_eq!(v.len(), 18);
    assert!(v.iter().all(|x| (0.0..1.0).contains(x)));
    let mut first: Vec<f64> = v.iter().step_by(2).copied().collect();
    first.sort_by(f64::total_cmp);
    for (i, x) in first.iter().enumerate() {
        assert!((x - i as f64 / 9.0).abs() < 1e-15);
    }
    assert!(is_net(&h, 2, 1, false));
    assert_eq!(foldnet_default_precision(2), 53);
}

#[test]
fn scramble_then_fold_keeps_structure() {
    let h = faure(2, 2, 4);
    for kind in [
        FoldnetScramble::Nested,
        FoldnetScramble::RandomLinear,
        FoldnetScramble::IBinomial,
        FoldnetScramble::Asm,
    ] {
        let mut s = ptr::null_mut();
        ok(unsafe { foldnet_scramble(h.0, kind, 11, &mut s) });
        let s = Handle(s);
        assert!(is_net(&s, 4, 1, false));

        let mut b = ptr::null_mut();
        ok(unsafe { foldnet_fold_box(s.0, ptr::null(), 4, &mut b) });
        let b = Handle(b);
        assert_eq!(unsafe { foldnet_point_set_len(b.0) }, 64);
        assert!(is_net(&b, 4, 4, true));
    }
}

#[test]
fn reflection_fold_is_antithetic_at_order_zero() {
    let h = faure(2, 2, 3);
    let orders = [0i32, 0];
    let mut r = ptr::null_mut();
    ok(unsafe { foldnet_fold_reflection(h.0, orders.as_ptr(), 2, &mut r) });
    let r = Handle(r);
    let v = values(&r);
    let n = v.len() / 2;
    assert_eq!(n, 16);
    for i in 0..n {
        assert!((v[i] + v[n + i] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn monomial_fold_size() {
    let h = faure(2, 2, 3);
    let mut out = ptr::null_mut();
    ok(unsafe { foldnet_fold_monomial(h.0, 3, &mut out) });
    let out = Handle(out);
    assert_eq!(unsafe { foldnet_point_set_len(out.0) }, 8 << 4);
}

#[test]
fn discrepancy_and_gains() {
    let h = faure(2, 2, 4);
    let mut d = f64::NAN;
    ok(unsafe { foldnet_star_discrepancy(h.0, &mut d) });
    assert!(d > 0.0 && d < 0.25);

    let u = [0usize, 1];
    let mut g = f64::NAN;
    ok(unsafe { foldnet_gain_coefficient(h.0, u.as_ptr(), [0usize, 1].as_ptr(), 2, &mut g) });
    assert_eq!(g, 0.0);
    ok(unsafe { foldnet_gain_coefficient(h.0, u.as_ptr(), [3usize, 3].as_ptr(), 2, &mut g) });
    assert!((0.0..=std::f64::consts::E).contains(&g));
}

#[test]
fn round_trip_through_values_and_text() {
    let pts = [0.5, 0.25, 0.125, 0.75];
    let mut h = ptr::null_mut();
    ok(unsafe { foldnet_point_set_from_values(2, 2, 20, pts.as_ptr(), 2, &mut h) });
    let h = Handle(h);
    assert_eq!(values(&h), pts);

    let text = foldnet::PointSet::from_values(&[vec![0.5, 0.25], vec![0.125, 0.75]], 2, 20)
        .unwrap()
        .to_text()
        .unwrap();
    let c = CString::new(text).unwrap();
    let mut p = ptr::null_mut();
    ok(unsafe { foldnet_point_set_parse(c.as_ptr(), &mut p) });
    let p = Handle(p);
    assert_eq!(values(&p), pts);
}

#[test]
fn error_statuses() {
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(foldnet_faure_net(2, 2, 4, 1, 0, ptr::null_mut()), FoldnetStatus::NullPointer);
        assert_eq!(foldnet_faure_net(6, 2, 2, 1, 0, &mut out), FoldnetStatus::Unsupported);
        assert!(out.is_null());
        assert!(!foldnet_last_error_message().is_null());

        let bad = CString::new("not a point set").unwrap();
        assert_eq!(foldnet_point_set_parse(bad.as_ptr(), &mut out), FoldnetStatus::Parse);
        assert_eq!(foldnet_point_set_parse(ptr::null(), &mut out), FoldnetStatus::NullPointer);

        let outside = [1.5];
        assert_eq!(
            foldnet_point_set_from_values(2, 1, 20, outside.as_ptr(), 1, &mut out),
            FoldnetStatus::Domain
        );

        assert_eq!(foldnet_point_set_len(ptr::null()), 0);
        foldnet_point_set_free(ptr::null_mut());
        let mut d = 0.0;
        assert_eq!(foldnet_star_discrepancy(ptr::null(), &mut d), FoldnetStatus::NullPointer);
    }

    let h = faure(2, 2, 3);
    let mut small = [0.0; 3];
    assert_eq!(
        unsafe { foldnet_point_set_values(h.0, small.as_mut_ptr(), small.len()) },
        FoldnetStatus::BufferTooSmall
    );
    let three = faure(3, 3, 1);
    assert_eq!(
        unsafe { foldnet_fold_monomial(three.0, 1, &mut out) },
        FoldnetStatus::Unsupported
    );
}

#[test]
fn header_declares_every_export() {
    let h = header();
    for name in [
        "foldnet_last_error_message",
        "foldnet_default_precision",
        "foldnet_faure_net",
        "foldnet_point_set_from_values",
        "foldnet_point_set_parse",
        "foldnet_point_set_free",
        "foldnet_point_set_len",
        "foldnet_point_set_dim",
        "foldnet_point_set_base",
        "foldnet_point_set_values",
        "foldnet_scramble",
        "foldnet_fold_reflection",
        "foldnet_fold_box",
        "foldnet_fold_monomial",
        "foldnet_check_net",
        "foldnet_star_discrepancy",
        "foldnet_gain_coefficient",
        "typedef struct FoldnetPointSet FoldnetPointSet",
        "FOLDNET_STATUS_BUFFER_TOO_SMALL = 9",
        "FOLDNET_SCRAMBLE_ASM = 3",
    ] {
        assert!(h.contains(name), "header is missing {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(probe) = Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler, skipping");
        return;
    };
    assert!(probe.status.success());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"foldnet.h\"\n\
         int main(void) {\n\
           FoldnetPointSet *p = NULL;\n\
           FoldnetStatus s = foldnet_faure_net(2, 2, 4, 1, 0, &p);\n\
           size_t n = foldnet_point_set_len(p);\n\
           foldnet_point_set_free(p);\n\
           return s == FOLDNET_STATUS_OK && n == 16 ? 0 : 1;\n\
         }\n",
    )
    .unwrap();
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
