use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use foldnet::PointSet;

fn foldnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foldnet")).args(args).output().unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn read_set(p: &str) -> PointSet {
    PointSet::parse_text(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn generate_writes_points_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "net.txt");
    let o = foldnet(&["generate", "--base", "2", "--dim", "2", "--m", "4", "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_set(&out).len(), 16);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(format!("{out}.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["command"], "generate");
    assert!(manifest["version"].is_string());

    let folded = path(dir.path(), "box.txt");
    let o = foldnet(&[
        "generate", "--base", "2", "--dim", "2", "--m", "4", "--fold", "box", "--rho", "auto", "--out", &folded,
    ]);
    assert!(o.status.success());
    assert_eq!(read_set(&folded).len(), 64);
}

#[test]
fn generate_is_deterministic() {
    let args = ["generate", "--base", "3", "--dim", "2", "--m", "3", "--scramble", "nested", "--seed", "9"];
    let a = foldnet(&args);
    let b = foldnet(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut other = args.to_vec();
    other[9] = "10";
    assert_ne!(foldnet(&other).stdout, a.stdout);
}

#[test]
fn check_accepts_nets_and_rejects_iid_points() {
    let dir = tempfile::tempdir().unwrap();
    let net = path(dir.path(), "net.txt");
    assert!(foldnet(&["generate", "--base", "2", "--dim", "2", "--m", "4", "--out", &net]).status.success());
    let o = foldnet(&["check", "--input", &net, "--m", "4", "--discrepancy", "--gains", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let report = String::from_utf8(o.stdout).unwrap();
    assert!(report.contains("# net=pass"));
    assert!(report.contains("# gains=pass"));
    assert!(report.contains("# star_discrepancy="));

    let pts: Vec<Vec<f64>> = (0..16).map(|i| vec![(i as f64 * 0.37) % 1.0, (i as f64 * 0.61) % 1.0]).collect();
    let iid = path(dir.path(), "iid.txt");
    fs::write(&iid, PointSet::from_values(&pts, 2, 53).unwrap().to_text().unwrap()).unwrap();
    let o = foldnet(&["check", "--input", &iid, "--m", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stdout).unwrap().lines().nth(1).unwrap().starts_with("balance,"));

    let o = foldnet(&["check", "--input", &net, "--m", "5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn folded_sets_check_as_relaxed_nets() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "f.txt");
    let o = foldnet(&[
        "generate", "--base", "2", "--dim", "2", "--m", "4", "--scramble", "asm", "--seed", "3", "--fold", "box",
        "--out", &out,
    ]);
    assert!(o.status.success());
    let o = foldnet(&["check", "--input", &out, "--m", "4", "--lambda", "4", "--relaxed", "--gains", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("bound=none"));
    assert!(String::from_utf8(o.stderr).unwrap().contains("scrambled"));
}

#[test]
fn malformed_input_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.txt");
    fs::write(&bad, "base=2 dim=1 prec=3 n=2\n010\n01x\n").unwrap();
    let o = foldnet(&["check", "--input", &bad, "--m", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stderr).unwrap().contains("line 3"));

    let o = foldnet(&["check", "--input", &path(dir.path(), "missing.txt"), "--m", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(foldnet(&["generate", "--base", "2"]).status.code(), Some(2));
    assert_eq!(foldnet(&["generate", "--base", "4", "--dim", "2", "--m", "2"]).status.code(), Some(2));
    assert_eq!(
        foldnet(&["generate", "--base", "2", "--dim", "2", "--m", "2", "--fold", "sideways"]).status.code(),
        Some(2)
    );
    assert_eq!(foldnet(&["anova", "--integrand", "sloan_joe_g", "--dim", "4"]).status.code(), Some(2));
    assert_eq!(foldnet(&["experiment", "--integrand", "nope", "--reps", "2"]).status.code(), Some(2));
}

#[test]
fn experiment_csv_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "exp.csv");
    let o = foldnet(&[
        "experiment", "--integrand", "sloan_joe_f", "--m-min", "3", "--m-max", "8", "--reps", "10", "--fold", "box",
        "--out", &out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,estimator,scramble,fold,rmse,se,seconds"));
    assert!(lines.next().unwrap().starts_with("32,faure,randomlinear,box,"));
    assert!(csv.lines().last().unwrap().starts_with("# slope="));

    let manifest = format!("{out}.manifest.json");
    let o = foldnet(&["replay", &manifest, "--verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    fs::write(&out, "tampered\n").unwrap();
    assert_eq!(foldnet(&["replay", &manifest, "--verify"]).status.code(), Some(1));
    assert!(foldnet(&["replay", &manifest]).status.success());
    assert_ne!(fs::read_to_string(&out).unwrap(), "tampered\n");
    assert_eq!(foldnet(&["replay", &manifest, "--verify"]).status.code(), Some(0));
}

#[test]
fn anova_and_gains_reports() {
    let o = foldnet(&["anova", "--integrand", "sloan_joe_g", "--dim", "2", "--resolution", "512"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("u,sigma2,index\n"));
    let row = text.lines().find(|l| l.starts_with("2,")).unwrap();
    let index: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((index - 0.8561).abs() < 1e-3);

    let o = foldnet(&["gains", "--base", "2", "--dim", "2", "--m", "3", "--max-order", "4"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("u,kappa,gamma\n"));
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap() <= 2.0));
}
