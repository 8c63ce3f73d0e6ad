//! Command-line front end.
//!
//! Every command resolves its flags into a config with all defaults filled
//! in, runs it, and writes each output file next to a `<file>.manifest.json`
//! sidecar holding that config. `replay` reruns a manifest.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::anova::{anova_sigmas, default_resolution};
use crate::analysis::gain::{lambda_net_gain_bound, net_gain_bound, quality_net_gain_bound};
use crate::analysis::{check_net, star_discrepancy, GainTable};
use crate::digitspace::default_precision;
use crate::error::{Error, Result};
use crate::fold::{FoldPlan, FoldScheme};
use crate::netgen::{faure_net, NetSpec};
use crate::pointset::PointSet;
use crate::quadrature::{fit_rate, rmse_experiment, write_csv, ExperimentConfig, Integrand, PointSource};
use crate::scramble::{Scramble, ScrambleKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "foldnet", version, about = "Scrambled and folded digital nets for quasi-Monte Carlo integration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a Faure net, optionally scrambled and folded.
    Generate(GenerateArgs),
    /// Verify a claimed net property of a point-set file.
    Check(CheckArgs),
    /// Replicated RMSE study over a range of net sizes.
    Experiment(ExperimentArgs),
    /// ANOVA variance components of a catalog integrand.
    Anova(AnovaArgs),
    /// Gain coefficients of a base point set.
    Gains(GainsArgs),
    /// Rerun the command recorded in a manifest.
    Replay(ReplayArgs),
}

/// A scramble kind, or `none`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ScrambleChoice(Option<ScrambleKind>);

fn parse_scramble(s: &str) -> std::result::Result<ScrambleChoice, String> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(ScrambleChoice(None));
    }
    s.parse::<ScrambleKind>().map(|k| ScrambleChoice(Some(k))).map_err(|e| e.to_string())
}

fn parse_fold(s: &str) -> std::result::Result<FoldScheme, String> {
    s.parse::<FoldScheme>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq)]
enum Rho {
    Auto,
    Fixed(Vec<usize>),
}

impl Rho {
    fn resolve(&self) -> Option<Vec<usize>> {
        match self {
            Rho::Auto => None,
            Rho::Fixed(v) => Some(v.clone()),
        }
    }
}

fn parse_rho(s: &str) -> std::result::Result<Rho, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Rho::Auto);
    }
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("bad rho entry '{p}': {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(Rho::Fixed)
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    base: u32,
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    lambda: u64,
    /// Digits per coordinate [default: ceil(53 / log2 b)].
    #[arg(long)]
    precision: Option<usize>,
    /// none, nested, randomlinear, ibinomial or asm.
    #[arg(long, default_value = "none", value_parser = parse_scramble)]
    scramble: ScrambleChoice,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// none, reflect, box or monomial.
    #[arg(long, default_value = "none", value_parser = parse_fold)]
    fold: FoldScheme,
    /// Reflection orders as a comma list, or auto for the balanced split.
    #[arg(long, default_value = "auto", value_parser = parse_rho)]
    rho: Rho,
    /// Output file [default: stdout, no manifest].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Point-set file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    q: usize,
    #[arg(long, default_value_t = 1)]
    lambda: u64,
    /// Drop the fine-box cap and the lambda < b restriction.
    #[arg(long)]
    relaxed: bool,
    /// Also report the star discrepancy (d <= 2).
    #[arg(long)]
    discrepancy: bool,
    /// Also check gain coefficients with |kappa| up to this order against their bounds.
    #[arg(long)]
    gains: Option<usize>,
    /// Report file [default: stdout, no manifest].
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long)]
    integrand: String,
    #[arg(long, default_value_t = 2)]
    base: u32,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 6)]
    m_min: usize,
    #[arg(long, default_value_t = 14)]
    m_max: usize,
    #[arg(long, default_value_t = 1)]
    lambda: u64,
    /// faure or uniform.
    #[arg(long, default_value = "faure")]
    source: String,
    #[arg(long, default_value = "randomlinear", value_parser = parse_scramble)]
    scramble: ScrambleChoice,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "none", value_parser = parse_fold)]
    fold: FoldScheme,
    #[arg(long, default_value = "auto", value_parser = parse_rho)]
    rho: Rho,
    #[arg(long, default_value_t = 300)]
    reps: usize,
    /// Number of largest sample sizes in the rate fit.
    #[arg(long, default_value_t = 6)]
    window: usize,
    #[arg(long)]
    precision: Option<usize>,
    /// Fill the seconds column with wall-clock times.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnovaArgs {
    #[arg(long)]
    integrand: String,
    #[arg(long)]
    dim: Option<usize>,
    /// Midpoint nodes per axis [default: 65536, 2048, 160 for d = 1, 2, 3].
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GainsArgs {
    /// Unscrambled point-set file; without it a Faure net is built from --base/--dim/--m.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    base: Option<u32>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 1)]
    lambda: u64,
    #[arg(long)]
    max_order: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    manifest: PathBuf,
    /// Compare against the recorded outputs instead of rewriting them.
    #[arg(long)]
    verify: bool,
}

/// Fully resolved generate settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateConfig {
    pub base: u32,
    pub dim: usize,
    pub m: usize,
    pub lambda: u64,
    pub precision: usize,
    pub scramble: Option<ScrambleKind>,
    pub seed: u64,
    pub fold: FoldScheme,
    pub rho: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub input: PathBuf,
    pub m: usize,
    pub q: usize,
    pub lambda: u64,
    pub relaxed: bool,
    pub discrepancy: bool,
    pub gains: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRun {
    pub experiment: ExperimentConfig,
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaConfig {
    pub integrand: String,
    pub dim: usize,
    pub resolution: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainsConfig {
    pub input: Option<PathBuf>,
    pub base: Option<u32>,
    pub dim: Option<usize>,
    pub m: Option<usize>,
    pub lambda: u64,
    pub max_order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum CommandConfig {
    Generate(GenerateConfig),
    Check(CheckConfig),
    Experiment(ExperimentRun),
    Anova(AnovaConfig),
    Gains(GainsConfig),
}

/// Everything needed to reproduce one output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config: CommandConfig,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(config: CommandConfig, outputs: Vec<PathBuf>) -> Self {
        let seed = match &config {
            CommandConfig::Generate(c) => c.seed,
            CommandConfig::Experiment(c) => c.experiment.seed,
            _ => 0,
        };
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config,
            outputs,
        }
    }

    pub fn sidecar_path(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_os_string();
        name.push(".manifest.json");
        PathBuf::from(name)
    }
}

/// Output bytes of a command and whether its checks passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub bytes: Vec<u8>,
    pub passed: bool,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn ok(bytes: Vec<u8>) -> Self {
        Outcome {
            bytes,
            passed: true,
            warnings: Vec::new(),
        }
    }
}

fn read_points(path: &Path) -> Result<PointSet> {
    let file = fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    PointSet::read_text(std::io::BufReader::new(file))
}

pub fn run_generate(c: &GenerateConfig) -> Result<Outcome> {
    let spec = NetSpec::new(c.base, c.dim, c.m, 0, c.lambda, c.lambda >= u64::from(c.base))?;
    let mut points = faure_net(&spec, c.precision)?.points;
    if let Some(kind) = c.scramble {
        points = Scramble::new(kind, c.base, c.precision, c.dim, c.seed)?.apply_set(&points)?;
    }
    let plan = FoldPlan::for_net(c.fold, c.m, 0, c.dim, c.rho.as_deref())?;
    let points = plan.apply(&points)?;
    Ok(Outcome::ok(points.to_text()?.into_bytes()))
}

fn scrambled_input_warning(input: &Path) -> Option<String> {
    let text = fs::read_to_string(RunManifest::sidecar_path(input)).ok()?;
    let manifest: RunManifest = serde_json::from_str(&text).ok()?;
    match manifest.config {
        CommandConfig::Generate(GenerateConfig { scramble: Some(kind), .. }) => Some(format!(
            "{} holds {kind}-scrambled points; gain coefficients are defined for unscrambled points",
            input.display()
        )),
        _ => None,
    }
}

/// Upper bound on the gains of a net with this spec; relaxed nets have none.
fn gain_bound(base: u32, dim: usize, m: usize, q: usize, lambda: u64, relaxed: bool) -> Option<f64> {
    match (q, lambda) {
        (0, 1) => Some(net_gain_bound(base, dim, m)),
        _ if relaxed => None,
        (0, _) => Some(lambda_net_gain_bound()),
        _ => Some(quality_net_gain_bound(base, q, dim)),
    }
}

pub fn run_check(c: &CheckConfig) -> Result<Outcome> {
    let points = read_points(&c.input)?;
    let spec = NetSpec::new(points.base(), points.dim(), c.m, c.q, c.lambda, c.relaxed)?;
    let mut warnings = Vec::new();
    if points.len() as u64 != spec.n() {
        let text = format!(
            "kind,kappa,tau,observed,expected\nsize,,,{},{}\n# net=fail,intervals=0\n",
            points.len(),
            spec.n()
        );
        return Ok(Outcome {
            bytes: text.into_bytes(),
            passed: false,
            warnings,
        });
    }
    let report = check_net(&points, &spec)?;
    let mut passed = report.passed;
    let mut text = report.to_csv();
    let _ = writeln!(
        text,
        "# net={},intervals={}",
        if report.passed { "pass" } else { "fail" },
        report.intervals_checked
    );
    if c.discrepancy {
        let d = star_discrepancy(&points)?;
        let _ = writeln!(text, "# star_discrepancy={d:.16e}");
    }
    if let Some(order) = c.gains {
        warnings.extend(scrambled_input_warning(&c.input));
        let table = GainTable::compute(&points, order)?;
        let bound = gain_bound(points.base(), points.dim(), c.m, c.q, c.lambda, c.relaxed);
        let mut bad = 0usize;
        for e in &table.entries {
            let k: usize = e.kappa.iter().sum();
            let must_vanish = c.m - c.q >= e.u.len() + k;
            let over = bound.is_some_and(|g| e.gamma > g + 1e-9);
            if e.gamma < 0.0 || over || (must_vanish && e.numerator != 0) {
                bad += 1;
            }
        }
        passed &= bad == 0;
        let _ = writeln!(
            text,
            "# gains={},max={:.16e},bound={},violations={bad}",
            if bad == 0 { "pass" } else { "fail" },
            table.max_gamma(),
            bound.map_or("none".to_string(), |g| format!("{g:.16e}"))
        );
    }
    Ok(Outcome {
        bytes: text.into_bytes(),
        passed,
        warnings,
    })
}

pub fn run_experiment(c: &ExperimentRun) -> Result<Outcome> {
    let rows = rmse_experiment(&c.experiment)?;
    let mut text = match fit_rate(&rows, c.experiment.window) {
        Ok(fit) => write_csv(&rows, Some(&fit), c.timing),
        Err(e) => {
            let mut t = write_csv(&rows, None, c.timing);
            let _ = writeln!(t, "# slope unavailable: {e}");
            t
        }
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    Ok(Outcome::ok(text.into_bytes()))
}

pub fn run_anova(c: &AnovaConfig) -> Result<Outcome> {
    let f = Integrand::from_name(&c.integrand, c.dim, 2)?;
    let table = anova_sigmas(|x| f.eval(x), c.dim, c.resolution)?;
    Ok(Outcome::ok(table.to_csv().into_bytes()))
}

pub fn run_gains(c: &GainsConfig) -> Result<Outcome> {
    let mut warnings = Vec::new();
    let points = match (&c.input, c.base, c.dim, c.m) {
        (Some(path), None, None, None) => {
            warnings.extend(scrambled_input_warning(path));
            read_points(path)?
        }
        (None, Some(base), Some(dim), Some(m)) => {
            let spec = NetSpec::new(base, dim, m, 0, c.lambda, c.lambda >= u64::from(base))?;
            faure_net(&spec, default_precision(base).max(c.max_order + 1))?.points
        }
        _ => {
            return Err(Error::Contract(
                "gains needs either --input or all of --base, --dim and --m".into(),
            ))
        }
    };
    let table = GainTable::compute(&points, c.max_order)?;
    Ok(Outcome {
        bytes: table.to_csv().into_bytes(),
        passed: true,
        warnings,
    })
}

pub fn run(config: &CommandConfig) -> Result<Outcome> {
    match config {
        CommandConfig::Generate(c) => run_generate(c),
        CommandConfig::Check(c) => run_check(c),
        CommandConfig::Experiment(c) => run_experiment(c),
        CommandConfig::Anova(c) => run_anova(c),
        CommandConfig::Gains(c) => run_gains(c),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Parse { .. } => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Writes the outcome to `out` with a manifest, or to stdout.
fn emit(config: CommandConfig, out: Option<PathBuf>) -> Result<i32> {
    let outcome = run(&config)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    match out {
        Some(path) => {
            write_file(&path, &outcome.bytes)?;
            let manifest = RunManifest::new(config, vec![path.clone()]);
            let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
            write_file(&RunManifest::sidecar_path(&path), format!("{json}\n").as_bytes())?;
        }
        None => {
            std::io::stdout().write_all(&outcome.bytes)?;
        }
    }
    Ok(if outcome.passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn replay(args: &ReplayArgs) -> Result<i32> {
    let text = fs::read_to_string(&args.manifest).map_err(|e| Error::Io(format!("{}: {e}", args.manifest.display())))?;
    let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let outcome = run(&manifest.config)?;
    let Some(path) = manifest.outputs.first() else {
        return Err(Error::Contract("manifest lists no outputs".into()));
    };
    if args.verify {
        let recorded = fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        if recorded != outcome.bytes {
            eprintln!("{} differs from the replayed output", path.display());
            return Ok(EXIT_CHECK_FAILED);
        }
    } else {
        write_file(path, &outcome.bytes)?;
    }
    Ok(if outcome.passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Generate(a) => {
            let config = GenerateConfig {
                base: a.base,
                dim: a.dim,
                m: a.m,
                lambda: a.lambda,
                precision: a.precision.unwrap_or_else(|| default_precision(a.base)),
                scramble: a.scramble.0,
                seed: a.seed,
                fold: a.fold,
                rho: a.rho.resolve(),
            };
            emit(CommandConfig::Generate(config), a.out)
        }
        Command::Check(a) => {
            let config = CheckConfig {
                input: a.input,
                m: a.m,
                q: a.q,
                lambda: a.lambda,
                relaxed: a.relaxed,
                discrepancy: a.discrepancy,
                gains: a.gains,
            };
            emit(CommandConfig::Check(config), a.report)
        }
        Command::Experiment(a) => {
            let mut experiment = ExperimentConfig::new(&a.integrand, a.dim);
            experiment.base = a.base;
            experiment.m_min = a.m_min;
            experiment.m_max = a.m_max;
            experiment.lambda = a.lambda;
            experiment.source = a.source.parse::<PointSource>()?;
            experiment.scramble = a.scramble.0;
            experiment.seed = a.seed;
            experiment.fold = a.fold;
            experiment.rho = a.rho.resolve();
            experiment.replications = a.reps;
            experiment.window = a.window;
            experiment.precision = a.precision.unwrap_or_else(|| default_precision(a.base));
            if experiment.source == PointSource::Uniform {
                experiment.scramble = None;
            }
            let run = ExperimentRun {
                experiment,
                timing: a.timing,
            };
            emit(CommandConfig::Experiment(run), a.out)
        }
        Command::Anova(a) => {
            let dim = match (a.dim, a.integrand.as_str()) {
                (Some(d), _) => d,
                (None, "smooth_1d") => 1,
                (None, _) => 2,
            };
            let config = AnovaConfig {
                integrand: a.integrand,
                dim,
                resolution: a.resolution.unwrap_or_else(|| default_resolution(dim)),
            };
            emit(CommandConfig::Anova(config), a.out)
        }
        Command::Gains(a) => {
            let config = GainsConfig {
                input: a.input,
                base: a.base,
                dim: a.dim,
                m: a.m,
                lambda: a.lambda,
                max_order: a.max_order,
            };
            emit(CommandConfig::Gains(config), a.out)
        }
        Command::Replay(a) => replay(&a),
    }
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_flag() {
        assert_eq!(parse_rho("auto").unwrap(), Rho::Auto);
        assert_eq!(parse_rho("2,3").unwrap(), Rho::Fixed(vec![2, 3]));
        assert!(parse_rho("2,x").is_err());
    }

    #[test]
    fn scramble_flag() {
        assert_eq!(parse_scramble("none").unwrap().0, None);
        assert_eq!(parse_scramble("asm").unwrap().0, Some(ScrambleKind::Asm));
        assert!(parse_scramble("shuffle").is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let config = CommandConfig::Generate(GenerateConfig {
            base: 3,
            dim: 2,
            m: 2,
            lambda: 1,
            precision: 34,
            scramble: Some(ScrambleKind::Asm),
            seed: 9,
            fold: FoldScheme::Box,
            rho: None,
        });
        let m = RunManifest::new(config, vec![PathBuf::from("a.txt")]);
        let back: RunManifest = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.seed, 9);
        assert_eq!(RunManifest::sidecar_path(Path::new("x/a.txt")), PathBuf::from("x/a.txt.manifest.json"));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(main_with_args(["foldnet", "generate", "--base", "2"]), EXIT_USAGE);
        assert_eq!(main_with_args(["foldnet", "generate", "--base", "4", "--dim", "2", "--m", "2"]), EXIT_USAGE);
        assert_eq!(
            main_with_args(["foldnet", "check", "--input", "/nonexistent/file", "--m", "2"]),
            EXIT_IO
        );
    }
}
