//! Command-line front end.
//!
//! Every command renders its full report into memory first, so a failing
//! run never leaves a partial output file. Floats are printed with the
//! shortest round-trip representation, so output depends only on the
//! arguments and never on `--threads`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::ingest::{load_csv, multiscale_variation};
use crate::report::{BoundReport, CertificateReport};
use crate::stochastic::{
    enumerate_variation, exhaustive_bound_check, nonzero_certificate, z_exceedance_frequency,
    z_moment_indexed, ZIndexing,
};
use crate::variation::{
    check_regime_bounds, estimate_variation_index, pth_variation, riesz_normalized_curve,
    variation_curve, GridSource, VariationCurve,
};
use crate::waves::WavePhi;
use crate::weights::{Regime, WeightPsi};
use crate::wtf::{write_grid_csv, SignRule, WtfSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CAPACITY: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Relative tolerance of `oracle-check`.
pub const ORACLE_RTOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(
    name = "fracvar",
    version,
    about = "Variation of Weierstrass-type functions along b-adic partitions",
    args_override_self = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate f at points of [0, 1].
    Eval(EvalArgs),
    /// Exact values of f on the level-n b-adic grid.
    Grid(GridArgs),
    /// p-th variation V^{p,t}_n for n = 1..=n_max.
    Variation(VariationArgs),
    /// Riesz variation normalized by the regime growth rate.
    Riesz(RieszArgs),
    /// Regime, Hölder exponent and variation index.
    Regime(RegimeArgs),
    /// Estimate the variation index from log-variation slopes.
    Index(IndexArgs),
    /// Monte Carlo moment E|Z_N|^p of the digit-path limit.
    Zmoment(ZmomentArgs),
    /// Check the explicit constants on sampled and enumerated data.
    Certify(CertifyArgs),
    /// Compare direct variation with digit-path enumeration.
    OracleCheck(OracleArgs),
    /// Multiscale variation of a sampled path read from CSV.
    Ingest(IngestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Output format (default depends on the command).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads (default: available cores).
    #[arg(long, env = "FRACVAR_THREADS")]
    threads: Option<usize>,
    /// JSON object of flags; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SpecArgs {
    #[arg(long, default_value_t = 2)]
    b: u32,
    /// power:A | logplus:A | powerlog:A | sinlog:A | powersinlog:A
    #[arg(long)]
    weight: Option<String>,
    /// triangular | sincos:NU,RHO | custom:PATH | zero
    #[arg(long, default_value = "triangular")]
    wave: String,
    /// Hölder exponent of the wave (overrides the catalog value).
    #[arg(long)]
    gamma: Option<f64>,
    /// Hölder constant of the wave (overrides the catalog value).
    #[arg(long)]
    holder_const: Option<f64>,
    /// Bound on sup |phi| (overrides the catalog value).
    #[arg(long)]
    sup_abs: Option<f64>,
    /// plus | minus | alternating | explicit:+-+ | seeded:N
    #[arg(long, default_value = "plus")]
    signs: String,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Points, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true, allow_negative_numbers = true)]
    t: Vec<f64>,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    n: u32,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct VariationArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long)]
    n_max: u32,
    /// Append the explicit regime bound and its margin per level.
    #[arg(long)]
    regime_check: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct RieszArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    n_max: u32,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct RegimeArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct IndexArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "1,1.5,2,2.5,3,3.5,4")]
    p_grid: Vec<f64>,
    #[arg(long, default_value_t = 8)]
    n_min: u32,
    #[arg(long, default_value_t = 14)]
    n_max: u32,
    /// Sampled path to analyse instead of the spec.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct ZmomentArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Truncation level N of Z_N.
    #[arg(long, default_value_t = 40)]
    trunc: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// First index of the truncated sum: 1 (Z_N = Σ_{m=1}^N) or 0.
    #[arg(long, value_enum, default_value_t = ZIndex::One)]
    z_index: ZIndex,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ZIndex {
    #[value(name = "1")]
    One,
    #[value(name = "0")]
    Zero,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Sampled pairs per Hölder/submultiplicativity check.
    #[arg(long, default_value_t = 10_000)]
    pairs: usize,
    /// Also check the uniform path bound over all b^n digit paths.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 40)]
    trunc: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    p: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 2)]
    b: u32,
    #[arg(long)]
    p: f64,
    /// Number of finest levels to report (default: all).
    #[arg(long)]
    levels: Option<u32>,
    #[command(flatten)]
    common: CommonArgs,
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Eval(a) => &a.common,
            Command::Grid(a) => &a.common,
            Command::Variation(a) => &a.common,
            Command::Riesz(a) => &a.common,
            Command::Regime(a) => &a.common,
            Command::Index(a) => &a.common,
            Command::Zmoment(a) => &a.common,
            Command::Certify(a) => &a.common,
            Command::OracleCheck(a) => &a.common,
            Command::Ingest(a) => &a.common,
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
    /// The report was produced but a check inside it failed.
    Failed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

impl SpecArgs {
    fn build(&self) -> CliResult<WtfSpec> {
        let weight = self
            .weight
            .as_deref()
            .ok_or_else(|| CliError::Usage("--weight is required (e.g. power:0.5)".into()))?;
        let psi: WeightPsi = weight.parse()?;
        let mut phi: WavePhi = self.wave.parse()?;
        match (self.gamma, self.holder_const) {
            (None, None) => {}
            (g, Some(c)) => {
                let gamma = g.unwrap_or(phi.gamma);
                phi = phi.with_holder(gamma, c)?
            }
            (Some(_), None) => {
                return Err(CliError::Usage(
                    "--gamma needs a matching --holder-const".into(),
                ))
            }
        }
        if let Some(s) = self.sup_abs {
            phi = phi.with_sup_abs(s)?;
        }
        let signs: SignRule = self.signs.parse()?;
        Ok(WtfSpec::new(self.b, psi, phi, signs)?)
    }
}

/// Splices `--key value` pairs from the `--config` file right after the
/// subcommand, so that flags given explicitly (later) win.
fn expand_config(mut argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = argv.get(i + 1).map(PathBuf::from);
            break;
        }
        if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
            break;
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Lib(Error::Io(format!("{}: {e}", path.display()))))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| {
        CliError::Lib(Error::Format {
            line: e.line(),
            message: format!("{}: {e}", path.display()),
        })
    })?;
    let Value::Object(map) = value else {
        return Err(CliError::Usage(format!(
            "{} must hold a JSON object",
            path.display()
        )));
    };
    let mut extra = Vec::new();
    for (key, v) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            Value::Bool(true) => extra.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let joined: Vec<String> = items.iter().map(scalar_text).collect();
                extra.push(flag.into());
                extra.push(joined.join(",").into());
            }
            other => {
                extra.push(flag.into());
                extra.push(scalar_text(&other).into());
            }
        }
    }
    let at = argv
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map_or(argv.len(), |i| i + 2);
    argv.splice(at..at, extra);
    Ok(argv)
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Parses `argv` (including the program name), runs the command and writes
/// the report to `--output` or `stdout`. Returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let outcome = expand_config(argv).and_then(|argv| {
        Cli::try_parse_from(argv).map_err(|e| match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                CliError::Usage(format!("\0{e}"))
            }
            _ => CliError::Usage(e.render().to_string()),
        })
    });
    let cli = match outcome {
        Ok(cli) => cli,
        Err(CliError::Usage(msg)) if msg.starts_with('\0') => {
            let _ = write!(stdout, "{}", &msg[1..]);
            return EXIT_OK;
        }
        Err(e) => return report_error(e, stderr),
    };
    let common = cli.command.common();
    let threads = common.threads.unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => return report_error(CliError::Usage(format!("--threads: {e}")), stderr),
    };
    let mut body = String::new();
    let result = pool.install(|| execute(&cli.command, &mut body));
    let written = match &common.output {
        Some(path) => std::fs::write(path, &body).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        return report_error(CliError::Lib(Error::Io(msg)), stderr);
    }
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => report_error(e, stderr),
    }
}

fn report_error(e: CliError, stderr: &mut dyn Write) -> i32 {
    let (msg, code) = match e {
        CliError::Usage(m) => (m, EXIT_USAGE),
        CliError::Lib(err @ Error::Capacity(_)) => (format!("error: {err}\n"), EXIT_CAPACITY),
        CliError::Lib(err) => (format!("error: {err}\n"), EXIT_FAILURE),
        CliError::Failed(m) => (format!("check failed: {m}\n"), EXIT_FAILURE),
    };
    let _ = write!(stderr, "{msg}");
    code
}

fn execute(command: &Command, out: &mut String) -> CliResult<()> {
    match command {
        Command::Eval(a) => cmd_eval(a, out),
        Command::Grid(a) => cmd_grid(a, out),
        Command::Variation(a) => cmd_variation(a, out),
        Command::Riesz(a) => cmd_riesz(a, out),
        Command::Regime(a) => cmd_regime(a, out),
        Command::Index(a) => cmd_index(a, out),
        Command::Zmoment(a) => cmd_zmoment(a, out),
        Command::Certify(a) => cmd_certify(a, out),
        Command::OracleCheck(a) => cmd_oracle(a, out),
        Command::Ingest(a) => cmd_ingest(a, out),
    }
}

fn push_json<T: Serialize>(out: &mut String, value: &T) {
    out.push_str(&serde_json::to_string_pretty(value).expect("serializable report"));
    out.push('\n');
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn cmd_eval(a: &EvalArgs, out: &mut String) -> CliResult<()> {
    let spec = a.spec.build()?;
    let rows =
        a.t.iter()
            .map(|&t| spec.eval_f(t, a.tol).map(|(f, e)| (t, f, e)))
            .collect::<crate::Result<Vec<_>>>()?;
    if a.common.format == Some(Format::Json) {
        let points: Vec<Value> = rows
            .iter()
            .map(|(t, f, e)| json!({"t": t, "f": f, "error_bound": e}))
            .collect();
        push_json(out, &json!({"spec": spec.to_string(), "points": points}));
    } else {
        out.push_str("t,f,error_bound\n");
        for (t, f, e) in rows {
            let _ = writeln!(out, "{t},{f},{e}");
        }
    }
    Ok(())
}

fn cmd_grid(a: &GridArgs, out: &mut String) -> CliResult<()> {
    let spec = a.spec.build()?;
    let values = spec.eval_f_grid(a.n)?;
    if a.common.format == Some(Format::Json) {
        push_json(
            out,
            &json!({"spec": spec.to_string(), "b": spec.b, "n": a.n, "values": values}),
        );
    } else {
        let mut buf = Vec::new();
        write_grid_csv(&mut buf, spec.b, a.n, &values)?;
        out.push_str(&String::from_utf8(buf).expect("ascii csv"));
    }
    Ok(())
}

fn curve_csv(out: &mut String, curve: &VariationCurve, check: Option<&BoundReport>) {
    out.push_str(if check.is_some() {
        "n,value,normalized,bound,margin\n"
    } else {
        "n,value,normalized\n"
    });
    for (i, l) in curve.levels.iter().enumerate() {
        let _ = write!(out, "{},{},{}", l.n, l.value, opt(l.normalized));
        if let Some(r) = check {
            let e = &r.entries[i];
            let _ = write!(out, ",{},{}", opt(e.bound), opt(e.margin));
        }
        out.push('\n');
    }
}

fn cmd_variation(a: &VariationArgs, out: &mut String) -> CliResult<()> {
    let spec = a.spec.build()?;
    let curve = variation_curve(&spec, a.p, a.t, a.n_max)?;
    let check = if a.regime_check {
        if a.t != 1.0 {
            return Err(CliError::Lib(Error::Contract(
                "--regime-check bounds apply to t = 1 only".into(),
            )));
        }
        Some(check_regime_bounds(&spec, a.p, a.n_max)?)
    } else {
        None
    };
    if a.common.format == Some(Format::Json) {
        push_json(
            out,
            &json!({"spec": spec.to_string(), "curve": curve, "regime_check": check}),
        );
    } else {
        curve_csv(out, &curve, check.as_ref());
    }
    match check {
        Some(r) if !r.passed => Err(CliError::Failed(format!(
            "{} violated at {} level(s)",
            r.statement,
            r.violations()
        ))),
        _ => Ok(()),
    }
}

fn cmd_riesz(a: &RieszArgs, out: &mut String) -> CliResult<()> {
    let spec = a.spec.build()?;
    let curve = riesz_normalized_curve(&spec, a.p, a.n_max)?;
    if a.common.format == Some(Format::Json) {
        push_json(out, &json!({"spec": spec.to_string(), "riesz": curve}));
    } else {
        out.push_str("n,value,normalized,bound,margin\n");
        for ((n, rv), (_, norm)) in curve.levels.iter().zip(&curve.normalized) {
            let _ = writeln!(
                out,
                "{n},{rv},{norm},{},{}",
                curve.bound,
                curve.bound - norm
            );
        }
    }
    Ok(())
}

fn cmd_regime(a: &RegimeArgs, out: &mut String) -> CliResult<()> {
    let spec = a.spec.build()?;
    let r = spec.regime();
    let hb = spec.holder_bound();
    if a.common.format == Some(Format::Csv) {
        out.push_str(
            "regime,beta,q,psi_at_inv_b,threshold,holder_exponent,holder_constant,log_factor\n",
        );
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.regime,
            opt(r.beta),
            r.q,
            r.psi_at_inv_b,
            r.threshold,
            hb.exponent,
            hb.constant,
            hb.log_factor
        );
    } else {
        push_json(
            out,
            &json!({
                "spec": spec.to_string(),
                "regime": r.regime,
                "beta": r.beta,
                "q": r.q,
                "psi_at_inv_b": r.psi_at_inv_b,
                "threshold": r.threshold,
                "holder": hb,
            }),
        );
    }
    Ok(())
}

fn cmd_index(a: &IndexArgs, out: &mut String) -> CliResult<()> {
    let (label, source): (String, Box<dyn GridSource>) = match &a.input {
        Some(path) => {
            let p = load_csv(path, a.spec.b)?;
            (p.label.clone(), Box::new(p))
        }
        None => {
            let s = a.spec.build()?;
            (s.to_string(), Box::new(s))
        }
    };
    let est = estimate_variation_index(source.as_ref(), &a.p_grid, a.n_min, a.n_max)?;
    if a.common.format == Some(Format::Json) {
        push_json(out, &json!({"source": label, "estimate": est}));
    } else {
        out.push_str("p,slope,q_hat\n");
        for (p, s) in &est.slopes {
            let _ = writeln!(out, "{p},{s},{}", est.q_hat);
        }
    }
    Ok(())
}

fn cmd_zmoment(a: &ZmomentArgs, out: &mut String) -> CliResult<()> {
    let spec = a.spec.build()?;
    let indexing = match a.z_index {
        ZIndex::One => ZIndexing::FromOne,
        ZIndex::Zero => ZIndexing::FromZero,
    };
    let est = z_moment_indexed(&spec, a.p, a.samples, a.trunc, a.seed, indexing)?;
    if a.common.format == Some(Format::Csv) {
        out.push_str("p,z_index,mc_mean,mc_stderr,trunc_n,tail_bound,samples,seed\n");
        let first = if indexing == ZIndexing::FromOne { 1 } else { 0 };
        let _ = writeln!(
            out,
            "{},{first},{},{},{},{},{},{}",
            est.p, est.mc_mean, est.mc_stderr, est.trunc_n, est.tail_bound, est.samples, est.seed
        );
    } else {
        push_json(out, &json!({"spec": spec.to_string(), "estimate": est}));
    }
    Ok(())
}

#[derive(Serialize)]
struct CheckRow {
    check: &'static str,
    passed: bool,
    value: f64,
    bound: f64,
    violations: usize,
}

impl CheckRow {
    fn from_certificate(check: &'static str, c: &CertificateReport) -> Self {
        CheckRow {
            check,
            passed: c.passed,
            value: c.worst,
            bound: c.bound,
            violations: c.violations,
        }
    }
}

fn cmd_certify(a: &CertifyArgs, out: &mut String) -> CliResult<()> {
    let spec = a.spec.build()?;
    let mut rows = vec![
        CheckRow::from_certificate("wave_holder", &spec.phi.certify_holder(a.pairs)),
        CheckRow::from_certificate(
            "weight_submultiplicative",
            &spec.psi.verify_submultiplicative(a.pairs),
        ),
        CheckRow::from_certificate("function_holder", &spec.check_holder_bound(a.pairs)?),
    ];
    if let Some(n) = a.n {
        let r = exhaustive_bound_check(&spec, n)?;
        rows.push(CheckRow {
            check: "path_bound",
            passed: r.passed,
            value: r.max_value,
            bound: r.entries[0].bound.unwrap_or(f64::INFINITY),
            violations: r.violations(),
        });
    }
    let mut certificate = None;
    if spec.regime().regime == Regime::Super && spec.signs == SignRule::AllPlus {
        let c = nonzero_certificate(&spec)?;
        let freq = z_exceedance_frequency(&spec, c.delta, a.samples, a.trunc, a.seed)?;
        let passed = freq >= c.prob_lower;
        rows.push(CheckRow {
            check: "z_exceeds_delta",
            passed,
            value: freq,
            bound: c.prob_lower,
            violations: usize::from(!passed),
        });
        certificate = Some(c);
    }
    if a.common.format == Some(Format::Json) {
        push_json(
            out,
            &json!({"spec": spec.to_string(), "checks": rows, "nonzero_certificate": certificate}),
        );
    } else {
        out.push_str("check,passed,value,bound,violations\n");
        for r in &rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.check, r.passed, r.value, r.bound, r.violations
            );
        }
    }
    let failed: Vec<&str> = rows.iter().filter(|r| !r.passed).map(|r| r.check).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(failed.join(", ")))
    }
}

fn cmd_oracle(a: &OracleArgs, out: &mut String) -> CliResult<()> {
    let spec = a.spec.build()?;
    let grid = spec.eval_f_grid(a.n)?;
    let direct = pth_variation(&grid, spec.b, a.p, 1.0)?;
    let enumerated = enumerate_variation(&spec, a.p, a.n)?;
    let scale = direct.abs().max(enumerated.abs());
    let rel_err = if scale == 0.0 {
        0.0
    } else {
        (direct - enumerated).abs() / scale
    };
    let passed = rel_err < ORACLE_RTOL;
    match a.common.format {
        Some(Format::Json) => push_json(
            out,
            &json!({"spec": spec.to_string(), "n": a.n, "p": a.p, "direct": direct,
                    "enumerated": enumerated, "rel_err": rel_err, "passed": passed}),
        ),
        Some(Format::Csv) => {
            out.push_str("n,p,direct,enumerated,rel_err,passed\n");
            let _ = writeln!(
                out,
                "{},{},{direct},{enumerated},{rel_err},{passed}",
                a.n, a.p
            );
        }
        None if passed => {
            let _ = writeln!(out, "PASS rel_err<{ORACLE_RTOL:e}");
        }
        None => {
            let _ = writeln!(out, "FAIL rel_err={rel_err:e}");
        }
    }
    if passed {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "oracle mismatch, rel_err = {rel_err:e}"
        )))
    }
}

fn cmd_ingest(a: &IngestArgs, out: &mut String) -> CliResult<()> {
    let path = load_csv(&a.input, a.b)?;
    let curve = multiscale_variation(&path, a.p, a.levels.unwrap_or(path.n()))?;
    if a.common.format == Some(Format::Json) {
        push_json(out, &json!({"source": path.label, "curve": curve}));
    } else {
        curve_csv(out, &curve, None);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("fracvar").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn takagi_variation_csv() {
        let (code, out, _) = run_str(&[
            "variation",
            "--b",
            "2",
            "--weight",
            "power:1",
            "--wave",
            "triangular",
            "--signs",
            "plus",
            "--p",
            "2",
            "--n-max",
            "10",
        ]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some("n,value,normalized"));
        for (i, line) in lines.enumerate() {
            let n = i as f64 + 1.0;
            let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert!((v - n * 2f64.powf(-n)).abs() < 1e-12 * v, "{line}");
        }
    }

    #[test]
    fn regime_json() {
        let (code, out, _) = run_str(&[
            "regime",
            "--b",
            "2",
            "--weight",
            "power:0.5",
            "--wave",
            "triangular",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["regime"], "Super");
        assert_eq!(v["beta"], 0.5);
        assert_eq!(v["q"], 2.0);
    }

    #[test]
    fn oracle_line() {
        let (code, out, _) = run_str(&[
            "oracle-check",
            "--b",
            "2",
            "--n",
            "8",
            "--p",
            "2",
            "--weight",
            "power:1",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out, "PASS rel_err<1e-10\n");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_str(&["variation", "--bogus"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["regime"]).0, EXIT_USAGE);
        assert_eq!(
            run_str(&["eval", "--weight", "power:1", "--t", "1.5"]).0,
            EXIT_FAILURE
        );
        assert_eq!(
            run_str(&["grid", "--weight", "power:1", "--n", "40"]).0,
            EXIT_CAPACITY
        );
        assert_eq!(
            run_str(&["regime", "--weight", "logplus:1"]).0,
            EXIT_FAILURE
        );
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn config_is_overridden_by_flags() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.json");
        std::fs::write(&cfg, r#"{"weight": "power:1", "n_max": 3, "p": 1}"#).unwrap();
        let cfg = cfg.to_str().unwrap();
        let (code, out, err) = run_str(&["variation", "--config", cfg, "--p", "2"]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(out.lines().count(), 4);
        assert!(out.lines().nth(1).unwrap().starts_with("1,0.5,"));
    }
}
