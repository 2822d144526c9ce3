//! `digitwitness` command-line front end.

mod cache;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use digitwitness::fracpow::max_precision_from_env;
use digitwitness::oracle::stolarsky_check;
use digitwitness::{
    calibrate, liminf_demo, limsup_demo, scan, solver, verify_witness, witness_frac, DemoMode,
    Exponent, LogBase, Natural, RatioTarget, RefinableReal, RunLengthPattern, WitnessReport,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] digitwitness::Error),
    #[error("cache line {line} is malformed: {message}")]
    CacheCorruption { line: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::CacheCorruption { .. } => "cache-corruption",
            CliError::Io { .. } => "io",
        }
    }
}

#[derive(Parser)]
#[command(name = "digitwitness", version, about = "Digit-sum ratio witnesses for powers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a witness u with s_q(f(u)) / s_q(u) equal to a target ratio.
    Witness(WitnessArgs),
    /// Recompute the digit-sum ratio of a given value.
    Verify(VerifyArgs),
    /// Tabulate every ratio s_q(u^2)/s_q(u) for 1 <= u <= max.
    Scan(ScanArgs),
    /// Check the classical lower and upper bounds for s_2(n^h) up to max.
    Bounds(BoundsArgs),
    /// Finite-point certificates for irrational exponents.
    Demo(DemoArgs),
    /// Fit the ladder-pattern digit-sum constants for base q and parameter m.
    Calibrate(CalibrateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum WitnessFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScanFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long = "base", value_name = "Q")]
    base: u32,
    #[arg(long, value_name = "A/C", value_parser = parse_ratio)]
    ratio: RatioTarget,
    #[arg(long, value_name = "H/M", value_parser = parse_exponent, default_value = "2")]
    exponent: Exponent,
    #[arg(long, value_name = "PATH")]
    cache: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: WitnessFormat,
    /// Omit the timestamp so identical inputs give byte-identical output.
    #[arg(long)]
    reproducible: bool,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["value", "pattern"]))]
struct VerifyArgs {
    #[arg(long = "base", value_name = "Q")]
    base: u32,
    #[arg(long, value_name = "DECIMAL", value_parser = parse_natural)]
    value: Option<Natural>,
    #[arg(long, value_name = "TEXT", value_parser = parse_pattern)]
    pattern: Option<RunLengthPattern>,
    #[arg(long, value_name = "H/M", value_parser = parse_exponent, default_value = "2")]
    exponent: Exponent,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long = "base", value_name = "Q")]
    base: u32,
    #[arg(long, value_name = "N")]
    max: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: ScanFormat,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, value_name = "N")]
    max: u64,
    #[arg(long, value_name = "H", default_value_t = 2)]
    power: u32,
    #[arg(long = "log-base", value_parser = parse_log_base, default_value = "2")]
    log_base: LogBase,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long, value_parser = parse_mode)]
    mode: DemoMode,
    #[arg(long = "base", value_name = "Q")]
    base: u32,
    /// sqrt:D, inv-sqrt:D, surd:P,R,D or rat:A/B
    #[arg(long, value_name = "TOKEN", value_parser = parse_real)]
    alpha: RefinableReal,
    #[arg(long, value_name = "T")]
    target: u64,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long = "base", value_name = "Q")]
    base: u32,
    #[arg(long, value_name = "M")]
    m: u64,
}

fn parse_ratio(s: &str) -> Result<RatioTarget, String> {
    s.parse().map_err(|e: digitwitness::Error| e.to_string())
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    s.parse().map_err(|e: digitwitness::Error| e.to_string())
}

fn parse_natural(s: &str) -> Result<Natural, String> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("expected a decimal integer, got {s:?}"));
    }
    s.parse().map_err(|_| format!("expected a decimal integer, got {s:?}"))
}

fn parse_pattern(s: &str) -> Result<RunLengthPattern, String> {
    s.parse().map_err(|e: digitwitness::Error| e.to_string())
}

fn parse_log_base(s: &str) -> Result<LogBase, String> {
    s.parse().map_err(|e: digitwitness::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<DemoMode, String> {
    s.parse().map_err(|e: digitwitness::Error| e.to_string())
}

fn parse_real(s: &str) -> Result<RefinableReal, String> {
    s.parse().map_err(|e: digitwitness::Error| e.to_string())
}

fn build_witness(q: u32, r: RatioTarget, exponent: Exponent) -> Result<WitnessReport, CliError> {
    Ok(match exponent {
        Exponent::Square => solver::witness(q, r)?,
        Exponent::Rational { h, m } => witness_frac(q, h, m, r)?,
    })
}

fn text_report(report: &WitnessReport, rebuilt: bool) -> String {
    let mut out = format!(
        "base      {}\nexponent  {}\nratio     {}\nroute     {}\nwitness   {}\npattern   {}\ns(u)      {}\ns(f(u))   {}\nverified  {}\n",
        report.q,
        report.exponent,
        report.ratio,
        report.trace.route.as_str(),
        report.witness,
        report.pattern(),
        report.s_u,
        report.s_fu,
        report.verified,
    );
    if rebuilt {
        out.push_str("rebuilt   true\n");
    }
    out
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Witness(a) => {
            let (report, rebuilt) = match &a.cache {
                Some(path) => {
                    let hit = cache::lookup_or_build(path, a.base, a.ratio, a.exponent, || {
                        build_witness(a.base, a.ratio, a.exponent)
                    })?;
                    (hit.report, hit.rebuilt)
                }
                None => (build_witness(a.base, a.ratio, a.exponent)?, false),
            };
            match a.format {
                WitnessFormat::Text => Ok(text_report(&report, rebuilt)),
                WitnessFormat::Json => {
                    let mut v = to_value(&report.to_json());
                    let obj = v.as_object_mut().expect("report is an object");
                    if rebuilt {
                        obj.insert("rebuilt".into(), Value::Bool(true));
                    }
                    if !a.reproducible {
                        obj.insert("timestamp".into(), json!(timestamp()));
                    }
                    Ok(pretty(&v))
                }
            }
        }
        Command::Verify(a) => {
            let u = match (a.value, a.pattern) {
                (Some(u), _) => u,
                (None, Some(p)) => {
                    if p.base() != a.base {
                        return Err(digitwitness::Error::Domain(format!(
                            "pattern is in base {} but --base is {}",
                            p.base(),
                            a.base
                        ))
                        .into());
                    }
                    digitwitness::from_pattern(&p)?
                }
                (None, None) => unreachable!("clap requires one input"),
            };
            let report = verify_witness(&u, a.base, a.exponent)?;
            Ok(pretty(&to_value(&report.to_json())))
        }
        Command::Scan(a) => {
            let table = scan(a.base, a.max)?;
            Ok(match a.format {
                ScanFormat::Csv => table.to_csv(),
                ScanFormat::Json => pretty(&table.to_json()),
            })
        }
        Command::Bounds(a) => {
            let report = stolarsky_check(a.max, a.power, a.log_base)?;
            Ok(pretty(&to_value(&report)))
        }
        Command::Demo(a) => {
            let cap = max_precision_from_env()?;
            let point = match a.mode {
                DemoMode::Limsup => limsup_demo(a.base, &a.alpha, a.target, cap)?,
                DemoMode::Liminf => liminf_demo(a.base, &a.alpha, a.target, cap)?,
            };
            let mut v = to_value(&point);
            v.as_object_mut()
                .expect("demo point is an object")
                .insert("bound_holds".into(), Value::Bool(point.bound_holds()));
            Ok(pretty(&v))
        }
        Command::Calibrate(a) => {
            let record = calibrate(a.base, a.m)?;
            Ok(pretty(&to_value(&record)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match run(cli) {
        Ok(out) => {
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            let v = json!({"error": {"kind": e.kind(), "message": e.to_string()}});
            let _ = stdout.write_all(pretty(&v).as_bytes());
            ExitCode::from(1)
        }
    }
}
