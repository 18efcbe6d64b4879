//! Command-line front end: kernel scans, cardinal construction, convergence
//! probes, family sweeps and the Fourier Gibbs constant.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use gibbs_core::cardinal::{
    as_kernel, cardinal_from_generator, coefficients_csv, family_sweep, sweep_csv,
    CardinalConfig, Generator,
};
use gibbs_core::format::{csv, g17};
use gibbs_core::gibbs::{detect_overshoot, fourier_gibbs_constant, scan_gibbs_grid, ScanConfig};
use gibbs_core::kernel::{
    make_bspline, make_gaussian, make_inverse_multiquadric, make_poisson, make_sinc, Kernel,
    TruncationPolicy,
};
use gibbs_core::sampling::{
    continuity_convergence_check, continuity_csv, convergence_probe, default_xi_grid, probe_csv,
    SampledSignal,
};
use gibbs_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const KERNEL_IDS: &str = "sinc, bspline:n, invmq:c, poisson, gaussian:a, \
gaussian-cardinal:a, bspline-cardinal:n, invmq-cardinal:c";

#[derive(Debug, Parser)]
#[command(name = "gibbs", version, about = "Gibbs phenomena of generalized sampling series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect and classify overshoot of a kernel.
    Scan(ScanArgs),
    /// Build a cardinal function from a generator.
    Cardinal(CardinalArgs),
    /// Convergence probes of sampling series.
    Converge(ConvergeArgs),
    /// Sweep a generator family.
    Sweep(SweepArgs),
    /// Print 2∫_0^ξ sinc.
    GibbsConstant(GibbsConstantArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Coefficient period (power of two).
    #[arg(long = "P", default_value_t = 4096)]
    pub period: usize,
    /// Truncation radius of cardinal series.
    #[arg(long = "R", default_value_t = 512)]
    pub radius: usize,
    #[arg(long, default_value_t = 8.0)]
    pub scan_radius: f64,
    /// Grid spacing; accepts decimals or fractions like 1/64.
    #[arg(long, default_value = "1/64", value_parser = parse_number)]
    pub grid_step: f64,
    /// Target absolute error of each lattice sum.
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    /// Write here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub kernel: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CardinalArgs {
    /// bspline:n, invmq:c, poisson or gaussian:a.
    #[arg(long)]
    pub generator: String,
    /// Also write the diagnostics JSON here.
    #[arg(long)]
    pub diagnostics: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Probe,
    Continuity,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub kernel: String,
    /// sign, ramp-step, cosine, step:l,r or constant:c.
    #[arg(long, default_value = "sign")]
    pub signal: String,
    #[arg(long, value_enum, default_value_t = Mode::Probe)]
    pub mode: Mode,
    #[arg(long = "N", value_delimiter = ',', default_values_t = [4usize, 16, 64, 256])]
    pub n_list: Vec<usize>,
    #[arg(long = "W", value_delimiter = ',', default_values_t = [2.0, 8.0, 32.0, 128.0])]
    pub w_list: Vec<f64>,
    /// Evaluation point for continuity mode.
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub t: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// bspline:n1..n2, bspline:a,b,... or invmq:c1,c2,...
    #[arg(long)]
    pub family: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct GibbsConstantArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub xi: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidOrder { .. } | Error::InvalidPolicy(_) | Error::InvalidConfig(_) => {
                EXIT_USAGE
            }
            Error::PartitionOfUnity { .. }
            | Error::NotEven(_)
            | Error::Domain(_)
            | Error::DegenerateJump(_)
            | Error::Unsupported { .. } => EXIT_PRECONDITION,
            Error::NonFinite(_)
            | Error::TruncationBudget { .. }
            | Error::SymbolNotInvertible { .. }
            | Error::Accuracy { .. } => EXIT_NUMERICAL,
        };
        Self {
            code,
            message: format!("{}: {e}", e.kind()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
            let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
            a / b
        }
        None => s.trim().parse().map_err(|e| format!("{e}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not a finite number"))
    }
}

fn split_id(id: &str) -> (&str, Option<&str>) {
    match id.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (id, None),
    }
}

fn param<T: std::str::FromStr>(id: &str, p: Option<&str>) -> CliResult<T> {
    p.and_then(|s| s.parse().ok())
        .ok_or_else(|| CliError::usage(format!("`{id}` needs a numeric parameter")))
}

fn unknown(id: &str) -> CliError {
    CliError::usage(format!("unknown identifier `{id}`; known: {KERNEL_IDS}"))
}

/// Resolve a generator identifier.
pub fn resolve_generator(id: &str) -> CliResult<Generator> {
    let (name, p) = split_id(id);
    Ok(match name {
        "bspline" => Generator::bspline(param(id, p)?)?,
        "invmq" => Generator::inverse_multiquadric(param(id, p)?)?,
        "gaussian" => Generator::gaussian(param(id, p)?)?,
        "poisson" if p.is_none() => Generator::poisson(),
        _ => return Err(unknown(id)),
    })
}

/// Resolve a kernel identifier; cardinal kernels are built with `card`.
pub fn resolve_kernel(id: &str, card: &CardinalConfig) -> CliResult<Kernel> {
    let (name, p) = split_id(id);
    let cardinal = |g: Generator| -> CliResult<Kernel> {
        Ok(as_kernel(&cardinal_from_generator(&g, card)?)?)
    };
    Ok(match name {
        "sinc" if p.is_none() => make_sinc(),
        "poisson" if p.is_none() => make_poisson(),
        "bspline" => make_bspline(param(id, p)?)?,
        "invmq" => make_inverse_multiquadric(param(id, p)?)?,
        "gaussian" => make_gaussian(param(id, p)?)?,
        "bspline-cardinal" => cardinal(Generator::bspline(param(id, p)?)?)?,
        "invmq-cardinal" => cardinal(Generator::inverse_multiquadric(param(id, p)?)?)?,
        "gaussian-cardinal" => cardinal(Generator::gaussian(param(id, p)?)?)?,
        _ => return Err(unknown(id)),
    })
}

pub fn resolve_signal(id: &str) -> CliResult<SampledSignal> {
    let (name, p) = split_id(id);
    Ok(match (name, p) {
        ("sign", None) => SampledSignal::sign(),
        ("ramp-step", None) => SampledSignal::ramp_step(),
        ("cosine", None) => SampledSignal::cosine(),
        ("zero", None) => SampledSignal::constant(0.0),
        ("constant", Some(_)) => SampledSignal::constant(param(id, p)?),
        ("step", Some(s)) => {
            let (l, r) = s.split_once(',').ok_or_else(|| CliError::usage("step needs l,r"))?;
            SampledSignal::step(param(id, Some(l))?, param(id, Some(r))?)
        }
        _ => {
            return Err(CliError::usage(format!(
                "unknown signal `{id}`; known: sign, ramp-step, cosine, zero, constant:c, step:l,r"
            )))
        }
    })
}

/// Expand `bspline:3..10`, `bspline:2,4` or `invmq:1,2,4,8`.
pub fn resolve_family(family: &str) -> CliResult<Vec<(f64, Generator)>> {
    let (name, p) = split_id(family);
    let list = p.ok_or_else(|| CliError::usage(format!("family `{family}` needs parameters")))?;
    let values: Vec<f64> = match list.split_once("..") {
        Some((a, b)) => {
            let a: i64 = param(family, Some(a))?;
            let b: i64 = param(family, Some(b))?;
            if a > b {
                return Err(CliError::usage(format!("empty range in `{family}`")));
            }
            (a..=b).map(|n| n as f64).collect()
        }
        None => list
            .split(',')
            .map(|s| param(family, Some(s)))
            .collect::<CliResult<_>>()?,
    };
    values
        .into_iter()
        .map(|v| {
            let g = match name {
                "bspline" if v.fract() == 0.0 => Generator::bspline(v as i64)?,
                "invmq" => Generator::inverse_multiquadric(v)?,
                "gaussian" => Generator::gaussian(v)?,
                _ => return Err(CliError::usage(format!("unknown family `{family}`"))),
            };
            Ok((v, g))
        })
        .collect()
}

impl Common {
    fn policy(&self) -> CliResult<TruncationPolicy> {
        Ok(TruncationPolicy::new(
            self.tolerance,
            TruncationPolicy::DEFAULT_MAX_RADIUS,
        )?)
    }

    fn cardinal(&self) -> CliResult<CardinalConfig> {
        Ok(CardinalConfig {
            period: self.period,
            eval_radius: self.radius,
            policy: self.policy()?,
            ..CardinalConfig::default()
        })
    }

    fn scan(&self) -> CliResult<ScanConfig> {
        let cfg = ScanConfig {
            scan_radius: self.scan_radius,
            grid_step: self.grid_step,
            sum_policy: self.policy()?,
            ..ScanConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn emit(output: &Option<PathBuf>, text: &str, out: &mut dyn Write) -> CliResult<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError {
            code: EXIT_USAGE,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => out.write_all(text.as_bytes()).map_err(|e| CliError {
            code: EXIT_USAGE,
            message: format!("cannot write output: {e}"),
        }),
    }
}

fn cmd_scan(a: &ScanArgs, out: &mut dyn Write) -> CliResult<()> {
    let c = &a.common;
    let kernel = resolve_kernel(&a.kernel, &c.cardinal()?)?;
    let cfg = c.scan()?;
    let text = match c.format.unwrap_or(Format::Json) {
        Format::Json => {
            let report = detect_overshoot(&kernel, &cfg)?;
            json_text(&serde_json::to_value(&report).expect("report serializes"))
        }
        Format::Csv => {
            let grid = scan_gibbs_grid(&kernel, &cfg)?;
            csv(&["t", "G"], grid.iter().map(|(t, g)| vec![g17(*t), g17(*g)]))
        }
    };
    emit(&c.output, &text, out)
}

fn cmd_cardinal(a: &CardinalArgs, out: &mut dyn Write) -> CliResult<()> {
    let c = &a.common;
    let g = resolve_generator(&a.generator)?;
    let l = cardinal_from_generator(&g, &c.cardinal()?)?;
    let diag = json_text(&serde_json::to_value(l.diagnostics()).expect("diagnostics serialize"));
    if let Some(path) = &a.diagnostics {
        emit(&Some(path.clone()), &diag, out)?;
    }
    let text = match c.format.unwrap_or(Format::Csv) {
        Format::Csv => coefficients_csv(&l),
        Format::Json => diag,
    };
    emit(&c.output, &text, out)
}

fn cmd_converge(a: &ConvergeArgs, out: &mut dyn Write) -> CliResult<()> {
    let c = &a.common;
    let kernel = resolve_kernel(&a.kernel, &c.cardinal()?)?;
    let f = resolve_signal(&a.signal)?;
    let policy = c.policy()?;
    let format = c.format.unwrap_or(Format::Csv);
    let text = match a.mode {
        Mode::Probe => {
            if a.n_list.contains(&0) {
                return Err(CliError::usage("N values must be positive"));
            }
            let rows = convergence_probe(&kernel, &f, &a.n_list, &default_xi_grid(), &policy)?;
            match format {
                Format::Csv => probe_csv(&rows),
                Format::Json => json_text(&json!(rows
                    .iter()
                    .map(|(n, e)| json!({"N": n, "sup_error": e}))
                    .collect::<Vec<_>>())),
            }
        }
        Mode::Continuity => {
            let rows = continuity_convergence_check(&kernel, &f, a.t, &a.w_list, &policy)?;
            match format {
                Format::Csv => continuity_csv(&rows),
                Format::Json => json_text(&json!(rows
                    .iter()
                    .map(|(w, e)| json!({"W": w, "abs_error": e}))
                    .collect::<Vec<_>>())),
            }
        }
    };
    emit(&c.output, &text, out)
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> CliResult<()> {
    let c = &a.common;
    let family = resolve_family(&a.family)?;
    let rows = family_sweep(&family, &c.cardinal()?, &c.scan()?);
    let text = match c.format.unwrap_or(Format::Csv) {
        Format::Csv => sweep_csv(&rows),
        Format::Json => json_text(&json!(rows
            .iter()
            .map(|r| json!({
                "parameter": r.parameter,
                "L_half": r.l_half,
                "gap_to_sinc": r.gap_to_sinc,
                "classification": r.classification,
                "max_gibbs_value": r.max_gibbs_value,
            }))
            .collect::<Vec<_>>())),
    };
    emit(&c.output, &text, out)
}

fn cmd_gibbs_constant(a: &GibbsConstantArgs, out: &mut dyn Write) -> CliResult<()> {
    if !a.xi.is_finite() {
        return Err(CliError::usage("xi must be finite"));
    }
    let v = fourier_gibbs_constant(a.xi);
    let text = match a.format {
        Some(Format::Json) => json_text(&json!({"xi": a.xi, "value": v})),
        _ => format!("{}\n", g17(v)),
    };
    emit(&a.output, &text, out)
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Scan(a) => cmd_scan(a, out),
        Command::Cardinal(a) => cmd_cardinal(a, out),
        Command::Converge(a) => cmd_converge(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::GibbsConstant(a) => cmd_gibbs_constant(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("gibbs").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn fractions_parse() {
        assert_eq!(parse_number("1/64").unwrap(), 1.0 / 64.0);
        assert_eq!(parse_number("0.25").unwrap(), 0.25);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("x").is_err());
    }

    #[test]
    fn registry() {
        let card = CardinalConfig::default();
        for id in ["sinc", "bspline:3", "invmq:2", "poisson", "gaussian:1", "bspline-cardinal:4"] {
            assert!(resolve_kernel(id, &card).is_ok(), "{id}");
        }
        assert_eq!(resolve_kernel("nope", &card).unwrap_err().code, EXIT_USAGE);
        assert_eq!(resolve_kernel("bspline:x", &card).unwrap_err().code, EXIT_USAGE);
        assert_eq!(resolve_kernel("bspline:0", &card).unwrap_err().code, EXIT_USAGE);
        assert_eq!(
            resolve_kernel("invmq-cardinal:8", &card).unwrap_err().code,
            EXIT_NUMERICAL
        );
    }

    #[test]
    fn families() {
        let f = resolve_family("bspline:3..10").unwrap();
        assert_eq!(f.len(), 8);
        assert_eq!(f[0].0, 3.0);
        let f = resolve_family("invmq:1,2,4,8").unwrap();
        assert_eq!(f.iter().map(|p| p.0).collect::<Vec<_>>(), [1.0, 2.0, 4.0, 8.0]);
        assert!(resolve_family("bspline:5..3").is_err());
        assert!(resolve_family("sinc:1").is_err());
    }

    #[test]
    fn constant_command() {
        let (code, out, _) = run_str(&["gibbs-constant", "--xi", "0"]);
        assert_eq!(code, 0);
        assert_eq!(out, "0\n");
        let (code, out, _) = run_str(&["gibbs-constant"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("1.17897974447216"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_str(&["scan"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["frobnicate"]).0, EXIT_USAGE);
        let (code, _, err) = run_str(&["scan", "--kernel", "mystery"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("bspline:n"));
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn precondition_exit() {
        let (code, _, err) = run_str(&["scan", "--kernel", "gaussian:1"]);
        assert_eq!(code, EXIT_PRECONDITION);
        assert!(err.contains("partition-of-unity"));
    }
}
