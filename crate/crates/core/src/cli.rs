//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::exact::Sig17;
use crate::families::{AlgebraInstance, AlgebraSpec, ParamInput};
use crate::geodesics::GeodesicVector;
use crate::report::{
    classify, geodesics, go_check, isotropy, parse_spec, scan, to_json, write_csv, AnalysisConfig, GridAxis,
    ReportError, ScanSpec, SummaryRow,
};
use crate::verify::{run_verify, Fault, VerifyReport};

/// Overrides `--seed` when set.
pub const SEED_ENV: &str = "LORGEO_SEED";

#[derive(Debug, Parser)]
#[command(name = "lorgeo", version, about = "Homogeneous geodesics and g.o. classification of 3D Lorentzian Lie groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full classification report for one algebra.
    Classify(AlgebraCmd),
    /// Symbolic geodesic families cross-checked by a numeric search.
    Geodesics(AlgebraCmd),
    /// Sampling g.o. check with witnesses or a failure direction.
    GoCheck(AlgebraCmd),
    /// Isotropy algebra and the curvature filtration.
    Isotropy(AlgebraCmd),
    /// Classify every point of a parameter grid.
    Scan(ScanCmd),
    /// Run the property suites.
    Verify(VerifyCmd),
}

#[derive(Debug, Args)]
struct AlgebraCmd {
    #[command(flatten)]
    algebra: AlgebraArgs,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct ScanCmd {
    #[command(flatten)]
    algebra: AlgebraArgs,
    /// Grid axis `name=start:stop:step` (or `name=value`); repeatable.
    #[arg(long = "grid", value_name = "AXIS")]
    grid: Vec<String>,
    /// Parameter recomputed from the g5/g6 constraint at each point.
    #[arg(long, value_name = "PARAM")]
    solve: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct VerifyCmd {
    /// Deliberately corrupt the inputs of the structural checks.
    #[arg(long, value_enum)]
    inject_fault: Option<FaultArg>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FaultArg {
    StructureConstant,
}

#[derive(Debug, Args)]
struct AlgebraArgs {
    /// Family tag g1 … g7.
    #[arg(long, conflicts_with = "input")]
    family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    /// ±1, g4 only.
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<String>,
    /// JSON specification document.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CommonArgs {
    #[arg(long, default_value_t = 1e-9, value_parser = positive)]
    tol: f64,
    /// Sample count (default depends on the command).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("must be a positive number".into()),
        Err(e) => Err(e.to_string()),
    }
}

impl AlgebraArgs {
    fn spec(&self) -> Result<AlgebraSpec, ReportError> {
        if let Some(path) = &self.input {
            let text = fs::read_to_string(path)
                .map_err(|e| ReportError::Input(format!("cannot read {}: {e}", path.display())))?;
            return parse_spec(&text);
        }
        let family = self.family.clone().ok_or_else(|| ReportError::Input("give --family or --input".into()))?;
        let p = |v: &Option<String>| v.clone().map(ParamInput::Text);
        Ok(AlgebraSpec {
            family,
            alpha: p(&self.alpha),
            beta: p(&self.beta),
            gamma: p(&self.gamma),
            delta: p(&self.delta),
            epsilon: p(&self.epsilon),
        })
    }

    fn instance(&self) -> Result<AlgebraInstance, ReportError> {
        Ok(self.spec()?.to_instance()?)
    }
}

impl CommonArgs {
    fn config(&self, default_samples: usize) -> Result<AnalysisConfig, ReportError> {
        let seed = match std::env::var(SEED_ENV) {
            Ok(s) => s.trim().parse().map_err(|_| ReportError::Input(format!("{SEED_ENV}={s:?} is not a seed")))?,
            Err(_) => self.seed,
        };
        let samples = self.samples.map_or(default_samples, |s| s as usize);
        Ok(AnalysisConfig { tol: self.tol, samples, seed })
    }

    fn format(&self, default: Format, allowed: &[Format]) -> Result<Format, ReportError> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(ReportError::Input(format!("format {f:?} is not available for this command").to_lowercase()))
        }
    }

    fn emit(&self, bytes: Vec<u8>) -> Result<(), ReportError> {
        match &self.output {
            Some(path) => fs::write(path, bytes)?,
            None => io::stdout().lock().write_all(&bytes)?,
        }
        Ok(())
    }
}

/// One found direction per CSV row.
#[derive(Serialize)]
struct DirectionRow {
    x1: String,
    x2: String,
    x3: String,
    k: String,
    causal: String,
    isotropy_part: String,
}

impl DirectionRow {
    fn new(g: &GeodesicVector) -> Self {
        let s = |x: f64| Sig17(x).to_string();
        DirectionRow {
            x1: s(g.xm.0[0]),
            x2: s(g.xm.0[1]),
            x3: s(g.xm.0[2]),
            k: s(g.k),
            causal: serde_json::to_value(g.causal).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default(),
            isotropy_part: g.isotropy_part.iter().map(|&t| s(t)).collect::<Vec<_>>().join(";"),
        }
    }
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, ReportError> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(buf)
}

/// `key: value` lines for the top-level fields; nested values as compact JSON.
fn text<T: Serialize>(value: &T) -> Result<Vec<u8>, ReportError> {
    let v = serde_json::to_value(value).map_err(|e| ReportError::Internal(e.to_string()))?;
    let mut out = String::new();
    if let Value::Object(map) = v {
        for (k, v) in map {
            let shown = match v {
                Value::String(s) => s,
                Value::Null => "-".into(),
                other => other.to_string(),
            };
            out.push_str(&format!("{k}: {shown}\n"));
        }
    }
    Ok(out.into_bytes())
}

fn verify_text(r: &VerifyReport) -> Vec<u8> {
    let mut out = format!("seed {} samples {}\n", r.seed, r.samples);
    for s in &r.suites {
        let tag = match (s.informational, s.passed()) {
            (true, _) => "INFO",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        };
        out.push_str(&format!(
            "{tag} {:<26} checks {:>6} failures {:>5} worst {:.3e}{}\n",
            s.name,
            s.checks,
            s.failures,
            s.worst_residual,
            s.note.as_ref().map(|n| format!("  ({n})")).unwrap_or_default()
        ));
    }
    out.push_str(if r.passed { "all suites passed\n" } else { "verification FAILED\n" });
    out.into_bytes()
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, ReportError> {
    Ok(to_json(value)?.into_bytes())
}

/// Runs one command, returning the process exit code.
fn execute(command: Command) -> Result<i32, ReportError> {
    use Format::*;
    match command {
        Command::Classify(a) => {
            let fmt = a.common.format(Json, &[Json, Csv, Text])?;
            let cfg = a.common.config(500)?;
            let r = classify(&a.algebra.instance()?, &cfg)?;
            a.common.emit(match fmt {
                Json => json_bytes(&r)?,
                Csv => csv_bytes(&[SummaryRow::from_report(&r)])?,
                Text => text(&r)?,
            })?;
            for issue in &r.consistency_issues {
                eprintln!("consistency issue: {issue}");
            }
            Ok(if r.consistency_issues.is_empty() { 0 } else { 1 })
        }
        Command::Geodesics(a) => {
            let fmt = a.common.format(Json, &[Json, Csv, Text])?;
            let cfg = a.common.config(10_000)?;
            let (r, found) = geodesics(&a.algebra.instance()?, &cfg)?;
            a.common.emit(match fmt {
                Json => json_bytes(&r)?,
                Csv => csv_bytes(&found.iter().map(DirectionRow::new).collect::<Vec<_>>())?,
                Text => text(&r)?,
            })?;
            Ok(0)
        }
        Command::GoCheck(a) => {
            let fmt = a.common.format(Json, &[Json, Text])?;
            let cfg = a.common.config(500)?;
            let r = go_check(&a.algebra.instance()?, &cfg)?;
            a.common.emit(if fmt == Json { json_bytes(&r)? } else { text(&r)? })?;
            Ok(0)
        }
        Command::Isotropy(a) => {
            let fmt = a.common.format(Json, &[Json, Text])?;
            let r = isotropy(&a.algebra.instance()?);
            a.common.emit(if fmt == Json { json_bytes(&r)? } else { text(&r)? })?;
            Ok(0)
        }
        Command::Scan(s) => {
            let fmt = s.common.format(Csv, &[Csv, Json])?;
            let cfg = s.common.config(200)?;
            let axes = s.grid.iter().map(|g| g.parse::<GridAxis>()).collect::<Result<Vec<_>, _>>()?;
            let spec = ScanSpec::new(s.algebra.spec()?, axes, s.solve.as_deref())?;
            let rows = scan(&spec, &cfg);
            s.common.emit(if fmt == Csv { csv_bytes(&rows)? } else { json_bytes(&rows)? })?;
            Ok(0)
        }
        Command::Verify(v) => {
            let fmt = v.common.format(Text, &[Text, Json])?;
            let cfg = v.common.config(20)?;
            let fault = v.inject_fault.map(|FaultArg::StructureConstant| Fault::StructureConstant);
            let r = run_verify(cfg.samples, cfg.seed, fault);
            v.common.emit(if fmt == Json { json_bytes(&r)? } else { verify_text(&r) })?;
            Ok(if r.passed { 0 } else { 1 })
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
