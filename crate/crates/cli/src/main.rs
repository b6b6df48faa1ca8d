//! `sigdiag`: check signal-based properties against CSV traces and
//! diagnose their violations.

mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sigdiag_core::causes::ViolationCauseId;
use sigdiag_core::engine::{self, load_pair, RunConfig};
use sigdiag_core::trace::{serialize_csv, InterpolationKind, InterpolationPolicy};
use sigdiag_testkit::{cause_case, generate_trace, GeneratorSpec, Shape};

use report::{BatchDocument, PairDoc, PairStatus, ReportDocument, Summary, TOOL, VERSION};

#[derive(Parser)]
#[command(name = "sigdiag", version, about = "Trace checking and violation diagnosis for signal properties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verdict only. Exit 0 satisfied, 1 violated, 4 timeout, 2 error.
    Check(PairArgs),
    /// Verdict and diagnoses. Exit 0 satisfied or diagnosed, 3 violated
    /// without a cause, 4 timeout, 2 error.
    Diagnose(PairArgs),
    /// Diagnose every `trace<TAB>property` line of a manifest.
    Batch(BatchArgs),
    /// Write a synthetic trace as CSV.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Wall-clock budget per trace/property pair.
    #[arg(long, value_name = "SECONDS", default_value_t = 60.0)]
    timeout: f64,
    /// Gap filling: `KIND` sets the default, `VAR=KIND` overrides one
    /// variable. Kinds: linear, previous-value, nearest.
    #[arg(long, value_name = "KIND")]
    interpolation: Vec<String>,
    /// Tolerance for `=` comparisons.
    #[arg(long, env = "SIGDIAG_EPSILON", default_value_t = 0.0)]
    epsilon: f64,
    /// Output file, `-` for standard output.
    #[arg(long, short, value_name = "PATH", default_value = "-")]
    output: String,
    /// Write `null` for durations so documents are byte-stable.
    #[arg(long)]
    omit_timing: bool,
}

#[derive(Args)]
struct PairArgs {
    trace: PathBuf,
    property: PathBuf,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct BatchArgs {
    manifest: PathBuf,
    /// Worker threads, 0 for one per core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeName {
    Constant,
    Increasing,
    Decreasing,
    SingleExtremum,
    TwoExtrema,
    Spiky,
    Oscillating,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("kind").required(true).args(["shape", "cause"]))]
struct GenerateArgs {
    #[arg(long, value_enum)]
    shape: Option<ShapeName>,
    /// A trace on which the engine selects this cause; writes the matching
    /// property with `--property-out`.
    #[arg(long, value_name = "CAUSE_ID")]
    cause: Option<String>,
    /// Record count for `--shape`.
    #[arg(long, default_value_t = 20)]
    records: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Spikes or cycles, for spiky and oscillating.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Amplitude (spiky) or peak-to-peak (oscillating) range, `LO:HI`.
    #[arg(long, value_name = "LO:HI", default_value = "1:10")]
    amp: String,
    /// Width (spiky) or period (oscillating) range, `LO:HI`.
    #[arg(long, value_name = "LO:HI", default_value = "0.5:1")]
    span: String,
    #[arg(long, short, value_name = "PATH", default_value = "-")]
    output: String,
    #[arg(long, value_name = "PATH", requires = "cause")]
    property_out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(a) => pair(&a, false),
        Command::Diagnose(a) => pair(&a, true),
        Command::Batch(a) => batch(&a),
        Command::Generate(a) => generate(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn config(a: &RunArgs) -> Result<RunConfig> {
    if !(a.timeout.is_finite() && a.timeout >= 0.0) {
        bail!("--timeout must be a non-negative number of seconds");
    }
    if !(a.epsilon.is_finite() && a.epsilon >= 0.0) {
        bail!("--epsilon must be a non-negative number");
    }
    let mut policy = InterpolationPolicy::default();
    for spec in &a.interpolation {
        policy = match spec.split_once('=') {
            Some((var, kind)) => policy.with_override(var, parse_kind(kind)?),
            None => InterpolationPolicy { kind: parse_kind(spec)?, ..policy },
        };
    }
    Ok(RunConfig { timeout: Duration::from_secs_f64(a.timeout), interpolation: policy, epsilon: a.epsilon })
}

fn parse_kind(s: &str) -> Result<InterpolationKind> {
    s.parse().map_err(anyhow::Error::msg)
}

fn emit(output: &str, text: &str) -> Result<()> {
    if output == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())?;
        out.flush()?;
    } else {
        fs::write(output, text).with_context(|| format!("writing {output}"))?;
    }
    Ok(())
}

fn emit_json(output: &str, doc: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    emit(output, &text)
}

fn pair(a: &PairArgs, search: bool) -> Result<u8> {
    let cfg = config(&a.run)?;
    let (trace, property) = load_pair(&a.trace, &a.property, &cfg)?;
    let r = if search { engine::diagnose(&trace, &property, &cfg) } else { engine::check(&trace, &property, &cfg) };
    let command = if search { "diagnose" } else { "check" };
    let doc = ReportDocument::new(
        command,
        &a.trace.display().to_string(),
        &a.property.display().to_string(),
        &r,
        !a.run.omit_timing,
    );
    emit_json(&a.run.output, &doc)?;
    let code = if search {
        PairStatus::of(&r).exit_code()
    } else if r.timeout {
        4
    } else if r.verdict == Some(true) {
        0
    } else {
        1
    };
    Ok(code as u8)
}

struct Entry {
    line: usize,
    trace: String,
    property: String,
}

fn read_manifest(path: &Path) -> Result<Vec<Entry>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split('\t').collect::<Vec<_>>()[..] {
            [t, p] if !t.is_empty() && !p.is_empty() => {
                entries.push(Entry { line: i + 1, trace: t.to_string(), property: p.to_string() })
            }
            _ => bail!("{}:{}: expected `trace<TAB>property`", path.display(), i + 1),
        }
    }
    Ok(entries)
}

fn batch(a: &BatchArgs) -> Result<u8> {
    let cfg = config(&a.run)?;
    let entries = read_manifest(&a.manifest)?;
    let base = a.manifest.parent().unwrap_or(Path::new(""));
    let pairs: Vec<(PathBuf, PathBuf)> =
        entries.iter().map(|e| (base.join(&e.trace), base.join(&e.property))).collect();
    let results = engine::run_batch(&pairs, &cfg, a.jobs);
    let docs: Vec<PairDoc> = entries
        .iter()
        .zip(results)
        .map(|(e, r)| {
            let (status, error, report) = match r {
                Ok(r) => {
                    let doc = ReportDocument::new("diagnose", &e.trace, &e.property, &r, !a.run.omit_timing);
                    (PairStatus::of(&r), None, Some(doc))
                }
                Err(err) => (PairStatus::Error, Some(err.to_string()), None),
            };
            PairDoc {
                line: e.line,
                trace: e.trace.clone(),
                property: e.property.clone(),
                status,
                exit_code: status.exit_code(),
                error,
                report,
            }
        })
        .collect();
    let summary = Summary::of(&docs);
    let doc = BatchDocument {
        tool: TOOL,
        version: VERSION,
        manifest: a.manifest.display().to_string(),
        pairs: docs,
        summary,
    };
    emit_json(&a.run.output, &doc)?;
    Ok(0)
}

fn range(flag: &str, s: &str) -> Result<(f64, f64)> {
    let num = |x: &str| x.trim().parse::<f64>().with_context(|| format!("--{flag}: `{x}` is not a number"));
    match s.split_once(':') {
        Some((lo, hi)) => Ok((num(lo)?, num(hi)?)),
        None => num(s).map(|x| (x, x)),
    }
}

fn generate(a: &GenerateArgs) -> Result<u8> {
    let (trace, property) = if let Some(id) = &a.cause {
        let cause: ViolationCauseId = id.parse()?;
        if a.records == 0 {
            bail!("--records must be at least 1");
        }
        let case = cause_case(cause, a.seed)?;
        (case.trace, Some(case.property))
    } else {
        let shape = match a.shape.expect("clap requires --shape or --cause") {
            ShapeName::Constant => Shape::Constant,
            ShapeName::Increasing => Shape::Increasing,
            ShapeName::Decreasing => Shape::Decreasing,
            ShapeName::SingleExtremum => Shape::SingleExtremum,
            ShapeName::TwoExtrema => Shape::TwoExtrema,
            ShapeName::Spiky => Shape::Spiky {
                n_spikes: a.count,
                amp_range: range("amp", &a.amp)?,
                width_range: range("span", &a.span)?,
            },
            ShapeName::Oscillating => Shape::Oscillating {
                n_cycles: a.count,
                p2p_range: range("amp", &a.amp)?,
                period_range: range("span", &a.span)?,
            },
        };
        (generate_trace(&GeneratorSpec::new(shape, a.records, a.seed))?, None)
    };
    emit(&a.output, &serialize_csv(&trace))?;
    if let (Some(path), Some(p)) = (&a.property_out, property) {
        fs::write(path, format!("{p}\n")).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}
