//! `propint` command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage or domain errors, 3 when a data
//! file cannot be read or contains something other than `0`/`1` tokens.

pub mod ingest;
pub mod output;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::error::Error;
use crate::intervals::{
    bound_functions, effective_sample_size, PopulationSize, SampleSummary, Target,
};
use crate::planning::{
    conservative_sample_size_exact, conservative_sample_size_piecewise, isoquant_sample_size,
    practical_sample_size, required_sample_size, IsoquantQuery, PlanQuery,
};
use crate::quantiles::TailArea;
use crate::simulation::{
    exact_coverage_finite, exact_coverage_superpop, mc_coverage, CoverageReport, SimulationConfig,
    MAX_EXACT_POPULATION, MAX_EXACT_SAMPLE,
};
use output::Record;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

/// Upper limit on isoquant rows.
const MAX_ISOQUANT_ROWS: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("write failed: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Io(_) => EXIT_USAGE,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Superpop,
    Population,
    Unsampled,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Superpop => Target::Superpopulation,
            TargetArg::Population => Target::Population,
            TargetArg::Unsampled => Target::Unsampled,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Conservative {
    Exact,
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Mc,
}

#[derive(Debug, Parser)]
#[command(
    name = "propint",
    version,
    about = "Wilson score intervals for finite and infinite populations"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Confidence interval from counts or a data file.
    Ci(CiArgs),
    /// Sample size needed for a target interval width.
    Plan(PlanArgs),
    /// Sample size against unsampled group size at fixed effective sample size.
    Isoquant(IsoquantArgs),
    /// Exact or Monte Carlo coverage probability.
    Coverage(CoverageArgs),
}

fn parse_population(s: &str) -> Result<PopulationSize, String> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") {
        return Ok(PopulationSize::Infinite);
    }
    let size: u64 = t
        .parse()
        .map_err(|_| format!("expected a positive integer or 'inf', got '{s}'"))?;
    PopulationSize::finite(size as f64).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct CiArgs {
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Sample size.
    #[arg(long, requires = "successes", conflicts_with = "data")]
    pub n: Option<u64>,
    /// Number of successes in the sample.
    #[arg(long, requires = "n", conflicts_with = "data")]
    pub successes: Option<u64>,
    /// File of newline-delimited 0/1 values.
    #[arg(long, required_unless_present = "n")]
    pub data: Option<PathBuf>,
    /// Population size, or `inf`.
    #[arg(long, value_parser = parse_population, default_value = "inf")]
    pub population_size: PopulationSize,
    #[arg(long, value_enum, default_value = "superpop")]
    pub target: TargetArg,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Target interval width, strictly between 0 and 1.
    #[arg(long)]
    pub width: f64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Anticipated sample proportion. Omit for a conservative answer.
    #[arg(long, conflicts_with = "conservative")]
    pub assumed_prop: Option<f64>,
    /// Which conservative size to report as the requirement.
    #[arg(long, value_enum)]
    pub conservative: Option<Conservative>,
    /// Also report the requirement rounded up to whole units.
    #[arg(long)]
    pub ceil: bool,
}

#[derive(Debug, Args)]
pub struct IsoquantArgs {
    /// Effective sample size held fixed along the isoquant.
    #[arg(long)]
    pub effective_n: f64,
    /// Unsampled group sizes as `lo:hi:step`.
    #[arg(long)]
    pub m_range: String,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    /// Bernoulli parameter generating the population.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_parser = parse_population, default_value = "inf")]
    pub population_size: PopulationSize,
    /// Successes in the finite population (exact mode).
    #[arg(long)]
    pub successes_in_population: Option<u64>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "superpop")]
    pub target: TargetArg,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(long, default_value_t = 100_000)]
    pub reps: u64,
    /// Monte Carlo seed; falls back to PROPINT_SEED when the flag is absent.
    #[arg(long, env = "PROPINT_SEED", default_value_t = 42)]
    pub seed: u64,
}

/// Parses `args` (including the program name) and runs the command against
/// the process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "propint: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Ci(args) => {
            let (record, source) = cmd_ci(args)?;
            emit(out, cli.format, &record, |out| {
                write_ci_text(out, &record, source.as_deref())
            })
        }
        Command::Plan(args) => {
            let record = cmd_plan(args)?;
            emit(out, cli.format, &record, |out| {
                output::write_text_record(out, &record)
            })
        }
        Command::Isoquant(args) => {
            let rows = cmd_isoquant(args)?;
            match cli.format {
                Format::Json => output::write_json_table(out, &rows)?,
                Format::Csv => output::write_csv(out, &rows)?,
                Format::Text => output::write_text_table(out, &rows)?,
            }
            Ok(())
        }
        Command::Coverage(args) => {
            let record = cmd_coverage(args)?;
            emit(out, cli.format, &record, |out| {
                output::write_text_record(out, &record)
            })
        }
    }
}

fn emit(
    out: &mut dyn Write,
    format: Format,
    record: &Record,
    text: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    match format {
        Format::Json => output::write_json_record(out, record)?,
        Format::Csv => output::write_csv(out, std::slice::from_ref(record))?,
        Format::Text => text(out)?,
    }
    Ok(())
}

fn population_field(p: PopulationSize) -> output::Field {
    match p {
        PopulationSize::Finite(size) => output::Field::Int(size as u64),
        PopulationSize::Infinite => output::Field::Str("inf".into()),
    }
}

/// Returns the record and, for file input, the data source name.
pub fn cmd_ci(args: &CiArgs) -> Result<(Record, Option<String>), CliError> {
    let alpha = TailArea::new(args.alpha)?;
    let (sample, source) = match (&args.data, args.n, args.successes) {
        (Some(path), _, _) => (
            ingest::ingest_file(path)?,
            Some(
                path.file_name()
                    .map(|f| f.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string()),
            ),
        ),
        (None, Some(n), Some(k)) => (SampleSummary::from_counts(n, k)?, None),
        _ => {
            return Err(CliError::Usage(
                "give --n and --successes, or --data".into(),
            ))
        }
    };
    let target = Target::from(args.target);
    let n_eff = effective_sample_size(target, sample.n(), args.population_size)?;
    let bounds = bound_functions(alpha, n_eff, sample.x_bar())?;
    let record = Record::new()
        .with("target", target.as_str())
        .with("alpha", args.alpha)
        .with("n", sample.n() as u64)
        .with("population_size", population_field(args.population_size))
        .with("successes", sample.successes())
        .with("x_bar", sample.x_bar())
        .with("lower", bounds.lower)
        .with("upper", bounds.upper)
        .with("width", bounds.width)
        .with("effective_n", n_eff.value());
    Ok((record, source))
}

fn describe_target(record: &Record) -> String {
    let population = match record.get("population_size") {
        Some(output::Field::Int(size)) => Some(*size),
        _ => None,
    };
    let n = match record.get("n") {
        Some(output::Field::Int(n)) => *n,
        _ => 0,
    };
    let target = match record.get("target") {
        Some(output::Field::Str(t)) => t.as_str(),
        _ => "superpop",
    };
    match (target, population) {
        ("population", Some(size)) => format!("proportion for population of size {size}"),
        ("population", None) => "proportion for infinite population".into(),
        ("unsampled", Some(size)) => {
            format!("proportion for unsampled population of size {}", size - n)
        }
        ("unsampled", None) => "proportion for unsampled part of infinite population".into(),
        _ => "superpopulation proportion parameter".into(),
    }
}

fn num(record: &Record, key: &str) -> f64 {
    match record.get(key) {
        Some(output::Field::Num(x)) => *x,
        Some(output::Field::Int(i)) => *i as f64,
        _ => f64::NAN,
    }
}

fn write_ci_text(out: &mut dyn Write, record: &Record, source: Option<&str>) -> io::Result<()> {
    let alpha = num(record, "alpha");
    let n = num(record, "n");
    let from = source
        .map(|s| format!(" from data {s}"))
        .unwrap_or_default();
    writeln!(out, "    Confidence Interval (CI)")?;
    writeln!(out)?;
    writeln!(
        out,
        "{:.2}% CI for {}",
        100.0 * (1.0 - alpha),
        describe_target(record)
    )?;
    writeln!(
        out,
        "Interval uses {n} binary data points{from} with sample"
    )?;
    writeln!(out, "proportion = {:.4}", num(record, "x_bar"))?;
    writeln!(out)?;
    writeln!(
        out,
        "[{}, {}]",
        output::round_sig6(num(record, "lower")),
        output::round_sig6(num(record, "upper"))
    )
}

pub fn cmd_plan(args: &PlanArgs) -> Result<Record, CliError> {
    let query = PlanQuery::new(args.width, args.alpha, args.assumed_prop)?;
    let alpha = query.alpha();
    let mut record = Record::new()
        .with("width", args.width)
        .with("alpha", args.alpha)
        .with("assumed_prop", args.assumed_prop);
    let required = match args.assumed_prop {
        Some(_) => {
            let n = required_sample_size(&query)?;
            record = record.with("method", "assumed_prop").with("n_required", n);
            n
        }
        None => {
            let exact = conservative_sample_size_exact(args.width, alpha)?;
            let piecewise = conservative_sample_size_piecewise(args.width, alpha)?;
            let (label, chosen) = match args.conservative.unwrap_or(Conservative::Exact) {
                Conservative::Exact => ("exact", exact),
                Conservative::Paper => ("paper_theorem14", piecewise),
            };
            record = record
                .with("method", label)
                .with("n_required", chosen)
                .with("exact", exact)
                .with("paper_theorem14", piecewise);
            chosen
        }
    };
    if args.ceil {
        record = record.with("n_ceil", practical_sample_size(required)?);
    }
    Ok(record)
}

/// Parses `lo:hi:step` into the list of unsampled group sizes.
pub fn parse_m_range(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || {
        CliError::Usage(format!(
            "invalid --m-range '{spec}': expected lo:hi:step with 1 <= lo <= hi and step > 0"
        ))
    };
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [lo, hi, step] = parts[..] else {
        return Err(bad());
    };
    if !(lo.is_finite()
        && hi.is_finite()
        && step.is_finite()
        && lo >= 1.0
        && hi >= lo
        && step > 0.0)
    {
        return Err(bad());
    }
    let count = ((hi - lo) / step + 1e-9).floor() as u64 + 1;
    if count > MAX_ISOQUANT_ROWS {
        return Err(CliError::Usage(format!(
            "--m-range '{spec}' has {count} rows, more than {MAX_ISOQUANT_ROWS}"
        )));
    }
    Ok((0..count).map(|i| lo + i as f64 * step).collect())
}

pub fn cmd_isoquant(args: &IsoquantArgs) -> Result<Vec<Record>, CliError> {
    parse_m_range(&args.m_range)?
        .into_iter()
        .map(|m| {
            let q = IsoquantQuery::new(m, args.effective_n)?;
            Ok(Record::new()
                .with("m", m)
                .with("n", isoquant_sample_size(&q))
                .with("effective_n", args.effective_n))
        })
        .collect()
}

fn coverage_record(report: &CoverageReport) -> Record {
    Record::new()
        .with("mode", report.mode.as_str())
        .with("target", report.truth_tracked.as_str())
        .with("coverage", report.coverage)
        .with("reps_or_outcomes", report.reps_or_outcomes)
        .with("covered", report.covered)
        .with("standard_error", report.standard_error)
}

pub fn cmd_coverage(args: &CoverageArgs) -> Result<Record, CliError> {
    let alpha = TailArea::new(args.alpha)?;
    let target = Target::from(args.target);
    let need_theta = || {
        args.theta
            .ok_or_else(|| CliError::Usage("--theta is required for this coverage run".into()))
    };
    let header = Record::new()
        .with("alpha", args.alpha)
        .with("n", args.n)
        .with("population_size", population_field(args.population_size))
        .with("theta", args.theta);
    match args.mode {
        Mode::Exact => {
            if let PopulationSize::Finite(size) = args.population_size {
                if size > MAX_EXACT_POPULATION as f64 {
                    return Err(CliError::Usage(format!(
                        "exact enumeration supports N <= {MAX_EXACT_POPULATION}; use --mode mc"
                    )));
                }
            }
            let report = match (target, args.population_size) {
                (Target::Superpopulation, _) | (_, PopulationSize::Infinite) => {
                    if args.n > MAX_EXACT_SAMPLE {
                        return Err(CliError::Usage(format!(
                            "exact enumeration supports n <= {MAX_EXACT_SAMPLE}; use --mode mc"
                        )));
                    }
                    if let PopulationSize::Finite(size) = args.population_size {
                        if args.n as f64 > size {
                            return Err(Error::SampleExceedsPopulation {
                                n: args.n as f64,
                                population: size,
                            }
                            .into());
                        }
                    }
                    exact_coverage_superpop(alpha, args.n, need_theta()?)?
                }
                (_, PopulationSize::Finite(size)) => {
                    let size = size as u64;
                    let successes = match args.successes_in_population {
                        Some(k) => k,
                        None => {
                            let theta = need_theta()?;
                            if !(0.0..=1.0).contains(&theta) {
                                return Err(
                                    Error::out_of_range("theta", theta, "0 <= theta <= 1").into()
                                );
                            }
                            (theta * size as f64).round() as u64
                        }
                    };
                    let report = exact_coverage_finite(alpha, args.n, size, successes, target)?;
                    return Ok(fold(
                        header.with("successes_in_population", successes),
                        &report,
                    ));
                }
            };
            Ok(fold(header, &report))
        }
        Mode::Mc => {
            if args.successes_in_population.is_some() {
                return Err(CliError::Usage(
                    "--successes-in-population applies to exact mode only".into(),
                ));
            }
            let config = SimulationConfig {
                theta: need_theta()?,
                n: args.n,
                population: args.population_size,
                alpha,
                target,
                reps: args.reps,
                seed: args.seed,
            };
            let report = mc_coverage(&config)?;
            Ok(fold(header.with("seed", args.seed), &report))
        }
    }
}

fn fold(header: Record, report: &CoverageReport) -> Record {
    let mut record = header;
    for (k, v) in coverage_record(report).fields() {
        record = record.with(k, v.clone());
    }
    record
}
