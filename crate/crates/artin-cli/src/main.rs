//! `artin` — density predictions for the multiplicative order of a rational
//! number modulo primes, and the sieve harness that checks them.
//!
//! Statistic names used on the command line (and in JSON artifacts):
//! * `omega-quotient` — distinct prime factors of the index `(p−1)/ord_p(a)`,
//! * `big-omega-quotient` — prime factors of the index with multiplicity,
//! * `omega-diff` — distinct prime factors of `p−1` not dividing `ord_p(a)`.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use artin_core::{
    compare, corrected_coefficients, correction_factors, decompose, empirical_densities, epsilon,
    expectation, kummer_degree, parse_rational, rational_string, CoefficientTable, CompareCriteria,
    Cutoffs, DegreeQuery, EmpiricalTally, SieveOptions, StatisticKind,
};

#[derive(Parser)]
#[command(
    name = "artin",
    version,
    about = "Distribution of multiplicative orders modulo primes: predictions and verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predicted densities D_a(n) for n = 0..=max-n, plus the expectation row
    Predict(PredictArgs),
    /// Sieve primes p ≤ x and tally the exact statistic of every order
    Empirical(EmpiricalArgs),
    /// Predict, sieve, and compare the densities row by row
    Compare(CompareArgs),
    /// Entanglement correction ε and degree of ℚ(a^(1/ℓ), ζ_mℓ)
    Degree(DegreeArgs),
    /// Canonical correction factors F, H and their product
    Genfun(GenfunArgs),
    /// Expected statistic value for all three statistics
    Expectation(ExpectationArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the artifact to this file instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BaseArgs {
    /// Rational base, an integer or "num/den" (sign allowed)
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    /// Statistic: omega-quotient, big-omega-quotient, or omega-diff
    #[arg(long = "stat", default_value = "omega-quotient", value_parser = parse_stat)]
    statistic: StatisticKind,
}

#[derive(Args)]
struct PredictArgs {
    #[command(flatten)]
    base: BaseArgs,
    /// Largest coefficient order n
    #[arg(long = "max-n", default_value_t = 5)]
    max_n: usize,
    /// Uniform prime cutoff (default: 10⁶ for the n ≤ 1 sums, 10⁵ beyond)
    #[arg(long, value_parser = parse_count)]
    cutoff: Option<u64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct EmpiricalArgs {
    #[command(flatten)]
    base: BaseArgs,
    /// Sieve bound: tally primes p ≤ x ("1e7" style accepted)
    #[arg(long, value_parser = parse_count)]
    x: u64,
    /// Largest n in the reported density table
    #[arg(long = "max-n", default_value_t = 5)]
    max_n: usize,
    /// Count only prime factors ≤ ξ (omega-quotient only)
    #[arg(long)]
    xi: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, env = "ARTIN_THREADS")]
    threads: Option<usize>,
    /// Numbers per sieve segment
    #[arg(long, value_parser = parse_count)]
    segment_len: Option<u64>,
    /// Resumable run state; written every few segments, removed on completion
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    base: BaseArgs,
    /// Sieve bound for the empirical side ("1e7" style accepted)
    #[arg(long, value_parser = parse_count, required_unless_present = "tally")]
    x: Option<u64>,
    /// Reuse a saved tally JSON instead of sieving
    #[arg(long)]
    tally: Option<PathBuf>,
    /// Largest n compared
    #[arg(long = "max-n", default_value_t = 3)]
    max_n: usize,
    /// Count only prime factors ≤ ξ (omega-quotient only)
    #[arg(long)]
    xi: Option<u64>,
    /// Uniform prime cutoff for the predicted side
    #[arg(long, value_parser = parse_count)]
    cutoff: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, env = "ARTIN_THREADS")]
    threads: Option<usize>,
    /// Pass when |difference| ≤ slack + sigma-multiple·σ + prediction error
    #[arg(long, default_value_t = 4.0)]
    sigma_multiple: f64,
    /// Absolute slack absorbing the finite-x model error
    #[arg(long, default_value_t = 0.01)]
    slack: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct DegreeArgs {
    /// Rational base, an integer or "num/den" (sign allowed)
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    /// Root exponent ℓ ≥ 1
    #[arg(long)]
    ell: u64,
    /// Cyclotomic part: the field contains ζ_mℓ
    #[arg(long)]
    m: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct GenfunArgs {
    #[command(flatten)]
    base: BaseArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ExpectationArgs {
    /// Rational base, an integer or "num/den" (sign allowed)
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    /// Prime cutoff for the expectation sums
    #[arg(long, value_parser = parse_count)]
    cutoff: Option<u64>,
    #[command(flatten)]
    out: OutputArgs,
}

enum Failure {
    Core(artin_core::Error),
    Config(String),
    Io(std::io::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) => e.exit_code(),
            Failure::Config(_) => 2,
            Failure::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Config(msg) => write!(f, "{msg}"),
            Failure::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<artin_core::Error> for Failure {
    fn from(e: artin_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Predict(args) => run_predict(args),
        Command::Empirical(args) => run_empirical(args),
        Command::Compare(args) => run_compare(args),
        Command::Degree(args) => run_degree(args),
        Command::Genfun(args) => run_genfun(args),
        Command::Expectation(args) => run_expectation(args),
    }
}

/// Accepts plain integers, underscore separators, and integral scientific
/// notation ("1e7").
fn parse_count(s: &str) -> Result<u64, String> {
    let t = s.replace('_', "");
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    match t.parse::<f64>() {
        Ok(f) if (1.0..=9.0e15).contains(&f) && f.fract() == 0.0 => Ok(f as u64),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

fn parse_stat(s: &str) -> Result<StatisticKind, String> {
    s.parse()
        .map_err(|_| "expected omega-quotient, big-omega-quotient, or omega-diff".to_string())
}

fn cutoffs_from(cutoff: Option<u64>) -> Cutoffs {
    cutoff.map(Cutoffs::uniform).unwrap_or_default()
}

/// Numbers in JSON and CSV artifacts: strings with 12 significant digits,
/// identical across the two formats.
fn sig12(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:.11e}")
    }
}

/// Table cells: six decimals, truncated toward zero — the convention of the
/// reference coefficient tables (0.3936377… prints as 0.393637).
fn trunc6(v: f64) -> String {
    format!("{:.6}", (v * 1e6).trunc() / 1e6)
}

fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut text = String::new();
    let emit_row = |text: &mut String, cells: &[String]| {
        for (k, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if k > 0 {
                text.push_str("  ");
            }
            text.push_str(cell);
            for _ in cell.chars().count()..*w {
                text.push(' ');
            }
        }
        while text.ends_with(' ') {
            text.pop();
        }
        text.push('\n');
    };
    let header: Vec<String> = header.iter().map(|h| h.to_string()).collect();
    emit_row(&mut text, &header);
    for row in rows {
        emit_row(&mut text, row);
    }
    text
}

fn csv_lines(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

fn emit(out: &OutputArgs, text: String) -> Result<(), Failure> {
    let text = if text.ends_with('\n') {
        text
    } else {
        text + "\n"
    };
    match &out.output {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => Ok(fs::write(path, text)?),
    }
}

fn json_pretty(value: serde_json::Value) -> String {
    serde_json::to_string_pretty(&value).expect("JSON artifacts are tree-shaped")
}

fn run_predict(args: PredictArgs) -> Result<(), Failure> {
    let a = parse_rational(&args.base.a)?;
    let base = decompose(&a)?;
    let cutoffs = cutoffs_from(args.cutoff);
    let table = corrected_coefficients(&base, args.base.statistic, args.max_n, &cutoffs)?;
    let (e_value, e_error) = expectation(&base, args.base.statistic, cutoffs.n_le_1)?;

    let text = match args.out.format {
        Format::Table => {
            let mut rows: Vec<Vec<String>> = table
                .coefficients
                .iter()
                .enumerate()
                .map(|(n, &(d, err))| vec![n.to_string(), trunc6(d), format!("{err:.1e}")])
                .collect();
            rows.push(vec!["E".into(), trunc6(e_value), format!("{e_error:.1e}")]);
            format!(
                "a = {}, statistic = {}, prime cutoffs {}/{}\n{}",
                rational_string(&a),
                args.base.statistic,
                cutoffs.n_le_1,
                cutoffs.n_ge_2,
                render_table(&["n", "density", "error"], &rows)
            )
        }
        Format::Json => json_pretty(json!({
            "schema_version": 1,
            "kind": "density-table",
            "a": rational_string(&a),
            "statistic": args.base.statistic.to_string(),
            "cutoffs": { "n_le_1": cutoffs.n_le_1, "n_ge_2": cutoffs.n_ge_2 },
            "rows": table.coefficients.iter().enumerate().map(|(n, &(d, err))| json!({
                "n": n,
                "density": sig12(d),
                "error": sig12(err),
            })).collect::<Vec<_>>(),
            "expectation": { "value": sig12(e_value), "error": sig12(e_error) },
        })),
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = table
                .coefficients
                .iter()
                .enumerate()
                .map(|(n, &(d, err))| vec![n.to_string(), sig12(d), sig12(err)])
                .collect();
            rows.push(vec!["E".into(), sig12(e_value), sig12(e_error)]);
            csv_lines(&["n", "density", "error"], &rows)
        }
    };
    emit(&args.out, text)
}

fn sieve_options(
    threads: Option<usize>,
    segment_len: Option<u64>,
    checkpoint: Option<PathBuf>,
) -> SieveOptions {
    let mut options = SieveOptions {
        threads,
        checkpoint,
        ..SieveOptions::default()
    };
    if let Some(len) = segment_len {
        options.segment_len = len;
    }
    options
}

fn run_empirical(args: EmpiricalArgs) -> Result<(), Failure> {
    let a = parse_rational(&args.base.a)?;
    let options = sieve_options(args.threads, args.segment_len, args.checkpoint);
    let (tally, table) = empirical_densities(
        &a,
        args.base.statistic,
        args.x,
        args.max_n,
        args.xi,
        &options,
    )?;

    let text = match args.out.format {
        Format::Table => {
            let rows: Vec<Vec<String>> = table
                .coefficients
                .iter()
                .enumerate()
                .map(|(n, &(d, sigma))| {
                    let count = tally.counts.get(&(n as u32)).copied().unwrap_or(0);
                    vec![
                        n.to_string(),
                        count.to_string(),
                        trunc6(d),
                        format!("{sigma:.1e}"),
                    ]
                })
                .collect();
            format!(
                "a = {}, statistic = {}{}, primes ≤ {}: {} used, {:.2}s\n{}",
                rational_string(&a),
                tally.statistic,
                match tally.xi {
                    Some(xi) => format!(" (ξ = {xi})"),
                    None => String::new(),
                },
                tally.x,
                tally.primes_used,
                tally.runtime_s,
                render_table(&["n", "count", "density", "sigma"], &rows)
            )
        }
        Format::Json => {
            let mut value = serde_json::to_value(&tally).expect("tallies are tree-shaped");
            value["schema_version"] = json!(1);
            json_pretty(value)
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = tally
                .counts
                .iter()
                .map(|(&n, &count)| vec![n.to_string(), count.to_string()])
                .collect();
            csv_lines(&["n", "count"], &rows)
        }
    };
    emit(&args.out, text)
}

fn run_compare(args: CompareArgs) -> Result<(), Failure> {
    let a = parse_rational(&args.base.a)?;
    let base = decompose(&a)?;
    let cutoffs = cutoffs_from(args.cutoff);
    let predicted = corrected_coefficients(&base, args.base.statistic, args.max_n, &cutoffs)?;
    let empirical: CoefficientTable = match &args.tally {
        Some(path) => {
            let json = fs::read_to_string(path)?;
            let tally: EmpiricalTally = serde_json::from_str(&json)
                .map_err(|e| Failure::Config(format!("tally {}: {e}", path.display())))?;
            tally.to_coefficient_table(args.max_n)
        }
        None => {
            let x = args.x.expect("clap requires --x without --tally");
            let options = sieve_options(args.threads, None, None);
            empirical_densities(&a, args.base.statistic, x, args.max_n, args.xi, &options)?.1
        }
    };
    let criteria = CompareCriteria {
        sigma_multiple: args.sigma_multiple,
        slack: args.slack,
    };
    let report = compare(&predicted, &empirical, &criteria)?;

    let text = match args.out.format {
        Format::Table => {
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        trunc6(r.predicted),
                        trunc6(r.empirical),
                        trunc6(r.difference),
                        trunc6(r.threshold),
                        if r.pass { "pass".into() } else { "FAIL".into() },
                    ]
                })
                .collect();
            format!(
                "a = {}, statistic = {}\n{}{}\n",
                report.a,
                report.statistic,
                render_table(
                    &[
                        "n",
                        "predicted",
                        "empirical",
                        "|difference|",
                        "threshold",
                        "result"
                    ],
                    &rows
                ),
                if report.all_pass {
                    "all rows pass"
                } else {
                    "comparison FAILED"
                }
            )
        }
        Format::Json => json_pretty(json!({
            "schema_version": 1,
            "kind": "comparison-report",
            "a": report.a,
            "statistic": report.statistic.to_string(),
            "rows": report.rows.iter().map(|r| json!({
                "n": r.n,
                "predicted": sig12(r.predicted),
                "predicted_error": sig12(r.predicted_error),
                "empirical": sig12(r.empirical),
                "empirical_sigma": sig12(r.empirical_sigma),
                "difference": sig12(r.difference),
                "threshold": sig12(r.threshold),
                "pass": r.pass,
            })).collect::<Vec<_>>(),
            "all_pass": report.all_pass,
        })),
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        sig12(r.predicted),
                        sig12(r.predicted_error),
                        sig12(r.empirical),
                        sig12(r.empirical_sigma),
                        sig12(r.difference),
                        sig12(r.threshold),
                        r.pass.to_string(),
                    ]
                })
                .collect();
            csv_lines(
                &[
                    "n",
                    "predicted",
                    "predicted_error",
                    "empirical",
                    "empirical_sigma",
                    "difference",
                    "threshold",
                    "pass",
                ],
                &rows,
            )
        }
    };
    emit(&args.out, text)
}

fn run_degree(args: DegreeArgs) -> Result<(), Failure> {
    let a = parse_rational(&args.a)?;
    let base = decompose(&a)?;
    let query = DegreeQuery::new(base, args.ell, args.m)?;
    let eps = epsilon(&query);
    let degree = kummer_degree(&query)?;

    let text = match args.out.format {
        Format::Table => format!("epsilon={eps} degree={degree}"),
        Format::Json => json_pretty(json!({
            "schema_version": 1,
            "kind": "kummer-degree",
            "a": rational_string(&a),
            "ell": args.ell,
            "m": args.m,
            "epsilon": eps.to_string(),
            "degree": degree,
        })),
        Format::Csv => csv_lines(
            &["a", "ell", "m", "epsilon", "degree"],
            &[vec![
                rational_string(&a),
                args.ell.to_string(),
                args.m.to_string(),
                eps.to_string(),
                degree.to_string(),
            ]],
        ),
    };
    emit(&args.out, text)
}

fn run_genfun(args: GenfunArgs) -> Result<(), Failure> {
    let a = parse_rational(&args.base.a)?;
    let base = decompose(&a)?;
    let factors = correction_factors(&base, args.base.statistic)?;

    let text = match args.out.format {
        Format::Table => format!(
            "a = {}, statistic = {}\nF   = {}\nH   = {}\nF·H = {}",
            rational_string(&a),
            args.base.statistic,
            factors.f,
            factors.h,
            factors.combined,
        ),
        Format::Json => json_pretty(json!({
            "schema_version": 1,
            "kind": "correction-factors",
            "a": rational_string(&a),
            "statistic": args.base.statistic.to_string(),
            "f": factors.f.to_string(),
            "h": factors.h.to_string(),
            "combined": factors.combined.to_string(),
        })),
        Format::Csv => csv_lines(
            &["factor", "expression"],
            &[
                vec!["F".into(), factors.f.to_string()],
                vec!["H".into(), factors.h.to_string()],
                vec!["F*H".into(), factors.combined.to_string()],
            ],
        ),
    };
    emit(&args.out, text)
}

fn run_expectation(args: ExpectationArgs) -> Result<(), Failure> {
    let a = parse_rational(&args.a)?;
    let base = decompose(&a)?;
    let cutoff = args.cutoff.unwrap_or_else(|| Cutoffs::default().n_le_1);
    let mut values = Vec::new();
    for statistic in StatisticKind::ALL {
        values.push((statistic, expectation(&base, statistic, cutoff)?));
    }

    let text = match args.out.format {
        Format::Table => {
            let rows: Vec<Vec<String>> = values
                .iter()
                .map(|&(stat, (v, err))| vec![stat.to_string(), trunc6(v), format!("{err:.1e}")])
                .collect();
            format!(
                "a = {}, prime cutoff {}\n{}",
                rational_string(&a),
                cutoff,
                render_table(&["statistic", "expectation", "error"], &rows)
            )
        }
        Format::Json => json_pretty(json!({
            "schema_version": 1,
            "kind": "expectations",
            "a": rational_string(&a),
            "cutoff": cutoff,
            "rows": values.iter().map(|&(stat, (v, err))| json!({
                "statistic": stat.to_string(),
                "value": sig12(v),
                "error": sig12(err),
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let rows: Vec<Vec<String>> = values
                .iter()
                .map(|&(stat, (v, err))| vec![stat.to_string(), sig12(v), sig12(err)])
                .collect();
            csv_lines(&["statistic", "value", "error"], &rows)
        }
    };
    emit(&args.out, text)
}
