//! Command-line surface and batch processing.

use std::io::{BufRead, Write};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::basis::build_basis;
use crate::error::{Error, Result};
use crate::moduli::{at_infinity_tau2, dimension_bounds, plane_branch_check, tau_report};
use crate::semigroup::{free_structure, monomial_curve_equations, FreeStructure, NumericalSemigroup};
use crate::sequences::{
    delta_to_beta, delta_to_beta_candidates, enumerate_deltas, one_puiseux_family, select_relation,
    BetaSequence, DeltaSequence,
};
use crate::suites::{run_suite, Suite, SuiteOptions};
use crate::tjurina::compare_with_basis;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "sgdeform", version, about = "Deformations of monomial curves of free numerical semigroups")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for random suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Safety bound on δ_0 in `delta enumerate`.
    #[arg(long, global = true)]
    pub cap: Option<u64>,
    /// Largest conductor handed to the graded oracle.
    #[arg(long, global = true)]
    pub work_limit: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gcd tower, ℓ-table, conductor and defining equations.
    Analyze { generators: Vec<u64> },
    /// Monomial basis of T^1.
    Basis { generators: Vec<u64> },
    /// τ⁺, τ⁻ and the degree histogram.
    Tau { generators: Vec<u64> },
    /// Bounds on τ⁺ from the level below.
    Bounds { generators: Vec<u64> },
    /// Plane-branch characterization and the Σd closed formula.
    PlaneBranch { generators: Vec<u64> },
    /// τ⁺ of a three-generator semigroup against its closed formula.
    AtInfinity { generators: Vec<u64> },
    /// δ-sequence conversions.
    #[command(subcommand)]
    Delta(DeltaCommand),
    /// Graded dimensions of T^1 by exact linear algebra.
    Oracle { generators: Vec<u64> },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Number of random members.
        #[arg(long)]
        count: Option<usize>,
    },
    /// Newline-delimited JSON jobs, one output line per job.
    Batch {
        #[arg(long, default_value = "-")]
        input: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum DeltaCommand {
    /// Plane-branch semigroup of a δ-sequence.
    ToBeta { deltas: Vec<u64> },
    /// All δ-sequences with the given plane-branch semigroup.
    Enumerate { betas: Vec<u64> },
    /// One-Puiseux-pair family for `(b0, b1)`.
    Puiseux { b0: u64, b1: u64 },
}

/// One job in a batch file.
#[derive(Debug, Clone, Deserialize)]
pub struct JobSpec {
    pub command: String,
    #[serde(default)]
    pub generators: Vec<u64>,
    pub cap: Option<u64>,
    pub work_limit: Option<u64>,
    pub suite: Option<Suite>,
    pub seed: Option<u64>,
    pub count: Option<usize>,
}

/// Outcome of one command: a JSON value plus whether any hard check failed.
pub struct Outcome {
    pub value: Value,
    pub hard_failure: bool,
}

impl From<Value> for Outcome {
    fn from(value: Value) -> Self {
        Outcome {
            value,
            hard_failure: false,
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable output")
}

fn structure(gens: &[u64]) -> Result<FreeStructure> {
    free_structure(&NumericalSemigroup::new(gens.to_vec())?)
}

fn analyze(gens: &[u64]) -> Result<Value> {
    let fs = structure(gens)?;
    let mut v = to_value(&fs);
    v["equations"] = to_value(&monomial_curve_equations(&fs));
    v["is_plane_branch"] = json!(fs.has_plane_branch_inequalities());
    Ok(v)
}

fn oracle(gens: &[u64], work_limit: Option<u64>) -> Result<Value> {
    let cmp = compare_with_basis(&structure(gens)?, work_limit)?;
    let mut v = to_value(&cmp.oracle);
    v["matches_basis"] = json!(cmp.matches);
    Ok(v)
}

fn to_beta(deltas: &[u64]) -> Result<Value> {
    let ds = DeltaSequence::new(deltas.to_vec())?;
    let beta = delta_to_beta(&ds)?;
    Ok(json!({
        "deltas": ds.deltas,
        "relation": select_relation(&ds.deltas)?,
        "betas": beta.betas,
        "candidates": delta_to_beta_candidates(&ds)?,
    }))
}

fn enumerate(betas: &[u64], cap: Option<u64>) -> Result<Value> {
    let beta = BetaSequence::new(betas.to_vec())?;
    Ok(to_value(&enumerate_deltas(&beta, cap)?))
}

fn verify(suite: Suite, opts: SuiteOptions) -> Result<Outcome> {
    let report = run_suite(suite, &opts)?;
    Ok(Outcome {
        hard_failure: report.has_failures(),
        value: to_value(&report),
    })
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    Ok(match &cli.command {
        Command::Analyze { generators } => analyze(generators)?.into(),
        Command::Basis { generators } => to_value(&build_basis(&structure(generators)?)?).into(),
        Command::Tau { generators } => to_value(&tau_report(&structure(generators)?)?).into(),
        Command::Bounds { generators } => to_value(&dimension_bounds(&structure(generators)?)?).into(),
        Command::PlaneBranch { generators } => {
            to_value(&plane_branch_check(&structure(generators)?)?).into()
        }
        Command::AtInfinity { generators } => {
            to_value(&at_infinity_tau2(&structure(generators)?)?).into()
        }
        Command::Delta(DeltaCommand::ToBeta { deltas }) => to_beta(deltas)?.into(),
        Command::Delta(DeltaCommand::Enumerate { betas }) => enumerate(betas, cli.cap)?.into(),
        Command::Delta(DeltaCommand::Puiseux { b0, b1 }) => {
            to_value(&one_puiseux_family(*b0, *b1)?).into()
        }
        Command::Oracle { generators } => oracle(generators, cli.work_limit)?.into(),
        Command::Verify { suite, count } => verify(
            *suite,
            SuiteOptions {
                seed: cli.seed,
                count: *count,
                work_limit: cli.work_limit,
            },
        )?,
        Command::Batch { .. } => {
            return Err(Error::Precondition("batch jobs cannot nest".into()));
        }
    })
}

/// Error object used on stderr and in batch output.
pub fn error_object(err: &Error) -> Value {
    let mut obj = Map::new();
    obj.insert("error".into(), json!(err.kind()));
    match err {
        Error::NotFree(i) => {
            obj.insert("index".into(), json!(i));
        }
        other => {
            obj.insert("message".into(), json!(other.to_string()));
        }
    }
    Value::Object(obj)
}

fn job_to_cli(job: &JobSpec) -> std::result::Result<Cli, String> {
    let mut args: Vec<String> = vec!["sgdeform".into()];
    args.extend(job.command.split_whitespace().map(String::from));
    if let Some(cap) = job.cap {
        args.push(format!("--cap={cap}"));
    }
    if let Some(w) = job.work_limit {
        args.push(format!("--work-limit={w}"));
    }
    if let Some(s) = job.seed {
        args.push(format!("--seed={s}"));
    }
    if let Some(suite) = job.suite {
        let name = suite.to_possible_value().expect("named suite");
        args.push(format!("--suite={}", name.get_name()));
    }
    if let Some(c) = job.count {
        args.push(format!("--count={c}"));
    }
    args.extend(job.generators.iter().map(u64::to_string));
    Cli::try_parse_from(&args).map_err(|e| e.to_string().lines().next().unwrap_or("").to_string())
}

/// Runs one batch line.
pub fn run_line(line: &str) -> Value {
    let job: JobSpec = match serde_json::from_str(line) {
        Ok(j) => j,
        Err(e) => return json!({"error": "MalformedJob", "message": e.to_string()}),
    };
    let cli = match job_to_cli(&job) {
        Ok(c) => c,
        Err(msg) => return json!({"error": "UsageError", "message": msg}),
    };
    if matches!(cli.command, Command::Batch { .. }) {
        return json!({"error": "UsageError", "message": "batch jobs cannot nest"});
    }
    match execute(&cli) {
        Ok(out) => out.value,
        Err(e) => error_object(&e),
    }
}

/// Processes newline-delimited jobs in parallel, keeping input order.
/// Blank lines are skipped.
pub fn batch<R: BufRead>(input: R) -> std::io::Result<Vec<Value>> {
    let lines: Vec<String> = input
        .lines()
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .filter(|l| !l.trim().is_empty())
        .collect();
    Ok(lines.par_iter().map(|l| run_line(l)).collect())
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Flattens a JSON value into CSV. Arrays of objects become one row per
/// element; a report with a `records` array is written as that table;
/// any other object becomes a single row.
pub fn to_csv(v: &Value) -> String {
    let rows: Vec<Value> = match v {
        Value::Array(items) => items.clone(),
        Value::Object(map) => match map.get("records") {
            Some(Value::Array(items)) => items.clone(),
            _ => vec![v.clone()],
        },
        other => vec![json!({ "value": other })],
    };
    let mut headers: Vec<String> = Vec::new();
    for r in &rows {
        if let Value::Object(m) = r {
            for k in m.keys() {
                if !headers.contains(k) {
                    headers.push(k.clone());
                }
            }
        }
    }
    if headers.is_empty() {
        headers.push("value".into());
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&headers).expect("in-memory write");
    for r in &rows {
        let record: Vec<String> = match r {
            Value::Object(m) => headers.iter().map(|h| m.get(h).map(cell).unwrap_or_default()).collect(),
            other => vec![cell(other)],
        };
        w.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(v).expect("serializable output") + "\n",
        Format::Csv => to_csv(v),
    }
}

fn render_batch(values: &[Value], format: Format) -> String {
    match format {
        Format::Json => values
            .iter()
            .map(|v| serde_json::to_string(v).expect("serializable output") + "\n")
            .collect(),
        Format::Csv => {
            let rows: Vec<Value> = values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let status = if v.get("error").is_some() { "error" } else { "ok" };
                    json!({"line": i + 1, "status": status, "output": v.to_string()})
                })
                .collect();
            to_csv(&Value::Array(rows))
        }
    }
}

/// Parses arguments, runs the command and writes to the given streams.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{text}");
            return code;
        }
    };

    if let Command::Batch { input } = &cli.command {
        let values = if input == "-" {
            batch(std::io::stdin().lock())
        } else {
            std::fs::File::open(input).and_then(|f| batch(std::io::BufReader::new(f)))
        };
        return match values {
            Ok(vals) => {
                let _ = write!(out, "{}", render_batch(&vals, cli.format));
                EXIT_OK
            }
            Err(e) => {
                let _ = writeln!(err, "{}", json!({"error": "Io", "message": e.to_string()}));
                EXIT_USAGE
            }
        };
    }

    match execute(&cli) {
        Ok(outcome) => {
            let _ = write!(out, "{}", render(&outcome.value, cli.format));
            if outcome.hard_failure {
                EXIT_CHECK_FAILED
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{}", error_object(&e));
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("sgdeform").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn analyze_example() {
        let (code, out, _) = run_args(&["analyze", "18", "27", "21", "32"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["n"], json!([2, 3, 3]));
        assert_eq!(v["ell"], json!([[3], [2, 1], [3, 0, 2]]));
        assert_eq!(v["conductor"], json!(116));
    }

    #[test]
    fn tau_output() {
        let (code, out, _) = run_args(&["tau", "9", "6", "7"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!((v["tau_plus"].clone(), v["tau_minus"].clone(), v["zero_count"].clone()), (json!(3), json!(15), json!(0)));
    }

    #[test]
    fn usage_and_domain_errors() {
        assert_eq!(run_args(&["frobnicate"]).0, 1);
        assert_eq!(run_args(&["analyze", "x"]).0, 1);
        let (code, _, err) = run_args(&["analyze", "3", "5", "7"]);
        assert_eq!(code, 1);
        let v: Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v, json!({"error": "NotFree", "index": 2}));
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn batch_lines() {
        let input = concat!(
            r#"{"command":"analyze","generators":[2,3]}"#, "\n",
            "\n",
            r#"{"command":"tau","generators":[9,6,7]}"#, "\n",
            r#"{"command":"analyze","generators":[3,5,7]}"#, "\n",
            "not json\n",
            r#"{"command":"delta enumerate","generators":[10,36,183]}"#, "\n",
        );
        let out = batch(input.as_bytes()).unwrap();
        assert_eq!(out.len(), 5);
        assert_eq!(out[0]["conductor"], json!(2));
        assert_eq!(out[1]["tau_plus"], json!(3));
        assert_eq!(out[2], json!({"error": "NotFree", "index": 2}));
        assert_eq!(out[3]["error"], json!("MalformedJob"));
        assert_eq!(out[4].as_array().unwrap().len(), 3);
        assert!(batch("".as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn csv_rendering() {
        let (code, out, _) = run_args(&["--format", "csv", "basis", "2", "3"]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some("unit,exponents,degree,clause"));
        assert_eq!(out.lines().count(), 3);
    }

    #[test]
    fn rationals_render_exactly() {
        let (_, out, _) = run_args(&["at-infinity", "9", "6", "7"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v["formula_value"]["num"].is_i64());
        assert!(v["formula_value"]["den"].is_i64());
        assert!(!out.contains('.'));
    }
}
