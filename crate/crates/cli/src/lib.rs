//! Command-line front end for `qcdual-core`.
//!
//! [`run`] parses arguments, merges them over an optional JSON config file,
//! runs one workflow and writes a versioned report. Exit codes: 0 when every
//! check passes, 2 when a check fails or the computation errors after it
//! started, 1 for usage and configuration errors.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use serde_json::{json, Value};

use config::{Command, ConfigError, ExperimentConfig, Format, Kind, Num, Sector, DEFAULT_SEED, SEED_ENV};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qcdual", version, about = "Twisted XXX chains and their classical RS/CM duals")]
pub struct Cli {
    /// Workflow to run.
    #[arg(value_enum, required_unless_present = "check")]
    pub command: Option<Command>,

    /// Run the invariant battery at small N and print a pass/fail matrix.
    #[arg(long, conflicts_with = "command")]
    pub check: bool,

    /// JSON config file (or a previous report); flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Number of sites.
    #[arg(long)]
    pub n: Option<usize>,

    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<f64>,

    /// Twist eigenvalues `w1,w2` (Gaudin and limits: `omega1,omega2`).
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true, value_name = "W1,W2")]
    pub twist: Option<Vec<f64>>,

    /// Inhomogeneities `x1,...,xN`.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true, value_name = "X1,...")]
    pub x: Option<Vec<f64>>,

    /// Magnon sector `M` or `all`.
    #[arg(long)]
    pub sector: Option<Sector>,

    /// Newton starts (inverse problem: total; Bethe: per branch assignment).
    #[arg(long)]
    pub starts: Option<usize>,

    /// Check tolerance; the default depends on the command.
    #[arg(long)]
    pub tol: Option<f64>,

    /// Random seed (overrides the config file and QCDUAL_SEED).
    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long)]
    pub t_end: Option<f64>,

    #[arg(long)]
    pub dt: Option<f64>,

    /// Particle system for `dynamics`.
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,

    /// Initial velocities (`dynamics`) or CM velocities (`limits`).
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true, value_name = "V1,...")]
    pub v: Option<Vec<f64>>,

    /// Decreasing eta sequence for `limits`.
    #[arg(long, value_delimiter = ',', num_args = 1, value_name = "E1,...")]
    pub etas: Option<Vec<f64>>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Output file; standard output if absent.
    #[arg(long, alias = "path")]
    pub output: Option<String>,

    /// Leave the timestamp out of the report.
    #[arg(long)]
    pub no_timestamp: bool,
}

fn reals(v: &[f64]) -> Vec<Num> {
    v.iter().map(|&x| Num::real(x)).collect()
}

/// Layers defaults, config file, `QCDUAL_SEED` and flags, in that order.
pub fn build_config(cli: &Cli, env_seed: Option<&str>) -> Result<ExperimentConfig, ConfigError> {
    let mut c = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(cmd) = cli.command {
        c.command = Some(cmd);
    }
    if let Some(s) = env_seed {
        let seed = s.trim().parse().map_err(|_| ConfigError(format!("{SEED_ENV}={s:?} is not an unsigned integer")))?;
        c.solver.seed = Some(seed);
    }
    if let Some(x) = &cli.x {
        c.chain.x = Some(reals(x));
        if cli.n.is_none() {
            c.chain.n = None;
        }
    }
    if let Some(n) = cli.n {
        if cli.x.is_none() && c.chain.x.as_ref().is_some_and(|x| x.len() != n) {
            c.chain.x = None;
        }
        c.chain.n = Some(n);
    }
    if let Some(eta) = cli.eta {
        c.chain.eta = Num::real(eta);
    }
    if let Some(t) = &cli.twist {
        match t.as_slice() {
            [a, b] => c.chain.twist = [Num::real(*a), Num::real(*b)],
            _ => return Err(ConfigError(format!("--twist needs exactly two values, got {}", t.len()))),
        }
    }
    if let Some(s) = cli.sector {
        c.sector = Some(s);
    }
    if let Some(s) = cli.starts {
        c.solver.starts = Some(s);
    }
    if let Some(t) = cli.tol {
        c.solver.tol = Some(t);
    }
    if let Some(s) = cli.seed {
        c.solver.seed = Some(s);
    }
    if let Some(t) = cli.t_end {
        c.dynamics.t_end = t;
    }
    if let Some(dt) = cli.dt {
        c.dynamics.dt = dt;
    }
    if let Some(k) = cli.kind {
        c.dynamics.kind = k;
    }
    if let Some(v) = &cli.v {
        c.dynamics.v = Some(reals(v));
    }
    if let Some(e) = &cli.etas {
        c.limits.etas = e.clone();
    }
    if let Some(f) = cli.format {
        c.output.format = f;
    }
    if let Some(p) = &cli.output {
        c.output.path = Some(p.clone());
    }
    if cli.no_timestamp {
        c.output.timestamp = false;
    }
    Ok(c)
}

fn write_output(path: Option<&str>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

fn csv_text(table: &commands::Table) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.header).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv writes UTF-8")
}

fn run_battery(cli: &Cli, env_seed: Option<&str>) -> i32 {
    let seed = match (cli.seed, env_seed) {
        (Some(s), _) => s,
        (None, Some(s)) => match s.trim().parse() {
            Ok(s) => s,
            Err(_) => {
                eprintln!("qcdual: {SEED_ENV}={s:?} is not an unsigned integer");
                return EXIT_USAGE;
            }
        },
        (None, None) => DEFAULT_SEED,
    };
    let rows = match qcdual_core::checks::run_checks(seed) {
        Ok(rows) => rows,
        Err(e) => {
            println!("invariant battery aborted: {e}");
            return EXIT_CHECK_FAILED;
        }
    };
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    println!("{:<width$}  {:>10}  {:>10}  result", "check", "value", "tolerance");
    for r in &rows {
        println!(
            "{:<width$}  {:>10.3e}  {:>10.1e}  {}",
            r.name,
            r.value,
            r.tolerance,
            if r.passed { "PASS" } else { "FAIL" }
        );
    }
    let failed = rows.iter().filter(|r| !r.passed).count();
    println!("{} passed, {failed} failed", rows.len() - failed);
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

/// Runs the program on `argv` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    if cli.check {
        return run_battery(&cli, env_seed.as_deref());
    }
    let resolved = match build_config(&cli, env_seed.as_deref()).and_then(ExperimentConfig::resolve) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("qcdual: config error: {e}");
            return EXIT_USAGE;
        }
    };

    let outcome = commands::execute(&resolved);
    let passed = outcome.passed();
    let output = &resolved.config.output;

    let text = match (output.format, &outcome.table) {
        (Format::Csv, Some(table)) => csv_text(table),
        _ => {
            let mut doc = serde_json::Map::new();
            doc.insert("schema".into(), json!(report::SCHEMA));
            doc.insert("command".into(), json!(resolved.command));
            doc.insert("config".into(), serde_json::to_value(&resolved.config).expect("config serializes"));
            if output.timestamp {
                let secs = std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                doc.insert("timestamp".into(), json!(secs));
            }
            doc.insert("payload".into(), Value::Object(outcome.payload.clone()));
            doc.insert("checks".into(), Value::Array(outcome.checks.iter().map(|c| c.to_json()).collect()));
            doc.insert("error".into(), json!(outcome.error));
            doc.insert("passed".into(), json!(passed));
            report::to_json_string(&Value::Object(doc))
        }
    };
    if let Err(e) = write_output(output.path.as_deref(), &text) {
        eprintln!("qcdual: cannot write report: {e}");
        return EXIT_USAGE;
    }

    for c in &outcome.checks {
        eprintln!("[{}] {}: {:.3e} (limit {:.1e})", if c.passed() { "PASS" } else { "FAIL" }, c.name, c.value, c.limit);
    }
    if let Some(e) = &outcome.error {
        eprintln!("qcdual: {} stopped: {e}", resolved.command);
    }
    if passed {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}
