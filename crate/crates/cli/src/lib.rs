//! Command-line front end for `poisson-grad`.
//!
//! Exit codes: `0` success, `1` runtime failure, `2` not converged or a check
//! failed, `3` invalid config, usage or file format, `4` expression parse error.

pub mod checks;
pub mod config;
pub mod error;
pub mod report;
pub mod setup;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use poisson_grad::grid::solve_linear_poisson;
use poisson_grad::io::{
    read_closed_csv, read_field_csv, write_closed_csv, write_field_csv, ClosedField,
};
use poisson_grad::solver::{check_minimizing_bounds, minimize, Status, Verdict};
use poisson_grad::verify::{boundary_check, certify, el_residual, wirtinger_check};
use poisson_grad::{Field, GridSpec};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::SolveReport;
use crate::setup::{build_grid, build_init, build_potential};

/// Environment variable capping the worker threads used for node-parallel work.
pub const THREADS_ENV: &str = "POISSON_GRAD_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "poisson-grad",
    version,
    about = "Periodic minimizers of the multi-time action"
)]
pub struct Cli {
    /// Print only errors.
    #[arg(long, global = true)]
    pub quiet: bool,

    /// Abort `solve` when a hypothesis check fails.
    #[arg(long, global = true)]
    pub strict: bool,

    /// Replace every seed in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize the action and certify the result.
    Solve { config: PathBuf },
    /// Run the sampled hypothesis checks on the configured potential.
    Check { config: PathBuf },
    /// Certify a field read from CSV, open or closed form.
    Residual { field: PathBuf, config: PathBuf },
    /// Solve `Δ_h u = f` spectrally for a zero-mean right-hand side `f` read from CSV.
    OracleLinear {
        rhs: PathBuf,
        config: PathBuf,
        /// Output CSV; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args`, runs the command and returns the exit code. Errors are
/// printed to stderr.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<u8, CliError> {
    configure_threads()?;
    let out = Printer { quiet: cli.quiet };
    match &cli.command {
        Command::Solve { config } => cmd_solve(&load(config, cli.seed)?, cli.strict, &out),
        Command::Check { config } => cmd_check(&load(config, cli.seed)?, &out),
        Command::Residual { field, config } => cmd_residual(field, &load(config, cli.seed)?, &out),
        Command::OracleLinear {
            rhs,
            config,
            out: path,
        } => cmd_oracle_linear(rhs, &load(config, cli.seed)?, path.as_deref(), &out),
    }
}

struct Printer {
    quiet: bool,
}

impl Printer {
    fn info(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }

    fn warn(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("warning: {}", msg.as_ref());
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Config(format!("{THREADS_ENV} = {raw:?} is not a positive integer"))
    })?;
    // Fails only when the pool already exists, e.g. on a second call in-process.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

fn load(path: &Path, seed: Option<u64>) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(seed) = seed {
        cfg.init.seed = Some(seed);
        cfg.solver.rng_seed = seed;
        cfg.checks.seed = seed;
    }
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<(), CliError> {
    w.flush()
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn cmd_solve(cfg: &RunConfig, strict: bool, out: &Printer) -> Result<u8, CliError> {
    let grid = build_grid(cfg)?;
    let f = build_potential(cfg, &grid)?;
    let checks = checks::run_checks(&cfg.checks, &f, &grid)?;
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    if !failed.is_empty() {
        out.warn(format!("hypothesis checks failed: {}", failed.join(", ")));
        if strict {
            eprintln!("error: --strict given and hypothesis checks failed");
            return Ok(2);
        }
    }

    let init = build_init(cfg, &grid, &f)?;
    let (u, run) = minimize(&f, &init, &cfg.solver)?;

    let positivity_passed = checks.iter().any(|c| c.name == "positivity" && c.passed);
    let floor = f.floor.or(positivity_passed.then_some(0.0));
    let audit = check_minimizing_bounds(&run, &grid, floor);
    let certificate = certify(&u, &f, cfg.solver.tol_residual)?;
    for c in audit
        .checks()
        .into_iter()
        .filter(|c| c.verdict == Verdict::Fail)
    {
        out.warn(format!("bound audit {} failed: {}", c.name, c.note));
    }

    if let Some(path) = &cfg.output.field_csv {
        let mut w = create(path)?;
        if cfg.output.closed_csv {
            write_closed_csv(&ClosedField::from_field(&u), &mut w)?;
        } else {
            write_field_csv(&u, &mut w)?;
        }
        finish(w, path)?;
    }

    let status = run.status;
    let summary = format!(
        "status {:?}, {} iterations, action {:.12e}, residual {:.3e}",
        status, run.iterations, run.final_action.total, certificate.residual.l2
    );
    let doc = SolveReport {
        schema: report::SCHEMA,
        generated_at_unix_s: report::now_unix_s(),
        config: cfg.into(),
        minimality: report::minimality(&run, &f),
        assumptions: report::assumptions(&f, floor),
        hypothesis_checks: checks,
        run,
        audit,
        certificate,
    };
    if let Some(path) = &cfg.output.report_json {
        let mut w = create(path)?;
        serde_json::to_writer_pretty(&mut w, &doc)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        writeln!(w).map_err(|e| CliError::Runtime(e.to_string()))?;
        finish(w, path)?;
    }
    out.info(summary);
    out.info(doc.minimality.statement);
    Ok(if status == Status::Converged { 0 } else { 2 })
}

fn cmd_check(cfg: &RunConfig, out: &Printer) -> Result<u8, CliError> {
    let grid = build_grid(cfg)?;
    let f = build_potential(cfg, &grid)?;
    let reports = checks::run_checks(&cfg.checks, &f, &grid)?;
    out.info(checks::format_table(&reports).trim_end());
    Ok(if reports.iter().all(|r| r.passed) {
        0
    } else {
        2
    })
}

/// Open nodes of a closed-grid import.
fn open_part(c: &ClosedField) -> Result<Field, CliError> {
    let grid = c.grid();
    let mut values = Vec::with_capacity(grid.len());
    for node in 0..grid.node_count() {
        values.extend_from_slice(c.at(&grid.multi_index(node)));
    }
    Ok(Field::new(grid.clone(), values)?)
}

fn read_any_csv(path: &Path, grid: &GridSpec) -> Result<(Field, ClosedField), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let rows = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .count()
        .saturating_sub(1);
    let closed_rows: usize = grid.nodes().iter().map(|n| n + 1).product();
    let located = |e: poisson_grad::Error| match e {
        poisson_grad::Error::Format(msg) => CliError::Format(format!("{}: {msg}", path.display())),
        other => other.into(),
    };
    if rows == closed_rows {
        let closed = read_closed_csv(text.as_bytes(), grid).map_err(located)?;
        Ok((open_part(&closed)?, closed))
    } else {
        let u = read_field_csv(text.as_bytes(), grid).map_err(located)?;
        let closed = ClosedField::from_field(&u);
        Ok((u, closed))
    }
}

fn cmd_residual(field: &Path, cfg: &RunConfig, out: &Printer) -> Result<u8, CliError> {
    let grid = build_grid(cfg)?;
    let f = build_potential(cfg, &grid)?;
    let (u, closed) = read_any_csv(field, &grid)?;
    let (_, residual) = el_residual(&u, &f)?;
    let tol = cfg.solver.tol_residual;
    let pass = residual.l2 <= tol;
    let boundary = boundary_check(&closed);
    let wirtinger = wirtinger_check(&u);
    let verdict = |ok: bool| if ok { "pass" } else { "FAIL" };
    out.info(format!(
        "residual      l2 {:.6e}  linf {:.6e}  tol {tol:.1e}  {}",
        residual.l2,
        residual.linf,
        verdict(pass)
    ));
    out.info(format!(
        "cross-check   |R + G| / scale {:.3e}  {}",
        residual.gradient_mismatch,
        verdict(residual.gradient_consistent)
    ));
    for a in &boundary.axes {
        out.info(format!(
            "boundary t{}   value {:.3e}  derivative {:.3e}  tol {:.1e}  {}",
            a.axis + 1,
            a.value_mismatch,
            a.derivative_mismatch,
            boundary.tolerance,
            verdict(a.pass)
        ));
    }
    out.info(format!(
        "wirtinger     {:.6e} <= {:.6e} (C_h = {:.6e})  {}",
        wirtinger.lhs,
        wirtinger.rhs,
        wirtinger.constant,
        verdict(wirtinger.pass)
    ));
    Ok(if pass { 0 } else { 2 })
}

fn cmd_oracle_linear(
    rhs: &Path,
    cfg: &RunConfig,
    path: Option<&Path>,
    out: &Printer,
) -> Result<u8, CliError> {
    let grid = build_grid(cfg)?;
    let (f, _) = read_any_csv(rhs, &grid)?;
    let u = solve_linear_poisson(&f)?;
    match path {
        Some(path) => {
            let mut w = create(path)?;
            write_field_csv(&u, &mut w)?;
            finish(w, path)?;
            out.info(format!("wrote {}", path.display()));
        }
        None => {
            let stdout = std::io::stdout();
            write_field_csv(&u, stdout.lock())?;
        }
    }
    Ok(0)
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/report.md")]
    mod report {}
}
