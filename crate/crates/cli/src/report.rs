//! The JSON document written by `solve`.

use std::time::{SystemTime, UNIX_EPOCH};

use poisson_grad::potential::CheckReport;
use poisson_grad::solver::{BoundAudit, RunReport, SolverConfig, Status};
use poisson_grad::verify::Certificate;
use poisson_grad::Potential;
use serde::Serialize;

use crate::config::{ChecksConfig, GridConfig, InitConfig, PotentialConfig, RunConfig};
use crate::setup::ConfiguredPotential;

pub const SCHEMA: &str = "poisson-grad/solve-report/v1";

/// Relative tolerance for matching a known global minimum value.
const KNOWN_MINIMUM_RTOL: f64 = 1e-6;

/// Everything except `generated_at_unix_s` is a deterministic function of the
/// config and seed.
#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub schema: &'static str,
    pub generated_at_unix_s: u64,
    pub config: ConfigEcho,
    pub hypothesis_checks: Vec<CheckReport>,
    pub assumptions: Vec<String>,
    pub run: RunReport,
    pub audit: BoundAudit,
    pub certificate: Certificate,
    pub minimality: Minimality,
}

/// The config sections that determine the result; output paths are left out.
#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub grid: GridConfig,
    pub potential: PotentialConfig,
    pub init: InitConfig,
    pub solver: SolverConfig,
    pub checks: ChecksConfig,
}

impl From<&RunConfig> for ConfigEcho {
    fn from(cfg: &RunConfig) -> Self {
        Self {
            grid: cfg.grid.clone(),
            potential: cfg.potential.clone(),
            init: cfg.init.clone(),
            solver: cfg.solver.clone(),
            checks: cfg.checks.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimalityClass {
    /// The final action equals the known global minimum value.
    GlobalMinimum,
    /// The discrete action is convex, so a critical point is a global minimizer.
    ConvexCriticalPoint,
    /// Descent found a critical point; nothing more is claimed.
    CriticalPoint,
    NotConverged,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Minimality {
    pub class: MinimalityClass,
    pub known_minimum: Option<f64>,
    pub statement: String,
}

pub fn minimality(run: &RunReport, f: &ConfiguredPotential) -> Minimality {
    let final_action = run.final_action.total;
    let (class, statement) = if run.status != Status::Converged {
        (
            MinimalityClass::NotConverged,
            "the run did not converge; no minimality claim".to_string(),
        )
    } else if let Some(m) = f
        .known_minimum
        .filter(|m| (final_action - m).abs() <= KNOWN_MINIMUM_RTOL * m.abs())
    {
        (
            MinimalityClass::GlobalMinimum,
            format!("global minimizer: the final action matches the known minimum {m:e}"),
        )
    } else if f.convex {
        (
            MinimalityClass::ConvexCriticalPoint,
            "global minimizer: the discrete action is convex".to_string(),
        )
    } else {
        (
            MinimalityClass::CriticalPoint,
            "local minimizer / critical point".to_string(),
        )
    };
    Minimality {
        class,
        known_minimum: f.known_minimum,
        statement,
    }
}

/// Notes on what the verdicts in the report do and do not establish.
pub fn assumptions(f: &ConfiguredPotential, floor_used: Option<f64>) -> Vec<String> {
    let mut notes = vec![
        "hypothesis checks sample the potential; a pass is evidence, not proof".to_string(),
        "the Dirichlet-energy audit uses the initial action as its constant".to_string(),
        "the coercivity clause on the integral of F is not checked".to_string(),
        "weak lower semicontinuity of the action on H1 is assumed, not checked".to_string(),
    ];
    match floor_used {
        Some(floor) => notes.push(format!("audits assume F >= {floor:e} pointwise")),
        None => notes.push(
            "positivity failed or was not checked: floor-dependent audits are skipped".to_string(),
        ),
    }
    if f.periods().is_none() {
        notes.push("no periods declared: canonicalization must be off".to_string());
    }
    notes
}

pub fn now_unix_s() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
