use std::path::{Path, PathBuf};

use poisson_grad::solver::SolverConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A run configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub potential: PotentialConfig,
    #[serde(default)]
    pub init: InitConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub checks: ChecksConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub p: usize,
    pub n: usize,
    pub extents: Vec<f64>,
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    Cosine,
    Quadratic,
    Linear,
    Expr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub kind: PotentialKind,
    /// `Aᵢ` of the cosine lattice.
    pub amplitudes: Option<Vec<f64>>,
    pub periods: Option<Vec<f64>>,
    /// `ε` for cosine and quadratic.
    pub floor: Option<f64>,
    /// `μ` of the cosine lattice.
    pub modulation: Option<f64>,
    /// Time axis of the modulation, 1-based like `t1`.
    pub modulation_axis: Option<usize>,
    pub center: Option<Vec<f64>>,
    pub expr: Option<String>,
    /// One expression in `t1..tp` per component.
    pub forcing_expr: Option<Vec<String>>,
    pub forcing_csv: Option<PathBuf>,
    /// Whether an expression potential is meant to be positive.
    pub positive: Option<bool>,
    pub growth: Option<GrowthConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthConfig {
    pub m: f64,
    pub g_max: f64,
    #[serde(default)]
    pub a0: f64,
    #[serde(default)]
    pub a_slope: f64,
    #[serde(default)]
    pub b_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitKind {
    Constant,
    Random,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitConfig {
    pub kind: InitKind,
    pub value: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub path: Option<PathBuf>,
}

impl Default for InitConfig {
    fn default() -> Self {
        Self {
            kind: InitKind::Random,
            value: None,
            seed: None,
            path: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub field_csv: Option<PathBuf>,
    /// Write `field_csv` in the closed form with duplicated faces.
    #[serde(default)]
    pub closed_csv: bool,
    pub report_json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Periodicity,
    Positivity,
    GradientGrowth,
    ValueGrowth,
    GradConsistency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChecksConfig {
    pub run: Vec<CheckName>,
    pub samples: usize,
    pub seed: u64,
    pub radius: f64,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        Self {
            run: vec![
                CheckName::Periodicity,
                CheckName::Positivity,
                CheckName::GradientGrowth,
                CheckName::GradConsistency,
            ],
            samples: 1000,
            seed: 0,
            radius: 10.0,
        }
    }
}

impl RunConfig {
    /// Parses a config file; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p.as_mut().filter(|p| p.is_relative()) {
                *path = base.join(&*path);
            }
        };
        fix(&mut self.init.path);
        fix(&mut self.potential.forcing_csv);
        fix(&mut self.output.field_csv);
        fix(&mut self.output.report_json);
    }

    fn validate(&self) -> Result<(), CliError> {
        let g = &self.grid;
        let bad = |msg: String| Err(CliError::Config(msg));
        if g.extents.len() != g.p || g.nodes.len() != g.p {
            return bad(format!(
                "grid.p = {} but {} extents and {} node counts given",
                g.p,
                g.extents.len(),
                g.nodes.len()
            ));
        }
        if let Some(periods) = &self.potential.periods {
            if periods.len() != g.n {
                return bad(format!(
                    "potential.periods has {} entries, grid.n = {}",
                    periods.len(),
                    g.n
                ));
            }
        }
        if self.init.kind == InitKind::Csv && self.init.path.is_none() {
            return bad("init.kind = \"csv\" needs init.path".into());
        }
        if self.init.kind == InitKind::Constant && self.init.value.is_none() {
            return bad("init.kind = \"constant\" needs init.value".into());
        }
        self.solver
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }
}
