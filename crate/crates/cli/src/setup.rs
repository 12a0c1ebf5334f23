use std::fs::File;
use std::path::Path;

use poisson_grad::expr::{DomainError, Expr, ExprPotential};
use poisson_grad::io::read_field_csv;
use poisson_grad::potential::{CosineLattice, GrowthEnvelope, LinearForcing, ShiftedQuadratic};
use poisson_grad::solver::random_init;
use poisson_grad::{Field, GridSpec, Potential};

use crate::config::{InitKind, PotentialKind, RunConfig};
use crate::error::CliError;

/// The configured potential, with any periods or growth data declared in the
/// config taking precedence over the built-in ones.
pub struct ConfiguredPotential {
    inner: Box<dyn Potential>,
    periods: Option<Vec<f64>>,
    growth: Option<GrowthEnvelope>,
    /// A pointwise lower bound `F ≥ floor` known from the construction.
    pub floor: Option<f64>,
    /// `min φ_h` when it is known in closed form.
    pub known_minimum: Option<f64>,
    /// The action is convex, so any critical point is a global minimizer.
    pub convex: bool,
}

impl Potential for ConfiguredPotential {
    fn components(&self) -> usize {
        self.inner.components()
    }

    fn value(&self, t: &[f64], x: &[f64]) -> Result<f64, DomainError> {
        self.inner.value(t, x)
    }

    fn gradient(&self, t: &[f64], x: &[f64], out: &mut [f64]) -> Result<(), DomainError> {
        self.inner.gradient(t, x, out)
    }

    fn value_and_gradient(
        &self,
        t: &[f64],
        x: &[f64],
        out: &mut [f64],
    ) -> Result<f64, DomainError> {
        self.inner.value_and_gradient(t, x, out)
    }

    fn periods(&self) -> Option<&[f64]> {
        self.periods.as_deref()
    }

    fn claims_positive(&self) -> bool {
        self.inner.claims_positive()
    }

    fn growth(&self) -> Option<GrowthEnvelope> {
        self.growth
    }
}

pub fn build_grid(cfg: &RunConfig) -> Result<GridSpec, CliError> {
    let g = &cfg.grid;
    Ok(GridSpec::new(g.extents.clone(), g.nodes.clone(), g.n)?)
}

fn require<'a, T>(value: &'a Option<T>, key: &str) -> Result<&'a T, CliError> {
    value
        .as_ref()
        .ok_or_else(|| CliError::Config(format!("potential.{key} is required for this kind")))
}

fn read_csv(path: &Path, grid: &GridSpec) -> Result<Field, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::Config(format!("cannot open {}: {e}", path.display())))?;
    read_field_csv(file, grid).map_err(|e| match e {
        poisson_grad::Error::Format(msg) => CliError::Format(format!("{}: {msg}", path.display())),
        other => other.into(),
    })
}

fn forcing_field(cfg: &RunConfig, grid: &GridSpec) -> Result<Field, CliError> {
    let pc = &cfg.potential;
    match (&pc.forcing_expr, &pc.forcing_csv) {
        (Some(exprs), None) => {
            if exprs.len() != grid.components() {
                return Err(CliError::Config(format!(
                    "potential.forcing_expr has {} entries, grid.n = {}",
                    exprs.len(),
                    grid.components()
                )));
            }
            let parsed = exprs
                .iter()
                .enumerate()
                .map(|(i, src)| {
                    Expr::parse(src, grid.dims(), 0).map_err(|e| {
                        CliError::expr(&format!("potential.forcing_expr[{i}]"), src, e)
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut values = Vec::with_capacity(grid.len());
            for node in 0..grid.node_count() {
                let t = grid.coords(node);
                for e in &parsed {
                    let v = e.eval(&t, &[]).map_err(|err| {
                        CliError::Config(format!("forcing expression at t = {t:?}: {err}"))
                    })?;
                    values.push(v);
                }
            }
            Ok(Field::new(grid.clone(), values)?)
        }
        (None, Some(path)) => read_csv(path, grid),
        _ => Err(CliError::Config(
            "linear potential needs exactly one of potential.forcing_expr and potential.forcing_csv"
                .into(),
        )),
    }
}

pub fn build_potential(cfg: &RunConfig, grid: &GridSpec) -> Result<ConfiguredPotential, CliError> {
    let pc = &cfg.potential;
    let n = grid.components();
    let vol = grid.volume();
    let (inner, floor, convex): (Box<dyn Potential>, _, _) = match pc.kind {
        PotentialKind::Cosine => {
            let amplitudes = require(&pc.amplitudes, "amplitudes")?.clone();
            let periods = require(&pc.periods, "periods")?.clone();
            let floor = pc.floor.unwrap_or(0.1);
            let mut f = CosineLattice::new(amplitudes, periods, floor)?;
            if let Some(mu) = pc.modulation {
                let axis = pc.modulation_axis.unwrap_or(1);
                if axis == 0 || axis > grid.dims() {
                    return Err(CliError::Config(format!(
                        "potential.modulation_axis = {axis} outside 1..={}",
                        grid.dims()
                    )));
                }
                f = f.with_modulation(mu, axis - 1, grid.extents()[axis - 1])?;
            }
            (Box::new(f), Some(floor), false)
        }
        PotentialKind::Quadratic => {
            let center = require(&pc.center, "center")?.clone();
            let floor = pc.floor.unwrap_or(1.0);
            (
                Box::new(ShiftedQuadratic::new(center, floor)?),
                Some(floor),
                true,
            )
        }
        PotentialKind::Linear => {
            let forcing = forcing_field(cfg, grid)?;
            (Box::new(LinearForcing::new(forcing)?), None, true)
        }
        PotentialKind::Expr => {
            let src = require(&pc.expr, "expr")?;
            let mut f = ExprPotential::new(src, grid.dims(), n)
                .map_err(|e| CliError::expr("potential.expr", src, e))?;
            if let Some(positive) = pc.positive {
                f = f.with_positivity_claim(positive);
            }
            (Box::new(f), None, false)
        }
    };
    if inner.components() != n {
        return Err(CliError::Config(format!(
            "potential has {} components, grid.n = {n}",
            inner.components()
        )));
    }
    let periods = match &pc.periods {
        Some(p) => Some(p.clone()),
        None => inner.periods().map(<[f64]>::to_vec),
    };
    if let Some(p) = &periods {
        if let Some(bad) = p.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(CliError::Config(format!(
                "periods must be positive, got {bad}"
            )));
        }
    }
    let growth = match pc.growth {
        Some(g) => Some(GrowthEnvelope::new(g.m, g.g_max, g.a0, g.a_slope, g.b_max)?),
        None => inner.growth(),
    };
    // Both built-in floors are attained by constants, so `min φ_h = floor·Vol`.
    let known_minimum = match pc.kind {
        PotentialKind::Cosine | PotentialKind::Quadratic => floor.map(|e| e * vol),
        _ => None,
    };
    Ok(ConfiguredPotential {
        inner,
        periods,
        growth,
        floor,
        known_minimum,
        convex,
    })
}

pub fn build_init(
    cfg: &RunConfig,
    grid: &GridSpec,
    potential: &dyn Potential,
) -> Result<Field, CliError> {
    let init = &cfg.init;
    match init.kind {
        InitKind::Constant => {
            let value = init.value.as_ref().expect("validated");
            Ok(Field::constant(grid, value)?)
        }
        InitKind::Random => {
            let seed = init.seed.unwrap_or(cfg.solver.rng_seed);
            Ok(random_init(grid, potential.periods(), seed)?)
        }
        InitKind::Csv => read_csv(init.path.as_ref().expect("validated"), grid),
    }
}
