//! Minimization of the discrete action by descent, with lattice-shift
//! canonicalization of the mean and an audit of the a-priori bounds that make
//! minimizing sequences bounded.
//!
//! Each iteration takes a step along a descent direction (steepest descent or
//! Polak–Ribière+ conjugate gradient), accepts it by backtracking, and then
//! moves the mean of the iterate back into the fundamental cell of the
//! potential's period lattice. The shift leaves the action unchanged for a
//! periodic potential; the drift is measured and recorded every time.
//!
//! Close to a minimizer the decrease the Armijo test asks for drops below the
//! rounding error of the action itself. In that regime a trial step is accepted
//! when the action has not grown by more than that rounding bound and the
//! directional derivative at the trial point lies in the approximate-Wolfe
//! window; such steps are flagged `noise_limited` in the record. Every other
//! accepted step strictly lowers the action, so a recorded action exceeds its
//! predecessor only on a noise-limited step and by at most the predecessor's
//! `action_noise`.

mod audit;
mod canonical;

pub use audit::{check_minimizing_bounds, BoundAudit, BoundCheck, Verdict};
pub use canonical::canonicalize;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::action::{evaluate, ActionValue, Evaluation};
use crate::error::{Error, Result};
use crate::grid::{h1_norm, l2_inner, l2_norm, split_mean, Field, GridSpec};
use crate::potential::Potential;

/// Steps below this abort the line search.
const MIN_STEP: f64 = 1e-16;
/// Allowed relative change of the action under a lattice shift.
const GAUGE_TOL: f64 = 1e-12;
/// Window of the relative-decrease stopping rule.
const STALL_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Gd,
    Ncg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub method: Method,
    pub max_iters: usize,
    /// Stop once `‖G‖_{L²}` is at most this.
    pub tol_residual: f64,
    /// Stop once the relative action decrease over five Armijo steps is below this.
    pub tol_action: f64,
    pub armijo_c1: f64,
    pub backtrack_factor: f64,
    pub initial_step: f64,
    /// Canonicalize after every `k`-th step; `0` disables it.
    pub canonicalize_every: usize,
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::Ncg,
            max_iters: 5000,
            tol_residual: 1e-8,
            tol_action: 1e-15,
            armijo_c1: 1e-4,
            backtrack_factor: 0.5,
            initial_step: 1.0,
            canonicalize_every: 1,
            rng_seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.armijo_c1 > 0.0 && self.armijo_c1 < 0.5) {
            return fail(format!(
                "armijo_c1 must lie in (0, 0.5), got {}",
                self.armijo_c1
            ));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return fail(format!(
                "backtrack_factor must lie in (0, 1), got {}",
                self.backtrack_factor
            ));
        }
        for (name, v) in [
            ("tol_residual", self.tol_residual),
            ("tol_action", self.tol_action),
            ("initial_step", self.initial_step),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return fail(format!("{name} must be positive, got {v}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// `‖G‖_{L²} ≤ tol_residual`.
    Converged,
    /// The relative-decrease rule fired before the residual tolerance was met.
    Stalled,
    MaxIters,
    LineSearchFailed,
}

/// One accepted iterate `u_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iter: usize,
    /// Action of the accepted point before its lattice shift.
    pub action: ActionValue,
    pub residual_l2: f64,
    /// `‖Du_k‖²_{L²}`, twice the Dirichlet energy.
    pub derivative_norm_sq: f64,
    pub mean: Vec<f64>,
    pub fluctuation_l2: f64,
    pub h1_norm: f64,
    /// Accepted step length; `0` for the initial point.
    pub step: f64,
    /// `kᵢ` applied after the step, or `None` when no canonicalization ran.
    pub shifts: Option<Vec<i64>>,
    /// Relative change of the action caused by the shift.
    pub gauge_drift: f64,
    /// Rounding bound on the computed action at this iterate.
    pub action_noise: f64,
    /// The step was accepted below the noise floor of the previous iterate, so
    /// its action may exceed that iterate's by up to `action_noise` there.
    pub noise_limited: bool,
    pub restarted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub method: Method,
    pub status: Status,
    pub iterations: usize,
    pub final_action: ActionValue,
    pub final_residual_l2: f64,
    pub periods: Option<Vec<f64>>,
    pub records: Vec<IterationRecord>,
}

impl RunReport {
    pub fn initial_action(&self) -> f64 {
        self.records[0].action.total
    }
}

/// A seeded starting field: uniform in `[0, Pᵢ)` per component when `periods` is
/// given, otherwise `0.1·N(0, 1)`.
pub fn random_init(grid: &GridSpec, periods: Option<&[f64]>, seed: u64) -> Result<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.components();
    let values = (0..grid.len())
        .map(|j| match periods {
            Some(p) => rng.random::<f64>() * p[j % n],
            None => 0.1 * rng.sample::<f64, _>(StandardNormal),
        })
        .collect();
    Field::new(grid.clone(), values)
}

struct Point {
    u: Field,
    eval: Evaluation,
}

impl Point {
    fn new(u: Field, f: &dyn Potential) -> Result<Self> {
        let eval = evaluate(&u, f, true)?;
        Ok(Self { u, eval })
    }

    fn gradient(&self) -> &Field {
        self.eval
            .gradient
            .as_ref()
            .expect("evaluated with gradient")
    }

    fn noise_floor(&self) -> f64 {
        64.0 * f64::EPSILON * (self.eval.value.kinetic.abs() + self.eval.potential_abs)
    }
}

/// Lattice-shifts `pt` if the cadence asks for it and checks the action did not move.
fn gauge_step(
    pt: Point,
    periods: Option<&[f64]>,
    due: bool,
    f: &dyn Potential,
) -> Result<(Point, Option<Vec<i64>>, f64)> {
    let Some(periods) = periods.filter(|_| due) else {
        return Ok((pt, None, 0.0));
    };
    let (shifted, shifts) = canonicalize(&pt.u, periods)?;
    if shifts.iter().all(|k| *k == 0) {
        return Ok((pt, Some(shifts), 0.0));
    }
    let moved = Point::new(shifted, f)?;
    let before = pt.eval.value.total;
    let drift = (moved.eval.value.total - before).abs() / before.abs().max(f64::MIN_POSITIVE);
    if drift > GAUGE_TOL {
        return Err(Error::GaugeViolation { drift });
    }
    Ok((moved, Some(shifts), drift))
}

#[allow(clippy::too_many_arguments)]
fn record(
    iter: usize,
    action: ActionValue,
    pt: &Point,
    step: f64,
    shifts: Option<Vec<i64>>,
    gauge_drift: f64,
    noise_limited: bool,
    restarted: bool,
) -> IterationRecord {
    let (mean, fluct) = split_mean(&pt.u);
    IterationRecord {
        iter,
        action,
        residual_l2: l2_norm(pt.gradient()),
        derivative_norm_sq: crate::grid::stacked_diff_norm(&pt.u).powi(2),
        mean,
        fluctuation_l2: l2_norm(&fluct),
        h1_norm: h1_norm(&pt.u),
        step,
        shifts,
        gauge_drift,
        action_noise: pt.noise_floor(),
        noise_limited,
        restarted,
    }
}

struct Accepted {
    point: Point,
    step: f64,
    noise_limited: bool,
}

/// Curvature level below which an accepted step is not refined further.
const REFINE_SIGMA: f64 = 0.1;
/// Secant refinements attempted after a step is accepted.
const REFINE_ROUNDS: usize = 2;
/// Lower curvature bound `φ'(s) ≥ σφ'(0)` for steps accepted at the rounding floor.
const NOISE_SIGMA: f64 = 0.9;
/// Trials spent inside the rounding floor before the search gives up.
const NOISE_PROBES: usize = 32;

/// Backtracking along `d` from `base`, whose reference action is `phi0`.
///
/// A trial is accepted by the Armijo test while the decrease it demands is above
/// the rounding floor of the action. Below that floor the Armijo test cannot
/// tell decrease from noise; a trial is then accepted when the action has not
/// increased and the slope satisfies `σφ'(0) ≤ φ'(s) ≤ (2c₁ − 1)φ'(0)`. Trials
/// in that regime are placed near the secant zero of `φ'` rather than shrunk.
///
/// An Armijo step whose slope is still steeper than `0.1·|φ'(0)|` is refined by
/// secant steps on `φ'`, kept only when they are themselves acceptable and
/// lower the action.
fn line_search(
    base: &Point,
    phi0: f64,
    d: &Field,
    slope: f64,
    first_step: f64,
    cfg: &SolverConfig,
    f: &dyn Potential,
) -> Result<Option<Accepted>> {
    let noise = base.noise_floor();
    let c1 = cfg.armijo_c1;
    let wolfe =
        |s_slope: f64| NOISE_SIGMA * slope <= s_slope && s_slope <= (2.0 * c1 - 1.0) * slope;
    let trial_at = |s: f64| -> Result<(Accepted, f64, bool)> {
        let trial = Point::new(base.u.axpy(s, d)?, f)?;
        let phi = trial.eval.value.total;
        let trial_slope = l2_inner(trial.gradient(), d)?;
        let noise_limited = c1 * s * slope.abs() <= noise;
        let ok = if noise_limited {
            phi <= phi0 + noise && wolfe(trial_slope)
        } else {
            phi <= phi0 + c1 * s * slope
        };
        let acc = Accepted {
            point: trial,
            step: s,
            noise_limited,
        };
        Ok((acc, trial_slope, ok))
    };

    let mut s = first_step;
    let mut probes = 0;
    let (mut best, mut best_slope) = loop {
        if !(s >= MIN_STEP && s.is_finite()) {
            return Ok(None);
        }
        let (acc, s_slope, ok) = trial_at(s)?;
        if ok {
            break (acc, s_slope);
        }
        if !acc.noise_limited {
            s *= cfg.backtrack_factor;
            continue;
        }
        probes += 1;
        if probes > NOISE_PROBES {
            return Ok(None);
        }
        let target = if s_slope > slope {
            s * slope / (slope - s_slope)
        } else {
            2.0 * s
        };
        s = if wolfe(s_slope) {
            // Only rounding rejected this trial; move within the acceptable window.
            let jitter = ((probes as f64 * 0.618_033_988_749_895).fract() * 2.0 - 1.0) * 0.3;
            target * (1.0 + jitter)
        } else {
            target
        };
    };
    // Secant steps on `φ'`, which stays accurate where `φ` itself is rounding
    // noise; below the noise floor a candidate must reduce `|φ'|` instead of `φ`.
    let (mut s_prev, mut slope_prev) = (0.0, slope);
    for _ in 0..REFINE_ROUNDS {
        if best_slope.abs() <= REFINE_SIGMA * slope.abs() || best_slope <= slope_prev {
            break;
        }
        let s_new = best.step - best_slope * (best.step - s_prev) / (best_slope - slope_prev);
        if !(s_new > 0.0 && s_new.is_finite()) || s_new == best.step {
            break;
        }
        let (cand, cand_slope, ok) = trial_at(s_new.min(10.0 * best.step))?;
        let better = if cand.noise_limited {
            cand_slope.abs() < best_slope.abs()
        } else {
            cand.point.eval.value.total <= best.point.eval.value.total
        };
        if !ok || !better {
            break;
        }
        (s_prev, slope_prev) = (best.step, best_slope);
        best = cand;
        best_slope = cand_slope;
    }
    Ok(Some(best))
}

/// Descends on `φ_h` from `init`.
///
/// With `canonicalize_every > 0` the potential must declare periods; the initial
/// field is canonicalized before the first step. The run is sequential and fully
/// determined by `init` and `cfg`.
pub fn minimize(f: &dyn Potential, init: &Field, cfg: &SolverConfig) -> Result<(Field, RunReport)> {
    cfg.validate()?;
    if f.components() != init.grid().components() {
        return Err(Error::ComponentMismatch {
            expected: init.grid().components(),
            got: f.components(),
        });
    }
    let periods = f.periods().map(<[f64]>::to_vec);
    if cfg.canonicalize_every > 0 && periods.is_none() {
        return Err(Error::MissingPeriods);
    }
    let periods_ref = periods.as_deref();
    let canon_on = cfg.canonicalize_every > 0;

    let start = Point::new(init.clone(), f)?;
    let mut phi = start.eval.value;
    let (mut pt, shifts, drift) = gauge_step(start, periods_ref, canon_on, f)?;
    let mut records = vec![record(0, phi, &pt, 0.0, shifts, drift, false, false)];

    let mut direction: Option<Field> = None;
    let mut prev_grad: Option<Field> = None;
    let mut prev_step = cfg.initial_step;
    let mut prev_slope = 0.0;
    let mut iter = 0;
    let status = loop {
        let g = pt.gradient().clone();
        if l2_norm(&g) <= cfg.tol_residual {
            break Status::Converged;
        }
        if iter >= cfg.max_iters {
            break Status::MaxIters;
        }
        if stalled(&records, cfg.tol_action) {
            break Status::Stalled;
        }

        let gg = l2_inner(&g, &g)?;
        let mut restarted = false;
        let d = match (cfg.method, &direction, &prev_grad) {
            (Method::Ncg, Some(d_old), Some(g_old)) => {
                let beta = (l2_inner(&g, &g.sub(g_old)?)? / l2_inner(g_old, g_old)?).max(0.0);
                let d = d_old.scale(beta).axpy(-1.0, &g)?;
                if l2_inner(&g, &d)? < 0.0 {
                    d
                } else {
                    restarted = true;
                    g.scale(-1.0)
                }
            }
            _ => g.scale(-1.0),
        };
        let slope = if restarted || cfg.method == Method::Gd || direction.is_none() {
            -gg
        } else {
            l2_inner(&g, &d)?
        };
        let first_step = if iter == 0 {
            cfg.initial_step
        } else {
            match cfg.method {
                Method::Gd => 2.0 * prev_step,
                Method::Ncg => prev_step * prev_slope / slope,
            }
            .min(cfg.initial_step)
        };

        let Some(acc) = line_search(&pt, phi.total, &d, slope, first_step, cfg, f)? else {
            break Status::LineSearchFailed;
        };
        iter += 1;
        phi = acc.point.eval.value;
        let due = canon_on && iter % cfg.canonicalize_every == 0;
        let (next, shifts, drift) = gauge_step(acc.point, periods_ref, due, f)?;
        records.push(record(
            iter,
            phi,
            &next,
            acc.step,
            shifts,
            drift,
            acc.noise_limited,
            restarted,
        ));
        prev_grad = Some(g);
        direction = Some(d);
        prev_step = acc.step;
        prev_slope = slope;
        pt = next;
    };

    let report = RunReport {
        method: cfg.method,
        status,
        iterations: iter,
        final_action: phi,
        final_residual_l2: records.last().expect("initial record").residual_l2,
        periods,
        records,
    };
    Ok((pt.u, report))
}

/// Relative decrease over the last five steps, counted only when none of them
/// was accepted at the rounding floor.
fn stalled(records: &[IterationRecord], tol: f64) -> bool {
    let len = records.len();
    if len <= STALL_WINDOW {
        return false;
    }
    let window = &records[len - STALL_WINDOW..];
    if window.iter().any(|r| r.noise_limited) {
        return false;
    }
    let old = records[len - 1 - STALL_WINDOW].action.total;
    let new = records[len - 1].action.total;
    (old - new) / new.abs().max(f64::MIN_POSITIVE) < tol
}
