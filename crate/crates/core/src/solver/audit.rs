use serde::Serialize;

use super::RunReport;
use crate::grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

/// One audited bound over all recorded iterates.
///
/// `worst_margin` is `max_k (lhs_k − rhs_k)`; it is negative when the bound holds
/// with room to spare. `worst_iter` is the iterate where that maximum occurs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub verdict: Verdict,
    pub worst_margin: f64,
    pub worst_iter: Option<usize>,
    pub violations: usize,
    pub note: String,
}

impl BoundCheck {
    fn skipped(name: &str, note: &str) -> Self {
        Self {
            name: name.to_string(),
            verdict: Verdict::Skipped,
            worst_margin: f64::NAN,
            worst_iter: None,
            violations: 0,
            note: note.to_string(),
        }
    }

    /// `pairs` yields `(iter, lhs, rhs)`; a pair fails when `lhs > rhs + slack(rhs)`.
    fn evaluate(
        name: &str,
        note: String,
        pairs: impl Iterator<Item = (usize, f64, f64)>,
        slack: impl Fn(f64) -> f64,
    ) -> Self {
        let mut worst = f64::NEG_INFINITY;
        let mut worst_iter = None;
        let mut violations = 0;
        for (iter, lhs, rhs) in pairs {
            let margin = lhs - rhs;
            if margin > worst || worst_iter.is_none() {
                worst = margin;
                worst_iter = Some(iter);
            }
            if lhs > rhs + slack(rhs) {
                violations += 1;
            }
        }
        Self {
            name: name.to_string(),
            verdict: if violations == 0 {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            worst_margin: worst,
            worst_iter,
            violations,
            note,
        }
    }
}

/// Verdicts for the a-priori bounds along a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundAudit {
    /// Upper bound used for the Dirichlet energy, `φ(u₀) − Vol·F_floor`.
    pub energy_bound: Option<f64>,
    pub wirtinger_constant: f64,
    pub dirichlet: BoundCheck,
    pub wirtinger: BoundCheck,
    pub cell: BoundCheck,
    pub boundedness: BoundCheck,
}

impl BoundAudit {
    pub fn checks(&self) -> [&BoundCheck; 4] {
        [
            &self.dirichlet,
            &self.wirtinger,
            &self.cell,
            &self.boundedness,
        ]
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.verdict != Verdict::Fail)
    }
}

/// Audits every recorded iterate of `report`:
///
/// * `dirichlet`: `½‖Du_k‖² ≤ φ(u₀) − Vol·F_floor`,
/// * `wirtinger`: `‖ũ_k‖ ≤ C_h‖Du_k‖`,
/// * `cell`: `0 ≤ ū_kⁱ ≤ Pᵢ` after every canonicalization,
/// * `boundedness`: `‖u_k‖_{H¹} ≤ (2(1 + C_h²)φ(u₀) + n·max Pᵢ²·Vol)^{1/2}`.
///
/// `potential_floor` is a known lower bound for `F`; pass `None` when the
/// potential is not bounded below, which skips the bounds that depend on it.
pub fn check_minimizing_bounds(
    report: &RunReport,
    grid: &GridSpec,
    potential_floor: Option<f64>,
) -> BoundAudit {
    let c_h = grid.wirtinger_constant();
    let vol = grid.volume();
    let recs = &report.records;
    let phi0 = report.initial_action();
    let rel = |rhs: f64| 1e-12 * rhs.abs().max(f64::MIN_POSITIVE);

    let energy_bound = potential_floor.map(|floor| phi0 - vol * floor);
    let dirichlet = match energy_bound {
        Some(bound) => BoundCheck::evaluate(
            "dirichlet_energy",
            format!("bound {bound:e}"),
            recs.iter()
                .map(|r| (r.iter, 0.5 * r.derivative_norm_sq, bound)),
            |rhs| 1e-12 * rhs.abs().max(phi0.abs()),
        ),
        None => BoundCheck::skipped("dirichlet_energy", "potential has no known floor"),
    };

    let wirtinger = BoundCheck::evaluate(
        "wirtinger",
        format!("C_h = {c_h:e}"),
        recs.iter()
            .map(|r| (r.iter, r.fluctuation_l2, c_h * r.derivative_norm_sq.sqrt())),
        |rhs| 1e-12 * rhs + 1e-15,
    );

    let cell = match &report.periods {
        Some(periods) if recs.iter().any(|r| r.shifts.is_some()) => {
            let pairs = recs.iter().filter(|r| r.shifts.is_some()).flat_map(|r| {
                r.mean.iter().zip(periods).map(move |(m, p)| {
                    // Distance outside [0, P]; zero inside.
                    (r.iter, (-m).max(m - p).max(0.0), 0.0)
                })
            });
            let ulp = periods.iter().fold(0.0f64, |a, p| a.max(*p)) * 4.0 * f64::EPSILON;
            BoundCheck::evaluate("fundamental_cell", String::new(), pairs, |_| ulp)
        }
        _ => BoundCheck::skipped("fundamental_cell", "no canonicalization recorded"),
    };

    let boundedness = match (&report.periods, potential_floor) {
        (Some(periods), Some(floor)) if floor >= 0.0 && recs.iter().any(|r| r.shifts.is_some()) => {
            let n = grid.components() as f64;
            let max_p = periods.iter().fold(0.0f64, |a, p| a.max(*p));
            let bound = (2.0 * (1.0 + c_h * c_h) * phi0 + n * max_p * max_p * vol).sqrt();
            BoundCheck::evaluate(
                "h1_boundedness",
                format!("bound {bound:e}"),
                recs.iter().map(|r| (r.iter, r.h1_norm, bound)),
                rel,
            )
        }
        _ => BoundCheck::skipped(
            "h1_boundedness",
            "needs periods, canonicalization and a nonnegative potential",
        ),
    };

    BoundAudit {
        energy_bound,
        wirtinger_constant: c_h,
        dirichlet,
        wirtinger,
        cell,
        boundedness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::ActionValue;
    use crate::solver::{IterationRecord, Method, Status};

    fn report(mean: f64) -> RunReport {
        let action = ActionValue {
            total: 1.0,
            kinetic: 0.0,
            potential: 1.0,
        };
        RunReport {
            method: Method::Gd,
            status: Status::Converged,
            iterations: 0,
            final_action: action,
            final_residual_l2: 0.0,
            periods: Some(vec![2.0]),
            records: vec![IterationRecord {
                iter: 0,
                action,
                residual_l2: 0.0,
                derivative_norm_sq: 0.0,
                mean: vec![mean],
                fluctuation_l2: 0.0,
                h1_norm: mean.abs(),
                step: 0.0,
                shifts: Some(vec![0]),
                gauge_drift: 0.0,
                action_noise: 0.0,
                noise_limited: false,
                restarted: false,
            }],
        }
    }

    #[test]
    fn fabricated_mean_outside_cell() {
        let g = GridSpec::new(vec![1.0], vec![4], 1).unwrap();
        let audit = check_minimizing_bounds(&report(3.0), &g, Some(0.0));
        assert_eq!(audit.cell.verdict, Verdict::Fail);
        assert_eq!(audit.cell.worst_margin, 1.0);
        assert!(!audit.passed());
        let audit = check_minimizing_bounds(&report(1.0), &g, Some(0.0));
        assert_eq!(audit.cell.verdict, Verdict::Pass);
        assert!(audit.passed());
    }

    #[test]
    fn no_floor_skips_energy() {
        let g = GridSpec::new(vec![1.0], vec![4], 1).unwrap();
        let audit = check_minimizing_bounds(&report(1.0), &g, None);
        assert_eq!(audit.dirichlet.verdict, Verdict::Skipped);
        assert_eq!(audit.boundedness.verdict, Verdict::Skipped);
        assert!(audit.passed());
    }
}
