//! The discrete action `φ_h(u) = Vol_cell Σ_k [½ Σ_α |D_α u(k)|² + F(t_k, u(k))]` and
//! its exact `L²` gradient.
//!
//! Summation by parts on the periodic grid turns the kinetic pairing
//! `Σ (D_α u, D_α v)` into `Σ (D_αᵀ D_α u, v)`, and `Σ_α D_αᵀ D_α = −Δ_h` is the
//! standard stencil. The gradient of the discrete action is therefore exactly
//! the discrete Euler–Lagrange residual `−Δ_h u + ∇F(t, u)`, with no separate
//! discretization of the PDE.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{forward_diff, l2_norm, pairwise_sum, pairwise_sum_by, stacked_diff_norm, Field};
use crate::potential::{GrowthEnvelope, Potential};

/// Node counts at or above this evaluate the potential in parallel.
const PARALLEL_NODES: usize = 4096;

/// `total = kinetic + potential`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActionValue {
    pub total: f64,
    pub kinetic: f64,
    pub potential: f64,
}

/// Action, optional gradient, and `Vol_cell Σ|F|` (the rounding scale of the potential sum).
pub(crate) struct Evaluation {
    pub value: ActionValue,
    pub gradient: Option<Field>,
    pub potential_abs: f64,
}

pub fn action(u: &Field, f: &dyn Potential) -> Result<ActionValue> {
    Ok(evaluate(u, f, false)?.value)
}

/// The `L²` gradient `G = −Δ_h u + ∇ₓF(t, u)`: `⟨G, v⟩_{L²}` is the derivative of
/// `φ_h` at `u` along `v`.
pub fn action_gradient(u: &Field, f: &dyn Potential) -> Result<Field> {
    Ok(evaluate(u, f, true)?.gradient.expect("gradient requested"))
}

/// Action and gradient from one sweep over the potential.
pub fn action_and_gradient(u: &Field, f: &dyn Potential) -> Result<(ActionValue, Field)> {
    let e = evaluate(u, f, true)?;
    Ok((e.value, e.gradient.expect("gradient requested")))
}

fn check_components(u: &Field, f: &dyn Potential) -> Result<()> {
    let n = u.grid().components();
    if f.components() != n {
        return Err(Error::ComponentMismatch {
            expected: n,
            got: f.components(),
        });
    }
    Ok(())
}

pub(crate) fn evaluate(u: &Field, f: &dyn Potential, with_gradient: bool) -> Result<Evaluation> {
    check_components(u, f)?;
    let grid = u.grid();
    let n = grid.components();
    let count = grid.node_count();
    let vol = grid.cell_volume();

    let mut values = vec![0.0; count];
    let mut grads = vec![0.0; if with_gradient { count * n } else { 0 }];
    let node_eval = |node: usize, value: &mut f64, grad: &mut [f64]| -> Result<()> {
        let t = grid.coords(node);
        let x = u.at(node);
        let r = if with_gradient {
            f.value_and_gradient(&t, x, grad)
        } else {
            f.value(&t, x)
        };
        *value = r.map_err(|source| Error::PotentialDomain {
            node: grid.multi_index(node),
            t,
            source,
        })?;
        Ok(())
    };
    if count >= PARALLEL_NODES {
        if with_gradient {
            values
                .par_iter_mut()
                .zip(grads.par_chunks_mut(n))
                .enumerate()
                .try_for_each(|(node, (v, g))| node_eval(node, v, g))?;
        } else {
            values
                .par_iter_mut()
                .enumerate()
                .try_for_each(|(node, v)| node_eval(node, v, &mut []))?;
        }
    } else if with_gradient {
        for (node, (v, g)) in values.iter_mut().zip(grads.chunks_mut(n)).enumerate() {
            node_eval(node, v, g)?;
        }
    } else {
        for (node, v) in values.iter_mut().enumerate() {
            node_eval(node, v, &mut [])?;
        }
    }

    let potential = vol * pairwise_sum(&values);
    let potential_abs = vol * pairwise_sum_by(count, |k| values[k].abs());
    let kinetic = vol * kinetic_density_sum(u);
    let value = ActionValue {
        total: kinetic + potential,
        kinetic,
        potential,
    };

    let gradient = if with_gradient {
        let mut g = grads;
        add_neg_laplacian(u, &mut g)?;
        let field = Field::new(grid.clone(), g)?;
        Some(field)
    } else {
        None
    };
    if !value.total.is_finite() {
        return Err(Error::NonFinite { index: 0 });
    }
    Ok(Evaluation {
        value,
        gradient,
        potential_abs,
    })
}

/// `Σ_{k,i} ½ Σ_α ((u(k+e_α) − u(k))ⁱ / h_α)²` in flat order.
fn kinetic_density_sum(u: &Field) -> f64 {
    let grid = u.grid();
    let n = grid.components();
    let inv_h: Vec<f64> = grid.spacings().iter().map(|h| 1.0 / h).collect();
    let vals = u.values();
    pairwise_sum_by(vals.len(), |j| {
        let node = j / n;
        let i = j % n;
        0.5 * (0..grid.dims())
            .map(|a| {
                let d = (vals[grid.neighbor(node, a, true) * n + i] - vals[j]) * inv_h[a];
                d * d
            })
            .sum::<f64>()
    })
}

/// `out += Σ_α D_αᵀ D_α u`, with `(D_αᵀ w)(k) = (w(k − e_α) − w(k)) / h_α`.
fn add_neg_laplacian(u: &Field, out: &mut [f64]) -> Result<()> {
    let grid = u.grid();
    let n = grid.components();
    for axis in 0..grid.dims() {
        let d = forward_diff(u, axis)?;
        let dv = d.values();
        let inv_h = 1.0 / grid.spacing(axis);
        for node in 0..grid.node_count() {
            let prev = grid.neighbor(node, axis, false);
            for i in 0..n {
                out[node * n + i] += (dv[prev * n + i] - dv[node * n + i]) * inv_h;
            }
        }
    }
    Ok(())
}

/// Both sides of the continuity estimate for `φ` between two fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuityBound {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `|φ(u) − φ(v)| ≤ ½(‖Du‖ + ‖Dv‖)‖Du − Dv‖ + (M‖v‖ + g_max Vol^{1/2})‖u − v‖ + M‖u − v‖²`,
/// all norms discrete `L²`, `D` the stacked forward difference. Valid whenever
/// `|∇F(t,x)| ≤ M|x| + g_max`.
pub fn continuity_bound(
    u: &Field,
    v: &Field,
    f: &dyn Potential,
    env: &GrowthEnvelope,
) -> Result<ContinuityBound> {
    u.check_same_grid(v)?;
    let diff = u.sub(v)?;
    let lhs = (action(u, f)?.total - action(v, f)?.total).abs();
    let du = stacked_diff_norm(u);
    let dv = stacked_diff_norm(v);
    let d_diff = stacked_diff_norm(&diff);
    let delta = l2_norm(&diff);
    let vol_sqrt = u.grid().volume().sqrt();
    let rhs = 0.5 * (du + dv) * d_diff
        + (env.m * l2_norm(v) + env.g_max * vol_sqrt) * delta
        + env.m * delta * delta;
    Ok(ContinuityBound {
        lhs,
        rhs,
        pass: lhs <= rhs * (1.0 + 1e-12),
    })
}
