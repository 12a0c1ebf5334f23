//! Post-hoc certificates for a field: the Euler–Lagrange residual, matching of
//! values and first differences on opposite faces, and the Wirtinger inequality.

use serde::Serialize;

use crate::action::action_gradient;
use crate::error::{Error, Result};
use crate::grid::{l2_norm, laplacian, split_mean, stacked_diff_norm, Field};
use crate::io::{closed_indices, ClosedField};
use crate::potential::Potential;

/// Tolerance for `R + G = 0`, relative to the magnitude of the stencil terms.
const CROSS_CHECK_TOL: f64 = 1e-13;

/// Norms of `R = Δ_h u − ∇ₓF(t, u)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualNorms {
    pub l2: f64,
    pub linf: f64,
    /// `‖R + G‖_∞ / scale` against the action gradient `G`, computed separately.
    pub gradient_mismatch: f64,
    pub gradient_consistent: bool,
}

/// The residual field and its norms.
///
/// `R` is assembled from the three-point Laplacian; the action gradient comes
/// from the adjoint of the forward difference. Both are computed and compared.
pub fn el_residual(u: &Field, f: &dyn Potential) -> Result<(Field, ResidualNorms)> {
    let grid = u.grid();
    let n = grid.components();
    if f.components() != n {
        return Err(Error::ComponentMismatch {
            expected: n,
            got: f.components(),
        });
    }
    let lap = laplacian(u);
    let mut values = lap.into_values();
    let mut grad = vec![0.0; n];
    let mut grad_max = 0.0f64;
    for node in 0..grid.node_count() {
        let t = grid.coords(node);
        f.gradient(&t, u.at(node), &mut grad)
            .map_err(|source| Error::PotentialDomain {
                node: grid.multi_index(node),
                t,
                source,
            })?;
        for i in 0..n {
            values[node * n + i] -= grad[i];
            grad_max = grad_max.max(grad[i].abs());
        }
    }
    let r = Field::new(grid.clone(), values)?;

    let g = action_gradient(u, f)?;
    let stencil: f64 = grid.spacings().iter().map(|h| 4.0 / (h * h)).sum();
    let scale = 1f64.max(grad_max).max(u.max_abs() * stencil);
    let mismatch = r.add(&g)?.max_abs() / scale;
    let norms = ResidualNorms {
        l2: l2_norm(&r),
        linf: r.max_abs(),
        gradient_mismatch: mismatch,
        gradient_consistent: mismatch <= CROSS_CHECK_TOL,
    };
    Ok((r, norms))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WirtingerCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub pass: bool,
}

/// `‖ũ‖_{L²} ≤ C_h ‖Dũ‖_{L²}` for the fluctuation `ũ = u − ū`.
pub fn wirtinger_check(u: &Field) -> WirtingerCheck {
    let (_, fluct) = split_mean(u);
    let constant = u.grid().wirtinger_constant();
    let lhs = l2_norm(&fluct);
    let rhs = constant * stacked_diff_norm(&fluct);
    WirtingerCheck {
        lhs,
        rhs,
        constant,
        pass: lhs <= rhs * (1.0 + 1e-12),
    }
}

/// Face mismatches along one axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisBoundary {
    pub axis: usize,
    /// `max |u(tᵅ = 0) − u(tᵅ = Tᵅ)|`.
    pub value_mismatch: f64,
    /// Largest mismatch of one-sided difference quotients at matching offsets.
    pub derivative_mismatch: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryReport {
    pub axes: Vec<AxisBoundary>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compares the faces `tᵅ = 0` and `tᵅ = Tᵅ` of a closed-grid import.
///
/// For the derivative condition, every forward quotient along an axis `β ≠ α`
/// is compared between the two faces, and the normal quotient
/// `(u(1) − u(0))/hᵅ` on the low face is compared with `(u(1) − u(Nᵅ))/hᵅ`, the
/// quotient leaving the high face into the periodic continuation.
pub fn boundary_check(data: &ClosedField) -> BoundaryReport {
    let grid = data.grid();
    let dims = data.closed_nodes();
    let n = grid.components();
    let spacings = grid.spacings();
    let tolerance = 1e-9 * (1.0 + data.max_abs());
    let mut axes = Vec::with_capacity(dims.len());
    for axis in 0..dims.len() {
        let last = dims[axis] - 1;
        let mut face_dims = dims.clone();
        face_dims[axis] = 1;
        let (mut value_mismatch, mut derivative_mismatch) = (0.0f64, 0.0f64);
        for idx in closed_indices(&face_dims) {
            let at = |k: usize, shift: Option<usize>| {
                let mut i = idx.clone();
                i[axis] = k;
                if let Some(b) = shift {
                    i[b] += 1;
                }
                data.at(&i).to_vec()
            };
            let (lo, hi) = (at(0, None), at(last, None));
            let lo_next = at(1, None);
            for c in 0..n {
                value_mismatch = value_mismatch.max((lo[c] - hi[c]).abs());
                let normal_lo = (lo_next[c] - lo[c]) / spacings[axis];
                let normal_hi = (lo_next[c] - hi[c]) / spacings[axis];
                derivative_mismatch = derivative_mismatch.max((normal_lo - normal_hi).abs());
            }
            for b in (0..dims.len()).filter(|b| *b != axis && idx[*b] + 1 < dims[*b]) {
                let (lo_b, hi_b) = (at(0, Some(b)), at(last, Some(b)));
                for c in 0..n {
                    let q_lo = (lo_b[c] - lo[c]) / spacings[b];
                    let q_hi = (hi_b[c] - hi[c]) / spacings[b];
                    derivative_mismatch = derivative_mismatch.max((q_lo - q_hi).abs());
                }
            }
        }
        axes.push(AxisBoundary {
            axis,
            value_mismatch,
            derivative_mismatch,
            pass: value_mismatch <= tolerance && derivative_mismatch <= tolerance,
        });
    }
    let pass = axes.iter().all(|a| a.pass);
    BoundaryReport {
        axes,
        tolerance,
        pass,
    }
}

/// Residual, boundary and Wirtinger results for one field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub residual: ResidualNorms,
    pub tol_residual: f64,
    pub residual_pass: bool,
    pub boundary: BoundaryReport,
    pub wirtinger: WirtingerCheck,
}

impl Certificate {
    pub fn pass(&self) -> bool {
        self.residual_pass && self.boundary.pass && self.wirtinger.pass
    }
}

/// All three certificates; the boundary check runs on the closed export of `u`.
pub fn certify(u: &Field, f: &dyn Potential, tol_residual: f64) -> Result<Certificate> {
    let (_, residual) = el_residual(u, f)?;
    Ok(Certificate {
        residual_pass: residual.l2 <= tol_residual,
        tol_residual,
        residual,
        boundary: boundary_check(&ClosedField::from_field(u)),
        wirtinger: wirtinger_check(u),
    })
}
