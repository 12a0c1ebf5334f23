//! Potentials `F(t, x)` and sampled checks of the hypotheses placed on them.
//!
//! The existence argument for periodic minimizers asks for a potential that is
//! positive, periodic in each space direction, and whose gradient grows at most
//! linearly. None of these can be decided symbolically for an arbitrary user
//! potential, so each is checked by deterministic seeded sampling: a check can
//! falsify a hypothesis, never prove it.

mod builtin;
mod checks;

pub use builtin::{CosineLattice, LinearForcing, ShiftedQuadratic};
pub use checks::{
    check_grad_consistency, check_gradient_growth, check_periodicity, check_positivity,
    check_value_growth, CheckReport, SampleSpec,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::DomainError;

/// A potential `F: T₀ × Rⁿ → R` with its gradient in `x`.
pub trait Potential: Send + Sync {
    /// Number of space components `n`.
    fn components(&self) -> usize;

    fn value(&self, t: &[f64], x: &[f64]) -> Result<f64, DomainError>;

    /// Writes `∇ₓF(t, x)` into `out`.
    fn gradient(&self, t: &[f64], x: &[f64], out: &mut [f64]) -> Result<(), DomainError>;

    fn value_and_gradient(
        &self,
        t: &[f64],
        x: &[f64],
        out: &mut [f64],
    ) -> Result<f64, DomainError> {
        self.gradient(t, x, out)?;
        self.value(t, x)
    }

    /// Declared space periods `Pᵢ`, if any.
    fn periods(&self) -> Option<&[f64]> {
        None
    }

    /// Whether the potential is meant to satisfy `F > 0`.
    fn claims_positive(&self) -> bool {
        true
    }

    /// Declared growth envelope, if any.
    fn growth(&self) -> Option<GrowthEnvelope> {
        None
    }
}

/// Growth data for a potential: `|∇F(t,x)| ≤ M|x| + g(t)` with `g ≤ g_max`, and
/// `|F(t,x)|, |∇F(t,x)| ≤ a(|x|)·b(t)` with `a(s) ≤ a0 + a_slope·s` and `b ≤ b_max`.
///
/// `b_max = 0` means no value envelope is declared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthEnvelope {
    pub m: f64,
    pub g_max: f64,
    pub a0: f64,
    pub a_slope: f64,
    pub b_max: f64,
}

impl GrowthEnvelope {
    pub fn new(m: f64, g_max: f64, a0: f64, a_slope: f64, b_max: f64) -> Result<Self> {
        let env = Self {
            m,
            g_max,
            a0,
            a_slope,
            b_max,
        };
        let fields = [
            ("M", m),
            ("g_max", g_max),
            ("a0", a0),
            ("a_slope", a_slope),
            ("b_max", b_max),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidPotential(format!(
                "growth envelope field {name} must be finite and nonnegative, got {v}"
            )));
        }
        Ok(env)
    }

    /// Only the gradient bound `|∇F| ≤ M|x| + g_max`.
    pub fn gradient_only(m: f64, g_max: f64) -> Result<Self> {
        Self::new(m, g_max, 0.0, 0.0, 0.0)
    }

    pub fn has_value_bound(&self) -> bool {
        self.b_max > 0.0
    }
}

pub(crate) fn validate_periods(periods: &[f64], n: usize) -> Result<()> {
    if periods.len() != n {
        return Err(Error::InvalidPotential(format!(
            "{} periods declared for {n} components",
            periods.len()
        )));
    }
    if let Some(p) = periods.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(Error::InvalidPotential(format!(
            "periods must be positive and finite, got {p}"
        )));
    }
    Ok(())
}
