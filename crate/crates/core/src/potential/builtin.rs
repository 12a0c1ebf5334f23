use std::f64::consts::PI;

use super::{validate_periods, GrowthEnvelope, Potential};
use crate::error::{Error, Result};
use crate::expr::DomainError;
use crate::grid::{l2_norm, mean, Field};

/// `F(t,x) = ε + (1 + μ cos(2π t^{α₀}/T^{α₀})) Σᵢ Aᵢ (1 − cos(2π xⁱ/Pᵢ))`.
///
/// A multi-component pendulum potential. It is `Pᵢ`-periodic in each `xⁱ`,
/// bounded below by `ε`, and its gradient is bounded.
#[derive(Debug, Clone)]
pub struct CosineLattice {
    amplitudes: Vec<f64>,
    periods: Vec<f64>,
    floor: f64,
    modulation: Option<Modulation>,
}

#[derive(Debug, Clone, Copy)]
struct Modulation {
    depth: f64,
    axis: usize,
    extent: f64,
}

impl CosineLattice {
    pub fn new(amplitudes: Vec<f64>, periods: Vec<f64>, floor: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidPotential("no amplitudes given".into()));
        }
        validate_periods(&periods, amplitudes.len())?;
        if let Some(a) = amplitudes.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidPotential(format!(
                "amplitudes must be positive, got {a}"
            )));
        }
        if !(floor.is_finite() && floor > 0.0) {
            return Err(Error::InvalidPotential(format!(
                "floor must be positive, got {floor}"
            )));
        }
        Ok(Self {
            amplitudes,
            periods,
            floor,
            modulation: None,
        })
    }

    /// Modulates the lattice by `1 + μ cos(2π t^{axis} / extent)`; `|μ| < 1`.
    pub fn with_modulation(mut self, depth: f64, axis: usize, extent: f64) -> Result<Self> {
        if !(depth.is_finite() && depth.abs() < 1.0) {
            return Err(Error::InvalidPotential(format!(
                "modulation depth must lie in (-1, 1), got {depth}"
            )));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::InvalidPotential(format!(
                "modulation extent must be positive, got {extent}"
            )));
        }
        self.modulation = (depth != 0.0).then_some(Modulation {
            depth,
            axis,
            extent,
        });
        Ok(self)
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    fn factor(&self, t: &[f64]) -> f64 {
        match self.modulation {
            Some(m) => 1.0 + m.depth * (2.0 * PI * t[m.axis] / m.extent).cos(),
            None => 1.0,
        }
    }

    fn depth(&self) -> f64 {
        self.modulation.map_or(0.0, |m| m.depth.abs())
    }
}

impl Potential for CosineLattice {
    fn components(&self) -> usize {
        self.amplitudes.len()
    }

    fn value(&self, t: &[f64], x: &[f64]) -> Result<f64, DomainError> {
        let sum: f64 = self
            .amplitudes
            .iter()
            .zip(&self.periods)
            .zip(x)
            .map(|((a, p), xi)| a * (1.0 - (2.0 * PI * xi / p).cos()))
            .sum();
        Ok(self.floor + self.factor(t) * sum)
    }

    fn gradient(&self, t: &[f64], x: &[f64], out: &mut [f64]) -> Result<(), DomainError> {
        let factor = self.factor(t);
        for (((o, a), p), xi) in out
            .iter_mut()
            .zip(&self.amplitudes)
            .zip(&self.periods)
            .zip(x)
        {
            let k = 2.0 * PI / p;
            *o = factor * a * k * (k * xi).sin();
        }
        Ok(())
    }

    fn periods(&self) -> Option<&[f64]> {
        Some(&self.periods)
    }

    /// `M = 0`, `g_max = (1+|μ|)·|(2πAᵢ/Pᵢ)ᵢ|`; value bound `a0 = ε + 2(1+|μ|)ΣAᵢ`, `b = 1`.
    fn growth(&self) -> Option<GrowthEnvelope> {
        let scale = 1.0 + self.depth();
        let g_max = scale
            * self
                .amplitudes
                .iter()
                .zip(&self.periods)
                .map(|(a, p)| (2.0 * PI * a / p).powi(2))
                .sum::<f64>()
                .sqrt();
        let a0 = (self.floor + 2.0 * scale * self.amplitudes.iter().sum::<f64>()).max(g_max);
        GrowthEnvelope::new(0.0, g_max, a0, 0.0, 1.0).ok()
    }
}

/// `F(t,x) = ½|x − a|² + ε`. Strictly convex, not periodic.
#[derive(Debug, Clone)]
pub struct ShiftedQuadratic {
    center: Vec<f64>,
    floor: f64,
}

impl ShiftedQuadratic {
    pub fn new(center: Vec<f64>, floor: f64) -> Result<Self> {
        if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPotential(
                "center must be a nonempty finite vector".into(),
            ));
        }
        if !(floor.is_finite() && floor > 0.0) {
            return Err(Error::InvalidPotential(format!(
                "floor must be positive, got {floor}"
            )));
        }
        Ok(Self { center, floor })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }
}

impl Potential for ShiftedQuadratic {
    fn components(&self) -> usize {
        self.center.len()
    }

    fn value(&self, _t: &[f64], x: &[f64]) -> Result<f64, DomainError> {
        let sq: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(x, a)| (x - a).powi(2))
            .sum();
        Ok(0.5 * sq + self.floor)
    }

    fn gradient(&self, _t: &[f64], x: &[f64], out: &mut [f64]) -> Result<(), DomainError> {
        for ((o, x), a) in out.iter_mut().zip(x).zip(&self.center) {
            *o = x - a;
        }
        Ok(())
    }

    /// `|x − a| ≤ |x| + |a|`. The value grows quadratically, so no value envelope.
    fn growth(&self) -> Option<GrowthEnvelope> {
        let norm = self.center.iter().map(|a| a * a).sum::<f64>().sqrt();
        GrowthEnvelope::gradient_only(1.0, norm).ok()
    }
}

/// `F(t,x) = −(f(t), x)` for a zero-mean forcing field `f` sampled on the grid.
///
/// Its minimizers solve the linear problem `Δu = −f`, which makes it the
/// manufactured-solution workhorse. It is unbounded below, so it deliberately
/// violates positivity. Off-grid times are mapped to the nearest node.
#[derive(Debug, Clone)]
pub struct LinearForcing {
    forcing: Field,
}

impl LinearForcing {
    pub fn new(forcing: Field) -> Result<Self> {
        let norm = l2_norm(&forcing);
        for (component, m) in mean(&forcing).into_iter().enumerate() {
            if m.abs() > 1e-10 * norm.max(f64::MIN_POSITIVE) {
                return Err(Error::NonZeroMean { component, mean: m });
            }
        }
        Ok(Self { forcing })
    }

    pub fn forcing(&self) -> &Field {
        &self.forcing
    }
}

impl Potential for LinearForcing {
    fn components(&self) -> usize {
        self.forcing.grid().components()
    }

    fn value(&self, t: &[f64], x: &[f64]) -> Result<f64, DomainError> {
        let f = self.forcing.at(self.forcing.grid().nearest_node(t));
        Ok(-f.iter().zip(x).map(|(f, x)| f * x).sum::<f64>())
    }

    fn gradient(&self, t: &[f64], _x: &[f64], out: &mut [f64]) -> Result<(), DomainError> {
        let f = self.forcing.at(self.forcing.grid().nearest_node(t));
        for (o, f) in out.iter_mut().zip(f) {
            *o = -f;
        }
        Ok(())
    }

    fn claims_positive(&self) -> bool {
        false
    }

    fn growth(&self) -> Option<GrowthEnvelope> {
        let g_max = (0..self.forcing.grid().node_count())
            .map(|node| {
                self.forcing
                    .at(node)
                    .iter()
                    .map(|f| f * f)
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        GrowthEnvelope::gradient_only(0.0, g_max).ok()
    }
}
