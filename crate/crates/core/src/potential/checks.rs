use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{GrowthEnvelope, Potential};
use crate::error::{Error, Result};

/// Where and how densely a check samples `(t, x)`.
///
/// Times are uniform in `[0, Tᵅ)`; space points are uniform in `[−radius, radius]ⁿ`.
/// The first sample is always `(0, 0)`, followed by any anchors at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
    pub extents: Vec<f64>,
    pub radius: f64,
    pub anchors: Vec<Vec<f64>>,
}

impl SampleSpec {
    pub fn new(count: usize, seed: u64, extents: Vec<f64>) -> Self {
        Self {
            count,
            seed,
            extents,
            radius: 10.0,
            anchors: Vec::new(),
        }
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn with_anchor(mut self, x: Vec<f64>) -> Self {
        self.anchors.push(x);
        self
    }

    /// The sample points, deterministic in `seed`.
    pub fn points(&self, n: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
        let p = self.extents.len();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(self.count + self.anchors.len() + 1);
        out.push((vec![0.0; p], vec![0.0; n]));
        for a in &self.anchors {
            out.push((vec![0.0; p], a.clone()));
        }
        for _ in 0..self.count {
            let t = self
                .extents
                .iter()
                .map(|e| rng.random::<f64>() * e)
                .collect();
            let x = (0..n)
                .map(|_| self.radius * (2.0 * rng.random::<f64>() - 1.0))
                .collect();
            out.push((t, x));
        }
        out
    }
}

/// Outcome of one sampled hypothesis check.
///
/// `worst` is the check's figure of merit: the largest deviation for
/// periodicity and gradient consistency, the smallest value for positivity, and
/// the largest `lhs − rhs` margin for growth bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub samples: usize,
    pub violations: usize,
    pub worst: f64,
    pub detail: String,
}

impl CheckReport {
    fn finish(name: &str, samples: usize, violations: usize, worst: f64, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed: violations == 0,
            samples,
            violations,
            worst,
            detail,
        }
    }
}

fn note_error(detail: &mut String, msg: impl std::fmt::Display) {
    if detail.is_empty() {
        *detail = format!("evaluation failed: {msg}");
    }
}

/// `F(t, x + Pᵢeᵢ) = F(t, x)` to `1e-9·(1 + |F|)` on every sample and axis.
pub fn check_periodicity(f: &dyn Potential, sampler: &SampleSpec) -> Result<CheckReport> {
    let periods = f.periods().ok_or(Error::MissingPeriods)?;
    let n = f.components();
    let points = sampler.points(n);
    let (mut violations, mut worst, mut detail) = (0, 0.0f64, String::new());
    for (t, x) in &points {
        let base = match f.value(t, x) {
            Ok(v) => v,
            Err(e) => {
                violations += 1;
                note_error(&mut detail, e);
                continue;
            }
        };
        for (i, p) in periods.iter().enumerate() {
            let mut shifted = x.clone();
            shifted[i] += p;
            match f.value(t, &shifted) {
                Ok(v) => {
                    let dev = (v - base).abs();
                    worst = worst.max(dev);
                    if dev > 1e-9 * (1.0 + base.abs()) {
                        violations += 1;
                    }
                }
                Err(e) => {
                    violations += 1;
                    note_error(&mut detail, e);
                }
            }
        }
    }
    Ok(CheckReport::finish(
        "periodicity",
        points.len(),
        violations,
        worst,
        detail,
    ))
}

/// `F(t, x) > 0` on every sample. `worst` is the smallest sampled value.
pub fn check_positivity(f: &dyn Potential, sampler: &SampleSpec) -> CheckReport {
    let points = sampler.points(f.components());
    let (mut violations, mut min, mut detail) = (0, f64::INFINITY, String::new());
    for (t, x) in &points {
        match f.value(t, x) {
            Ok(v) => {
                min = min.min(v);
                if v <= 0.0 {
                    violations += 1;
                }
            }
            Err(e) => {
                violations += 1;
                note_error(&mut detail, e);
            }
        }
    }
    CheckReport::finish("positivity", points.len(), violations, min, detail)
}

const GROWTH_SLACK: f64 = 1e-12;

/// `|∇F(t,x)| ≤ M|x| + g_max` on every sample, with `1e-12` relative slack for rounding.
pub fn check_gradient_growth(
    f: &dyn Potential,
    env: &GrowthEnvelope,
    sampler: &SampleSpec,
) -> CheckReport {
    let n = f.components();
    let points = sampler.points(n);
    let mut grad = vec![0.0; n];
    let (mut violations, mut worst, mut detail) = (0, f64::NEG_INFINITY, String::new());
    for (t, x) in &points {
        if let Err(e) = f.gradient(t, x, &mut grad) {
            violations += 1;
            note_error(&mut detail, e);
            continue;
        }
        let lhs = norm(&grad);
        let rhs = env.m * norm(x) + env.g_max;
        worst = worst.max(lhs - rhs);
        if lhs > rhs * (1.0 + GROWTH_SLACK) {
            violations += 1;
        }
    }
    CheckReport::finish("gradient_growth", points.len(), violations, worst, detail)
}

/// `|F(t,x)| ≤ (a0 + a_slope|x|)·b_max` and the same bound for `|∇F|`.
pub fn check_value_growth(
    f: &dyn Potential,
    env: &GrowthEnvelope,
    sampler: &SampleSpec,
) -> CheckReport {
    let n = f.components();
    let points = sampler.points(n);
    let mut grad = vec![0.0; n];
    let (mut violations, mut worst, mut detail) = (0, f64::NEG_INFINITY, String::new());
    for (t, x) in &points {
        let value = match f.value_and_gradient(t, x, &mut grad) {
            Ok(v) => v,
            Err(e) => {
                violations += 1;
                note_error(&mut detail, e);
                continue;
            }
        };
        let rhs = (env.a0 + env.a_slope * norm(x)) * env.b_max;
        let lhs = value.abs().max(norm(&grad));
        worst = worst.max(lhs - rhs);
        if lhs > rhs * (1.0 + GROWTH_SLACK) {
            violations += 1;
        }
    }
    CheckReport::finish("value_growth", points.len(), violations, worst, detail)
}

/// Compares `∇F` with central differences of `F` (step `1e-6·(1 + |x|)`); passes when
/// `‖fd − ∇F‖_∞ / max(‖∇F‖_∞, 1) ≤ 1e-5` on every sample.
pub fn check_grad_consistency(f: &dyn Potential, sampler: &SampleSpec) -> CheckReport {
    let n = f.components();
    let points = sampler.points(n);
    let mut grad = vec![0.0; n];
    let (mut violations, mut worst, mut detail) = (0, 0.0f64, String::new());
    for (t, x) in &points {
        match fd_relative_error(f, t, x, &mut grad) {
            Ok(err) => {
                worst = worst.max(err);
                if err > 1e-5 {
                    violations += 1;
                }
            }
            Err(e) => {
                violations += 1;
                note_error(&mut detail, e);
            }
        }
    }
    CheckReport::finish("grad_consistency", points.len(), violations, worst, detail)
}

fn fd_relative_error(
    f: &dyn Potential,
    t: &[f64],
    x: &[f64],
    grad: &mut [f64],
) -> Result<f64, crate::expr::DomainError> {
    f.gradient(t, x, grad)?;
    let h = 1e-6 * (1.0 + norm(x));
    let mut probe = x.to_vec();
    let mut max_err = 0.0f64;
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = f.value(t, &probe)?;
        probe[i] = x[i] - h;
        let down = f.value(t, &probe)?;
        probe[i] = x[i];
        let fd = (up - down) / (2.0 * h);
        max_err = max_err.max((fd - grad[i]).abs());
    }
    let scale = grad.iter().fold(1.0f64, |m, g| m.max(g.abs()));
    Ok(max_err / scale)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}
