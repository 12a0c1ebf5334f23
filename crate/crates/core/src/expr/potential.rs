use super::{DomainError, Expr, ExprError};
use crate::error::Result;
use crate::potential::{validate_periods, GrowthEnvelope, Potential};

/// A potential given by expression text in `t1..tp`, `x1..xn`.
#[derive(Debug, Clone)]
pub struct ExprPotential {
    expr: Expr,
    periods: Option<Vec<f64>>,
    growth: Option<GrowthEnvelope>,
    positive: bool,
}

impl ExprPotential {
    pub fn new(source: &str, p: usize, n: usize) -> Result<Self, ExprError> {
        Ok(Self {
            expr: Expr::parse(source, p, n)?,
            periods: None,
            growth: None,
            positive: true,
        })
    }

    pub fn with_periods(mut self, periods: Vec<f64>) -> Result<Self> {
        validate_periods(&periods, self.expr.components())?;
        self.periods = Some(periods);
        Ok(self)
    }

    pub fn with_growth(mut self, env: GrowthEnvelope) -> Self {
        self.growth = Some(env);
        self
    }

    pub fn with_positivity_claim(mut self, positive: bool) -> Self {
        self.positive = positive;
        self
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }
}

impl Potential for ExprPotential {
    fn components(&self) -> usize {
        self.expr.components()
    }

    fn value(&self, t: &[f64], x: &[f64]) -> Result<f64, DomainError> {
        self.expr.eval(t, x)
    }

    fn gradient(&self, t: &[f64], x: &[f64], out: &mut [f64]) -> Result<(), DomainError> {
        let d = self.expr.eval_dual(t, x)?;
        out.copy_from_slice(&d.partials);
        Ok(())
    }

    fn value_and_gradient(
        &self,
        t: &[f64],
        x: &[f64],
        out: &mut [f64],
    ) -> Result<f64, DomainError> {
        let d = self.expr.eval_dual(t, x)?;
        out.copy_from_slice(&d.partials);
        Ok(d.value)
    }

    fn periods(&self) -> Option<&[f64]> {
        self.periods.as_deref()
    }

    fn claims_positive(&self) -> bool {
        self.positive
    }

    fn growth(&self) -> Option<GrowthEnvelope> {
        self.growth
    }
}
