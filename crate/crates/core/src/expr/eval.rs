use std::f64::consts::PI;

use super::ast::{BinaryOp, Func, Node, NodeKind, Var};
use super::dual::powi_value;
use super::{DomainError, DualVector};

fn depends_on_space(node: &Node) -> bool {
    match &node.kind {
        NodeKind::Const(_) => false,
        NodeKind::Var(v) => matches!(v, Var::Space(_)),
        NodeKind::Neg(a) | NodeKind::Call(_, a) => depends_on_space(a),
        NodeKind::Binary(_, l, r) => depends_on_space(l) || depends_on_space(r),
    }
}

/// An exponent that is independent of `x` and integral is applied by repeated
/// multiplication; any other exponent goes through `exp(b·ln a)` and needs `a > 0`.
fn integer_exponent(exponent: &Node, value: f64) -> Option<i32> {
    if depends_on_space(exponent) || value.fract() != 0.0 || value.abs() > 1024.0 {
        None
    } else {
        Some(value as i32)
    }
}

fn finite(value: f64, node: &Node) -> Result<f64, DomainError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(DomainError::new("non-finite result", Some(node.offset)))
    }
}

pub(crate) fn eval_value(node: &Node, t: &[f64], x: &[f64]) -> Result<f64, DomainError> {
    let v = match &node.kind {
        NodeKind::Const(c) => *c,
        NodeKind::Var(Var::Time(k)) => t[*k],
        NodeKind::Var(Var::Space(k)) => x[*k],
        NodeKind::Var(Var::Pi) => PI,
        NodeKind::Neg(a) => -eval_value(a, t, x)?,
        NodeKind::Call(func, a) => {
            let a = eval_value(a, t, x)?;
            match func {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Sqrt => {
                    if a < 0.0 {
                        return Err(DomainError::new(
                            "square root of a negative number",
                            Some(node.offset),
                        ));
                    }
                    a.sqrt()
                }
            }
        }
        NodeKind::Binary(op, l, r) => {
            let a = eval_value(l, t, x)?;
            let b = eval_value(r, t, x)?;
            match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div => {
                    if b == 0.0 {
                        return Err(DomainError::new("division by zero", Some(node.offset)));
                    }
                    a / b
                }
                BinaryOp::Pow => match integer_exponent(r, b) {
                    Some(k) => {
                        if k < 0 && a == 0.0 {
                            return Err(DomainError::new(
                                "division by zero in negative power",
                                Some(node.offset),
                            ));
                        }
                        powi_value(a, k)
                    }
                    None => {
                        if a <= 0.0 {
                            return Err(DomainError::new(
                                "non-integer power of a non-positive base",
                                Some(node.offset),
                            ));
                        }
                        (b * a.ln()).exp()
                    }
                },
            }
        }
    };
    finite(v, node)
}

pub(crate) fn eval_dual(node: &Node, t: &[f64], x: &[f64]) -> Result<DualVector, DomainError> {
    let n = x.len();
    let d = match &node.kind {
        NodeKind::Const(c) => DualVector::constant(*c, n),
        NodeKind::Var(Var::Time(k)) => DualVector::constant(t[*k], n),
        NodeKind::Var(Var::Space(k)) => DualVector::variable(x[*k], *k, n),
        NodeKind::Var(Var::Pi) => DualVector::constant(PI, n),
        NodeKind::Neg(a) => -eval_dual(a, t, x)?,
        NodeKind::Call(func, a) => {
            let a = eval_dual(a, t, x)?;
            match func {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Sqrt => {
                    if a.value < 0.0 {
                        return Err(DomainError::new(
                            "square root of a negative number",
                            Some(node.offset),
                        ));
                    }
                    if a.value == 0.0 && !a.is_constant() {
                        return Err(DomainError::new(
                            "square root is not differentiable at zero",
                            Some(node.offset),
                        ));
                    }
                    a.sqrt()
                }
            }
        }
        NodeKind::Binary(op, l, r) => {
            let a = eval_dual(l, t, x)?;
            let b = eval_dual(r, t, x)?;
            match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div => {
                    if b.value == 0.0 {
                        return Err(DomainError::new("division by zero", Some(node.offset)));
                    }
                    a / b
                }
                BinaryOp::Pow => match integer_exponent(r, b.value) {
                    Some(k) => {
                        if k < 0 && a.value == 0.0 {
                            return Err(DomainError::new(
                                "division by zero in negative power",
                                Some(node.offset),
                            ));
                        }
                        a.powi(k)
                    }
                    None => {
                        if a.value <= 0.0 {
                            return Err(DomainError::new(
                                "non-integer power of a non-positive base",
                                Some(node.offset),
                            ));
                        }
                        a.powf(b)
                    }
                },
            }
        }
    };
    finite(d.value, node)?;
    if d.partials.iter().any(|p| !p.is_finite()) {
        return Err(DomainError::new("non-finite derivative", Some(node.offset)));
    }
    Ok(d)
}
