//! A small expression language for user potentials `F(t, x)`.
//!
//! Expressions use the fixed variables `t1..tp`, `x1..xn` and the constant `pi`,
//! the binary operators `+ - * / ^`, unary minus, and the functions `sin`, `cos`,
//! `exp`, `sqrt`. Precedence from tightest: `^` (right-associative), unary `-`,
//! `* /`, `+ -`.
//!
//! Evaluation runs in forward mode over [`DualVector`]s, so the gradient in `x`
//! is exact up to floating-point rounding.
//!
//! ```
//! use poisson_grad::expr::Expr;
//!
//! let f = Expr::parse("x1^2 + t1*x2", 1, 2).unwrap();
//! let d = f.eval_dual(&[2.0], &[3.0, 4.0]).unwrap();
//! assert_eq!(d.value, 17.0);
//! assert_eq!(d.partials, vec![6.0, 2.0]);
//! ```

mod ast;
mod dual;
mod eval;
mod lexer;
mod parser;
mod potential;

pub use ast::{BinaryOp, Func, Node, NodeKind, Var};
pub use dual::DualVector;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse;
pub use potential::ExprPotential;

use std::fmt;

use thiserror::Error;

/// What went wrong while reading an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExprErrorKind {
    Lexical,
    Syntax,
    Arity,
    UnknownIdentifier,
}

/// A positioned lexing or parsing error. `offset` is a byte offset into the source.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message} (at byte {offset})")]
pub struct ExprError {
    pub kind: ExprErrorKind,
    pub offset: usize,
    pub message: String,
}

impl ExprError {
    pub(crate) fn new(kind: ExprErrorKind, offset: usize, message: impl Into<String>) -> Self {
        Self {
            kind,
            offset,
            message: message.into(),
        }
    }

    /// 1-based line and column of the error within `source`.
    pub fn line_col(&self, source: &str) -> (usize, usize) {
        line_col(source, self.offset)
    }
}

/// A failure while evaluating a parsed expression (division by zero, square root
/// of a negative number, ...). `offset` points at the offending node when known.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct DomainError {
    pub message: String,
    pub offset: Option<usize>,
}

impl DomainError {
    pub fn new(message: impl Into<String>, offset: Option<usize>) -> Self {
        Self {
            message: message.into(),
            offset,
        }
    }
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.offset {
            Some(o) => write!(f, "{} (at byte {o})", self.message),
            None => f.write_str(&self.message),
        }
    }
}

pub(crate) fn line_col(source: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(source.len());
    let before = &source[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.chars().count(), |nl| {
        before[nl + 1..].chars().count()
    }) + 1;
    (line, col)
}

/// A parsed expression bound to its source text and variable counts.
#[derive(Debug, Clone)]
pub struct Expr {
    source: String,
    root: Node,
    dims: usize,
    components: usize,
}

impl Expr {
    /// Tokenizes and parses `source` with `p` time variables and `n` space variables.
    pub fn parse(source: &str, p: usize, n: usize) -> Result<Self, ExprError> {
        let tokens = tokenize(source)?;
        let root = parse(&tokens, p, n)?;
        Ok(Self {
            source: source.to_string(),
            root,
            dims: p,
            components: n,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// Value and `∇ₓ` at `(t, x)`.
    pub fn eval_dual(&self, t: &[f64], x: &[f64]) -> Result<DualVector, DomainError> {
        eval::eval_dual(&self.root, t, x)
    }

    /// Value only.
    pub fn eval(&self, t: &[f64], x: &[f64]) -> Result<f64, DomainError> {
        eval::eval_value(&self.root, t, x)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_col_is_one_based() {
        assert_eq!(line_col("abc", 0), (1, 1));
        assert_eq!(line_col("abc", 2), (1, 3));
        assert_eq!(line_col("a\nbc", 3), (2, 2));
        assert_eq!(line_col("cos(", 4), (1, 5));
    }
}
