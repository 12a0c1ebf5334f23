use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    /// `t{k+1}`
    Time(usize),
    /// `x{k+1}`
    Space(usize),
    Pi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
}

impl Func {
    pub(crate) fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone)]
pub enum NodeKind {
    Const(f64),
    Var(Var),
    Neg(Box<Node>),
    Binary(BinaryOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// An expression tree node tagged with the byte offset it was parsed from.
#[derive(Debug, Clone)]
pub struct Node {
    pub kind: NodeKind,
    pub offset: usize,
}

impl Node {
    pub fn new(kind: NodeKind, offset: usize) -> Self {
        Self { kind, offset }
    }

    /// Tree equality ignoring source offsets; constants compare bitwise.
    pub fn same_structure(&self, other: &Node) -> bool {
        use NodeKind::*;
        match (&self.kind, &other.kind) {
            (Const(a), Const(b)) => a.to_bits() == b.to_bits(),
            (Var(a), Var(b)) => a == b,
            (Neg(a), Neg(b)) => a.same_structure(b),
            (Binary(o1, l1, r1), Binary(o2, l2, r2)) => {
                o1 == o2 && l1.same_structure(l2) && r1.same_structure(r2)
            }
            (Call(f1, a1), Call(f2, a2)) => f1 == f2 && a1.same_structure(a2),
            _ => false,
        }
    }

    pub fn depth(&self) -> usize {
        match &self.kind {
            NodeKind::Const(_) | NodeKind::Var(_) => 1,
            NodeKind::Neg(a) | NodeKind::Call(_, a) => 1 + a.depth(),
            NodeKind::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    fn precedence(&self) -> u8 {
        match &self.kind {
            NodeKind::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 1,
            NodeKind::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 2,
            NodeKind::Neg(_) => 3,
            NodeKind::Binary(BinaryOp::Pow, ..) => 4,
            _ => 5,
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Prints with the minimal parentheses that reparse to the same tree.
impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            NodeKind::Const(c) => write!(f, "{c}"),
            NodeKind::Var(Var::Time(k)) => write!(f, "t{}", k + 1),
            NodeKind::Var(Var::Space(k)) => write!(f, "x{}", k + 1),
            NodeKind::Var(Var::Pi) => f.write_str("pi"),
            NodeKind::Neg(a) => {
                f.write_str("-")?;
                a.write_child(f, 3)
            }
            NodeKind::Call(func, a) => write!(f, "{}({a})", func.name()),
            NodeKind::Binary(BinaryOp::Pow, l, r) => {
                l.write_child(f, 5)?;
                f.write_str("^")?;
                // A unary minus is accepted directly after `^`.
                if matches!(r.kind, NodeKind::Neg(_)) {
                    write!(f, "{r}")
                } else {
                    r.write_child(f, 4)
                }
            }
            NodeKind::Binary(op, l, r) => {
                let (sym, p) = match op {
                    BinaryOp::Add => ("+", 1),
                    BinaryOp::Sub => ("-", 1),
                    BinaryOp::Mul => ("*", 2),
                    BinaryOp::Div => ("/", 2),
                    BinaryOp::Pow => unreachable!(),
                };
                l.write_child(f, p)?;
                write!(f, " {sym} ")?;
                r.write_child(f, p + 1)
            }
        }
    }
}
