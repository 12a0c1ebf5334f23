//! Pratt parser over the token stream.

use super::ast::{BinaryOp, Func, Node, NodeKind, Var};
use super::lexer::{Token, TokenKind};
use super::{ExprError, ExprErrorKind};

const MAX_DEPTH: usize = 200;
const PREFIX_MINUS_BP: u8 = 5;

/// Parses a token stream produced by [`tokenize`](super::tokenize) for `p` time
/// variables and `n` space variables.
pub fn parse(tokens: &[Token], p: usize, n: usize) -> Result<Node, ExprError> {
    let mut parser = Parser {
        tokens,
        pos: 0,
        p,
        n,
        depth: 0,
    };
    let root = parser.expr(0)?;
    let tok = parser.peek();
    if tok.kind != TokenKind::End {
        return Err(syntax(tok, "expected an operator or end of input"));
    }
    Ok(root)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    p: usize,
    n: usize,
    depth: usize,
}

fn syntax(tok: &Token, what: &str) -> ExprError {
    let found = if tok.kind == TokenKind::End {
        "end of input".to_string()
    } else {
        format!("{:?}", tok.lexeme)
    };
    ExprError::new(
        ExprErrorKind::Syntax,
        tok.offset,
        format!("{what}, found {found}"),
    )
}

fn infix_binding(tok: &Token) -> Option<(BinaryOp, u8, u8)> {
    if tok.kind != TokenKind::Operator {
        return None;
    }
    Some(match tok.lexeme.as_str() {
        "+" => (BinaryOp::Add, 1, 2),
        "-" => (BinaryOp::Sub, 1, 2),
        "*" => (BinaryOp::Mul, 3, 4),
        "/" => (BinaryOp::Div, 3, 4),
        "^" => (BinaryOp::Pow, 8, 7),
        _ => return None,
    })
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &'a Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> &'a Token {
        let tok = self.peek();
        if tok.kind != TokenKind::End {
            self.pos += 1;
        }
        tok
    }

    fn expect_right_paren(&mut self) -> Result<(), ExprError> {
        let tok = self.peek();
        if tok.kind == TokenKind::RightParen {
            self.bump();
            Ok(())
        } else {
            Err(syntax(tok, "expected ')'"))
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Node, ExprError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(syntax(self.peek(), "expression nested too deeply"));
        }
        let mut lhs = self.prefix()?;
        loop {
            let tok = self.peek();
            match tok.kind {
                TokenKind::End | TokenKind::RightParen => break,
                TokenKind::Operator if tok.lexeme == "," => break,
                TokenKind::Operator => {}
                _ => return Err(syntax(tok, "expected an operator")),
            }
            let Some((op, lbp, rbp)) = infix_binding(tok) else {
                return Err(syntax(tok, "expected an operator"));
            };
            if lbp < min_bp {
                break;
            }
            self.bump();
            let rhs = self.expr(rbp)?;
            lhs = Node::new(
                NodeKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                tok.offset,
            );
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Node, ExprError> {
        let tok = self.bump();
        match tok.kind {
            TokenKind::Number => Ok(Node::new(
                NodeKind::Const(tok.value.expect("number token carries a value")),
                tok.offset,
            )),
            TokenKind::Identifier => self.variable(tok),
            TokenKind::Function => self.call(tok),
            TokenKind::LeftParen => {
                let inner = self.expr(0)?;
                self.expect_right_paren()?;
                Ok(inner)
            }
            TokenKind::Operator if tok.lexeme == "-" => {
                let operand = self.expr(PREFIX_MINUS_BP)?;
                Ok(Node::new(NodeKind::Neg(Box::new(operand)), tok.offset))
            }
            _ => Err(syntax(tok, "expected an operand")),
        }
    }

    fn variable(&self, tok: &Token) -> Result<Node, ExprError> {
        let name = tok.lexeme.as_str();
        let unknown = || {
            let mut allowed = Vec::new();
            if self.p > 0 {
                allowed.push(format!("t1..t{}", self.p));
            }
            if self.n > 0 {
                allowed.push(format!("x1..x{}", self.n));
            }
            allowed.push("pi".into());
            ExprError::new(
                ExprErrorKind::UnknownIdentifier,
                tok.offset,
                format!(
                    "unknown identifier {name:?} (expected {})",
                    allowed.join(", ")
                ),
            )
        };
        if name == "pi" {
            return Ok(Node::new(NodeKind::Var(Var::Pi), tok.offset));
        }
        let (prefix, digits) = name.split_at(1);
        let index: usize = match digits.parse::<usize>() {
            Ok(k) if k >= 1 && digits == k.to_string() => k,
            _ => return Err(unknown()),
        };
        let var = match prefix {
            "t" if index <= self.p => Var::Time(index - 1),
            "x" if index <= self.n => Var::Space(index - 1),
            _ => return Err(unknown()),
        };
        Ok(Node::new(NodeKind::Var(var), tok.offset))
    }

    fn call(&mut self, name: &Token) -> Result<Node, ExprError> {
        let func = Func::from_name(&name.lexeme).expect("lexer only emits known functions");
        let open = self.peek();
        if open.kind != TokenKind::LeftParen {
            return Err(syntax(open, &format!("expected '(' after {}", func.name())));
        }
        self.bump();
        if self.peek().kind == TokenKind::RightParen {
            return Err(ExprError::new(
                ExprErrorKind::Arity,
                name.offset,
                format!("{} takes 1 argument, got 0", func.name()),
            ));
        }
        let arg = self.expr(0)?;
        let mut count = 1;
        while self.peek().kind == TokenKind::Operator && self.peek().lexeme == "," {
            self.bump();
            self.expr(0)?;
            count += 1;
        }
        if count != 1 {
            return Err(ExprError::new(
                ExprErrorKind::Arity,
                name.offset,
                format!("{} takes 1 argument, got {count}", func.name()),
            ));
        }
        self.expect_right_paren()?;
        Ok(Node::new(NodeKind::Call(func, Box::new(arg)), name.offset))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{tokenize, Expr};
    use super::*;

    fn ast(s: &str, p: usize, n: usize) -> Node {
        parse(&tokenize(s).unwrap(), p, n).unwrap()
    }

    fn err(s: &str, p: usize, n: usize) -> ExprError {
        Expr::parse(s, p, n).unwrap_err()
    }

    #[test]
    fn one_minus_cos() {
        let node = ast("1 - cos(x1)", 0, 1);
        match node.kind {
            NodeKind::Binary(BinaryOp::Sub, l, r) => {
                assert!(matches!(l.kind, NodeKind::Const(c) if c == 1.0));
                match r.kind {
                    NodeKind::Call(Func::Cos, a) => {
                        assert!(matches!(a.kind, NodeKind::Var(Var::Space(0))))
                    }
                    other => panic!("{other:?}"),
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn precedence() {
        assert_eq!(ast("x1^2 + t1*x2", 1, 2).to_string(), "x1^2 + t1 * x2");
        let expected = ast("(x1^2) + (t1*x2)", 1, 2);
        assert!(ast("x1^2 + t1*x2", 1, 2).same_structure(&expected));
        assert!(ast("-x1^2", 0, 1).same_structure(&ast("-(x1^2)", 0, 1)));
        assert!(ast("2^3^2", 0, 0).same_structure(&ast("2^(3^2)", 0, 0)));
        assert!(ast("1-2-3", 0, 0).same_structure(&ast("(1-2)-3", 0, 0)));
        assert!(ast("8/4/2", 0, 0).same_structure(&ast("(8/4)/2", 0, 0)));
        assert!(ast("2*-3", 0, 0).same_structure(&ast("2*(-3)", 0, 0)));
        assert!(ast("2^-1*3", 0, 0).same_structure(&ast("(2^(-1))*3", 0, 0)));
        assert!(ast("-2*3", 0, 0).same_structure(&ast("(-2)*3", 0, 0)));
    }

    #[test]
    fn syntax_errors_are_positioned() {
        let e = err("1 + * 2", 0, 0);
        assert_eq!((e.kind, e.offset), (ExprErrorKind::Syntax, 4));
        let e = err("cos(", 0, 1);
        assert_eq!((e.kind, e.offset), (ExprErrorKind::Syntax, 4));
        let e = err("(1 + 2", 0, 0);
        assert_eq!(e.offset, 6);
        let e = err("1 + 2)", 0, 0);
        assert_eq!(e.offset, 5);
        let e = err("2 x1", 0, 1);
        assert_eq!(e.offset, 2);
        let e = err("", 0, 0);
        assert_eq!(e.offset, 0);
        let e = err("sin x1", 0, 1);
        assert_eq!(e.offset, 4);
        let e = err("+1", 0, 0);
        assert_eq!(e.offset, 0);
    }

    #[test]
    fn arity_and_identifiers() {
        let e = err("sin(x1, x2)", 0, 2);
        assert_eq!((e.kind, e.offset), (ExprErrorKind::Arity, 0));
        let e = err("1 + exp()", 0, 0);
        assert_eq!((e.kind, e.offset), (ExprErrorKind::Arity, 4));
        let e = err("x3 + 1", 1, 2);
        assert_eq!((e.kind, e.offset), (ExprErrorKind::UnknownIdentifier, 0));
        assert_eq!(err("t2", 1, 1).kind, ExprErrorKind::UnknownIdentifier);
        assert_eq!(err("x0", 1, 1).kind, ExprErrorKind::UnknownIdentifier);
        assert_eq!(err("x01", 1, 1).kind, ExprErrorKind::UnknownIdentifier);
        assert_eq!(err("y", 1, 1).kind, ExprErrorKind::UnknownIdentifier);
        assert!(Expr::parse("pi*t1 + x2", 1, 2).is_ok());
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let s = "(".repeat(10_000) + "1" + &")".repeat(10_000);
        assert_eq!(err(&s, 0, 0).kind, ExprErrorKind::Syntax);
        let s = "-".repeat(10_000) + "1";
        assert_eq!(err(&s, 0, 0).kind, ExprErrorKind::Syntax);
    }
}
