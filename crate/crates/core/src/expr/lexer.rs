use super::{ExprError, ExprErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Number,
    Identifier,
    Function,
    Operator,
    LeftParen,
    RightParen,
    End,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    /// Byte offset of the first character.
    pub offset: usize,
    /// Parsed value for number tokens.
    pub value: Option<f64>,
}

pub(crate) const FUNCTIONS: [&str; 4] = ["sin", "cos", "exp", "sqrt"];

/// Splits `source` into tokens, always ending with a [`TokenKind::End`] token.
pub fn tokenize(source: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let start = pos;
        let kind = match c {
            b'0'..=b'9' | b'.' => {
                pos = scan_number(bytes, pos)?;
                TokenKind::Number
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while pos < bytes.len()
                    && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_')
                {
                    pos += 1;
                }
                if FUNCTIONS.contains(&&source[start..pos]) {
                    TokenKind::Function
                } else {
                    TokenKind::Identifier
                }
            }
            b'+' | b'-' | b'*' | b'/' | b'^' | b',' => {
                pos += 1;
                TokenKind::Operator
            }
            b'(' => {
                pos += 1;
                TokenKind::LeftParen
            }
            b')' => {
                pos += 1;
                TokenKind::RightParen
            }
            _ => {
                let ch = source[start..].chars().next().unwrap_or('?');
                return Err(ExprError::new(
                    ExprErrorKind::Lexical,
                    start,
                    format!("unexpected character {ch:?}"),
                ));
            }
        };
        let lexeme = source[start..pos].to_string();
        let value = if kind == TokenKind::Number {
            let v: f64 = lexeme.parse().map_err(|_| {
                ExprError::new(
                    ExprErrorKind::Lexical,
                    start,
                    format!("malformed number {lexeme:?}"),
                )
            })?;
            if !v.is_finite() {
                return Err(ExprError::new(
                    ExprErrorKind::Lexical,
                    start,
                    format!("number {lexeme:?} overflows"),
                ));
            }
            Some(v)
        } else {
            None
        };
        tokens.push(Token {
            kind,
            lexeme,
            offset: start,
            value,
        });
    }
    tokens.push(Token {
        kind: TokenKind::End,
        lexeme: String::new(),
        offset: bytes.len(),
        value: None,
    });
    Ok(tokens)
}

/// Decimal digits with an optional fraction and exponent.
fn scan_number(bytes: &[u8], mut pos: usize) -> Result<usize, ExprError> {
    let start = pos;
    let digits = |pos: &mut usize| {
        let s = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        *pos - s
    };
    let mut mantissa = digits(&mut pos);
    if pos < bytes.len() && bytes[pos] == b'.' {
        pos += 1;
        mantissa += digits(&mut pos);
    }
    if mantissa == 0 {
        return Err(ExprError::new(
            ExprErrorKind::Lexical,
            start,
            "number needs at least one digit",
        ));
    }
    if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
        let e = pos;
        pos += 1;
        if pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
            pos += 1;
        }
        if digits(&mut pos) == 0 {
            return Err(ExprError::new(
                ExprErrorKind::Lexical,
                e,
                "exponent needs at least one digit",
            ));
        }
    }
    Ok(pos)
}
