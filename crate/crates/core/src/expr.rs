//! Shared infix-expression parser for field elements, polynomials and
//! tag polynomials.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor ('*' factor)*
//! factor  := '-' factor | power
//! power   := atom ('^' INTEGER)?
//! atom    := INTEGER | IDENT | '(' expr ')'
//! IDENT   := [A-Za-z_][A-Za-z0-9_']*
//! ```
//!
//! Juxtaposition (`2x`, `x y`, `x(y+1)`) is rejected.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{name}` at position {pos}")]
    UnknownSymbol { name: String, pos: usize },
    #[error("{msg} (at position {pos})")]
    Eval { pos: usize, msg: String },
}

/// Values an expression can be evaluated into.
pub(crate) trait ExprAlgebra {
    type Value;
    fn integer(&self, digits: &str) -> Result<Self::Value, String>;
    fn symbol(&self, name: &str) -> Option<Self::Value>;
    fn add(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value, String>;
    fn sub(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value, String>;
    fn mul(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value, String>;
    fn neg(&self, a: Self::Value) -> Result<Self::Value, String>;
    fn pow(&self, a: Self::Value, e: u64) -> Result<Self::Value, String>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Int(text[start..i].to_string()), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'')
                {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ExprError::Syntax { pos: i, msg: format!("unexpected character `{ch}`") });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a, A: ExprAlgebra> {
    alg: &'a A,
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl<'a, A: ExprAlgebra> Parser<'a, A> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn lift(&self, pos: usize, r: Result<A::Value, String>) -> Result<A::Value, ExprError> {
        r.map_err(|msg| ExprError::Eval { pos, msg })
    }

    fn expr(&mut self) -> Result<A::Value, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    let (_, pos) = self.bump();
                    let rhs = self.term()?;
                    acc = self.lift(pos, self.alg.add(acc, rhs))?;
                }
                Tok::Minus => {
                    let (_, pos) = self.bump();
                    let rhs = self.term()?;
                    acc = self.lift(pos, self.alg.sub(acc, rhs))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<A::Value, ExprError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    let (_, pos) = self.bump();
                    let rhs = self.factor()?;
                    acc = self.lift(pos, self.alg.mul(acc, rhs))?;
                }
                Tok::Int(_) | Tok::Ident(_) | Tok::LParen => {
                    return Err(ExprError::Syntax {
                        pos: self.pos(),
                        msg: "implicit multiplication is not allowed; write `*`".into(),
                    });
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<A::Value, ExprError> {
        if *self.peek() == Tok::Minus {
            let (_, pos) = self.bump();
            let v = self.factor()?;
            return self.lift(pos, self.alg.neg(v));
        }
        self.power()
    }

    fn power(&mut self) -> Result<A::Value, ExprError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let (_, caret) = self.bump();
        match self.bump() {
            (Tok::Int(digits), pos) => {
                let e: u64 = digits
                    .parse()
                    .map_err(|_| ExprError::Syntax { pos, msg: "exponent too large".into() })?;
                self.lift(caret, self.alg.pow(base, e))
            }
            (_, pos) => Err(ExprError::Syntax { pos, msg: "expected a non-negative integer exponent".into() }),
        }
    }

    fn atom(&mut self) -> Result<A::Value, ExprError> {
        match self.bump() {
            (Tok::Int(digits), pos) => self.lift(pos, self.alg.integer(&digits)),
            (Tok::Ident(name), pos) => {
                self.alg.symbol(&name).ok_or(ExprError::UnknownSymbol { name, pos })
            }
            (Tok::LParen, _) => {
                let v = self.expr()?;
                match self.bump() {
                    (Tok::RParen, _) => Ok(v),
                    (_, pos) => Err(ExprError::Syntax { pos, msg: "expected `)`".into() }),
                }
            }
            (Tok::End, pos) => Err(ExprError::Syntax { pos, msg: "unexpected end of input".into() }),
            (t, pos) => Err(ExprError::Syntax { pos, msg: format!("unexpected token {}", describe(&t)) }),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(s) | Tok::Ident(s) => format!("`{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

pub(crate) fn parse_with<A: ExprAlgebra>(alg: &A, text: &str) -> Result<A::Value, ExprError> {
    let toks = tokenize(text)?;
    let mut p = Parser { alg, toks, at: 0 };
    let v = p.expr()?;
    match p.peek() {
        Tok::End => Ok(v),
        Tok::RParen => Err(ExprError::Syntax { pos: p.pos(), msg: "unbalanced `)`".into() }),
        t => Err(ExprError::Syntax { pos: p.pos(), msg: format!("unexpected token {}", describe(t)) }),
    }
}

/// True if `name` is a well-formed identifier in the expression grammar.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Integer arithmetic with a single symbol `x = 3`.
    struct Ints;

    impl ExprAlgebra for Ints {
        type Value = i64;
        fn integer(&self, digits: &str) -> Result<i64, String> {
            digits.parse().map_err(|_| "overflow".to_string())
        }
        fn symbol(&self, name: &str) -> Option<i64> {
            (name == "x").then_some(3)
        }
        fn add(&self, a: i64, b: i64) -> Result<i64, String> {
            Ok(a + b)
        }
        fn sub(&self, a: i64, b: i64) -> Result<i64, String> {
            Ok(a - b)
        }
        fn mul(&self, a: i64, b: i64) -> Result<i64, String> {
            Ok(a * b)
        }
        fn neg(&self, a: i64) -> Result<i64, String> {
            Ok(-a)
        }
        fn pow(&self, a: i64, e: u64) -> Result<i64, String> {
            Ok(a.pow(e as u32))
        }
    }

    #[test]
    fn precedence_and_unary_minus() {
        assert_eq!(parse_with(&Ints, "1 + 2*x^2").unwrap(), 19);
        assert_eq!(parse_with(&Ints, "-x^2").unwrap(), -9);
        assert_eq!(parse_with(&Ints, "(1+x)*(x-1)").unwrap(), 8);
        assert_eq!(parse_with(&Ints, "x*-1").unwrap(), -3);
    }

    #[test]
    fn juxtaposition_is_rejected_with_position() {
        assert_eq!(
            parse_with(&Ints, "2x"),
            Err(ExprError::Syntax { pos: 1, msg: "implicit multiplication is not allowed; write `*`".into() })
        );
        assert!(matches!(parse_with(&Ints, "x (x)"), Err(ExprError::Syntax { pos: 2, .. })));
    }

    #[test]
    fn unknown_symbols_and_bad_input() {
        assert_eq!(parse_with(&Ints, "x + y"), Err(ExprError::UnknownSymbol { name: "y".into(), pos: 4 }));
        assert!(matches!(parse_with(&Ints, "x^"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_with(&Ints, "(x"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_with(&Ints, "x)"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_with(&Ints, ""), Err(ExprError::Syntax { pos: 0, .. })));
        assert!(matches!(parse_with(&Ints, "x % 2"), Err(ExprError::Syntax { pos: 2, .. })));
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("x1'"));
        assert!(is_identifier("_a"));
        assert!(!is_identifier("1x"));
        assert!(!is_identifier(""));
    }
}
