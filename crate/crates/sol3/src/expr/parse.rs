//! Lexer and recursive-descent parser for the expression language. Every
//! error carries the byte offset where the problem starts. The parser is
//! total: arbitrary input bytes produce either an expression or a
//! `ParseError`, never a panic (the fuzz targets lean on this).

use super::{BinaryOp, Expr, Func, UnaryOp};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{message} at byte {offset}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        Self {
            offset,
            message: message.into(),
        }
    }
}

/// Nesting deeper than this is rejected rather than risking a stack
/// overflow on adversarial input.
const MAX_DEPTH: u32 = 200;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
            }
            b'+' => {
                toks.push((Tok::Plus, start));
                i += 1;
            }
            b'-' => {
                toks.push((Tok::Minus, start));
                i += 1;
            }
            b'*' => {
                toks.push((Tok::Star, start));
                i += 1;
            }
            b'/' => {
                toks.push((Tok::Slash, start));
                i += 1;
            }
            b'^' => {
                toks.push((Tok::Caret, start));
                i += 1;
            }
            b'(' => {
                toks.push((Tok::LParen, start));
                i += 1;
            }
            b')' => {
                toks.push((Tok::RParen, start));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                if text == "." {
                    return Err(ParseError::new(start, "expected digits around '.'"));
                }
                let n: f64 = text
                    .parse()
                    .map_err(|_| ParseError::new(start, format!("invalid number '{text}'")))?;
                if !n.is_finite() {
                    return Err(ParseError::new(
                        start,
                        format!("number literal '{text}' overflows"),
                    ));
                }
                toks.push((Tok::Num(n), start));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(src[start..i].to_string()), start));
            }
            _ => {
                // report the whole character, not a stray continuation byte
                let ch = src[start..].chars().next().unwrap();
                return Err(ParseError::new(
                    start,
                    format!("unexpected character '{ch}'"),
                ));
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    var: Option<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::RParen) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(ParseError::new(self.offset(), "expected ')'")),
        }
    }

    fn expr(&mut self, depth: u32) -> Result<Expr, ParseError> {
        if depth > MAX_DEPTH {
            return Err(ParseError::new(self.offset(), "expression nests too deeply"));
        }
        let mut lhs = self.term(depth + 1)?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinaryOp::Add,
                Some(Tok::Minus) => BinaryOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term(depth + 1)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self, depth: u32) -> Result<Expr, ParseError> {
        if depth > MAX_DEPTH {
            return Err(ParseError::new(self.offset(), "expression nests too deeply"));
        }
        let mut lhs = self.unary(depth + 1)?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinaryOp::Mul,
                Some(Tok::Slash) => BinaryOp::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.unary(depth + 1)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self, depth: u32) -> Result<Expr, ParseError> {
        if depth > MAX_DEPTH {
            return Err(ParseError::new(self.offset(), "expression nests too deeply"));
        }
        if let Some(Tok::Minus) = self.peek() {
            self.pos += 1;
            let inner = self.unary(depth + 1)?;
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(inner)));
        }
        self.power(depth + 1)
    }

    fn power(&mut self, depth: u32) -> Result<Expr, ParseError> {
        if depth > MAX_DEPTH {
            return Err(ParseError::new(self.offset(), "expression nests too deeply"));
        }
        let base = self.atom(depth + 1)?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            // right-associative, and the exponent may carry a sign
            let exp = self.unary(depth + 1)?;
            return Ok(Expr::Binary(BinaryOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self, depth: u32) -> Result<Expr, ParseError> {
        if depth > MAX_DEPTH {
            return Err(ParseError::new(self.offset(), "expression nests too deeply"));
        }
        let offset = self.offset();
        match self.bump() {
            Some(Tok::Num(n)) => Ok(Expr::Num(n)),
            Some(Tok::Ident(name)) => {
                if let Some(Tok::LParen) = self.peek() {
                    let func = Func::from_name(&name).ok_or_else(|| {
                        ParseError::new(offset, format!("unknown function '{name}'"))
                    })?;
                    self.pos += 1;
                    let arg = self.expr(depth + 1)?;
                    self.expect_rparen()?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                if name == "pi" {
                    return Ok(Expr::Num(std::f64::consts::PI));
                }
                if Func::from_name(&name).is_some() {
                    return Err(ParseError::new(
                        offset,
                        format!("'{name}' is a function and needs an argument in parentheses"),
                    ));
                }
                match &self.var {
                    Some(existing) if existing != &name => Err(ParseError::new(
                        offset,
                        format!(
                            "expression already uses variable '{existing}'; \
                             found second variable '{name}'"
                        ),
                    )),
                    _ => {
                        self.var = Some(name.clone());
                        Ok(Expr::Var(name))
                    }
                }
            }
            Some(Tok::LParen) => {
                let inner = self.expr(depth + 1)?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Some(other) => Err(ParseError::new(
                offset,
                format!("unexpected token {}", describe(&other)),
            )),
            None => Err(ParseError::new(offset, "unexpected end of input")),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number {n}"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Plus => "'+'".to_string(),
        Tok::Minus => "'-'".to_string(),
        Tok::Star => "'*'".to_string(),
        Tok::Slash => "'/'".to_string(),
        Tok::Caret => "'^'".to_string(),
        Tok::LParen => "'('".to_string(),
        Tok::RParen => "')'".to_string(),
    }
}

/// Parse a source string into an expression. At most one distinct variable
/// name may appear; `pi` is the circle constant, not a variable.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.len(),
        var: None,
    };
    let e = p.expr(0)?;
    if p.pos < p.toks.len() {
        let (t, o) = &p.toks[p.pos];
        return Err(ParseError::new(
            *o,
            format!("unexpected trailing {}", describe(t)),
        ));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_offsets() {
        assert_eq!(parse("sin(").unwrap_err().offset, 4);
        assert_eq!(parse("").unwrap_err().offset, 0);
        assert_eq!(parse("1 + ").unwrap_err().offset, 4);
        assert_eq!(parse("1 + %").unwrap_err().offset, 4);
        assert_eq!(parse("(1 + 2").unwrap_err().offset, 6);
        assert_eq!(parse("1 2").unwrap_err().offset, 2);
        assert_eq!(parse("foo(3)").unwrap_err().offset, 0);
    }

    #[test]
    fn two_variables_rejected() {
        let err = parse("u + v").unwrap_err();
        assert_eq!(err.offset, 4);
        assert!(err.message.contains("second variable"));
        // same variable twice is fine
        assert!(parse("u + u * u").is_ok());
    }

    #[test]
    fn function_name_without_call_rejected() {
        let err = parse("sin + 1").unwrap_err();
        assert_eq!(err.offset, 0);
        assert!(err.message.contains("function"));
    }

    #[test]
    fn number_forms() {
        assert_eq!(parse("1.5e2").unwrap(), Expr::Num(150.0));
        assert_eq!(parse("2E-2").unwrap(), Expr::Num(0.02));
        assert_eq!(parse("7.").unwrap(), Expr::Num(7.0));
        assert_eq!(parse(".5").unwrap(), Expr::Num(0.5));
        assert!(parse(".").is_err());
        assert!(parse("1e999").is_err()); // overflows to infinity
    }

    #[test]
    fn unicode_input_is_rejected_cleanly() {
        let err = parse("1 + π").unwrap_err();
        assert_eq!(err.offset, 4);
        assert!(err.message.contains('π'));
    }

    #[test]
    fn deep_nesting_is_rejected_not_fatal() {
        let deep = "(".repeat(100_000) + "1" + &")".repeat(100_000);
        let err = parse(&deep).unwrap_err();
        assert!(err.message.contains("deeply"));
        let many_negs = "-".repeat(100_000) + "x";
        assert!(parse(&many_negs).is_err());
    }

    #[test]
    fn whitespace_is_insignificant() {
        assert_eq!(parse(" 1\t+\n2 ").unwrap(), parse("1+2").unwrap());
    }

    #[test]
    fn incomplete_exponent_is_not_consumed() {
        // with no digits after it, 'e' is not an exponent: "2e" lexes as the
        // number 2 followed by the identifier e, a trailing-token error
        let e = parse("2e").unwrap_err();
        assert_eq!(e.offset, 1);
    }
}
