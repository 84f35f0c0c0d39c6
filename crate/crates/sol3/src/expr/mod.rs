//! A small expression language for scalar functions of one variable, used
//! wherever the user supplies a profile function (CLI flags, config files).
//!
//! Grammar, loosest to tightest binding:
//!
//! ```text
//! expr   := term  (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?          right-associative
//! atom   := number | name | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! so `-x^2` means `-(x^2)` and `2^3^2` means `2^(3^2)`. Exactly one free
//! variable is allowed (any name works); `pi` is a constant. Known functions:
//! sin, cos, tan, atan (arctan), acos (arccos), exp, log, sinh, cosh, tanh,
//! sqrt.
//!
//! Expressions evaluate to `Result` (domain violations are errors, never NaN)
//! and differentiate symbolically, so profile functions come with exact
//! derivatives instead of finite-difference approximations.

mod parse;

pub use parse::{parse, ParseError};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{func} is undefined at {arg}")]
    Domain { func: &'static str, arg: f64 },
    #[error("evaluation produced a non-finite value")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
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
    Tan,
    Atan,
    Acos,
    Exp,
    Log,
    Sinh,
    Cosh,
    Tanh,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Atan => "atan",
            Func::Acos => "acos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "atan" | "arctan" => Func::Atan,
            "acos" | "arccos" => Func::Acos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// The free variable, if the expression has one.
    pub fn free_variable(&self) -> Option<&str> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(name) => Some(name),
            Expr::Unary(_, e) | Expr::Call(_, e) => e.free_variable(),
            Expr::Binary(_, l, r) => l.free_variable().or_else(|| r.free_variable()),
        }
    }

    /// Evaluate with the free variable bound to `x`. Domain violations and
    /// non-finite intermediates are errors; a finite result is trustworthy.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Num(n) => *n,
            Expr::Var(_) => x,
            Expr::Unary(UnaryOp::Neg, e) => -e.eval(x)?,
            Expr::Binary(op, l, r) => {
                let a = l.eval(x)?;
                let b = r.eval(x)?;
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                    BinaryOp::Pow => a.powf(b),
                }
            }
            Expr::Call(f, e) => {
                let a = e.eval(x)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                    Func::Atan => a.atan(),
                    Func::Acos => {
                        if a.abs() > 1.0 {
                            return Err(EvalError::Domain { func: "acos", arg: a });
                        }
                        a.acos()
                    }
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(EvalError::Domain { func: "log", arg: a });
                        }
                        a.ln()
                    }
                    Func::Sinh => a.sinh(),
                    Func::Cosh => a.cosh(),
                    Func::Tanh => a.tanh(),
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(EvalError::Domain { func: "sqrt", arg: a });
                        }
                        a.sqrt()
                    }
                }
            }
        };
        if !v.is_finite() {
            return Err(EvalError::NonFinite);
        }
        Ok(v)
    }

    /// Symbolic derivative with respect to the free variable.
    pub fn diff(&self) -> Expr {
        match self {
            Expr::Num(_) => Expr::Num(0.0),
            Expr::Var(_) => Expr::Num(1.0),
            Expr::Unary(UnaryOp::Neg, e) => neg(e.diff()),
            Expr::Binary(op, l, r) => {
                let (dl, dr) = (l.diff(), r.diff());
                match op {
                    BinaryOp::Add => add(dl, dr),
                    BinaryOp::Sub => sub(dl, dr),
                    BinaryOp::Mul => add(
                        mul(dl, r.as_ref().clone()),
                        mul(l.as_ref().clone(), dr),
                    ),
                    BinaryOp::Div => div(
                        sub(
                            mul(dl, r.as_ref().clone()),
                            mul(l.as_ref().clone(), dr),
                        ),
                        pow(r.as_ref().clone(), Expr::Num(2.0)),
                    ),
                    BinaryOp::Pow => match r.as_ref() {
                        // constant exponent: c f^{c-1} f'
                        Expr::Num(c) => mul(
                            mul(
                                Expr::Num(*c),
                                pow(l.as_ref().clone(), Expr::Num(c - 1.0)),
                            ),
                            dl,
                        ),
                        // general: f^g (g' log f + g f' / f)
                        _ => mul(
                            pow(l.as_ref().clone(), r.as_ref().clone()),
                            add(
                                mul(dr, call(Func::Log, l.as_ref().clone())),
                                div(
                                    mul(r.as_ref().clone(), dl),
                                    l.as_ref().clone(),
                                ),
                            ),
                        ),
                    },
                }
            }
            Expr::Call(f, e) => {
                let de = e.diff();
                let inner = e.as_ref().clone();
                match f {
                    Func::Sin => mul(call(Func::Cos, inner), de),
                    Func::Cos => neg(mul(call(Func::Sin, inner), de)),
                    Func::Tan => div(de, pow(call(Func::Cos, inner), Expr::Num(2.0))),
                    Func::Atan => div(
                        de,
                        add(Expr::Num(1.0), pow(inner, Expr::Num(2.0))),
                    ),
                    Func::Acos => neg(div(
                        de,
                        call(
                            Func::Sqrt,
                            sub(Expr::Num(1.0), pow(inner, Expr::Num(2.0))),
                        ),
                    )),
                    Func::Exp => mul(call(Func::Exp, inner), de),
                    Func::Log => div(de, inner),
                    Func::Sinh => mul(call(Func::Cosh, inner), de),
                    Func::Cosh => mul(call(Func::Sinh, inner), de),
                    Func::Tanh => div(de, pow(call(Func::Cosh, inner), Expr::Num(2.0))),
                    Func::Sqrt => div(
                        de,
                        mul(Expr::Num(2.0), call(Func::Sqrt, inner)),
                    ),
                }
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Num(n) if *n < 0.0 => 3, // prints with a leading minus
            Expr::Num(_) | Expr::Var(_) | Expr::Call(_, _) => 5,
            Expr::Unary(_, _) => 3,
            Expr::Binary(BinaryOp::Add | BinaryOp::Sub, _, _) => 1,
            Expr::Binary(BinaryOp::Mul | BinaryOp::Div, _, _) => 2,
            Expr::Binary(BinaryOp::Pow, _, _) => 4,
        }
    }

    fn write(&self, out: &mut String) {
        // parenthesization preserves the tree exactly: printing then parsing
        // an expression gives back the same structure
        let wrap = |out: &mut String, e: &Expr, needs: bool| {
            if needs {
                out.push('(');
                e.write(out);
                out.push(')');
            } else {
                e.write(out);
            }
        };
        match self {
            Expr::Num(n) => {
                if *n < 0.0 {
                    out.push('-');
                }
                out.push_str(&format!("{}", n.abs()));
            }
            Expr::Var(name) => out.push_str(name),
            Expr::Unary(UnaryOp::Neg, e) => {
                out.push('-');
                wrap(out, e, e.precedence() < 3);
            }
            Expr::Binary(op, l, r) => {
                let p = self.precedence();
                let (sym, right_assoc) = match op {
                    BinaryOp::Add => (" + ", false),
                    BinaryOp::Sub => (" - ", false),
                    BinaryOp::Mul => (" * ", false),
                    BinaryOp::Div => (" / ", false),
                    BinaryOp::Pow => ("^", true),
                };
                if right_assoc {
                    wrap(out, l, l.precedence() <= p);
                    out.push_str(sym);
                    wrap(out, r, r.precedence() < p);
                } else {
                    wrap(out, l, l.precedence() < p);
                    out.push_str(sym);
                    wrap(out, r, r.precedence() <= p);
                }
            }
            Expr::Call(f, e) => {
                out.push_str(f.name());
                out.push('(');
                e.write(out);
                out.push(')');
            }
        }
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut s = String::new();
        self.write(&mut s);
        f.write_str(&s)
    }
}

// smart constructors used by diff: fold the identities that would otherwise
// make derivative trees balloon

fn neg(e: Expr) -> Expr {
    match e {
        Expr::Num(n) => Expr::Num(-n),
        Expr::Unary(UnaryOp::Neg, inner) => *inner,
        other => Expr::Unary(UnaryOp::Neg, Box::new(other)),
    }
}

fn add(l: Expr, r: Expr) -> Expr {
    match (&l, &r) {
        (Expr::Num(a), _) if *a == 0.0 => r,
        (_, Expr::Num(b)) if *b == 0.0 => l,
        (Expr::Num(a), Expr::Num(b)) => Expr::Num(a + b),
        _ => Expr::Binary(BinaryOp::Add, Box::new(l), Box::new(r)),
    }
}

fn sub(l: Expr, r: Expr) -> Expr {
    match (&l, &r) {
        (_, Expr::Num(b)) if *b == 0.0 => l,
        (Expr::Num(a), _) if *a == 0.0 => neg(r),
        (Expr::Num(a), Expr::Num(b)) => Expr::Num(a - b),
        _ => Expr::Binary(BinaryOp::Sub, Box::new(l), Box::new(r)),
    }
}

fn mul(l: Expr, r: Expr) -> Expr {
    match (&l, &r) {
        (Expr::Num(a), _) if *a == 0.0 => Expr::Num(0.0),
        (_, Expr::Num(b)) if *b == 0.0 => Expr::Num(0.0),
        (Expr::Num(a), _) if *a == 1.0 => r,
        (_, Expr::Num(b)) if *b == 1.0 => l,
        (Expr::Num(a), Expr::Num(b)) => Expr::Num(a * b),
        _ => Expr::Binary(BinaryOp::Mul, Box::new(l), Box::new(r)),
    }
}

fn div(l: Expr, r: Expr) -> Expr {
    match (&l, &r) {
        (Expr::Num(a), _) if *a == 0.0 => Expr::Num(0.0),
        (_, Expr::Num(b)) if *b == 1.0 => l,
        _ => Expr::Binary(BinaryOp::Div, Box::new(l), Box::new(r)),
    }
}

fn pow(l: Expr, r: Expr) -> Expr {
    match &r {
        Expr::Num(b) if *b == 1.0 => l,
        Expr::Num(b) if *b == 0.0 => Expr::Num(1.0),
        _ => Expr::Binary(BinaryOp::Pow, Box::new(l), Box::new(r)),
    }
}

fn call(f: Func, e: Expr) -> Expr {
    Expr::Call(f, Box::new(e))
}
