//! Arithmetic expressions over decision variables x1..xn.
//!
//! The grammar is deliberately small: numbers, variables, `+ - * / ^`,
//! parentheses, unary minus. Exponents must be literal constants, which keeps
//! expressions closed under the analyses this crate performs on them.

use std::fmt;
use std::ops;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Zero-based variable index, rendered as `x{i+1}`.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Base raised to a literal constant exponent.
    Pow(Box<Expr>, f64),
}

/// Why an evaluation produced no usable value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalDefect {
    DivisionByZero,
    ZeroToNegativePower,
    NegativeBaseFractionalPower,
    NonFinite,
}

impl fmt::Display for EvalDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            EvalDefect::DivisionByZero => "division by zero",
            EvalDefect::ZeroToNegativePower => "zero raised to a negative power",
            EvalDefect::NegativeBaseFractionalPower => {
                "negative base raised to a fractional power"
            }
            EvalDefect::NonFinite => "non-finite result",
        };
        f.write_str(msg)
    }
}

impl Expr {
    pub fn num(c: f64) -> Expr {
        Expr::Const(c)
    }

    /// One-based variable accessor matching the surface syntax: `var(1)` is x1.
    pub fn var(i: usize) -> Expr {
        assert!(i >= 1, "variables are numbered from x1");
        Expr::Var(i - 1)
    }

    pub fn pow(self, exponent: f64) -> Expr {
        Expr::Pow(Box::new(self), exponent)
    }

    /// Largest zero-based variable index used, if any variable occurs.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Pow(a, _) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (None, m) | (m, None) => m,
                    (Some(x), Some(y)) => Some(x.max(y)),
                }
            }
        }
    }

    /// Evaluates at `x`. Division by zero, invalid powers, and non-finite
    /// results are reported as defects rather than silently producing NaN.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let v = self.eval_raw(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Eval {
                x: x.to_vec(),
                defect: EvalDefect::NonFinite,
            })
        }
    }

    fn eval_raw(&self, x: &[f64]) -> Result<f64> {
        let defect = |d: EvalDefect| Error::Eval {
            x: x.to_vec(),
            defect: d,
        };
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var(i) => x.get(*i).copied().ok_or(Error::UnknownVariable {
                index: *i,
                n: x.len(),
            }),
            Expr::Neg(a) => Ok(-a.eval_raw(x)?),
            Expr::Add(a, b) => Ok(a.eval_raw(x)? + b.eval_raw(x)?),
            Expr::Sub(a, b) => Ok(a.eval_raw(x)? - b.eval_raw(x)?),
            Expr::Mul(a, b) => Ok(a.eval_raw(x)? * b.eval_raw(x)?),
            Expr::Div(a, b) => {
                let den = b.eval_raw(x)?;
                if den == 0.0 {
                    return Err(defect(EvalDefect::DivisionByZero));
                }
                Ok(a.eval_raw(x)? / den)
            }
            Expr::Pow(base, e) => {
                let b = base.eval_raw(x)?;
                if b == 0.0 && *e < 0.0 {
                    return Err(defect(EvalDefect::ZeroToNegativePower));
                }
                if b < 0.0 && e.fract() != 0.0 {
                    return Err(defect(EvalDefect::NegativeBaseFractionalPower));
                }
                // Integer exponents take the exact powi path.
                if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
                    Ok(b.powi(*e as i32))
                } else {
                    Ok(b.powf(*e))
                }
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(_) | Expr::Var(_) => 5,
        }
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Parenthesization must reproduce the parse tree exactly, so a
        // right-nested operand at equal precedence keeps its parentheses
        // (the parser is left-associative) and unary minus wraps anything
        // weaker than itself.
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => {
                f.write_str("-")?;
                child(f, a, 3)
            }
            Expr::Add(a, b) => {
                child(f, a, 1)?;
                f.write_str("+")?;
                child(f, b, 2)
            }
            Expr::Sub(a, b) => {
                child(f, a, 1)?;
                f.write_str("-")?;
                child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                child(f, a, 2)?;
                f.write_str("*")?;
                child(f, b, 3)
            }
            Expr::Div(a, b) => {
                child(f, a, 2)?;
                f.write_str("/")?;
                child(f, b, 3)
            }
            Expr::Pow(base, e) => {
                match **base {
                    Expr::Var(_) => write!(f, "{base}")?,
                    Expr::Const(c) if c >= 0.0 => write!(f, "{base}")?,
                    _ => write!(f, "({base})")?,
                }
                if *e < 0.0 {
                    write!(f, "^({e})")
                } else {
                    write!(f, "^{e}")
                }
            }
        }
    }
}

/// Parses the infix surface syntax into an [`Expr`].
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser {
        s: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.s.len() {
        return Err(p.err(format!("unexpected character '{}'", p.s[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && (self.s[self.pos] == b' ' || self.s[self.pos] == b'\t') {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = lhs + self.term()?;
            } else if self.eat(b'-') {
                lhs = lhs - self.term()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = lhs * self.factor()?;
            } else if self.eat(b'/') {
                lhs = lhs / self.factor()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            Ok(-self.factor()?)
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.exponent()?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    /// Exponents are literal constants: a number, `-`number, or either in
    /// parentheses.
    fn exponent(&mut self) -> Result<f64> {
        if self.eat(b'(') {
            let neg = self.eat(b'-');
            let v = self.number()?;
            if !self.eat(b')') {
                return Err(self.err("expected ')' after exponent"));
            }
            return Ok(if neg { -v } else { v });
        }
        let neg = self.eat(b'-');
        let v = self.number()?;
        Ok(if neg { -v } else { v })
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(self.err("expected variable index after 'x'"));
                }
                let digits = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                let idx: usize = digits
                    .parse()
                    .map_err(|_| self.err("variable index out of range"))?;
                if idx == 0 {
                    return Err(self.err("variables are numbered from x1"));
                }
                Ok(Expr::Var(idx - 1))
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::Const(self.number()?)),
            Some(c) => Err(self.err(format!("unexpected character '{}'", c as char))),
            None => Err(self.err("unexpected end of expression")),
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        if self.pos < self.s.len() && self.s[self.pos] == b'.' {
            self.pos += 1;
            let frac = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if frac == self.pos {
                return Err(self.err("expected digits after decimal point"));
            }
        }
        if self.pos < self.s.len() && (self.s[self.pos] == b'e' || self.s[self.pos] == b'E') {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.s.len() && (self.s[self.pos] == b'+' || self.s[self.pos] == b'-') {
                self.pos += 1;
            }
            let digits = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if digits == self.pos {
                // Not an exponent suffix after all; back off.
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        let v: f64 = text
            .parse()
            .map_err(|_| self.err(format!("invalid number '{text}'")))?;
        if !v.is_finite() {
            return Err(self.err(format!("constant '{text}' overflows")));
        }
        Ok(v)
    }
}
