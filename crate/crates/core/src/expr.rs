//! Expressions in the single variable `A`.
//!
//! ```text
//! expr     := term {("+"|"-") term}
//! term     := unary {("*"|"/") unary}
//! unary    := ["-"] power
//! power    := atom ["^" rational]
//! rational := ["-"] int ["/" int] | "(" ["-"] int ["/" int] ")"
//! atom     := number | "i" | "A" | ident "(" expr ")" | "(" expr ")"
//! ident    := exp | log | sin | cos | sqrt
//! ```
//!
//! A trailing `/int` right after `^` belongs to the exponent, so `A^1/2` is
//! the square root. The printer always parenthesises fractional exponents.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qseries::TruncSeries;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    I,
    Var,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Rational),
    Call(Func, Box<Expr>),
}

// ---------------------------------------------------------------- parsing

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.err(format!("expected '{c}', found '{found}'")),
                None => self.err(format!("expected '{c}', found end of input")),
            }
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.power()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let r = if self.eat('(') {
                let r = self.rational()?;
                self.expect(')')?;
                r
            } else {
                self.rational()?
            };
            Ok(Expr::Pow(Box::new(base), r))
        } else {
            Ok(base)
        }
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        let digits: usize = self.src[start..]
            .chars()
            .take_while(|c| c.is_ascii_digit())
            .count();
        if digits == 0 {
            return self.err("expected an integer exponent");
        }
        self.pos += digits;
        self.src[start..self.pos].parse().or_else(|_| {
            self.pos = start;
            self.err("exponent out of range")
        })
    }

    fn rational(&mut self) -> Result<Rational> {
        let neg = self.eat('-');
        let start = self.pos;
        let num = self.integer()?;
        let den = if self.eat('/') { self.integer()? } else { 1 };
        let num = if neg { -num } else { num };
        Rational::new(num, den).or_else(|_| {
            self.pos = start;
            self.err("zero denominator in exponent")
        })
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        if end < bytes.len() && bytes[end] == b'.' {
            end += 1;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        match self.src[start..end].parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos = end;
                Ok(Expr::Num(v))
            }
            _ => self.err(format!("malformed number '{}'", &self.src[start..end])),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                let len: usize = self.src[start..]
                    .chars()
                    .take_while(|c| c.is_alphanumeric() || *c == '_')
                    .map(|c| c.len_utf8())
                    .sum();
                self.pos += len;
                let name = &self.src[start..self.pos];
                match name {
                    "A" => Ok(Expr::Var),
                    "i" => Ok(Expr::I),
                    _ => match Func::from_name(name) {
                        Some(f) => {
                            self.expect('(')?;
                            let arg = self.expr()?;
                            self.expect(')')?;
                            Ok(Expr::Call(f, Box::new(arg)))
                        }
                        None => Err(Error::UnknownIdent(format!("'{name}' at position {start}"))),
                    },
                }
            }
            Some(c) => self.err(format!("unexpected character '{c}'")),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser { src, pos: 0 };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if let Some(c) = p.peek() {
        return p.err(format!("unexpected trailing '{c}'"));
    }
    Ok(e)
}

impl std::str::FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Expr> {
        parse_expr(s)
    }
}

// ---------------------------------------------------------------- printing

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Pow(..) => 4,
        Expr::Num(v) if *v < 0.0 || v.is_sign_negative() => 0,
        _ => 5,
    }
}

fn bare_exponent(r: Rational) -> bool {
    r.is_integer() && r.num() >= 0
}

/// Whether the printed form ends in an unparenthesised integer exponent.
fn ends_in_bare_exponent(e: &Expr) -> bool {
    match e {
        Expr::Pow(_, r) => bare_exponent(*r),
        Expr::Neg(x) => prec(x) >= 4 && ends_in_bare_exponent(x),
        Expr::Bin(op, _, r) => {
            let p = if matches!(op, BinOp::Add | BinOp::Sub) {
                1
            } else {
                2
            };
            prec(r) > p && ends_in_bare_exponent(r)
        }
        _ => false,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if prec(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::I => f.write_str("i"),
            Expr::Var => f.write_str("A"),
            Expr::Neg(x) => {
                f.write_str("-")?;
                write_at(f, x, 4)
            }
            Expr::Bin(op, l, r) => {
                let (p, sym) = match op {
                    BinOp::Add => (1, " + "),
                    BinOp::Sub => (1, " - "),
                    BinOp::Mul => (2, "*"),
                    BinOp::Div => (2, "/"),
                };
                // `A^2/3` would read back as `A^(2/3)`
                if *op == BinOp::Div && prec(l) >= p && ends_in_bare_exponent(l) {
                    write!(f, "({l})")?;
                } else {
                    write_at(f, l, p)?;
                }
                f.write_str(sym)?;
                write_at(f, r, p + 1)
            }
            Expr::Pow(b, r) => {
                write_at(f, b, 5)?;
                if bare_exponent(*r) {
                    write!(f, "^{r}")
                } else {
                    write!(f, "^({r})")
                }
            }
            Expr::Call(func, x) => write!(f, "{}({x})", func.name()),
        }
    }
}

// ---------------------------------------------------------------- evaluation

fn rational_pow(z: C64, r: Rational) -> Result<C64> {
    if r.is_integer() {
        let k = r.num();
        if k < 0 && z.norm() == 0.0 {
            return Err(Error::Pole(format!("0^{r}")));
        }
        return Ok(z.powi(k as i32));
    }
    if z.norm() == 0.0 {
        return if r.num() > 0 {
            Ok(C64::new(0.0, 0.0))
        } else {
            Err(Error::Pole(format!("0^{r}")))
        };
    }
    Ok((z.ln() * r.to_f64()).exp())
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    /// Value at `A = a` with principal branches.
    pub fn eval(&self, a: C64) -> Result<C64> {
        Ok(match self {
            Expr::Num(v) => C64::new(*v, 0.0),
            Expr::I => C64::new(0.0, 1.0),
            Expr::Var => a,
            Expr::Neg(x) => -x.eval(a)?,
            Expr::Bin(op, l, r) => {
                let (x, y) = (l.eval(a)?, r.eval(a)?);
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y.norm() == 0.0 {
                            return Err(Error::Pole(format!("division by zero in {self}")));
                        }
                        x / y
                    }
                }
            }
            Expr::Pow(b, r) => rational_pow(b.eval(a)?, *r)?,
            Expr::Call(func, x) => {
                let v = x.eval(a)?;
                match func {
                    Func::Exp => v.exp(),
                    Func::Log => {
                        if v.norm() == 0.0 {
                            return Err(Error::Pole(format!("log(0) in {self}")));
                        }
                        v.ln()
                    }
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Sqrt => v.sqrt(),
                }
            }
        })
    }

    fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(v) if *v == 0.0)
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Num(v) if *v == 1.0)
    }

    fn add(l: Expr, r: Expr) -> Expr {
        if l.is_zero() {
            r
        } else if r.is_zero() {
            l
        } else {
            Expr::bin(BinOp::Add, l, r)
        }
    }

    fn sub(l: Expr, r: Expr) -> Expr {
        if r.is_zero() {
            l
        } else if l.is_zero() {
            Expr::Neg(Box::new(r))
        } else {
            Expr::bin(BinOp::Sub, l, r)
        }
    }

    fn mul(l: Expr, r: Expr) -> Expr {
        if l.is_zero() || r.is_zero() {
            Expr::Num(0.0)
        } else if l.is_one() {
            r
        } else if r.is_one() {
            l
        } else {
            Expr::bin(BinOp::Mul, l, r)
        }
    }

    fn div(l: Expr, r: Expr) -> Expr {
        if l.is_zero() {
            Expr::Num(0.0)
        } else if r.is_one() {
            l
        } else {
            Expr::bin(BinOp::Div, l, r)
        }
    }

    /// Symbolic derivative in `A`, lightly simplified.
    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Num(_) | Expr::I => Expr::Num(0.0),
            Expr::Var => Expr::Num(1.0),
            Expr::Neg(x) => {
                let d = x.derivative();
                if d.is_zero() {
                    d
                } else {
                    Expr::Neg(Box::new(d))
                }
            }
            Expr::Bin(op, l, r) => {
                let (dl, dr) = (l.derivative(), r.derivative());
                let (l, r) = ((**l).clone(), (**r).clone());
                match op {
                    BinOp::Add => Expr::add(dl, dr),
                    BinOp::Sub => Expr::sub(dl, dr),
                    BinOp::Mul => Expr::add(Expr::mul(dl, r.clone()), Expr::mul(l, dr)),
                    BinOp::Div => {
                        let num = Expr::sub(Expr::mul(dl, r.clone()), Expr::mul(l, dr));
                        Expr::div(num, Expr::Pow(Box::new(r), Rational::integer(2)))
                    }
                }
            }
            Expr::Pow(b, k) => {
                let db = b.derivative();
                if db.is_zero() {
                    return Expr::Num(0.0);
                }
                let km1 = k.checked_sub(Rational::integer(1)).expect("small exponent");
                let inner = if km1.num() == 0 {
                    Expr::Num(1.0)
                } else if km1 == Rational::integer(1) {
                    (**b).clone()
                } else {
                    Expr::Pow(b.clone(), km1)
                };
                Expr::mul(Expr::mul(Expr::Num(k.to_f64()), inner), db)
            }
            Expr::Call(func, x) => {
                let dx = x.derivative();
                if dx.is_zero() {
                    return Expr::Num(0.0);
                }
                let x = (**x).clone();
                let outer = match func {
                    Func::Exp => Expr::Call(Func::Exp, Box::new(x)),
                    Func::Log => return Expr::div(dx, x),
                    Func::Sin => Expr::Call(Func::Cos, Box::new(x)),
                    Func::Cos => Expr::Neg(Box::new(Expr::Call(Func::Sin, Box::new(x)))),
                    Func::Sqrt => {
                        return Expr::div(
                            dx,
                            Expr::mul(Expr::Num(2.0), Expr::Call(Func::Sqrt, Box::new(x))),
                        )
                    }
                };
                Expr::mul(outer, dx)
            }
        }
    }

    /// Taylor expansion `Σ c_k (A - center)^k` through `order`.
    pub fn series(&self, center: C64, order: usize) -> Result<TruncSeries> {
        let degenerate = |what: &str, e: &Expr| {
            Error::DegenerateSeries(format!("{what} of '{e}' has no expansion at A = {center}"))
        };
        Ok(match self {
            Expr::Num(v) => TruncSeries::constant(C64::new(*v, 0.0), order),
            Expr::I => TruncSeries::constant(C64::new(0.0, 1.0), order),
            Expr::Var => TruncSeries::variable(center, order),
            Expr::Neg(x) => -&x.series(center, order)?,
            Expr::Bin(op, l, r) => {
                let (x, y) = (l.series(center, order)?, r.series(center, order)?);
                match op {
                    BinOp::Add => &x + &y,
                    BinOp::Sub => &x - &y,
                    BinOp::Mul => &x * &y,
                    BinOp::Div => x.try_div(&y).map_err(|_| degenerate("division by", r))?,
                }
            }
            Expr::Pow(b, k) => {
                let s = b.series(center, order)?;
                if k.is_integer() && k.num() >= 0 {
                    s.powi(k.num() as u64)
                } else {
                    s.powf(k.to_f64()).map_err(|_| degenerate("power", b))?
                }
            }
            Expr::Call(func, x) => {
                let s = x.series(center, order)?;
                match func {
                    Func::Exp => s.exp(),
                    Func::Log => s.log().map_err(|_| degenerate("log", x))?,
                    Func::Sin => s.sin(),
                    Func::Cos => s.cos(),
                    Func::Sqrt => s.powf(0.5).map_err(|_| degenerate("sqrt", x))?,
                }
            }
        })
    }

    /// Value and derivative by forward-mode dual numbers.
    pub fn eval_dual(&self, a: C64) -> Result<(C64, C64)> {
        let s = self.series(a, 1).or_else(|_| -> Result<TruncSeries> {
            let d = self.derivative();
            Ok(TruncSeries::new(vec![self.eval(a)?, d.eval(a)?]))
        })?;
        Ok((s.coeff(0), s.coeff(1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, a: f64) -> C64 {
        parse_expr(src).unwrap().eval(C64::new(a, 0.0)).unwrap()
    }

    #[test]
    fn integer_power_before_division_is_parenthesised() {
        let sq = Expr::Pow(Box::new(Expr::Var), Rational::integer(2));
        let t = Expr::Bin(BinOp::Div, Box::new(sq.clone()), Box::new(Expr::num(3.0)));
        assert_eq!(t.to_string(), "(A^2)/3");
        assert_eq!(parse_expr(&t.to_string()).unwrap(), t);
        let neg = Expr::Bin(
            BinOp::Div,
            Box::new(Expr::Neg(Box::new(sq))),
            Box::new(Expr::num(3.0)),
        );
        assert_eq!(parse_expr(&neg.to_string()).unwrap(), neg);
        assert_eq!(parse_expr("A^2/3").unwrap().to_string(), "A^(2/3)");
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse_expr("exp(A)").unwrap(),
            Expr::Call(Func::Exp, Box::new(Expr::Var))
        );
        assert_eq!(
            parse_expr("1/(1-A)").unwrap(),
            Expr::bin(
                BinOp::Div,
                Expr::Num(1.0),
                Expr::bin(BinOp::Sub, Expr::Num(1.0), Expr::Var)
            )
        );
        assert_eq!(ev("(1+A)^2", 3.0), C64::new(16.0, 0.0));
        assert_eq!(ev("A^1/2", 4.0), C64::new(2.0, 0.0));
        assert_eq!(ev("2^-1", 0.0), C64::new(0.5, 0.0));
        assert_eq!(ev("2*-A", 3.0), C64::new(-6.0, 0.0));
        assert_eq!(ev(" 1e-1 + 2.5E1 ", 0.0), C64::new(25.1, 0.0));
        assert_eq!(
            parse_expr("i*i").unwrap().eval(C64::new(0.0, 0.0)).unwrap(),
            C64::new(-1.0, 0.0)
        );
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_expr("1 + * A") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        match parse_expr("exp(A") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expr("tan(A)"), Err(Error::UnknownIdent(_))));
        assert!(matches!(parse_expr("x"), Err(Error::UnknownIdent(_))));
        assert!(matches!(parse_expr(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr("A^0.5"), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr("A^(1/0)"), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr("--A"), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr("(A))"), Err(Error::Parse { .. })));
    }

    #[test]
    fn printer_is_canonical() {
        for (src, want) in [
            ("1-(A-1)", "1 - (A - 1)"),
            ("(1-A)-1", "1 - A - 1"),
            ("-A^2", "-A^2"),
            ("(-A)^2", "(-A)^2"),
            ("A^(1/2)", "A^(1/2)"),
            ("A^-3", "A^(-3)"),
            ("2/(3*A)", "2/(3*A)"),
            ("-(1+A)", "-(1 + A)"),
        ] {
            assert_eq!(parse_expr(src).unwrap().to_string(), want);
        }
    }

    #[test]
    fn series_examples() {
        let s = parse_expr("exp(A)")
            .unwrap()
            .series(C64::new(0.0, 0.0), 4)
            .unwrap();
        let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
        for k in 0..=4 {
            assert!((s.coeff(k) - C64::new(1.0 / fact[k], 0.0)).norm() < 1e-15);
        }
        let e = parse_expr("log(A)").unwrap().series(C64::new(0.0, 0.0), 4);
        match e {
            Err(Error::DegenerateSeries(msg)) => assert!(msg.contains("'A'")),
            other => panic!("{other:?}"),
        }
        let f = parse_expr("1+A").unwrap();
        let s = f.series(C64::new(0.0, 0.0), 3).unwrap();
        assert_eq!(
            s.eval(C64::new(0.5, 0.0)).value,
            f.eval(C64::new(0.5, 0.0)).unwrap()
        );
    }

    #[test]
    fn derivative_matches_series() {
        let a = C64::new(0.3, 0.2);
        for src in [
            "exp(A)*sin(A)",
            "1/(1-A)^2",
            "sqrt(1+A)/cos(A)",
            "log(2+A)^3",
            "A^(2/3)",
        ] {
            let e = parse_expr(src).unwrap();
            let s = e.series(a, 1).unwrap();
            let d = e.derivative().eval(a).unwrap();
            assert!((s.coeff(1) - d).norm() < 1e-13, "{src}");
            assert!((s.coeff(0) - e.eval(a).unwrap()).norm() < 1e-14, "{src}");
        }
    }

    #[test]
    fn pole_errors() {
        assert!(matches!(
            parse_expr("1/A").unwrap().eval(C64::new(0.0, 0.0)),
            Err(Error::Pole(_))
        ));
        assert!(matches!(
            parse_expr("log(A)").unwrap().eval(C64::new(0.0, 0.0)),
            Err(Error::Pole(_))
        ));
    }
}
