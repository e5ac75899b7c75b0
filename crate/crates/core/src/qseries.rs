//! Truncated power series with complex coefficients, Lagrange reversion and
//! the Möbius-weighted infinite product attached to a reversion.
//!
//! A [`TruncSeries`] of order `N` carries `c_0..c_N`. Binary operations
//! truncate to the smaller of the two orders and never extend it.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Truncated formal power series `c_0 + c_1 x + ... + c_N x^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncSeries {
    coeffs: Vec<C64>,
}

/// Value of a series at a point together with a crude bound on the
/// neglected tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: C64,
    pub tail: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Elementary functions applied coefficient-wise through their ODEs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transcendental {
    Exp,
    Log,
    /// Real power; integer powers of series with `c_0 = 0` are allowed.
    Pow(f64),
}

impl TruncSeries {
    /// Builds a series from `c_0..c_N`. An empty vector gives the zero series
    /// of order 0.
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(C64::new(0.0, 0.0));
        }
        TruncSeries { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero(order: usize) -> Self {
        TruncSeries {
            coeffs: vec![C64::new(0.0, 0.0); order + 1],
        }
    }

    pub fn constant(c: C64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(C64::new(1.0, 0.0), order)
    }

    /// The series `center + x`.
    pub fn variable(center: C64, order: usize) -> Self {
        let mut s = Self::constant(center, order);
        if order >= 1 {
            s.coeffs[1] = C64::new(1.0, 0.0);
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient `c_k`, zero beyond the truncation order.
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs: Vec<C64> = self.coeffs.iter().take(order + 1).copied().collect();
        coeffs.resize(order + 1, C64::new(0.0, 0.0));
        TruncSeries { coeffs }
    }

    pub fn scale(&self, k: C64) -> Self {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Multiplies by the variable, keeping the order.
    pub fn shift_up(&self) -> Self {
        let n = self.order();
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
        coeffs[1..].copy_from_slice(&self.coeffs[..n]);
        TruncSeries { coeffs }
    }

    /// Term-wise derivative; the order drops by one (order 0 stays 0).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        TruncSeries {
            coeffs: (1..self.coeffs.len())
                .map(|k| self.coeffs[k] * k as f64)
                .collect(),
        }
    }

    pub fn try_div(&self, rhs: &TruncSeries) -> Result<Self> {
        let n = self.order().min(rhs.order());
        let d0 = rhs.coeffs[0];
        if d0.norm() == 0.0 {
            return Err(Error::DegenerateSeries(
                "division by a series with zero constant term".into(),
            ));
        }
        let mut q = vec![C64::new(0.0, 0.0); n + 1];
        for k in 0..=n {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= rhs.coeffs[j] * q[k - j];
            }
            q[k] = acc / d0;
        }
        Ok(TruncSeries { coeffs: q })
    }

    /// `self ∘ inner` by Horner accumulation. Requires `inner.c_0 = 0`.
    pub fn compose(&self, inner: &TruncSeries) -> Result<Self> {
        if inner.coeffs[0].norm() != 0.0 {
            return Err(Error::CompositionDomain);
        }
        let n = self.order().min(inner.order());
        let inner = inner.truncate(n);
        let mut acc = TruncSeries::constant(self.coeffs[n], n);
        for k in (0..n).rev() {
            acc = &acc * &inner;
            acc.coeffs[0] += self.coeffs[k];
        }
        Ok(acc)
    }

    pub fn exp(&self) -> Self {
        let n = self.order();
        let s = &self.coeffs;
        let mut b = vec![C64::new(0.0, 0.0); n + 1];
        b[0] = s[0].exp();
        for k in 1..=n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..=k {
                acc += s[j] * b[k - j] * j as f64;
            }
            b[k] = acc / k as f64;
        }
        TruncSeries { coeffs: b }
    }

    pub fn log(&self) -> Result<Self> {
        let n = self.order();
        let s = &self.coeffs;
        if s[0].norm() == 0.0 {
            return Err(Error::DegenerateSeries(
                "logarithm of a series with zero constant term".into(),
            ));
        }
        let mut l = vec![C64::new(0.0, 0.0); n + 1];
        l[0] = s[0].ln();
        for k in 1..=n {
            let mut acc = s[k];
            for j in 1..k {
                acc -= l[j] * s[k - j] * (j as f64 / k as f64);
            }
            l[k] = acc / s[0];
        }
        Ok(TruncSeries { coeffs: l })
    }

    /// `self^p` with the principal branch for the constant term.
    pub fn powf(&self, p: f64) -> Result<Self> {
        let n = self.order();
        let s = &self.coeffs;
        let is_nonneg_int = p >= 0.0 && p.fract() == 0.0;
        if s[0].norm() == 0.0 {
            if !is_nonneg_int {
                return Err(Error::DegenerateSeries(format!(
                    "power {p} of a series with zero constant term"
                )));
            }
            return Ok(self.powi(p as u64));
        }
        // J.C.P. Miller recurrence.
        let mut b = vec![C64::new(0.0, 0.0); n + 1];
        b[0] = if is_nonneg_int {
            s[0].powu(p as u32)
        } else {
            (s[0].ln() * p).exp()
        };
        for k in 1..=n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..=k {
                acc += s[j] * b[k - j] * (p * j as f64 - (k - j) as f64);
            }
            b[k] = acc / (s[0] * k as f64);
        }
        Ok(TruncSeries { coeffs: b })
    }

    /// Non-negative integer power by repeated squaring.
    pub fn powi(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = TruncSeries::one(self.order());
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn sin(&self) -> Self {
        let i = C64::new(0.0, 1.0);
        let ep = self.scale(i).exp();
        let em = self.scale(-i).exp();
        (&ep - &em).scale(C64::new(0.0, -0.5))
    }

    pub fn cos(&self) -> Self {
        let i = C64::new(0.0, 1.0);
        let ep = self.scale(i).exp();
        let em = self.scale(-i).exp();
        (&ep + &em).scale(C64::new(0.5, 0.0))
    }

    /// Horner evaluation with the tail estimate `|c_N| |q|^{N+1} / (1 - |q|)`.
    pub fn eval(&self, q: C64) -> SeriesValue {
        let mut acc = C64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * q + c;
        }
        let n = self.order();
        let r = q.norm();
        let tail = if r < 1.0 {
            self.coeffs[n].norm() * r.powi(n as i32 + 1) / (1.0 - r)
        } else {
            f64::INFINITY
        };
        SeriesValue { value: acc, tail }
    }
}

impl Add for &TruncSeries {
    type Output = TruncSeries;
    fn add(self, rhs: &TruncSeries) -> TruncSeries {
        let n = self.order().min(rhs.order());
        TruncSeries {
            coeffs: (0..=n).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect(),
        }
    }
}

impl Sub for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, rhs: &TruncSeries) -> TruncSeries {
        let n = self.order().min(rhs.order());
        TruncSeries {
            coeffs: (0..=n).map(|k| self.coeffs[k] - rhs.coeffs[k]).collect(),
        }
    }
}

impl Mul for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, rhs: &TruncSeries) -> TruncSeries {
        let n = self.order().min(rhs.order());
        let mut out = vec![C64::new(0.0, 0.0); n + 1];
        for (i, a) in self.coeffs.iter().take(n + 1).enumerate() {
            if a.norm() == 0.0 {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(n + 1 - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        TruncSeries { coeffs: out }
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        self.scale(C64::new(-1.0, 0.0))
    }
}

pub fn series_arith(lhs: &TruncSeries, rhs: &TruncSeries, op: SeriesOp) -> Result<TruncSeries> {
    Ok(match op {
        SeriesOp::Add => lhs + rhs,
        SeriesOp::Sub => lhs - rhs,
        SeriesOp::Mul => lhs * rhs,
        SeriesOp::Div => lhs.try_div(rhs)?,
    })
}

pub fn series_compose(outer: &TruncSeries, inner: &TruncSeries) -> Result<TruncSeries> {
    outer.compose(inner)
}

pub fn series_transcend(s: &TruncSeries, func: Transcendental) -> Result<TruncSeries> {
    match func {
        Transcendental::Exp => Ok(s.exp()),
        Transcendental::Log => s.log(),
        Transcendental::Pow(k) => s.powf(k),
    }
}

/// Solves `w = q f(w)` for the series `w(q) = Σ c_n q^n` through order `order`.
///
/// Newton iteration on the series equation: each step doubles the number of
/// correct coefficients.
pub fn lagrange_revert(f: &TruncSeries, order: usize) -> Result<TruncSeries> {
    if order == 0 {
        return Err(Error::Domain("reversion order must be at least 1".into()));
    }
    if f.coeff(0).norm() == 0.0 {
        return Err(Error::ZeroAtOrigin);
    }
    let f = f.truncate(order);
    let df = f.derivative().truncate(order);
    let mut w = TruncSeries::zero(order);
    w.coeffs[1] = f.coeffs[0];
    let mut correct = 1usize;
    while correct < order {
        let fw = f.compose(&w)?;
        let dfw = df.compose(&w)?;
        let residual = &w - &fw.shift_up();
        let slope = &TruncSeries::one(order) - &dfw.shift_up();
        let step = residual.try_div(&slope)?;
        w = &w - &step;
        w.coeffs[0] = C64::new(0.0, 0.0);
        correct = (2 * correct + 1).min(order);
    }
    Ok(w)
}

/// Coefficients of `w/f(w) - q`; zero through the order for an exact reversion.
pub fn reversion_residual(f: &TruncSeries, w: &TruncSeries) -> Result<TruncSeries> {
    let n = f.order().min(w.order());
    let fw = f.truncate(n).compose(&w.truncate(n))?;
    let mut r = w.truncate(n).try_div(&fw)?;
    if n >= 1 {
        r.coeffs[1] -= C64::new(1.0, 0.0);
    }
    Ok(r)
}

/// The printed Lagrange bracket `(1/Γ(n)) [dⁿ⁻¹/dhⁿ⁻¹ f(h)ⁿ]_{h=0}`, evaluated
/// by repeated series differentiation.
pub fn lagrange_bracket(f: &TruncSeries, n: usize) -> Result<C64> {
    if n == 0 {
        return Err(Error::Domain("bracket index starts at 1".into()));
    }
    if f.order() + 1 < n {
        return Err(Error::Domain(format!(
            "series of order {} cannot produce bracket {n}",
            f.order()
        )));
    }
    let mut d = f.truncate(n - 1).powi(n as u64);
    for _ in 1..n {
        d = d.derivative();
    }
    let gamma_n: f64 = (1..n).map(|k| k as f64).product();
    Ok(d.coeff(0) / gamma_n)
}

/// Möbius function.
pub fn mobius(n: u64) -> Result<i8> {
    if n == 0 {
        return Err(Error::Domain("mobius(0) is undefined".into()));
    }
    let mut m = n;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return Ok(0);
            }
            sign = -sign;
        }
        p += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    Ok(sign)
}

fn divisors(n: usize) -> impl Iterator<Item = usize> {
    (1..=n).filter(move |d| n % d == 0)
}

/// Exponents `e_n = (1/n) Σ_{d|n} μ(n/d) a_d` of the product
/// `∏ (1 - qⁿ)^{-e_n}`. Index 0 holds `e_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductExponents {
    e: Vec<C64>,
}

impl ProductExponents {
    pub fn from_a(a: &[C64]) -> Self {
        let e = (1..=a.len())
            .map(|n| {
                let sum: C64 = divisors(n)
                    .map(|d| a[d - 1] * f64::from(mobius((n / d) as u64).unwrap_or(0)))
                    .sum();
                sum / n as f64
            })
            .collect();
        ProductExponents { e }
    }

    pub fn exponents(&self) -> &[C64] {
        &self.e
    }

    /// Inverts the Möbius sum: `a_n = Σ_{d|n} d e_d`.
    pub fn recover_a(&self) -> Vec<C64> {
        (1..=self.e.len())
            .map(|n| divisors(n).map(|d| self.e[d - 1] * d as f64).sum())
            .collect()
    }

    /// `exp(-Σ_{n≤N} e_n log(1 - qⁿ))`, principal logarithm.
    pub fn eval(&self, q: C64) -> Result<C64> {
        if q.norm() >= 1.0 {
            return Err(Error::ConvergenceDomain(format!(
                "product needs |q| < 1, got {}",
                q.norm()
            )));
        }
        let mut qn = C64::new(1.0, 0.0);
        let mut acc = C64::new(0.0, 0.0);
        for e in &self.e {
            qn *= q;
            acc -= e * (C64::new(1.0, 0.0) - qn).ln();
        }
        Ok(acc.exp())
    }
}

pub fn product_exponents(a: &[C64]) -> ProductExponents {
    ProductExponents::from_a(a)
}

pub fn eval_series(s: &TruncSeries, q: C64) -> SeriesValue {
    s.eval(q)
}

pub fn eval_product(e: &ProductExponents, q: C64) -> Result<C64> {
    e.eval(q)
}
