//! The real-variable pipeline on `q = e^{-π√A}`: `h_i`, `L_i` and its
//! inverse `L`, the `S` residuals, and the two-path checks built on them.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inversion::{f1_forward, FuncSpec};
use crate::numeric::{brent, derivative, golden_min};
use crate::qseries::{lagrange_revert, TruncSeries};
use crate::quadint::{beta_r, QuadraticPowerIntegral};
use crate::quadrature::{integrate, integrate_singular, EndpointSingularity};
use crate::specfun::{inc_beta, k_r, rogers_ramanujan, Nome};

const INV_PI2: f64 = 1.0 / (PI * PI);

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn real_part(v: C64, what: &str) -> Result<f64> {
    if v.im.abs() > 1e-12 * v.re.abs().max(1.0) {
        return Err(Error::Domain(format!("{what} is not real: {v}")));
    }
    Ok(v.re)
}

/// `A > 0` with its nome `q = e^{-π√A}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealPoint {
    a: f64,
    q: f64,
}

impl RealPoint {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Domain(format!("A must be positive, got {a}")));
        }
        Ok(RealPoint {
            a,
            q: (-PI * a.sqrt()).exp(),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// Integration constants left open by the real analog.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RealConstants {
    /// additive constant of `h_i` in its two-series form
    pub c: f64,
    /// additive constant of `h_i` in its `∫ w'(q) log q dq` form
    pub c_prime: f64,
    /// `l₁` of `h = π²/L'² + l₁`
    pub l1: f64,
    /// offset with `L_i(w(q)) = h_i(A) + l₂`
    pub l2: f64,
}

#[derive(Debug, Clone)]
pub struct RealContext {
    f: FuncSpec,
    w: TruncSeries,
    dw: TruncSeries,
    a: Vec<f64>,
    constants: RealConstants,
    a_min: f64,
}

impl RealContext {
    pub fn new(f: &FuncSpec, order: usize) -> Result<Self> {
        let series = if f.order() >= order {
            f.series().truncate(order)
        } else {
            f.taylor_at(re(0.0), order)?
        };
        let w = lagrange_revert(&series, order)?;
        let a = (1..=order)
            .map(|n| real_part(w.coeff(n) * n as f64, "series coefficient"))
            .collect::<Result<Vec<_>>>()?;
        let dw = w.derivative();
        let mut ctx = RealContext {
            f: f.clone(),
            w,
            dw,
            a,
            constants: RealConstants::default(),
            a_min: 0.0,
        };
        // smallest A on a geometric grid where both series are converged
        let mut a_min = 1e-4;
        while a_min < 1e4 && !ctx.series_ok(RealPoint::new(a_min)?.q) {
            a_min *= 1.1;
        }
        ctx.a_min = a_min;
        Ok(ctx)
    }

    pub fn with_constants(mut self, constants: RealConstants) -> Self {
        self.constants = constants;
        self
    }

    pub fn constants(&self) -> RealConstants {
        self.constants
    }

    pub fn f(&self) -> &FuncSpec {
        &self.f
    }

    pub fn a_coeffs(&self) -> &[f64] {
        &self.a
    }

    /// Lower end of the window where the series are trusted.
    pub fn a_min(&self) -> f64 {
        self.a_min
    }

    fn series_ok(&self, q: f64) -> bool {
        let w = self.w.eval(re(q));
        let dw = self.dw.eval(re(q));
        w.tail <= 1e-14 * w.value.norm().max(1e-300)
            && dw.tail <= 1e-14 * dw.value.norm().max(1e-300)
    }

    fn check(&self, p: RealPoint) -> Result<()> {
        if self.series_ok(p.q) {
            Ok(())
        } else {
            Err(Error::AccuracyLoss(format!(
                "series not converged at A = {} (q = {:.4})",
                p.a, p.q
            )))
        }
    }

    pub fn w(&self, q: f64) -> f64 {
        self.w.eval(re(q)).value.re
    }

    pub fn w_prime(&self, q: f64) -> f64 {
        self.dw.eval(re(q)).value.re
    }

    /// `P(A) = 1/(q w'(q))`.
    pub fn p(&self, p: RealPoint) -> Result<f64> {
        self.check(p)?;
        Ok(1.0 / (p.q * self.w_prime(p.q)))
    }

    /// `h_i'(A) = -q w'(q)/2`.
    pub fn hi_prime(&self, p: RealPoint) -> Result<f64> {
        self.check(p)?;
        Ok(-0.5 * p.q * self.w_prime(p.q))
    }

    /// `h_i(A) = c + π⁻² Σ (a_n/n²) qⁿ + (√A/π) Σ (a_n/n) qⁿ`.
    pub fn hi_of(&self, p: RealPoint) -> f64 {
        let (mut s2, mut s1) = (0.0, 0.0);
        for (k, an) in self.a.iter().enumerate().rev() {
            let n = (k + 1) as f64;
            s2 = (s2 + an / (n * n)) * p.q;
            s1 = (s1 + an / n) * p.q;
        }
        self.constants.c + INV_PI2 * s2 + p.a.sqrt() / PI * s1
    }

    /// `c' - π⁻² ∫₀^q w'(t) log t dt` with `w'` from a direct Newton solve of
    /// `w = t f(w)` at every node, not from the series.
    pub fn hi_of_by_quadrature(&self, p: RealPoint) -> Result<f64> {
        let f = &self.f;
        let err = std::cell::RefCell::new(None);
        let r = integrate_singular(
            |t: C64| match direct_w_prime(f, t.re) {
                Ok(d) => re(d * t.re.ln()),
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    re(f64::NAN)
                }
            },
            re(0.0),
            re(p.q),
            EndpointSingularity::left(0.75),
            1e-16,
        );
        if let Some(e) = err.into_inner() {
            return Err(e);
        }
        Ok(self.constants.c_prime - INV_PI2 * r?.value.re)
    }

    /// `A` with `h_i(A) = x`, by root-finding on the decreasing `h_i`.
    pub fn hi_inverse(&self, x: f64) -> Result<f64> {
        let lo = self.a_min;
        let hi = 1e4;
        let g = |a: f64| self.hi_of(RealPoint::new(a).expect("positive")) - x;
        brent(g, lo, hi, 1e-15 * hi).and_then(|a| {
            // polish: the bracket width limits brent's absolute resolution
            let mut a = a;
            for _ in 0..4 {
                let p = RealPoint::new(a)?;
                let step = (self.hi_of(p) - x) / self.hi_prime(p)?;
                if !step.is_finite() || a - step <= 0.0 {
                    break;
                }
                a -= step;
                if step.abs() <= 1e-16 * a {
                    break;
                }
            }
            Ok(a)
        })
    }
}

/// `w'(t) = f(w)²/(f(w) - w f'(w))` with `w` Newton-solved.
fn direct_w_prime(f: &FuncSpec, t: f64) -> Result<f64> {
    let w = crate::inversion::solve_w_direct(f, re(t))?;
    let (fw, dfw) = f.eval_with_deriv(w)?;
    real_part(fw * fw / (fw - w * dfw), "w'")
}

/// `L_i'(A) = -π⁻² log(A/f(A))`.
pub fn l_inverse_deriv(f: &FuncSpec, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("A must be positive, got {a}")));
    }
    let fa = real_part(f.eval(re(a))?, "f(A)")?;
    if fa == 0.0 {
        return Err(Error::Pole(format!("f vanishes at A = {a}")));
    }
    if fa < 0.0 {
        return Err(Error::Domain(format!("f(A) < 0 at A = {a}")));
    }
    Ok(-INV_PI2 * (a / fa).ln())
}

/// `L_i(u) = -π⁻²(u log u - u) + π⁻² ∫₀^u log f + l₂`, and its inverse `L`.
#[derive(Debug, Clone)]
pub struct LFunction {
    f: FuncSpec,
    offset: f64,
}

impl LFunction {
    pub fn new(f: &FuncSpec, offset: f64) -> Self {
        LFunction {
            f: f.clone(),
            offset,
        }
    }

    /// Fits the offset so that `L_i(w(q)) = h_i(A)` at the anchors; returns
    /// the function and the spread of the per-anchor offsets.
    pub fn fit(ctx: &RealContext, anchors: &[f64]) -> Result<(Self, f64)> {
        let bare = LFunction::new(ctx.f(), 0.0);
        let mut offs = Vec::with_capacity(anchors.len());
        for &a in anchors {
            let p = RealPoint::new(a)?;
            offs.push(ctx.hi_of(p) - bare.l_i(ctx.w(p.q))?);
        }
        let mean = offs.iter().sum::<f64>() / offs.len() as f64;
        let spread = offs.iter().map(|o| (o - mean).abs()).fold(0.0, f64::max);
        Ok((LFunction::new(ctx.f(), mean), spread))
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn l_i(&self, u: f64) -> Result<f64> {
        if !(u > 0.0) {
            return Err(Error::Domain(format!("L_i needs u > 0, got {u}")));
        }
        let err = std::cell::RefCell::new(None);
        let r = integrate(
            |t: C64| match self.f.eval(t) {
                Ok(v) if v.re > 0.0 => re(v.re.ln()),
                Ok(v) => {
                    err.borrow_mut()
                        .get_or_insert(Error::Domain(format!("f({}) = {v} is not positive", t.re)));
                    re(f64::NAN)
                }
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    re(f64::NAN)
                }
            },
            re(0.0),
            re(u),
            1e-17,
        );
        if let Some(e) = err.into_inner() {
            return Err(e);
        }
        Ok(-INV_PI2 * (u * u.ln() - u) + INV_PI2 * r?.value.re + self.offset)
    }

    pub fn l_i_prime(&self, u: f64) -> Result<f64> {
        l_inverse_deriv(&self.f, u)
    }

    /// `L(x)`: the `u > 0` with `L_i(u) = x` on the first increasing stretch
    /// of `L_i`.
    pub fn l(&self, x: f64) -> Result<f64> {
        let lo = 1e-300;
        let mut hi = 0.25;
        loop {
            if self.l_i_prime(hi)? <= 0.0 {
                return Err(Error::NonMonotone(format!(
                    "L_i' changes sign below u = {hi} before reaching {x}"
                )));
            }
            if self.l_i(hi)? >= x {
                break;
            }
            hi *= 1.5;
            if hi > 1e6 {
                return Err(Error::NoBracket(format!("L_i never reaches {x}")));
            }
        }
        let g = |u: f64| self.l_i(u).map(|v| v - x).unwrap_or(f64::NAN);
        let u = brent(g, lo, hi, 1e-18)?;
        // one Newton step with the exact derivative sharpens brent's last digit
        let step = (self.l_i(u)? - x) / self.l_i_prime(u)?;
        Ok(if step.is_finite() { u - step } else { u })
    }
}

fn fd_rel(x: f64, rel: f64) -> f64 {
    rel * x.abs().max(f64::MIN_POSITIVE)
}

/// Both sides of `-L''/L'³ + π⁻²/L = S`, `S(x) = π⁻²(1/L(x) - P(h(x)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SResidual {
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// `S(x) = π⁻²(1/L(x) - P(A))` with `h_i(A) = x`.
pub fn s_of(ctx: &RealContext, lf: &LFunction, x: f64) -> Result<f64> {
    let a = ctx.hi_inverse(x)?;
    Ok(INV_PI2 * (1.0 / lf.l(x)? - ctx.p(RealPoint::new(a)?)?))
}

pub fn s_residual(ctx: &RealContext, lf: &LFunction, x: f64) -> Result<SResidual> {
    let lval = lf.l(x)?;
    let l = |z: C64| lf.l(z.re).map(re);
    let d1 = derivative(l, re(x), fd_rel(x, 1e-6))?.richardson.re;
    // L comes from a root solve, so its noise sits well above eps; at 1e-4
    // roundoff dominates the Richardson-corrected difference
    let h = fd_rel(x, 1e-2);
    let second =
        |h: f64| -> Result<f64> { Ok((lf.l(x + h)? - 2.0 * lval + lf.l(x - h)?) / (h * h)) };
    let (s1, s2) = (second(h)?, second(h / 2.0)?);
    let d2 = (4.0 * s2 - s1) / 3.0;
    let lhs = -d2 / d1.powi(3) + INV_PI2 / lval;
    let rhs = s_of(ctx, lf, x)?;
    Ok(SResidual {
        x,
        lhs,
        rhs,
        residual: lhs - rhs,
    })
}

/// Residual of `u'' - S(u) + A[u''' - S'(u)u'] = 0` for `u = L_i`.
pub fn u_form_residual(ctx: &RealContext, lf: &LFunction, a: f64) -> Result<f64> {
    let u = |t: f64| lf.l_i(t);
    let u0 = u(a)?;
    let d1 = derivative(|z: C64| u(z.re).map(re), re(a), fd_rel(a, 1e-6))?
        .richardson
        .re;
    let second = |h: f64| -> Result<f64> { Ok((u(a + h)? - 2.0 * u0 + u(a - h)?) / (h * h)) };
    // same step reasoning as in s_residual
    let h2 = fd_rel(a, 1e-2);
    let d2 = (4.0 * second(h2 / 2.0)? - second(h2)?) / 3.0;
    let third = |h: f64| -> Result<f64> {
        Ok(
            (u(a + 2.0 * h)? - 2.0 * u(a + h)? + 2.0 * u(a - h)? - u(a - 2.0 * h)?)
                / (2.0 * h.powi(3)),
        )
    };
    let h3 = fd_rel(a, 1e-2);
    let d3 = (4.0 * third(h3 / 2.0)? - third(h3)?) / 3.0;
    let s = s_of(ctx, lf, u0)?;
    let ds = derivative(
        |z: C64| s_of(ctx, lf, z.re).map(re),
        re(u0),
        fd_rel(u0, 1e-4),
    )?
    .richardson
    .re;
    Ok(d2 - s + a * (d3 - ds * d1))
}

/// `R₂ - R₁` with `h_i(R_k) = Ω-value at r_k`; the quadratic's prefactor
/// must be real.
pub fn preimage_gap(
    ctx: &RealContext,
    q: &QuadraticPowerIntegral,
    r1: f64,
    r2: f64,
) -> Result<f64> {
    if r1 == r2 {
        return Ok(0.0);
    }
    let scale = real_part(q.prefactor() * q.complete_beta()?, "integral prefactor")?;
    let big_r = |r: f64| -> Result<f64> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!(
                "r must be positive and finite, got {r}"
            )));
        }
        ctx.hi_inverse(scale / (r + 1.0))
    };
    Ok(big_r(r2)? - big_r(r1)?)
}

/// Quadrature of `f₁(t)(a₁t² + b₁t + c₁)^{-m}` between the β-endpoints, with
/// `f₁(t) = -2/L(U(t)) + 2 f'(L)/f(L)` built from `L_i` alone.
pub fn preimage_gap_oracle(
    lf: &LFunction,
    q: &QuadraticPowerIntegral,
    r1: f64,
    r2: f64,
    tol: f64,
) -> Result<f64> {
    let x1 = q.abscissa(beta_r(q.m(), r1)?.beta);
    let x2 = q.abscissa(beta_r(q.m(), r2)?.beta);
    let logd = lf.f.log_derivative();
    let err = std::cell::RefCell::new(None);
    let integrand = |t: C64| -> Result<C64> {
        let u = crate::quadint::u_antideriv(q, t)?;
        let l = lf.l(real_part(u, "U(t)")?)?;
        let f1 = -2.0 / l + 2.0 * logd.eval(re(l))?;
        Ok(f1 * q.integrand(t))
    };
    let r = integrate(
        |t| match integrand(t) {
            Ok(v) => v,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                re(f64::NAN)
            }
        },
        x1,
        x2,
        tol,
    );
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    real_part(r?.value, "integral")
}

/// Fitted form `L(x) = π∫_{x₀}^x dt/√(h(t) - l₁) + K` against
/// `L(x) = w(e^{-π√(h(x) - l₁)})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqrtModelFit {
    pub l1: f64,
    pub sign: f64,
    pub base: f64,
    pub offset: f64,
}

fn sqrt_model_terms<H>(ctx: &RealContext, h: &H, fit: &SqrtModelFit, x: f64) -> Result<(f64, f64)>
where
    H: Fn(f64) -> Result<f64>,
{
    let hx = h(x)? - fit.l1;
    if !(hx > 0.0) {
        return Err(Error::Domain(format!("h(x) - l1 = {hx} is not positive")));
    }
    let lhs = ctx.w((-PI * hx.sqrt()).exp());
    let err = std::cell::RefCell::new(None);
    let r = integrate(
        |t: C64| match h(t.re) {
            Ok(v) if v - fit.l1 > 0.0 => re(1.0 / (v - fit.l1).sqrt()),
            Ok(v) => {
                err.borrow_mut().get_or_insert(Error::Domain(format!(
                    "h - l1 = {} on the path",
                    v - fit.l1
                )));
                re(f64::NAN)
            }
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                re(f64::NAN)
            }
        },
        re(fit.base),
        re(x),
        1e-13,
    );
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok((lhs, fit.sign * PI * r?.value.re))
}

/// `|w(e^{-π√(h(x) - l₁)}) - L(x)|` with `L` in its integral form.
pub fn sqrt_model_residual<H>(ctx: &RealContext, h: &H, fit: &SqrtModelFit, x: f64) -> Result<f64>
where
    H: Fn(f64) -> Result<f64>,
{
    let (lhs, int) = sqrt_model_terms(ctx, h, fit, x)?;
    Ok((lhs - int - fit.offset).abs())
}

/// Offset `K` minimising the squared residuals for fixed `l₁`, and the
/// largest remaining residual.
fn sqrt_model_offset<H>(
    ctx: &RealContext,
    h: &H,
    fit: &SqrtModelFit,
    anchors: &[f64],
) -> Result<(f64, f64)>
where
    H: Fn(f64) -> Result<f64>,
{
    let diffs = anchors
        .iter()
        .map(|&x| sqrt_model_terms(ctx, h, fit, x).map(|(l, i)| l - i))
        .collect::<Result<Vec<_>>>()?;
    let k = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let worst = diffs.iter().map(|d| (d - k).abs()).fold(0.0, f64::max);
    Ok((k, worst))
}

/// Fits `l₁` (golden section over `l1_range`), the sign and `K` on the
/// anchors; the base point is the middle anchor.
pub fn sqrt_model_fit<H>(
    ctx: &RealContext,
    h: &H,
    anchors: &[f64],
    l1_range: (f64, f64),
) -> Result<SqrtModelFit>
where
    H: Fn(f64) -> Result<f64>,
{
    if anchors.len() < 3 {
        return Err(Error::Domain("need at least three anchors".into()));
    }
    let mut sorted = anchors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let base = sorted[sorted.len() / 2];
    let mut best: Option<(f64, SqrtModelFit)> = None;
    for sign in [1.0, -1.0] {
        let cost = |l1: f64| {
            let fit = SqrtModelFit {
                l1,
                sign,
                base,
                offset: 0.0,
            };
            sqrt_model_offset(ctx, h, &fit, anchors)
                .map(|(_, w)| w)
                .unwrap_or(f64::INFINITY)
        };
        let l1 = golden_min(cost, l1_range.0, l1_range.1, 1e-12);
        let mut fit = SqrtModelFit {
            l1,
            sign,
            base,
            offset: 0.0,
        };
        let (k, worst) = sqrt_model_offset(ctx, h, &fit, anchors)?;
        fit.offset = k;
        if best.as_ref().is_none_or(|(w, _)| worst < *w) {
            best = Some((worst, fit));
        }
    }
    Ok(best.expect("two candidates").1)
}

/// Refits only `K` for a given `l₁` (used for the sensitivity check).
pub fn sqrt_model_refit_offset<H>(
    ctx: &RealContext,
    h: &H,
    fit: &SqrtModelFit,
    anchors: &[f64],
) -> Result<SqrtModelFit>
where
    H: Fn(f64) -> Result<f64>,
{
    let mut out = *fit;
    out.offset = sqrt_model_offset(ctx, h, fit, anchors)?.0;
    Ok(out)
}

/// `2^{-2/3} B₀(k_r²; 1/6, 2/3)`.
pub fn b0_of_r(r: f64) -> Result<f64> {
    let k = k_r(r)?;
    Ok(2f64.powf(-2.0 / 3.0) * inc_beta(re(k * k), 1.0 / 6.0, 2.0 / 3.0)?.re)
}

/// Inverse of [`b0_of_r`], which decreases in `r`.
pub fn m0(a: f64) -> Result<f64> {
    let (mut lo, mut hi) = (1.0, 1.0);
    while b0_of_r(lo)? < a {
        lo /= 2.0;
        if lo < 1e-6 {
            return Err(Error::NoBracket(format!(
                "{a} exceeds the range of the B0 map"
            )));
        }
    }
    while b0_of_r(hi)? > a {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NoBracket(format!(
                "{a} is below the range of the B0 map"
            )));
        }
    }
    brent(
        |r| b0_of_r(r).map(|v| v - a).unwrap_or(f64::NAN),
        lo,
        hi,
        1e-15,
    )
}

/// `(F₁(A), R(e^{-π√m₀(A)}))` from independent pipelines.
pub fn f1_real_cross(a: f64) -> Result<(f64, f64)> {
    let forward = real_part(f1_forward(re(a))?, "F1(A)")?;
    let r = m0(a)?;
    let nome = Nome::from_log(re(-PI * r.sqrt()))?;
    let rr = real_part(rogers_ramanujan(nome), "R(q)")?;
    Ok((forward, rr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn ctx(src: &str, n: usize) -> RealContext {
        RealContext::new(&FuncSpec::parse(src, n).unwrap(), n).unwrap()
    }

    #[test]
    fn real_point() {
        let p = RealPoint::new(1.0).unwrap();
        assert_eq!(p.q(), (-PI).exp());
        assert!(RealPoint::new(0.0).is_err());
        assert!(RealPoint::new(f64::NAN).is_err());
    }

    #[test]
    fn hi_examples_f_one() {
        let c = ctx("1", 8);
        let p = RealPoint::new(1.0).unwrap();
        assert!((c.hi_prime(p).unwrap() + (-PI).exp() / 2.0).abs() < 1e-16);
        let want = (-PI).exp() * (1.0 / (PI * PI) + 1.0 / PI);
        assert!((c.hi_of(p) - want).abs() < 1e-16);
        assert!((c.hi_of(p) - 0.018135).abs() < 2e-6);
        assert!(c.hi_of(RealPoint::new(1e4).unwrap()) < 1e-100);
        assert!((c.p(p).unwrap() * -2.0 * c.hi_prime(p).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn hi_derivative_matches() {
        let c = ctx("exp(A)", 32);
        for a in [0.8, 1.5, 3.0] {
            let d = derivative(
                |z: C64| Ok(re(c.hi_of(RealPoint::new(z.re).unwrap()))),
                re(a),
                1e-4,
            )
            .unwrap()
            .richardson
            .re;
            let want = c.hi_prime(RealPoint::new(a).unwrap()).unwrap();
            assert!((d - want).abs() < 1e-10, "{a}: {d} vs {want}");
        }
    }

    #[test]
    fn hi_two_forms() {
        for src in ["1", "exp(A)", "1+A"] {
            let c = ctx(src, 48);
            for a in [0.5, 1.0, 2.0, 4.0] {
                let p = RealPoint::new(a).unwrap();
                let s = c.hi_of(p);
                let q = c.hi_of_by_quadrature(p).unwrap();
                assert!((s - q).abs() < 1e-12, "{src} at {a}: {s} vs {q}");
            }
        }
    }

    #[test]
    fn hi_inverse_round_trip() {
        let c = ctx("exp(A)", 48);
        for a in [0.8, 2.0, 5.0] {
            let x = c.hi_of(RealPoint::new(a).unwrap());
            assert!((c.hi_inverse(x).unwrap() - a).abs() < 1e-12 * a);
        }
        assert!(matches!(c.hi_inverse(10.0), Err(Error::NoBracket(_))));
    }

    #[test]
    fn l_inverse_deriv_examples() {
        let f = FuncSpec::parse("exp(A)", 8).unwrap();
        assert!((l_inverse_deriv(&f, 1.0).unwrap() - 1.0 / (PI * PI)).abs() < 1e-16);
        let f = FuncSpec::parse("1+A", 8).unwrap();
        let v = l_inverse_deriv(&f, 1.0).unwrap();
        assert!((v - 2f64.ln() / (PI * PI)).abs() < 1e-17);
        assert!((v - 0.0702286).abs() < 5e-6);
        let f = FuncSpec::parse("2", 8).unwrap();
        assert_eq!(l_inverse_deriv(&f, 2.0).unwrap(), 0.0);
        let f = FuncSpec::parse("1-A", 8).unwrap();
        assert!(matches!(l_inverse_deriv(&f, 1.0), Err(Error::Pole(_))));
    }

    #[test]
    fn l_function_inverse() {
        let f = FuncSpec::parse("exp(A)", 8).unwrap();
        let lf = LFunction::new(&f, 0.0);
        let u: f64 = 0.05;
        // ∫ log e^t = u²/2
        let want = -(u * u.ln() - u) / (PI * PI) + u * u / 2.0 / (PI * PI);
        assert!((lf.l_i(u).unwrap() - want).abs() < 1e-17);
        assert!((lf.l(want).unwrap() - u).abs() < 1e-15);
    }

    #[test]
    fn l_fit_matches_h() {
        let c = ctx("exp(A)", 48);
        let (lf, spread) = LFunction::fit(&c, &[0.8, 1.6, 3.2]).unwrap();
        assert!(spread < 1e-14, "{spread}");
        for a in [1.0, 1.3, 2.0, 2.5] {
            let p = RealPoint::new(a).unwrap();
            assert!((lf.l_i(c.w(p.q())).unwrap() - c.hi_of(p)).abs() < 1e-14);
        }
    }

    #[test]
    fn s_residual_lambert() {
        let c = ctx("exp(A)", 48);
        let (lf, _) = LFunction::fit(&c, &[0.8, 1.6, 3.2]).unwrap();
        for a in [1.0, 2.0] {
            let x = c.hi_of(RealPoint::new(a).unwrap());
            let s = s_residual(&c, &lf, x).unwrap();
            assert!(s.residual.abs() < 1e-5, "{a}: {s:?}");
        }
    }

    #[test]
    fn preimage_gap_f_one() {
        let c = ctx("1", 4).with_constants(RealConstants {
            c: 0.07,
            ..Default::default()
        });
        let q =
            QuadraticPowerIntegral::real(-100.0, 0.0, 100.0, Rational::new(1, 2).unwrap()).unwrap();
        assert_eq!(preimage_gap(&c, &q, 2.0, 2.0).unwrap(), 0.0);
        let v = preimage_gap(&c, &q, 1.0, 3.0).unwrap();
        let (lf, _) = LFunction::fit(&c, &[0.8, 1.6, 3.2]).unwrap();
        let o = preimage_gap_oracle(&lf, &q, 1.0, 3.0, 1e-12).unwrap();
        assert!((v - o).abs() < 1e-7, "{v} vs {o}");
        assert!(preimage_gap(&c, &q, 1.0, 2.0).unwrap() < v);
    }

    #[test]
    fn u_form_lambert() {
        let c = ctx("exp(A)", 48);
        let (lf, _) = LFunction::fit(&c, &[0.8, 1.6, 3.2]).unwrap();
        for a in [1.2, 2.0] {
            let u = c.w(RealPoint::new(a).unwrap().q());
            let r = u_form_residual(&c, &lf, u).unwrap();
            assert!(r.abs() < 1e-4, "{a}: {r}");
        }
    }

    #[test]
    fn sqrt_model_lambert() {
        let c = ctx("exp(A)", 48);
        let h = |x: f64| c.hi_inverse(x);
        let xs = |a: &[f64]| -> Vec<f64> {
            a.iter()
                .map(|&a| c.hi_of(RealPoint::new(a).unwrap()))
                .collect()
        };
        let anchors = xs(&[0.8, 1.5, 3.0]);
        let fit = sqrt_model_fit(&c, &h, &anchors, (-0.5, 0.5)).unwrap();
        assert_eq!(fit.sign, 1.0);
        assert!(fit.l1.abs() < 1e-6, "{fit:?}");
        let mut worst: f64 = 0.0;
        for x in xs(&[1.0, 2.0, 2.5]) {
            worst = worst.max(sqrt_model_residual(&c, &h, &fit, x).unwrap());
        }
        assert!(worst < 1e-6, "{worst}");
        let moved = sqrt_model_refit_offset(
            &c,
            &h,
            &SqrtModelFit {
                l1: fit.l1 + 0.1,
                ..fit
            },
            &anchors,
        )
        .unwrap();
        let mut moved_worst: f64 = 0.0;
        for x in xs(&[1.0, 2.0, 2.5]) {
            moved_worst = moved_worst.max(sqrt_model_residual(&c, &h, &moved, x).unwrap());
        }
        assert!(
            moved_worst > 10.0 * worst.max(1e-12),
            "{moved_worst} vs {worst}"
        );
    }

    #[test]
    fn cross_at_r_one() {
        let a = b0_of_r(1.0).unwrap();
        assert!((a - 3.467679521946525).abs() < 1e-12);
        assert!((m0(a).unwrap() - 1.0).abs() < 1e-12);
        let (x, y) = f1_real_cross(a).unwrap();
        assert!((x - y).abs() < 1e-7, "{x} vs {y}");
        assert!((y - 0.5114284554037035).abs() < 1e-12);
    }
}
