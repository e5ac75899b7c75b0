//! The equation `w / f(w) = q` solved by series and by direct root-finding,
//! and the objects derived from its solution: `P = 1/(q w')`, the sextic
//! function `F₁` with its Appell closed form, `y`, `G` and `h`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::expr::{parse_expr, BinOp, Expr};
use crate::qseries::{lagrange_revert, TruncSeries};
use crate::quadrature::{integrate, QuadResult};
use crate::specfun::{appell_f1, e_map, lambert_w, LambertBranch, UpperHalfPoint};

const TWO_PI_I: C64 = C64 {
    re: 0.0,
    im: 2.0 * PI,
};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 24;
/// Hard cap on truncation order.
pub const MAX_ORDER: usize = 64;

/// A user function of `A`: expression, derivative and expansion at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct FuncSpec {
    expr: Expr,
    deriv: Expr,
    series: TruncSeries,
}

impl FuncSpec {
    pub fn new(expr: Expr, order: usize) -> Result<Self> {
        let series = expr.series(C64::new(0.0, 0.0), order)?;
        Ok(FuncSpec {
            deriv: expr.derivative(),
            expr,
            series,
        })
    }

    pub fn parse(src: &str, order: usize) -> Result<Self> {
        FuncSpec::new(parse_expr(src)?, order)
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn series(&self) -> &TruncSeries {
        &self.series
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn eval(&self, a: C64) -> Result<C64> {
        self.expr.eval(a)
    }

    pub fn eval_with_deriv(&self, a: C64) -> Result<(C64, C64)> {
        Ok((self.expr.eval(a)?, self.deriv.eval(a)?))
    }

    pub fn derivative_expr(&self) -> &Expr {
        &self.deriv
    }

    /// `f'/f` as an expression.
    pub fn log_derivative(&self) -> Expr {
        Expr::Bin(
            BinOp::Div,
            Box::new(self.deriv.clone()),
            Box::new(self.expr.clone()),
        )
    }

    pub fn taylor_at(&self, c: C64, order: usize) -> Result<TruncSeries> {
        self.expr.series(c, order)
    }
}

/// Parses and expands an expression; the bridge from user text to `f`.
pub fn to_funcspec(tree: &Expr, order: usize) -> Result<FuncSpec> {
    FuncSpec::new(tree.clone(), order)
}

/// Solution data of `w / f(w) = q` to a fixed order.
#[derive(Debug, Clone)]
pub struct InversionContext {
    f: FuncSpec,
    w: TruncSeries,
    dw: TruncSeries,
    a: Vec<C64>,
    c: C64,
}

pub fn build_context(f: &FuncSpec, order: usize) -> Result<InversionContext> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::Domain(format!(
            "order must be in 1..={MAX_ORDER}, got {order}"
        )));
    }
    let series = if f.order() >= order {
        f.series().truncate(order)
    } else {
        f.taylor_at(C64::new(0.0, 0.0), order)?
    };
    let w = lagrange_revert(&series, order)?;
    let a = (1..=order).map(|n| w.coeff(n) * n as f64).collect();
    Ok(InversionContext {
        f: f.clone(),
        dw: w.derivative(),
        w,
        a,
        c: C64::new(0.0, 0.0),
    })
}

impl InversionContext {
    pub fn with_c(mut self, c: C64) -> Self {
        self.c = c;
        self
    }

    pub fn f(&self) -> &FuncSpec {
        &self.f
    }

    pub fn w_series(&self) -> &TruncSeries {
        &self.w
    }

    /// `a_1..a_N`, with `a_n = n c_n`.
    pub fn a(&self) -> &[C64] {
        &self.a
    }

    pub fn order(&self) -> usize {
        self.w.order()
    }

    pub fn c(&self) -> C64 {
        self.c
    }

    pub fn w(&self, q: C64) -> C64 {
        self.w.eval(q).value
    }

    /// `w'(q)` from the term-wise derivative.
    pub fn w_prime(&self, q: C64) -> C64 {
        self.dw.eval(q).value
    }

    /// `Σ a_n qⁿ`, the reciprocal of `P` as a series in `q`.
    pub fn p_inverse_series(&self) -> TruncSeries {
        let mut coeffs = vec![C64::new(0.0, 0.0)];
        coeffs.extend_from_slice(&self.a);
        TruncSeries::new(coeffs)
    }

    /// `P(z) = 1/(q w'(q))`, `q = e(z)`.
    pub fn p_of_z(&self, z: UpperHalfPoint) -> Result<C64> {
        self.p_of_q(e_map(z).q())
    }

    pub fn p_of_q(&self, q: C64) -> Result<C64> {
        let v = self.p_inverse_series().eval(q);
        let scale = v.value.norm().max(f64::MIN_POSITIVE);
        if v.tail > 1e-12 * scale.max(1.0) || !v.tail.is_finite() {
            return Err(Error::AccuracyLoss(format!(
                "series tail {:.3e} at |q| = {:.3e}",
                v.tail,
                q.norm()
            )));
        }
        if v.value.norm() == 0.0 {
            return Err(Error::Pole("q w'(q) vanishes".into()));
        }
        Ok(1.0 / v.value)
    }

    /// `2πi ∫_{i∞}^z dt/P(t)` integrated term-wise: `Σ (a_n/n) qⁿ`.
    pub fn w_of_q_via_integral(&self, z: UpperHalfPoint) -> C64 {
        let q = e_map(z).q();
        let mut acc = C64::new(0.0, 0.0);
        for (k, an) in self.a.iter().enumerate().rev() {
            acc = (acc + an / (k + 1) as f64) * q;
        }
        acc
    }

    /// `y(A) = F₁(c/(2πi) - w(q_A)/(2πi))`.
    pub fn y_of(&self, a: UpperHalfPoint) -> Result<C64> {
        let q = e_map(a).q();
        f1_forward((self.c - self.w(q)) / TWO_PI_I)
    }
}

/// Direct Newton solution of `w = q f(w)` from `w₀ = q f(0)`.
pub fn solve_w_direct(f: &FuncSpec, q: C64) -> Result<C64> {
    let mut w = q * f.eval(C64::new(0.0, 0.0))?;
    for _ in 0..64 {
        let (fw, dfw) = f.eval_with_deriv(w)?;
        let g = w - q * fw;
        let dg = 1.0 - q * dfw;
        if dg.norm() == 0.0 {
            break;
        }
        let step = g / dg;
        w -= step;
        if step.norm() <= 1e-16 * w.norm().max(1e-300) {
            break;
        }
    }
    let fw = f.eval(w)?;
    let residual = (w / fw - q).norm();
    if residual < 1e-13 * q.norm().max(1.0) && w.re.is_finite() && w.im.is_finite() {
        Ok(w)
    } else {
        Err(Error::NoConvergence(format!(
            "w/f(w) = q at q = {q}: residual {residual:.3e}"
        )))
    }
}

// ------------------------------------------------------------------ F₁

fn f1_appell_args(a: C64) -> (C64, C64) {
    let s5 = 5f64.sqrt();
    let a5 = a.powu(5);
    (-2.0 * a5 / (11.0 + 5.0 * s5), -2.0 * a5 / (11.0 - 5.0 * s5))
}

/// `F₁⁻¹(A) = 6A^{5/6} F_Ap(1/6, 1/6, 1/6; 7/6; x₁, x₂)`; needs `|A| < 1/φ`.
pub fn f1_inverse(a: C64) -> Result<C64> {
    if a.norm() == 0.0 {
        return Ok(a);
    }
    let (x1, x2) = f1_appell_args(a);
    let s = 1.0 / 6.0;
    Ok(6.0 * a.powf(5.0 / 6.0) * appell_f1(s, s, s, 7.0 / 6.0, x1, x2)?)
}

/// `dF₁⁻¹/dt = 5 t^{-1/6} (1 - 11t⁵ - t¹⁰)^{-1/6}`.
pub fn f1_inverse_deriv(t: C64) -> Result<C64> {
    if t.norm() == 0.0 {
        return Err(Error::Pole("F1 inverse derivative at 0".into()));
    }
    let t5 = t.powu(5);
    Ok(5.0 * t.powf(-1.0 / 6.0) * (1.0 - 11.0 * t5 - t5 * t5).powf(-1.0 / 6.0))
}

/// Oracle for [`f1_inverse`]: the defining integral after `t = u⁶`,
/// `30 ∫₀^{A^{1/6}} u⁴ (1 - 11u³⁰ - u⁶⁰)^{-1/6} du`.
pub fn f1_inverse_quadrature(a: C64, tol: f64) -> Result<QuadResult> {
    let top = a.powf(1.0 / 6.0);
    integrate(
        |u: C64| {
            let u30 = u.powu(30);
            30.0 * u.powu(4) * (1.0 - 11.0 * u30 - u30 * u30).powf(-1.0 / 6.0)
        },
        C64::new(0.0, 0.0),
        top,
        tol,
    )
}

/// Right side of `F₁' = F₁ (F₁^{-5} - 11 - F₁⁵)^{1/6} / 5`.
pub fn f1_ode_rhs(f: C64) -> C64 {
    let f5 = f.powu(5);
    f * (1.0 / f5 - 11.0 - f5).powf(1.0 / 6.0) / 5.0
}

/// Upper end of the real window on which [`f1_forward`] inverts.
pub const F1_REAL_WINDOW: f64 = 0.6;

/// `F₁(x)`: the inverse of [`f1_inverse`]. Real non-negative inputs use a
/// safeguarded Newton/bisection on `[0, 0.6]`; others use complex Newton.
pub fn f1_forward(x: C64) -> Result<C64> {
    if x.norm() == 0.0 {
        return Ok(x);
    }
    if x.im == 0.0 && x.re > 0.0 {
        return f1_forward_real(x.re).map(|v| C64::new(v, 0.0));
    }
    let mut t = (x / 6.0).powf(1.2);
    for _ in 0..100 {
        let g = f1_inverse(t)? - x;
        let step = g / f1_inverse_deriv(t)?;
        t -= step;
        if step.norm() <= 1e-15 * t.norm() {
            let r = (f1_inverse(t)? - x).norm();
            if r < 1e-12 * x.norm().max(1.0) {
                return Ok(t);
            }
        }
    }
    Err(Error::NoConvergence(format!("F1 forward at {x}")))
}

fn f1_forward_real(x: f64) -> Result<f64> {
    let top = f1_inverse(C64::new(F1_REAL_WINDOW, 0.0))?.re;
    if x > top {
        return Err(Error::NoConvergence(format!(
            "F1 forward: {x} exceeds F1^(-1)({F1_REAL_WINDOW}) = {top}"
        )));
    }
    let (mut lo, mut hi) = (0.0f64, F1_REAL_WINDOW);
    let mut t = (x / 6.0).powf(1.2).min(hi);
    for _ in 0..200 {
        let g = f1_inverse(C64::new(t, 0.0))?.re - x;
        if g > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let d = f1_inverse_deriv(C64::new(t, 0.0))?.re;
        let mut next = t - g / d;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() <= 4.0 * f64::EPSILON * t || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(next);
        }
        t = next;
    }
    Err(Error::NoConvergence(format!("F1 forward at {x}")))
}

// ------------------------------------------------------------------ G and h

/// `G` built from `P₀`: `G(x) = -1/(c - 2πi F₁⁻¹(x)) + P₀(c - 2πi F₁⁻¹(x))`.
#[derive(Debug, Clone)]
pub struct GMap {
    p0: Expr,
    c: C64,
}

pub fn g_from_p0(p0: &Expr, c: C64) -> GMap {
    GMap { p0: p0.clone(), c }
}

impl GMap {
    /// `G(F₁(A))`, i.e. the map evaluated at a preimage `A = F₁⁻¹(x)`.
    pub fn at_preimage(&self, a: C64) -> Result<C64> {
        let u = self.c - TWO_PI_I * a;
        if u.norm() == 0.0 {
            return Err(Error::Pole(format!("G has its pole at A = {a}")));
        }
        Ok(-1.0 / u + self.p0.eval(u)?)
    }

    pub fn eval(&self, x: C64) -> Result<C64> {
        self.at_preimage(f1_inverse(x)?)
    }
}

/// `h(A) = log(c - 2πiA)/(2πi) + Σ_k p_k (-2πi)^k A^{k+1}/(k+1)`, with `p_k`
/// the Taylor coefficients of `P₀` at `c`.
pub fn h_of(p0: &Expr, c: C64, a: C64) -> Result<C64> {
    let u = c - TWO_PI_I * a;
    if u.im == 0.0 && u.re <= 0.0 {
        return Err(Error::Branch(format!("c - 2πiA = {u} lies on the log cut")));
    }
    const ORDER: usize = 60;
    let taylor = p0.series(c, ORDER)?;
    let x = -TWO_PI_I * a;
    let mut sum = C64::new(0.0, 0.0);
    let mut xk = C64::new(1.0, 0.0);
    let mut last = 0.0;
    for k in 0..=ORDER {
        let term = taylor.coeff(k) * xk * a / (k + 1) as f64;
        sum += term;
        last = term.norm();
        xk *= x;
    }
    if last > 1e-14 * sum.norm().max(1.0) {
        return Err(Error::AccuracyLoss(format!(
            "h series at A = {a} not settled (last term {last:.3e})"
        )));
    }
    Ok(u.ln() / TWO_PI_I + sum)
}

/// `P` of the exponential family `f = e^{C+A}` in closed form:
/// `-(1 + W(-q e^{-C})) / W(-q e^{-C})`.
pub fn lambert_p(q: C64, big_c: C64) -> Result<C64> {
    let w = lambert_w(-q * (-big_c).exp(), LambertBranch::Principal)?;
    Ok(-(1.0 + w) / w)
}

/// `P(z)` by Newton-solved `w` and `w' = f(w)² / (f(w) - w f'(w))`, an
/// oracle independent of the series.
pub fn p_direct(f: &FuncSpec, q: C64) -> Result<C64> {
    let w = solve_w_direct(f, q)?;
    let (fw, dfw) = f.eval_with_deriv(w)?;
    let wp = fw * fw / (fw - w * dfw);
    Ok(1.0 / (q * wp))
}
