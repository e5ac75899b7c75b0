//! Integrals of `f₁(t) (a₁t² + b₁t + c₁)^{-m}` with rational `0 < m < 1`:
//! the incomplete-beta antiderivative `U`, the special points `β_r`, `Ω`,
//! and the closed forms between β-endpoints.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::numeric::brent;
use crate::quadrature::{integrate, integrate_singular, EndpointSingularity, QuadResult};
use crate::rational::Rational;
use crate::specfun::{gamma_fn, inc_beta};

const TWO_PI_I: C64 = C64 {
    re: 0.0,
    im: 2.0 * PI,
};

/// The quadratic `a₁t² + b₁t + c₁` raised to `-m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticPowerIntegral {
    a1: C64,
    b1: C64,
    c1: C64,
    m: Rational,
    d1: C64,
    sqrt_d1: C64,
}

impl QuadraticPowerIntegral {
    pub fn new(a1: C64, b1: C64, c1: C64, m: Rational) -> Result<Self> {
        if a1.norm() == 0.0 {
            return Err(Error::Domain("a1 must be nonzero".into()));
        }
        if !(m.num() > 0 && m.num() < m.den()) {
            return Err(Error::Domain(format!("m must lie in (0, 1), got {m}")));
        }
        let d1 = b1 * b1 - 4.0 * a1 * c1;
        if d1.norm() == 0.0 {
            return Err(Error::Domain("the quadratic has a double root".into()));
        }
        Ok(QuadraticPowerIntegral {
            a1,
            b1,
            c1,
            m,
            d1,
            sqrt_d1: d1.sqrt(),
        })
    }

    pub fn real(a1: f64, b1: f64, c1: f64, m: Rational) -> Result<Self> {
        Self::new(C64::new(a1, 0.0), C64::new(b1, 0.0), C64::new(c1, 0.0), m)
    }

    /// The calibration family `(-1, 0, 1, 1/2)`, i.e. `1/√(1 - t²)`.
    pub fn calibration() -> Self {
        Self::real(-1.0, 0.0, 1.0, Rational::new(1, 2).expect("1/2")).expect("valid")
    }

    pub fn m(&self) -> Rational {
        self.m
    }

    pub fn alpha(&self) -> Rational {
        self.m.one_minus()
    }

    pub fn discriminant(&self) -> C64 {
        self.d1
    }

    /// `ρ₁ = (b₁ - √D₁)/(2a₁)`; `-ρ₁` is a root of the quadratic.
    pub fn rho1(&self) -> C64 {
        (self.b1 - self.sqrt_d1) / (2.0 * self.a1)
    }

    pub fn quadratic(&self, t: C64) -> C64 {
        (self.a1 * t + self.b1) * t + self.c1
    }

    /// `(a₁t² + b₁t + c₁)^{-m}`, principal power.
    pub fn integrand(&self, t: C64) -> C64 {
        self.quadratic(t).powf(-self.m.to_f64())
    }

    /// Argument of `B₀` in `U`: `(-b₁ + √D₁ - 2a₁x)/(2√D₁)`.
    pub fn beta_argument(&self, x: C64) -> C64 {
        (-self.b1 + self.sqrt_d1 - 2.0 * self.a1 * x) / (2.0 * self.sqrt_d1)
    }

    /// The abscissa `-ρ₁ - (√D₁/a₁)β`, mapped by [`Self::beta_argument`] to `β`.
    pub fn abscissa(&self, beta: f64) -> C64 {
        -self.rho1() - self.sqrt_d1 / self.a1 * beta
    }

    /// `(-1)^{m+1} a₁^{m-1} D₁^{1/2-m}`, principal powers, with the sign of
    /// the phase in `(-1)^{m+1} = e^{±iπ(m+1)}` fixed by calibration.
    pub fn prefactor(&self) -> C64 {
        let m = self.m.to_f64();
        let phase = C64::from_polar(1.0, branch_sign() * PI * (m + 1.0));
        phase * self.a1.powf(m - 1.0) * self.d1.powf(0.5 - m)
    }

    /// Argument of [`Self::prefactor`], reported alongside closed forms.
    pub fn branch_phase(&self) -> f64 {
        self.prefactor().arg()
    }

    /// `Γ(1-m)²/Γ(2(1-m))`.
    pub fn complete_beta(&self) -> Result<f64> {
        complete_beta(self.alpha())
    }
}

fn complete_beta(alpha: Rational) -> Result<f64> {
    let a = alpha.to_f64();
    let g = gamma_fn(C64::new(a, 0.0))?;
    let g2 = gamma_fn(C64::new(2.0 * a, 0.0))?;
    Ok((g * g / g2).re)
}

fn prefactor_with(q: &QuadraticPowerIntegral, sign: f64) -> C64 {
    let m = q.m.to_f64();
    C64::from_polar(1.0, sign * PI * (m + 1.0)) * q.a1.powf(m - 1.0) * q.d1.powf(0.5 - m)
}

/// Sign `σ` in `(-1)^{m+1} = e^{σiπ(m+1)}`, chosen once so that the
/// calibration integral `∫_{-1}^{-√2/2} dt/√(1-t²) = π/4` comes out right
/// against quadrature.
pub fn branch_sign() -> f64 {
    static SIGN: OnceLock<f64> = OnceLock::new();
    *SIGN.get_or_init(|| {
        let q = QuadraticPowerIntegral::calibration();
        let oracle = integrate_singular(
            |t: C64| q.integrand(t),
            C64::new(-1.0, 0.0),
            C64::new(-0.5f64.sqrt(), 0.0),
            EndpointSingularity::left(0.5),
            1e-14,
        )
        .map(|r| r.value)
        .unwrap_or(C64::new(PI / 4.0, 0.0));
        // B₀(β₃; 1/2, 1/2) = π/4 on the calibration family
        let closed = |s: f64| prefactor_with(&q, s) * (PI / 4.0);
        if (closed(-1.0) - oracle).norm() <= (closed(1.0) - oracle).norm() {
            -1.0
        } else {
            1.0
        }
    })
}

/// `B_α(x) = √B₀(x; α, α)`.
pub fn b_alpha(x: f64, alpha: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) || !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "B_alpha needs 0 < x < 1 and 0 < alpha < 1, got x = {x}, alpha = {alpha}"
        )));
    }
    Ok(inc_beta(C64::new(x, 0.0), alpha, alpha)?.re.sqrt())
}

/// The point `β ∈ (0, 1)` with `B_{1-m}(1-β)/B_{1-m}(β) = √r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPoint {
    pub m: Rational,
    pub r: f64,
    pub beta: f64,
}

impl BetaPoint {
    /// `B_{1-m}(1-β)/B_{1-m}(β) - √r`.
    pub fn residual(&self) -> Result<f64> {
        let a = self.m.one_minus().to_f64();
        Ok(b_alpha(1.0 - self.beta, a)? / b_alpha(self.beta, a)? - self.r.sqrt())
    }
}

/// Solves for `β_r`: `B₀(β; α, α) = B(α, α)/(r + 1)`, `α = 1 - m`, which
/// is the ratio condition since `B₀(β) + B₀(1-β) = B(α, α)`.
pub fn beta_r(m: Rational, r: f64) -> Result<BetaPoint> {
    if !(m.num() > 0 && m.num() < m.den()) {
        return Err(Error::Domain(format!("m must lie in (0, 1), got {m}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!(
            "r must be positive and finite, got {r}"
        )));
    }
    let alpha = m.one_minus().to_f64();
    let target = complete_beta(m.one_minus())? / (r + 1.0);
    let g = |b: f64| -> f64 {
        match inc_beta(C64::new(b, 0.0), alpha, alpha) {
            Ok(v) => v.re - target,
            Err(_) => f64::NAN,
        }
    };
    let lo = 1e-300f64.max(f64::MIN_POSITIVE);
    let beta = brent(g, lo, 1.0 - 1e-16, 1e-17)?;
    // polish with Newton on the same equation
    let mut b = beta;
    for _ in 0..3 {
        let d = (b * (1.0 - b)).powf(alpha - 1.0);
        let step = g(b) / d;
        if !step.is_finite() {
            break;
        }
        let next = b - step;
        if next > 0.0 && next < 1.0 {
            b = next;
        }
    }
    Ok(BetaPoint { m, r, beta: b })
}

/// `U(x) = (-1)^{m+1} a₁^{m-1} D₁^{1/2-m} B₀(arg(x); 1-m, 1-m)`.
pub fn u_antideriv(q: &QuadraticPowerIntegral, x: C64) -> Result<C64> {
    let s = q.beta_argument(x);
    if s.im == 0.0 && s.re > 1.0 {
        return Err(Error::Branch(format!("B0 argument {s} lies on the cut")));
    }
    let a = q.alpha().to_f64();
    Ok(q.prefactor() * inc_beta(s, a, a)?)
}

/// `Ω(z) = (-1)^{m+1} a₁^{m-1} D₁^{1/2-m} Γ(1-m)²/Γ(2(1-m)) / (1 - z²)`.
pub fn omega(q: &QuadraticPowerIntegral, z: C64) -> Result<C64> {
    let den = 1.0 - z * z;
    if den.norm() == 0.0 {
        return Err(Error::Pole(format!("Omega has a pole at z = {z}")));
    }
    Ok(q.prefactor() * q.complete_beta()? / den)
}

/// `1/(r + 1)`, exact zero at `r = ∞`.
fn inv_r1(r: f64) -> Result<f64> {
    if r == f64::INFINITY {
        Ok(0.0)
    } else if r > 0.0 {
        Ok(1.0 / (r + 1.0))
    } else {
        Err(Error::Domain(format!("r must be positive, got {r}")))
    }
}

/// `∫ (a₁t² + b₁t + c₁)^{-m} dt` between the β-endpoints of `r₁` and `r₂`,
/// in closed form; `r₁ = ∞` starts at the root `-ρ₁`.
pub fn closed_integral(q: &QuadraticPowerIntegral, r1: f64, r2: f64) -> Result<C64> {
    let (i1, i2) = (inv_r1(r1)?, inv_r1(r2)?);
    Ok(q.prefactor() * q.complete_beta()? * (i2 - i1))
}

/// The endpoint `-ρ₁ - (√D₁/a₁)β_r` (`β_∞ = 0`).
pub fn endpoint(q: &QuadraticPowerIntegral, r: f64) -> Result<C64> {
    if r == f64::INFINITY {
        return Ok(-q.rho1());
    }
    Ok(q.abscissa(beta_r(q.m, r)?.beta))
}

/// Quadrature of the bare integrand between the β-endpoints, declaring
/// the root endpoint singular when `r = ∞`.
pub fn closed_integral_oracle(
    q: &QuadraticPowerIntegral,
    r1: f64,
    r2: f64,
    tol: f64,
) -> Result<QuadResult> {
    let (x1, x2) = (endpoint(q, r1)?, endpoint(q, r2)?);
    let m = q.m.to_f64();
    let sing = EndpointSingularity {
        left: if r1 == f64::INFINITY { m } else { 0.0 },
        right: if r2 == f64::INFINITY { m } else { 0.0 },
    };
    integrate_singular(|t| q.integrand(t), x1, x2, sing, tol)
}

/// The weight `f₁(t) = -1/(c - 2πiU(t)) + P₀(c - 2πiU(t))` of the closed
/// form with a logarithmic primitive.
#[derive(Debug, Clone)]
pub struct LogWeight {
    pub q: QuadraticPowerIntegral,
    pub p0: Expr,
    pub c: C64,
}

impl LogWeight {
    pub fn f1(&self, t: C64) -> Result<C64> {
        let u = self.c - TWO_PI_I * u_antideriv(&self.q, t)?;
        if u.norm() == 0.0 {
            return Err(Error::Pole(format!("weight has a pole at t = {t}")));
        }
        Ok(-1.0 / u + self.p0.eval(u)?)
    }

    /// `f₁(t) (a₁t² + b₁t + c₁)^{-m}`.
    pub fn integrand(&self, t: C64) -> Result<C64> {
        Ok(self.f1(t)? * self.q.integrand(t))
    }
}

/// `(1/2πi)[Log(u₂/u₁) - ∫_{u₁}^{u₂} P₀(u) du]`, `u_k = c - 2πiΩ(z_k)`:
/// the integral of the weighted integrand between the endpoints whose
/// `U`-values are `Ω(z₁)`, `Ω(z₂)`.
pub fn closed_integral_log(w: &LogWeight, z1: C64, z2: C64) -> Result<C64> {
    if z1 == z2 {
        return Ok(C64::new(0.0, 0.0));
    }
    let u1 = w.c - TWO_PI_I * omega(&w.q, z1)?;
    let u2 = w.c - TWO_PI_I * omega(&w.q, z2)?;
    if u1.norm() == 0.0 || u2.norm() == 0.0 {
        return Err(Error::Pole("endpoint at the pole of the weight".into()));
    }
    let ratio = u2 / u1;
    if ratio.im == 0.0 && ratio.re <= 0.0 {
        return Err(Error::Branch(
            "segment between the endpoints passes the pole".into(),
        ));
    }
    let failure = std::cell::RefCell::new(None);
    let p0_int = integrate(
        |u| match w.p0.eval(u) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                C64::new(f64::NAN, 0.0)
            }
        },
        u1,
        u2,
        1e-14,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok((ratio.ln() - p0_int?.value) / TWO_PI_I)
}

/// Endpoint of `z = i√r` on the real β-scale; other `z` have no real β.
pub fn r_of_z(z: C64) -> Result<f64> {
    let r = -(z * z);
    if r.im.abs() > 1e-14 * r.norm() || !(r.re > 0.0) {
        return Err(Error::Domain(format!(
            "{z} is not of the form i·sqrt(r), r > 0"
        )));
    }
    Ok(r.re)
}

/// Adaptive quadrature along the straight segment; ground truth for the
/// closed forms.
pub fn quad_oracle<F: Fn(C64) -> C64>(
    integrand: F,
    z1: C64,
    z2: C64,
    tol: f64,
) -> Result<QuadResult> {
    integrate(integrand, z1, z2, tol)
}

pub fn quad_oracle_singular<F: Fn(C64) -> C64>(
    integrand: F,
    z1: C64,
    z2: C64,
    sing: EndpointSingularity,
    tol: f64,
) -> Result<QuadResult> {
    integrate_singular(integrand, z1, z2, sing, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn half() -> Rational {
        Rational::new(1, 2).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert!(QuadraticPowerIntegral::real(1.0, 2.0, 1.0, half()).is_err());
        assert!(QuadraticPowerIntegral::real(1.0, 0.0, -1.0, Rational::integer(1)).is_err());
        assert!(QuadraticPowerIntegral::real(0.0, 1.0, 1.0, half()).is_err());
    }

    #[test]
    fn branch_calibration() {
        assert_eq!(branch_sign(), -1.0);
        let q = QuadraticPowerIntegral::calibration();
        assert!((q.prefactor() - re(1.0)).norm() < 1e-15);
        assert!(q.branch_phase().abs() < 1e-15);
    }

    #[test]
    fn b_alpha_examples() {
        let v = b_alpha(0.5, 0.5).unwrap();
        assert!((v - (2.0 * 0.5f64.sqrt().asin()).sqrt()).abs() < 1e-15);
        assert!((v - (PI / 2.0).sqrt()).abs() < 1e-15);
        let a = 1.0 / 3.0;
        let s = b_alpha(0.2, a).unwrap().powi(2) + b_alpha(0.8, a).unwrap().powi(2);
        assert!((s - complete_beta(Rational::new(1, 3).unwrap()).unwrap()).abs() < 1e-13);
        let tiny = b_alpha(1e-12, 0.5).unwrap();
        assert!((tiny - (2.0 * 1e-6f64.asin()).sqrt()).abs() < 1e-17);
        assert!(b_alpha(0.0, 0.5).is_err());
    }

    #[test]
    fn beta_r_examples() {
        let b = beta_r(half(), 1.0).unwrap();
        assert!((b.beta - 0.5).abs() < 1e-15);
        let b = beta_r(half(), 3.0).unwrap();
        assert!((b.beta - (2.0 - 2f64.sqrt()) / 4.0).abs() < 1e-15);
        assert!(b.residual().unwrap().abs() < 1e-12);
        let third = Rational::new(1, 3).unwrap();
        let b = beta_r(third, 2.0).unwrap();
        let alpha = Rational::new(2, 3).unwrap();
        let lhs = b_alpha(b.beta, 2.0 / 3.0).unwrap().powi(2);
        assert!((lhs - complete_beta(alpha).unwrap() / 3.0).abs() < 1e-13);
        let mut prev = 1.0;
        for r in [0.25, 0.5, 1.0, 2.0, 5.0, 50.0] {
            let b = beta_r(third, r).unwrap().beta;
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn u_examples() {
        let q = QuadraticPowerIntegral::calibration();
        let diff = u_antideriv(&q, re(0.5)).unwrap() - u_antideriv(&q, re(-0.5)).unwrap();
        assert!((diff - re(PI / 3.0)).norm() < 1e-14);
        assert!((q.beta_argument(-q.rho1())).norm() < 1e-15);
        assert!((q.beta_argument(re(-0.5) * q.b1 / q.a1) - re(0.5)).norm() < 1e-15);
        let x3 = q.abscissa(beta_r(half(), 3.0).unwrap().beta);
        assert!((x3 - re(-0.5f64.sqrt())).norm() < 1e-15);
        let u3 = u_antideriv(&q, x3).unwrap();
        let om = omega(&q, C64::new(0.0, 3f64.sqrt())).unwrap();
        assert!((u3 - om).norm() < 1e-14);
        assert!((om - re(PI / 4.0)).norm() < 1e-14);
    }

    #[test]
    fn omega_pole() {
        let q = QuadraticPowerIntegral::calibration();
        assert!(matches!(omega(&q, re(1.0)), Err(Error::Pole(_))));
        assert!((q.complete_beta().unwrap() - PI).abs() < 1e-14);
    }

    #[test]
    fn closed_form_calibration() {
        let q = QuadraticPowerIntegral::calibration();
        let inf = f64::INFINITY;
        for (r2, want) in [(3.0, PI / 4.0), (1.0, PI / 2.0)] {
            let v = closed_integral(&q, inf, r2).unwrap();
            assert!((v - re(want)).norm() < 1e-14);
            let o = closed_integral_oracle(&q, inf, r2, 1e-14).unwrap();
            assert!((o.value - re(want)).norm() < 1e-12);
        }
        assert_eq!(closed_integral(&q, 2.0, 2.0).unwrap(), re(0.0));
    }

    #[test]
    fn closed_form_general_real_case() {
        // -3t² + 2t + 1 is positive between its roots -1/3 and 1
        let q = QuadraticPowerIntegral::real(-3.0, 2.0, 1.0, Rational::new(1, 3).unwrap()).unwrap();
        let v = closed_integral(&q, 1.0, 4.0).unwrap();
        let o = closed_integral_oracle(&q, 1.0, 4.0, 1e-14).unwrap();
        assert!((v - o.value).norm() < 1e-12, "{v} vs {}", o.value);
    }

    #[test]
    fn log_closed_form_calibration() {
        let q = QuadraticPowerIntegral::calibration();
        let z1 = C64::new(0.0, 3f64.sqrt());
        let z2 = C64::new(0.0, 1.0);
        for p0 in ["1", "0", "cos(A)"] {
            let w = LogWeight {
                q,
                p0: crate::expr::parse_expr(p0).unwrap(),
                c: re(1.0),
            };
            let closed = closed_integral_log(&w, z1, z2).unwrap();
            let (x1, x2) = (endpoint(&q, 3.0).unwrap(), endpoint(&q, 1.0).unwrap());
            let oracle = quad_oracle(|t| w.integrand(t).unwrap(), x1, x2, 1e-13).unwrap();
            assert!((closed - oracle.value).norm() < 1e-11, "P0 = {p0}");
            assert_eq!(closed_integral_log(&w, z1, z1).unwrap(), re(0.0));
        }
    }
}
