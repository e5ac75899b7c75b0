//! Small real and complex solvers shared across modules.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Brent's method on a sign-changing bracket.
pub fn brent<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NoBracket(format!(
            "f({a}) = {fa} and f({b}) = {fb} do not bracket a root"
        )));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::NoConvergence("brent: iteration limit".into()))
}

/// Golden-section minimisation of a unimodal function on `[a, b]`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > xtol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Newton iteration for a complex analytic function given with its
/// derivative. Stops when the step is below `tol·max(1, |z|)`.
pub fn newton_complex<F>(fdf: F, mut z: C64, tol: f64, max_iter: usize) -> Result<C64>
where
    F: Fn(C64) -> Result<(C64, C64)>,
{
    for _ in 0..max_iter {
        let (v, dv) = fdf(z)?;
        if dv.norm() == 0.0 {
            return Err(Error::NoConvergence("newton: zero derivative".into()));
        }
        let step = v / dv;
        z -= step;
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NoConvergence("newton: diverged".into()));
        }
        if step.norm() <= tol * z.norm().max(1.0) {
            return Ok(z);
        }
    }
    Err(Error::NoConvergence(format!(
        "newton: no convergence after {max_iter} iterations"
    )))
}

/// Central difference of step `h` together with its Richardson
/// extrapolation from steps `h` and `h/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub central: C64,
    pub richardson: C64,
}

/// Differentiates `f` along the real direction (or any direction `dir`,
/// giving the complex derivative for analytic `f`).
pub fn derivative<F: Fn(C64) -> Result<C64>>(f: F, x: C64, h: f64) -> Result<Derivative> {
    derivative_dir(f, x, C64::new(1.0, 0.0), h)
}

pub fn derivative_dir<F: Fn(C64) -> Result<C64>>(
    f: F,
    x: C64,
    dir: C64,
    h: f64,
) -> Result<Derivative> {
    let d = |h: f64| -> Result<C64> {
        let step = dir * h;
        Ok((f(x + step)? - f(x - step)?) / (step * 2.0))
    };
    let d1 = d(h)?;
    let d2 = d(h / 2.0)?;
    Ok(Derivative {
        central: d1,
        richardson: (d2 * 4.0 - d1) / 3.0,
    })
}
