use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_singular, EndpointSingularity};

const SERIES_LIMIT: usize = 100_000;
const BAND_LIMIT: usize = 5000;

fn nonpositive_integer(c: f64) -> bool {
    c <= 0.0 && c.fract() == 0.0
}

/// Gauss hypergeometric ₂F₁(a, b; c; x) by its Maclaurin series, `|x| < 1`.
pub fn hyp2f1(a: f64, b: f64, c: f64, x: C64) -> Result<C64> {
    if nonpositive_integer(c) {
        return Err(Error::Pole(format!("2F1 with c = {c}")));
    }
    if !(x.norm() < 1.0) {
        return Err(Error::ConvergenceDomain(format!(
            "2F1 series needs |x| < 1, got {}",
            x.norm()
        )));
    }
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut small = 0;
    for k in 0..SERIES_LIMIT {
        let k = k as f64;
        term *= x * ((a + k) * (b + k) / ((c + k) * (k + 1.0)));
        sum += term;
        if term.norm() == 0.0 {
            return Ok(sum);
        }
        if term.norm() < 1e-17 * sum.norm() {
            small += 1;
            if small == 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NoConvergence("2F1 series".into()))
}

/// Incomplete beta `B₀(x; a, b) = ∫₀ˣ t^{a-1}(1-t)^{b-1} dt` with principal
/// powers, along the segment from 0 to `x`.
pub fn inc_beta(x: C64, a: f64, b: f64) -> Result<C64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("inc_beta needs a > 0, got {a}")));
    }
    if x.im == 0.0 && x.re > 1.0 {
        return Err(Error::Branch(format!(
            "inc_beta argument {x} lies on the cut"
        )));
    }
    if x.norm() == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    if x.norm() <= 0.8 {
        return Ok(x.powf(a) / a * hyp2f1(a, 1.0 - b, a + 1.0, x)?);
    }
    // [0, x/2]: t = (x/2) u^{1/a} straightens the t^{a-1} endpoint.
    let half = x * 0.5;
    let inv_a = 1.0 / a;
    let head = integrate_singular(
        |u: C64| (1.0 - half * u.re.powf(inv_a)).powf(b - 1.0),
        C64::new(0.0, 0.0),
        C64::new(1.0, 0.0),
        EndpointSingularity::NONE,
        1e-15,
    )?
    .value
        * half.powf(a)
        / a;
    // [x/2, x] in s = 1 - t, so that s = 0 at x = 1 is represented exactly.
    let s0 = 1.0 - x;
    let sing = if s0.norm() == 0.0 && b < 1.0 {
        if !(b > 0.0) {
            return Err(Error::NonIntegrable(format!(
                "B(a, b) diverges for b = {b}"
            )));
        }
        EndpointSingularity::left(1.0 - b)
    } else {
        EndpointSingularity::NONE
    };
    let tail = integrate_singular(
        |s: C64| (1.0 - s).powf(a - 1.0) * s.powf(b - 1.0),
        s0,
        1.0 - half,
        sing,
        1e-15,
    )?
    .value;
    Ok(head + tail)
}

/// Appell F₁(a; b₁, b₂; c; x, y) by its double series, summed in diagonal
/// bands `m + n = s`, on the polydisc `|x|, |y| < 1`.
pub fn appell_f1(a: f64, b1: f64, b2: f64, c: f64, x: C64, y: C64) -> Result<C64> {
    if nonpositive_integer(c) {
        return Err(Error::Pole(format!("Appell F1 with c = {c}")));
    }
    if !(x.norm() < 1.0 && y.norm() < 1.0) {
        return Err(Error::ConvergenceDomain(format!(
            "Appell F1 needs |x|, |y| < 1, got {} and {}",
            x.norm(),
            y.norm()
        )));
    }
    let mut u = vec![C64::new(1.0, 0.0)];
    let mut v = vec![C64::new(1.0, 0.0)];
    let mut ratio = 1.0; // (a)_s / (c)_s
    let mut sum = C64::new(1.0, 0.0);
    let mut prev_mag = 1.0f64;
    for s in 1..=BAND_LIMIT {
        let k = (s - 1) as f64;
        u.push(u[s - 1] * x * ((b1 + k) / (k + 1.0)));
        v.push(v[s - 1] * y * ((b2 + k) / (k + 1.0)));
        ratio *= (a + k) / (c + k);
        let mut band = C64::new(0.0, 0.0);
        let mut mag = 0.0;
        for m in 0..=s {
            let t = u[m] * v[s - m];
            band += t;
            mag += t.norm();
        }
        band *= ratio;
        mag *= ratio.abs();
        sum += band;
        if mag == 0.0 && (ratio == 0.0 || (u[s].norm() == 0.0 && v[s].norm() == 0.0)) {
            return Ok(sum);
        }
        let rho = if prev_mag > 0.0 { mag / prev_mag } else { 0.0 };
        prev_mag = mag;
        if s > 4 && rho < 1.0 {
            let tail = mag * rho / (1.0 - rho);
            if tail < 1e-17 * sum.norm().max(f64::MIN_POSITIVE) {
                return Ok(sum);
            }
        }
    }
    Err(Error::NoConvergence(format!(
        "Appell F1 band sum not settled after {BAND_LIMIT} bands"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma_real;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn agm(mut a: f64, mut b: f64) -> f64 {
        for _ in 0..40 {
            let (an, bn) = (0.5 * (a + b), (a * b).sqrt());
            a = an;
            b = bn;
        }
        a
    }

    #[test]
    fn hyp2f1_examples() {
        assert_eq!(hyp2f1(0.3, 0.7, 1.2, re(0.0)).unwrap(), re(1.0));
        let v = hyp2f1(1.0, 1.0, 2.0, re(0.5)).unwrap();
        assert!((v.re - 2.0 * 2f64.ln()).abs() < 1e-15);
        // K(k) = π/(2 agm(1, k')), 2F1(1/2,1/2;1;k²) = 2K/π
        let kp = 0.5f64.sqrt();
        let v = hyp2f1(0.5, 0.5, 1.0, re(0.5)).unwrap();
        assert!((v.re - 1.0 / agm(1.0, kp)).abs() < 1e-14);
        assert!((v.re - 1.180_340_599_016_096_2).abs() < 1e-14);
        assert!(matches!(
            hyp2f1(1.0, 1.0, 2.0, re(1.0)),
            Err(Error::ConvergenceDomain(_))
        ));
        assert!(matches!(
            hyp2f1(1.0, 1.0, -2.0, re(0.1)),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn inc_beta_examples() {
        assert!((inc_beta(re(0.5), 1.0, 1.0).unwrap().re - 0.5).abs() < 1e-15);
        let full = inc_beta(re(1.0), 1.0 / 6.0, 2.0 / 3.0).unwrap();
        let want = gamma_real(1.0 / 6.0).unwrap() * gamma_real(2.0 / 3.0).unwrap()
            / gamma_real(5.0 / 6.0).unwrap();
        assert!((full.re - want).abs() < 1e-12, "{full} vs {want}");
        assert!((want - 6.6775).abs() < 1e-3);
        let a: f64 = 0.3;
        let lhs = inc_beta(re(a * a), 1.0 / 6.0, 2.0 / 3.0).unwrap();
        let rhs =
            6.0 * a.powf(1.0 / 3.0) * hyp2f1(1.0 / 6.0, 1.0 / 3.0, 7.0 / 6.0, re(a * a)).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
        assert!(matches!(inc_beta(re(0.5), 0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn inc_beta_branches_agree_across_switch() {
        // arcsine law: B₀(x; 1/2, 1/2) = 2 asin √x
        for x in [0.5, 0.79, 0.81, 0.95, 0.999] {
            let v = inc_beta(re(x), 0.5, 0.5).unwrap();
            assert!((v.re - 2.0 * x.sqrt().asin()).abs() < 1e-13, "x = {x}");
        }
        let z = C64::new(0.7, 0.6);
        let series = inc_beta(z, 0.4, 0.7);
        // same value by direct quadrature with the t^{a-1} endpoint singularity
        let direct = crate::quadrature::integrate_singular(
            |t: C64| t.powf(-0.6) * (1.0 - t).powf(-0.3),
            re(0.0),
            z,
            EndpointSingularity::left(0.6),
            1e-15,
        )
        .unwrap();
        assert!((series.unwrap() - direct.value).norm() < 1e-13);
    }

    #[test]
    fn appell_reductions() {
        assert_eq!(
            appell_f1(0.3, 0.2, 0.1, 1.4, re(0.0), re(0.0)).unwrap(),
            re(1.0)
        );
        let a = appell_f1(1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 7.0 / 6.0, re(0.2), re(0.0)).unwrap();
        let b = hyp2f1(1.0 / 6.0, 1.0 / 6.0, 7.0 / 6.0, re(0.2)).unwrap();
        assert!((a - b).norm() < 1e-13);
        let a = appell_f1(0.25, 0.3, 0.4, 1.5, re(0.1), re(0.1)).unwrap();
        let b = hyp2f1(0.25, 0.7, 1.5, re(0.1)).unwrap();
        assert!((a - b).norm() < 1e-12);
        assert!(appell_f1(0.25, 0.3, 0.4, 1.5, re(1.0), re(0.1)).is_err());
    }

    #[test]
    fn appell_against_integral_representation() {
        // F1 = Γ(c)/(Γ(a)Γ(c-a)) ∫₀¹ t^{a-1}(1-t)^{c-a-1}(1-xt)^{-b1}(1-yt)^{-b2} dt
        let (a, b1, b2, c) = (0.5, 0.3, 0.7, 2.0);
        let (x, y) = (C64::new(0.6, 0.2), re(-0.85));
        let integral = crate::quadrature::integrate_singular(
            |t: C64| {
                t.powf(a - 1.0)
                    * (1.0 - t).powf(c - a - 1.0)
                    * (1.0 - x * t).powf(-b1)
                    * (1.0 - y * t).powf(-b2)
            },
            re(0.0),
            re(1.0),
            EndpointSingularity::left(1.0 - a),
            1e-15,
        )
        .unwrap()
        .value;
        let pref = gamma_real(c).unwrap() / (gamma_real(a).unwrap() * gamma_real(c - a).unwrap());
        let series = appell_f1(a, b1, b2, c, x, y).unwrap();
        assert!((series - integral * pref).norm() < 1e-13);
    }
}
