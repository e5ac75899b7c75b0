use std::f64::consts::E;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambertBranch {
    Principal,
    /// The real branch `W₋₁` on `(-1/e, 0)`.
    Minus1,
}

fn branch_point_guess(x: C64, sign: f64) -> C64 {
    let p = (2.0 * (E * x + 1.0)).sqrt() * sign;
    -1.0 + p - p * p / 3.0 + p * p * p * (11.0 / 72.0)
}

fn halley(x: C64, mut w: C64) -> Result<C64> {
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom.norm() == 0.0 {
            return Ok(w);
        }
        let step = f / denom;
        w -= step;
        if step.norm() <= 4.0 * f64::EPSILON * (1.0 + w.norm()) {
            return Ok(w);
        }
    }
    Err(Error::NoConvergence(format!("lambert_w at {x}")))
}

/// Lambert W: the solution of `w e^w = x` on the requested branch.
pub fn lambert_w(x: C64, branch: LambertBranch) -> Result<C64> {
    let bp = -1.0 / E;
    if (x - bp).norm() <= 4.0 * f64::EPSILON {
        return Ok(C64::new(-1.0, 0.0));
    }
    match branch {
        LambertBranch::Principal => {
            if x.norm() == 0.0 {
                return Ok(x);
            }
            let w0 = if (x - bp).norm() < 0.25 || (x.norm() <= 3.0 && (1.0 + x).norm() < 0.5) {
                branch_point_guess(x, 1.0)
            } else if x.norm() <= 3.0 {
                (1.0 + x).ln()
            } else {
                let l1 = x.ln();
                l1 - l1.ln()
            };
            halley(x, w0)
        }
        LambertBranch::Minus1 => {
            if x.im != 0.0 || !(x.re > bp && x.re < 0.0) {
                return Err(Error::Branch(format!(
                    "W_-1 is only available on (-1/e, 0), got {x}"
                )));
            }
            let w0 = if x.re < -0.25 {
                branch_point_guess(x, -1.0)
            } else {
                let l1 = (-x.re).ln();
                C64::new(l1 - (-l1).ln(), 0.0)
            };
            let w = halley(x, w0)?;
            Ok(C64::new(w.re, 0.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn examples() {
        assert_eq!(
            lambert_w(re(0.0), LambertBranch::Principal).unwrap(),
            re(0.0)
        );
        assert!((lambert_w(re(E), LambertBranch::Principal).unwrap() - re(1.0)).norm() < 1e-15);
        assert_eq!(
            lambert_w(re(-1.0 / E), LambertBranch::Principal).unwrap(),
            re(-1.0)
        );
        assert_eq!(
            lambert_w(re(-1.0 / E), LambertBranch::Minus1).unwrap(),
            re(-1.0)
        );
    }

    #[test]
    fn residual_on_grids() {
        for k in -40..=40 {
            let x = 10f64.powf(k as f64 / 8.0);
            for xx in [x, -x * 0.367] {
                if xx < -1.0 / E {
                    continue;
                }
                let w = lambert_w(re(xx), LambertBranch::Principal).unwrap();
                assert!(
                    (w * w.exp() - xx).norm() <= 1e-13 * xx.abs().max(1e-300),
                    "x = {xx}"
                );
            }
        }
        for k in 1..200 {
            let x = -1.0 / E * k as f64 / 200.0;
            let w = lambert_w(re(x), LambertBranch::Minus1).unwrap();
            assert!(w.re <= -1.0);
            assert!((w * w.exp() - x).norm() < 1e-15, "x = {x}");
        }
        for z in [
            C64::new(1.0, 1.0),
            C64::new(-2.0, 0.5),
            C64::new(-1.0, 0.0),
            C64::new(10.0, -30.0),
        ] {
            let w = lambert_w(z, LambertBranch::Principal).unwrap();
            assert!((w * w.exp() - z).norm() < 1e-13 * z.norm());
            assert!(w.im.abs() < std::f64::consts::PI);
        }
    }

    #[test]
    fn branch_errors() {
        assert!(matches!(
            lambert_w(re(0.5), LambertBranch::Minus1),
            Err(Error::Branch(_))
        ));
        assert!(lambert_w(C64::new(-0.1, 0.1), LambertBranch::Minus1).is_err());
    }
}
