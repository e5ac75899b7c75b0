use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

// Lanczos approximation, g = 7, nine terms.
const G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_pole(x: C64) -> bool {
    x.im == 0.0 && x.re <= 0.0 && x.re.fract() == 0.0
}

/// Complex gamma function. Left half-plane values use the reflection
/// formula.
pub fn gamma_fn(x: C64) -> Result<C64> {
    if is_pole(x) {
        return Err(Error::Pole(format!("gamma has a pole at {x}")));
    }
    if x.re < 0.5 {
        let s = (x * PI).sin();
        if s.norm() == 0.0 {
            return Err(Error::Pole(format!("gamma has a pole at {x}")));
        }
        return Ok(PI / (s * gamma_fn(1.0 - x)?));
    }
    let z = x - 1.0;
    let mut acc = C64::new(COEF[0], 0.0);
    for (k, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (z + k as f64);
    }
    let t = z + G + 0.5;
    Ok((2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * acc)
}

pub fn gamma_real(x: f64) -> Result<f64> {
    if x > 0.0 && x.fract() == 0.0 && x <= 171.0 {
        return Ok((1..x as u64).map(|k| k as f64).product());
    }
    gamma_fn(C64::new(x, 0.0)).map(|g| g.re)
}
