use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// A point of the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperHalfPoint(C64);

impl UpperHalfPoint {
    pub fn new(z: C64) -> Result<Self> {
        if z.im > 0.0 && z.re.is_finite() && z.im.is_finite() {
            Ok(UpperHalfPoint(z))
        } else {
            Err(Error::Domain(format!("{z} is not in the upper half plane")))
        }
    }

    pub fn z(&self) -> C64 {
        self.0
    }
}

/// A nome `q` with `|q| < 1`, carrying the logarithm used for fractional
/// powers of `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nome {
    q: C64,
    log: Option<C64>,
}

impl Nome {
    pub fn new(q: C64) -> Result<Self> {
        if !(q.norm() < 1.0) {
            return Err(Error::Domain(format!(
                "nome needs |q| < 1, got {}",
                q.norm()
            )));
        }
        let log = if q.norm() == 0.0 { None } else { Some(q.ln()) };
        Ok(Nome { q, log })
    }

    /// The nome `exp(l)` with the branch of its logarithm fixed to `l`.
    pub fn from_log(l: C64) -> Result<Self> {
        if !(l.re < 0.0) {
            return Err(Error::Domain(format!("nome needs Re(log q) < 0, got {l}")));
        }
        Ok(Nome {
            q: l.exp(),
            log: Some(l),
        })
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    /// `q^p` on the branch of the stored logarithm; `0^p = 0` for `p > 0`.
    pub fn pow(&self, p: f64) -> C64 {
        match self.log {
            Some(l) => (l * p).exp(),
            None => C64::new(0.0, 0.0),
        }
    }
}

/// `e(z) = exp(2πiz)`.
pub fn e_map(z: UpperHalfPoint) -> Nome {
    Nome::from_log(2.0 * PI * I * z.z()).expect("Im z > 0")
}

// Σ_{n≥0} q^{n(n+1)} and 1 + 2Σ_{n≥1} q^{n²}, stopping once terms fall
// below 1e-17 of the partial sum.
fn sum_squares(q: C64, start: C64, step: impl Fn(u64) -> u64, scale: f64) -> C64 {
    let mut sum = start;
    let mut n = 1u64;
    loop {
        let e = step(n);
        let term = q.powu(e as u32) * scale;
        sum += term;
        if term.norm() < 1e-17 * sum.norm() || term.norm() == 0.0 || n > 100_000 {
            return sum;
        }
        n += 1;
    }
}

fn theta3_q(q: C64) -> C64 {
    if q.norm() == 0.0 {
        return C64::new(1.0, 0.0);
    }
    sum_squares(q, C64::new(1.0, 0.0), |n| n * n, 2.0)
}

fn theta2_nome(nome: &Nome) -> C64 {
    let q = nome.q();
    if q.norm() == 0.0 {
        return C64::new(0.0, 0.0);
    }
    2.0 * nome.pow(0.25) * sum_squares(q, C64::new(1.0, 0.0), |n| n * (n + 1), 1.0)
}

/// `θ₂(q) = Σ q^{(n+1/2)²}` with `q^{1/4}` taken on the nome's branch.
pub fn theta2(q: Nome) -> C64 {
    theta2_nome(&q)
}

/// `θ₃(q) = Σ q^{n²}`.
pub fn theta3(q: Nome) -> C64 {
    theta3_q(q.q())
}

/// Singular modulus `(θ₂/θ₃)²` at the nome `e^{iπz}`.
pub fn mstar(z: UpperHalfPoint) -> C64 {
    let nome = Nome::from_log(PI * I * z.z()).expect("Im z > 0");
    let r = theta2_nome(&nome) / theta3_q(nome.q());
    r * r
}

/// `k_r`: the singular modulus at `q = e^{-π√r}`.
pub fn k_r(r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("k_r needs r > 0, got {r}")));
    }
    let nome = Nome::from_log(C64::new(-PI * r.sqrt(), 0.0))?;
    let t = theta2_nome(&nome).re / theta3_q(nome.q()).re;
    Ok(t * t)
}

fn product_terms(q: C64) -> u32 {
    // smallest N with |q|^{N+1} < 1e-18
    let r = q.norm();
    if r == 0.0 {
        return 0;
    }
    ((-18.0 * 10f64.ln() / r.ln()).ceil() as u32).max(1)
}

/// Dedekind eta `e(z/24) ∏ (1 - qⁿ)`.
pub fn eta(z: UpperHalfPoint) -> C64 {
    let nome = e_map(z);
    let q = nome.q();
    let mut prod = C64::new(1.0, 0.0);
    let mut qn = C64::new(1.0, 0.0);
    for _ in 0..product_terms(q) {
        qn *= q;
        prod *= 1.0 - qn;
    }
    nome.pow(1.0 / 24.0) * prod
}

/// Rogers–Ramanujan continued fraction in product form,
/// `q^{1/5} ∏ (1-qⁿ)^{χ(n)}` with `χ = +1` on `±1 mod 5` and `-1` on `±2 mod 5`.
pub fn rogers_ramanujan(q: Nome) -> C64 {
    let qq = q.q();
    if qq.norm() == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let mut num = C64::new(1.0, 0.0);
    let mut den = C64::new(1.0, 0.0);
    let mut qn = C64::new(1.0, 0.0);
    for n in 1..=product_terms(qq) {
        qn *= qq;
        match n % 5 {
            1 | 4 => num *= 1.0 - qn,
            2 | 3 => den *= 1.0 - qn,
            _ => {}
        }
    }
    q.pow(0.2) * num / den
}
