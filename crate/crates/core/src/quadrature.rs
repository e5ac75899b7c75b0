//! Adaptive Gauss–Kronrod (10/21) quadrature along a straight segment of the
//! complex plane, with optional power-law endpoint singularities removed by
//! substitution.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const MAX_INTERVALS: usize = 4000;

/// Exponents `s` of integrable endpoint behaviour `|t - end|^{-s}`, `s < 1`.
/// Zero means a regular endpoint.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EndpointSingularity {
    pub left: f64,
    pub right: f64,
}

impl EndpointSingularity {
    pub const NONE: Self = EndpointSingularity {
        left: 0.0,
        right: 0.0,
    };

    pub fn left(s: f64) -> Self {
        EndpointSingularity {
            left: s,
            right: 0.0,
        }
    }

    pub fn right(s: f64) -> Self {
        EndpointSingularity {
            left: 0.0,
            right: s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: C64,
    pub abs_err: f64,
    pub intervals: usize,
}

#[derive(Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: C64,
    err: f64,
    resabs: f64,
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut e = err.abs();
    if resasc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / resasc).powf(1.5);
        e = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * resabs;
        if min_err > e {
            e = min_err;
        }
    }
    e
}

fn gk21<F: Fn(f64) -> C64>(g: &F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = g(center);
    let mut kron = fc * WGK[10];
    let mut gauss = C64::new(0.0, 0.0);
    let mut resabs = WGK[10] * fc.norm();
    let mut fv1 = [C64::new(0.0, 0.0); 10];
    let mut fv2 = [C64::new(0.0, 0.0); 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = g(center - x);
        let f2 = g(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        kron += (f1 + f2) * WGK[j];
        resabs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kron * 0.5;
    let mut resasc = WGK[10] * (fc - mean).norm();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let err = ((kron - gauss) * half).norm();
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    Piece {
        a,
        b,
        value: kron * half,
        err: rescale_error(err, resabs, resasc),
        resabs,
    }
}

/// Adaptive integration of a real-parameter integrand over `[a, b]`.
fn adapt<F: Fn(f64) -> C64>(g: &F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    let mut pieces = vec![gk21(g, a, b)];
    loop {
        let value: C64 = pieces.iter().map(|p| p.value).sum();
        let err: f64 = pieces.iter().map(|p| p.err).sum();
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::NonIntegrable("integrand is not finite".into()));
        }
        let resabs: f64 = pieces.iter().map(|p| p.resabs).sum();
        let floor = 200.0 * f64::EPSILON * resabs;
        if err <= tol.max(floor) {
            pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
            let value = pieces.iter().map(|p| p.value).sum();
            return Ok(QuadResult {
                value,
                abs_err: err,
                intervals: pieces.len(),
            });
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::NonIntegrable(format!(
                "error estimate {err:.3e} stalled above tolerance {tol:.3e}"
            )));
        }
        let (idx, worst) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, p)| (i, *p))
            .expect("at least one interval");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::NonIntegrable(
                "interval too small to subdivide further".into(),
            ));
        }
        pieces[idx] = gk21(g, worst.a, mid);
        pieces.push(gk21(g, mid, worst.b));
    }
}

/// `∫_{z1}^{z2} f(t) dt` along the straight segment, absolute tolerance `tol`.
pub fn integrate<F>(f: F, z1: C64, z2: C64, tol: f64) -> Result<QuadResult>
where
    F: Fn(C64) -> C64,
{
    integrate_singular(f, z1, z2, EndpointSingularity::NONE, tol)
}

/// Like [`integrate`], with declared endpoint singularities. An endpoint with
/// exponent `s > 0` is approached through `t = end ± L u^p`, `p = 1/(1-s)`,
/// which turns `|t - end|^{-s}` into a bounded integrand.
pub fn integrate_singular<F>(
    f: F,
    z1: C64,
    z2: C64,
    sing: EndpointSingularity,
    tol: f64,
) -> Result<QuadResult>
where
    F: Fn(C64) -> C64,
{
    singular_dyn(&f, z1, z2, sing, tol)
}

fn singular_dyn(
    f: &dyn Fn(C64) -> C64,
    z1: C64,
    z2: C64,
    sing: EndpointSingularity,
    tol: f64,
) -> Result<QuadResult> {
    for s in [sing.left, sing.right] {
        if !(s < 1.0) {
            return Err(Error::NonIntegrable(format!(
                "endpoint exponent {s} is not integrable"
            )));
        }
    }
    if z1 == z2 {
        return Ok(QuadResult {
            value: C64::new(0.0, 0.0),
            abs_err: 0.0,
            intervals: 0,
        });
    }
    let left = sing.left > 0.0;
    let right = sing.right > 0.0;
    if left && right {
        let mid = 0.5 * (z1 + z2);
        let a = singular_dyn(f, z1, mid, EndpointSingularity::left(sing.left), tol / 2.0)?;
        let b = singular_dyn(
            f,
            mid,
            z2,
            EndpointSingularity::right(sing.right),
            tol / 2.0,
        )?;
        return Ok(QuadResult {
            value: a.value + b.value,
            abs_err: a.abs_err + b.abs_err,
            intervals: a.intervals + b.intervals,
        });
    }
    let len = z2 - z1;
    if left {
        let p = 1.0 / (1.0 - sing.left);
        let g = |u: f64| f(z1 + len * u.powf(p)) * len * (p * u.powf(p - 1.0));
        adapt(&g, 0.0, 1.0, tol)
    } else if right {
        let p = 1.0 / (1.0 - sing.right);
        let g = |u: f64| f(z2 - len * u.powf(p)) * len * (p * u.powf(p - 1.0));
        adapt(&g, 0.0, 1.0, tol)
    } else {
        let g = |u: f64| f(z1 + len * u) * len;
        adapt(&g, 0.0, 1.0, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn gauss_nodes_integrate_polynomials_exactly() {
        // the embedded 10-point rule is exact through degree 19
        let g = |t: f64| re(t.powi(18));
        let p = gk21(&g, -1.0, 1.0);
        assert!((p.value - re(2.0 / 19.0)).norm() < 1e-15);
        let gauss: f64 = (0..5).map(|k| WG[k] * 2.0 * XGK[2 * k + 1].powi(18)).sum();
        assert!((gauss - 2.0 / 19.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_sqrt_at_left_end() {
        let r = integrate_singular(
            |t: C64| t.powf(-0.5),
            re(0.0),
            re(1.0),
            EndpointSingularity::left(0.5),
            1e-14,
        )
        .unwrap();
        assert!((r.value - re(2.0)).norm() < 1e-12);
    }

    #[test]
    fn arcsine_integral() {
        let r = integrate_singular(
            |t: C64| (re(1.0) - t * t).powf(-0.5),
            re(-1.0),
            re(0.0),
            EndpointSingularity::left(0.5),
            1e-14,
        )
        .unwrap();
        assert!((r.value - re(PI / 2.0)).norm() < 1e-12);
        let both = integrate_singular(
            |t: C64| (re(1.0) - t * t).powf(-0.5),
            re(-1.0),
            re(1.0),
            EndpointSingularity {
                left: 0.5,
                right: 0.5,
            },
            1e-14,
        )
        .unwrap();
        assert!((both.value - re(PI)).norm() < 1e-12);
    }

    #[test]
    fn complex_segment() {
        // ∫_0^{i} e^t dt = e^i - 1
        let z = C64::new(0.0, 1.0);
        let r = integrate(|t: C64| t.exp(), re(0.0), z, 1e-14).unwrap();
        assert!((r.value - (z.exp() - 1.0)).norm() < 1e-14);
    }

    #[test]
    fn non_integrable_is_reported() {
        let r = integrate(|t: C64| re(1.0) / t, re(0.0), re(1.0), 1e-12);
        assert!(matches!(r, Err(Error::NonIntegrable(_))));
        let r = integrate_singular(
            |t: C64| re(1.0) / t,
            re(0.0),
            re(1.0),
            EndpointSingularity::left(1.0),
            1e-12,
        );
        assert!(matches!(r, Err(Error::NonIntegrable(_))));
    }

    #[test]
    fn empty_segment() {
        let r = integrate(|_| re(1.0), re(0.3), re(0.3), 1e-12).unwrap();
        assert_eq!(r.value, re(0.0));
    }
}
