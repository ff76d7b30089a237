use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
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

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_626_368_883,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Values the quadrature can accumulate: reals and complex numbers.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Tolerances and budget for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub atol: f64,
    pub rtol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { atol: 1e-12, rtol: 1e-10, max_subdivisions: 2000 }
    }
}

impl QuadratureSpec {
    pub fn new(atol: f64, rtol: f64) -> Self {
        Self { atol, rtol, ..Self::default() }
    }

    fn target(&self, value: f64) -> f64 {
        self.atol.max(self.rtol * value)
    }
}

/// An integral value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<T: Scalar, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> Panel<T> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = T::zero();
    let mut kron = fc * WGK[10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kron = kron + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).modulus();
    Panel { a, b, value, error }
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// `breaks` are optional interior points where the integrand changes
/// character; they seed the initial panels.
pub fn integrate_1d<T: Scalar, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate<T>> {
    if a == b {
        return Ok(Estimate { value: T::zero(), error: 0.0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut points = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    points.extend(inner);
    points.push(hi);

    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        heap.push(kronrod(&f, w[0], w[1]));
    }
    let mut panels = heap.len();
    loop {
        let (total, error) = heap
            .iter()
            .fold((T::zero(), 0.0), |(s, e), p| (s + p.value, e + p.error));
        if error <= spec.target(total.modulus()) {
            return Ok(Estimate { value: total * sign, error });
        }
        if panels >= spec.max_subdivisions {
            return Err(Error::Quadrature { error, location: None });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel below floating-point resolution; keep it and stop refining.
            return Err(Error::Quadrature { error, location: None });
        }
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
        panels += 1;
    }
}

/// Integrates `f` over `(0, ∞)`, splitting at `split` and mapping the far
/// piece through `ρ ↦ 1/ρ`.
pub fn integrate_half_line<T: Scalar, F: Fn(f64) -> T>(
    f: F,
    split: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate<T>> {
    let near_breaks: Vec<f64> = breaks.iter().copied().filter(|&x| x < split).collect();
    let far_breaks: Vec<f64> =
        breaks.iter().copied().filter(|&x| x > split).map(|x| 1.0 / x).collect();
    let near = integrate_1d(&f, 0.0, split, &near_breaks, spec)?;
    let far = integrate_1d(
        |u: f64| {
            if u <= 0.0 {
                T::zero()
            } else {
                f(1.0 / u) * (1.0 / (u * u))
            }
        },
        0.0,
        1.0 / split,
        &far_breaks,
        spec,
    )?;
    Ok(Estimate { value: near.value + far.value, error: near.error + far.error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn kronrod_is_exact_on_high_degree_polynomials() {
        let est = integrate_1d(|x: f64| x.powi(30), -1.0, 1.0, &[], &QuadratureSpec::default())
            .unwrap();
        assert!((est.value - 2.0 / 31.0).abs() < 1e-15);
    }

    #[test]
    fn beta_integral_on_half_line() {
        let spec = QuadratureSpec::new(1e-13, 1e-12);
        let est = integrate_half_line(|r: f64| r * (1.0 + r).powi(-4), 1.0, &[], &spec).unwrap();
        assert!((est.value - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn zero_and_oscillatory() {
        let spec = QuadratureSpec::default();
        let z = integrate_1d(|_x: f64| 0.0, 0.0, 3.0, &[], &spec).unwrap();
        assert_eq!(z.value, 0.0);
        for k in 1..6 {
            let c = integrate_1d(|t: f64| (k as f64 * t).cos(), 0.0, 2.0 * PI, &[], &spec).unwrap();
            assert!(c.value.abs() < 1e-12);
        }
    }

    #[test]
    fn endpoint_singularity() {
        let spec = QuadratureSpec::new(1e-10, 1e-10);
        let est = integrate_1d(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &[], &spec).unwrap();
        assert!((est.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn complex_integrand() {
        let spec = QuadratureSpec::default();
        let est = integrate_1d(
            |t: f64| Complex64::new(0.0, t).exp(),
            0.0,
            PI,
            &[],
            &spec,
        )
        .unwrap();
        assert!((est.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let spec = QuadratureSpec::default();
        let est = integrate_1d(|x: f64| x, 1.0, 0.0, &[], &spec).unwrap();
        assert!((est.value + 0.5).abs() < 1e-15);
    }
}
