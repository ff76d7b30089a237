//! Quantization of the sphere: the monomial basis of `ℋ_N`, coherent states,
//! Toeplitz matrices of Fourier-expanded symbols, Wick symbols and the
//! identification of TQFT bases with `ℋ_N`.
//!
//! Points of the sphere are written `(τ, θ)` with `z = √(τ/(1−τ))·e^{iθ}`,
//! so `ρ = |z|² = τ/(1−τ)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::banded::BandedOperator;
use crate::error::{Error, Result};
use crate::numerics::{integrate_1d, QuadratureSpec};
use crate::sphere::SphereBasis;
use crate::torus::TorusBasis;

/// `ln k!` for `k = 0..=n`.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// The orthonormal basis `φ_n = c_n z^n`, `n = 0..N−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockBasisS2 {
    n: usize,
    ln_fact: Vec<f64>,
}

impl FockBasisS2 {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyBasis);
        }
        Ok(Self { n, ln_fact: ln_factorials(n) })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `ln c_n = ½ ln(N!/(n!(N−1−n)!))`.
    pub fn ln_normalization(&self, k: usize) -> f64 {
        let f = &self.ln_fact;
        0.5 * (f[self.n] - f[k] - f[self.n - 1 - k])
    }

    pub fn normalization(&self, k: usize) -> f64 {
        self.ln_normalization(k).exp()
    }

    /// `φ_n(z)`.
    pub fn eval(&self, k: usize, z: Complex64) -> Complex64 {
        z.powu(k as u32) * self.normalization(k)
    }

    fn ln_binomial(&self, k: usize) -> f64 {
        let f = &self.ln_fact;
        f[self.n - 1] - f[k] - f[self.n - 1 - k]
    }
}

/// Coherent state `ρ_{z0}(z) = N(1 + z̄0·z)^{N−1}`.
pub fn coherent_eval(z0: Complex64, z: Complex64, n: usize) -> Complex64 {
    (Complex64::new(1.0, 0.0) + z0.conj() * z).powu(n as u32 - 1) * n as f64
}

/// Radial profile of one Fourier mode, as a function of `τ ∈ (0, 1)`.
pub type Profile = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A function on the sphere given by its Fourier modes in `θ`:
/// `f(τ, θ) = Σ_μ f_μ(τ)·e^{iμθ}`.
#[derive(Clone)]
pub struct RadialFourierSymbol {
    modes: BTreeMap<i64, Profile>,
    real: bool,
}

impl std::fmt::Debug for RadialFourierSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialFourierSymbol")
            .field("modes", &self.modes.keys().collect::<Vec<_>>())
            .field("real", &self.real)
            .finish()
    }
}

impl RadialFourierSymbol {
    /// Real-valued symbol; negative modes are filled in by conjugation.
    pub fn real() -> Self {
        Self { modes: BTreeMap::new(), real: true }
    }

    /// Complex symbol with independent modes.
    pub fn complex() -> Self {
        Self { modes: BTreeMap::new(), real: false }
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Adds mode `μ`. For real symbols `μ` must be nonnegative and the mode
    /// `−μ` is set to the conjugate profile.
    pub fn with_mode<F>(mut self, mu: i64, profile: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        let profile: Profile = Arc::new(profile);
        if self.real {
            assert!(mu >= 0, "real symbols take nonnegative modes; got {mu}");
            if mu > 0 {
                let p = profile.clone();
                self.modes.insert(-mu, Arc::new(move |t| p(t).conj()));
            }
        }
        self.modes.insert(mu, profile);
        self
    }

    /// Real mode given by a real profile.
    pub fn with_real_mode<F>(self, mu: i64, profile: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.with_mode(mu, move |t| Complex64::new(profile(t), 0.0))
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, &Profile)> {
        self.modes.iter().map(|(k, v)| (*k, v))
    }

    pub fn mode(&self, mu: i64) -> Option<&Profile> {
        self.modes.get(&mu)
    }

    pub fn bandwidth(&self) -> usize {
        self.modes.keys().map(|m| m.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn eval(&self, tau: f64, theta: f64) -> Complex64 {
        self.modes
            .iter()
            .map(|(&mu, f)| f(tau) * Complex64::from_polar(1.0, mu as f64 * theta))
            .sum()
    }
}

/// Matrix of `T_f` on `ℋ_N`: `F(n, μ) = ∫ f_μ ρ^{n+μ/2} (1+ρ)^{−(N+1)} dρ · c_n c_{n+μ}`.
///
/// The integral is taken in `τ`, where it becomes a Beta-type density
/// `τ^k (1−τ)^{N−1−k}` with `k = n + μ/2` concentrated near `k/(N−1)`.
pub fn toeplitz_matrix(symbol: &RadialFourierSymbol, n: usize) -> Result<BandedOperator> {
    toeplitz_matrix_with(symbol, n, &QuadratureSpec::new(1e-12, 1e-10))
}

pub fn toeplitz_matrix_with(
    symbol: &RadialFourierSymbol,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<BandedOperator> {
    let basis = FockBasisS2::new(n)?;
    let band = symbol.bandwidth();
    let mut jobs = Vec::new();
    for (mu, _) in symbol.modes() {
        let lo = (-mu).max(0) as usize;
        let hi = (n as i64 - mu.max(0)).max(0) as usize;
        jobs.extend((lo..hi).map(|k| (k, mu)));
    }
    let values: Vec<Result<(usize, i64, Complex64)>> = jobs
        .par_iter()
        .map(|&(k, mu)| {
            let profile = symbol.mode(mu).expect("mode listed");
            toeplitz_entry(&basis, profile, k, mu, spec).map(|v| (k, mu, v))
        })
        .collect();
    let mut op = BandedOperator::zeros(n, band);
    for v in values {
        let (k, mu, value) = v?;
        op.set(k, mu, value);
    }
    Ok(op.with_meta("sphere", "toeplitz", n as u32))
}

fn toeplitz_entry(
    basis: &FockBasisS2,
    profile: &Profile,
    k: usize,
    mu: i64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let dim = basis.dim() as f64;
    let power = k as f64 + mu as f64 / 2.0;
    let rest = dim - 1.0 - power;
    let ln_c = basis.ln_normalization(k) + basis.ln_normalization((k as i64 + mu) as usize);
    let weight = |t: f64| {
        if t <= 0.0 || t >= 1.0 {
            return 0.0;
        }
        (ln_c + power * t.ln() + rest * (1.0 - t).ln()).exp()
    };
    let peak = power / (dim - 1.0).max(1.0);
    let width = (peak * (1.0 - peak) / dim).sqrt().max(1.0 / dim);
    let breaks: Vec<f64> = [-8.0, -3.0, 0.0, 3.0, 8.0]
        .iter()
        .map(|s| peak + s * width)
        .filter(|&t| t > 0.0 && t < 1.0)
        .collect();
    integrate_1d(|t: f64| profile(t) * weight(t), 0.0, 1.0, &breaks, spec)
        .map(|e| e.value)
        .map_err(|e| match e {
            Error::Quadrature { error, .. } => {
                Error::Quadrature { error, location: Some(format!("n={k}, mu={mu}")) }
            }
            other => other,
        })
}

/// Wick symbol `⟨Tρ_z, ρ_z⟩/⟨ρ_z, ρ_z⟩`, from the binomial expansion of `ρ_z`.
pub fn wick_symbol(op: &BandedOperator, z: Complex64) -> Complex64 {
    let n = op.dim();
    let basis = FockBasisS2::new(n).expect("operator has positive dimension");
    let t = z.norm_sqr() / (1.0 + z.norm_sqr());
    let theta = z.arg();
    // ρ_z/|ρ_z| = Σ √p_k e^{−ikθ} φ_k with binomial weights p_k.
    let amp: Vec<f64> = (0..n)
        .map(|k| {
            let ln_p = basis.ln_binomial(k) + ln_pow(t, k as f64) + ln_pow(1.0 - t, (n - 1 - k) as f64);
            (0.5 * ln_p).exp()
        })
        .collect();
    let band = op.band() as i64;
    let mut total = Complex64::new(0.0, 0.0);
    for mu in -band..=band {
        let phase = Complex64::from_polar(1.0, mu as f64 * theta);
        for k in op.diagonal_range(mu) {
            let j = (k as i64 + mu) as usize;
            total += op.get(k, mu) * amp[k] * amp[j] * phase;
        }
    }
    total
}

fn ln_pow(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        0.0
    } else {
        e * x.ln()
    }
}

/// Sphere Laplacian `(1+|z|²)²∂_z∂_z̄` of one mode `g(τ)e^{iμθ}`, without the
/// phase: `τ(1−τ)g'' + (1−2τ)g' − μ²g/(4τ(1−τ))`.
pub fn laplacian_mode(profile: &dyn Fn(f64) -> Complex64, mu: i64, tau: f64) -> Result<Complex64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Pole(format!("Laplacian at τ={tau}")));
    }
    let h = 1e-3_f64.min(tau / 4.0).min((1.0 - tau) / 4.0);
    let diffs = |h: f64| {
        let (fm, f0, fp) = (profile(tau - h), profile(tau), profile(tau + h));
        ((fp - fm) / (2.0 * h), (fp - f0 * 2.0 + fm) / (h * h))
    };
    let (d1a, d2a) = diffs(h);
    let (d1b, d2b) = diffs(h / 2.0);
    let d1 = (d1b * 4.0 - d1a) / 3.0;
    let d2 = (d2b * 4.0 - d2a) / 3.0;
    let s = tau * (1.0 - tau);
    Ok(d2 * s + d1 * (1.0 - 2.0 * tau) - profile(tau) * ((mu * mu) as f64 / (4.0 * s)))
}

/// `Δ_S f` at `(τ, θ)` for a real symbol.
pub fn laplacian_s2(symbol: &RadialFourierSymbol, tau: f64, theta: f64) -> Result<f64> {
    let mut total = Complex64::new(0.0, 0.0);
    for (mu, f) in symbol.modes() {
        total += laplacian_mode(f.as_ref(), mu, tau)? * Complex64::from_polar(1.0, mu as f64 * theta);
    }
    Ok(total.re)
}

/// A surface with its boundary coloring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceSpec {
    Torus { r: u32, a: u32 },
    Sphere { r: u32, colors: [i64; 4] },
}

/// Affine identification `m = offset + stride·n` of TQFT labels with `0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexEmbedding {
    pub surface: SurfaceSpec,
    /// Label of `n = 0`.
    pub offset: i64,
    pub stride: i64,
    pub dim: usize,
}

impl IndexEmbedding {
    /// TQFT label of position `n`.
    pub fn label(&self, n: usize) -> i64 {
        self.offset + self.stride * n as i64
    }

    /// Position of TQFT label `m`, if it lies in the basis.
    pub fn position(&self, m: i64) -> Option<usize> {
        let d = m - self.offset;
        (d >= 0 && d % self.stride == 0 && ((d / self.stride) as usize) < self.dim)
            .then(|| (d / self.stride) as usize)
    }

    pub fn level(&self) -> u32 {
        match self.surface {
            SurfaceSpec::Torus { r, .. } | SurfaceSpec::Sphere { r, .. } => r,
        }
    }
}

pub fn embed_tqft(surface: SurfaceSpec) -> Result<IndexEmbedding> {
    match surface {
        SurfaceSpec::Torus { r, a } => {
            let basis = TorusBasis::new(r, a)?;
            Ok(IndexEmbedding { surface, offset: basis.label(0), stride: 1, dim: basis.dim() })
        }
        SurfaceSpec::Sphere { r, colors } => {
            let basis = SphereBasis::new(r, colors)?;
            Ok(IndexEmbedding { surface, offset: basis.first, stride: 2, dim: basis.dim })
        }
    }
}

/// `x = 2√(τ(1−τ))·cos θ`, the first coordinate of the unit sphere.
pub fn sphere_x(tau: f64, theta: f64) -> f64 {
    2.0 * (tau * (1.0 - tau)).sqrt() * theta.cos()
}

/// `(τ, θ)` of a point `z` of the plane chart.
pub fn chart_point(z: Complex64) -> (f64, f64) {
    let rho = z.norm_sqr();
    (rho / (1.0 + rho), z.arg())
}

/// `z` of a point `(τ, θ)`.
pub fn chart_z(tau: f64, theta: f64) -> Complex64 {
    Complex64::from_polar((tau / (1.0 - tau)).sqrt(), theta)
}
