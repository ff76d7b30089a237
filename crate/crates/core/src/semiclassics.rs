//! Eigenbasis pairings of curve operators and their semiclassical
//! asymptotics: level-set geometry of two principal symbols, the stationary
//! phase pairing formula, and its 6j-symbol and punctured S-matrix cases.
//!
//! All geometry lives in the Toeplitz chart `(τ, θ) ∈ (0,1) × [0, 2π)` with
//! the normalized form `ω = dτ∧dθ/2π` of total area 1, so `ħ = 1/N`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

use crate::banded::BandedOperator;
use crate::error::{Error, Result};
use crate::numerics::{bisect, integrate_1d, integrate_region_2d, sign_changes, QuadratureSpec, Rect};
use crate::qnum::{bracket, bracket_factorial, psi_norm_squared};
use crate::sphere::{op_eta, op_zeta, SphereAngles, SphereBasis};
use crate::toeplitz::{RadialFourierSymbol, SurfaceSpec};
use crate::torus::{longitude_amplitude, op_delta_torus, op_gamma_torus, TorusBasis};

pub use crate::numerics::{eigensolve as eigensolve_banded, Eigenpairs};

/// Density of `ω` in the chart.
const KAPPA: f64 = 1.0 / (2.0 * PI);
/// Eigenvalue matching tolerance on `−2cos(πm/r)`.
const EIGEN_TOL: f64 = 1e-6;
const CHART_EPS: f64 = 1e-9;

/// Boundary coloring of a scaling family at its base level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseColoring {
    Torus { a: u32 },
    Sphere { colors: [i64; 4] },
}

/// The regime `r = D·r̄` with colors `r̄·č`, in which `N = Δ·r̄`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalingFamily {
    pub base_level: u32,
    pub base: BaseColoring,
    pub rbar: u32,
}

impl ScalingFamily {
    pub fn new(base_level: u32, base: BaseColoring, rbar: u32) -> Result<Self> {
        if rbar % 2 == 0 {
            return Err(Error::Domain(format!("multiplier r̄={rbar} must be odd")));
        }
        let family = Self { base_level, base, rbar };
        family.dim()?;
        Ok(family)
    }

    pub fn level(&self) -> u32 {
        self.base_level * self.rbar
    }

    pub fn surface(&self) -> SurfaceSpec {
        let r = self.level();
        match self.base {
            BaseColoring::Torus { a } => SurfaceSpec::Torus { r, a: a * self.rbar },
            BaseColoring::Sphere { colors } => {
                SurfaceSpec::Sphere { r, colors: colors.map(|c| c * self.rbar as i64) }
            }
        }
    }

    pub fn dim(&self) -> Result<usize> {
        match self.surface() {
            SurfaceSpec::Torus { r, a } => Ok(TorusBasis::new(r, a)?.dim()),
            SurfaceSpec::Sphere { r, colors } => Ok(SphereBasis::new(r, colors)?.dim),
        }
    }

    /// Growth rate `Δ = N/r̄`.
    pub fn growth(&self) -> Result<f64> {
        Ok(self.dim()? as f64 / self.rbar as f64)
    }

    /// Label at level `r` of a base label.
    pub fn label(&self, base_label: i64) -> i64 {
        base_label * self.rbar as i64
    }

    /// Eigenvalue `−2cos(πm/D)` carried by base label `m` at every `r̄`.
    pub fn energy(&self, base_label: i64) -> f64 {
        -2.0 * (PI * base_label as f64 / self.base_level as f64).cos()
    }

    /// The diagonal and the tridiagonal curve operator at level `r`:
    /// `(γ, δ)` on the torus, `(ζ, η)` on the sphere.
    pub fn operators(&self) -> Result<(BandedOperator, BandedOperator)> {
        match self.surface() {
            SurfaceSpec::Torus { r, a } => Ok((op_gamma_torus(r, a)?, op_delta_torus(r, a)?)),
            SurfaceSpec::Sphere { r, colors } => Ok((op_zeta(r, colors)?, op_eta(r, colors)?)),
        }
    }

    /// Principal symbols of [`Self::operators`] in the Toeplitz chart.
    pub fn principal_symbols(&self) -> (RadialFourierSymbol, RadialFourierSymbol) {
        match self.base {
            BaseColoring::Torus { a } => torus_symbols(PI * a as f64 / self.base_level as f64),
            BaseColoring::Sphere { colors } => {
                sphere_symbols(SphereAngles::from_colors(colors, self.base_level as f64))
            }
        }
    }
}

/// Meridian and longitude symbols of the torus with holonomy angle `α`.
pub fn torus_symbols(alpha: f64) -> (RadialFourierSymbol, RadialFourierSymbol) {
    let angle = move |t: f64| alpha / 2.0 + (PI - alpha) * t;
    let h0 = RadialFourierSymbol::real().with_real_mode(0, move |t| -2.0 * angle(t).cos());
    let h1 = RadialFourierSymbol::real().with_real_mode(1, move |t| -longitude_amplitude(angle(t), alpha));
    (h0, h1)
}

/// `ζ` and `η` symbols of the four-punctured sphere.
pub fn sphere_symbols(angles: SphereAngles) -> (RadialFourierSymbol, RadialFourierSymbol) {
    let (lo, hi) = angles.action_range();
    let action = move |t: f64| lo + (hi - lo) * t;
    let h0 = RadialFourierSymbol::real().with_real_mode(0, move |t| -2.0 * action(t).cos());
    let h1 = RadialFourierSymbol::real()
        .with_real_mode(0, move |t| -angles.i_fn(action(t), 0.0))
        .with_real_mode(1, move |t| -angles.j_fn(action(t), 0.0));
    (h0, h1)
}

fn value(h: &RadialFourierSymbol, tau: f64, theta: f64) -> f64 {
    h.eval(tau, theta).re
}

fn d_tau(h: &RadialFourierSymbol, tau: f64, theta: f64) -> f64 {
    let step = 1e-6f64.min(tau / 2.0).min((1.0 - tau) / 2.0);
    (value(h, tau + step, theta) - value(h, tau - step, theta)) / (2.0 * step)
}

fn d_theta(h: &RadialFourierSymbol, tau: f64, theta: f64) -> f64 {
    h.modes()
        .map(|(mu, f)| (Complex64::new(0.0, mu as f64) * f(tau) * Complex64::from_polar(1.0, mu as f64 * theta)).re)
        .sum()
}

/// Poisson bracket `{f, g}` for `ω = κ dτ∧dθ`.
pub fn poisson_bracket(f: &RadialFourierSymbol, g: &RadialFourierSymbol, tau: f64, theta: f64) -> f64 {
    (d_tau(f, tau, theta) * d_theta(g, tau, theta) - d_theta(f, tau, theta) * d_tau(g, tau, theta)) / KAPPA
}

/// Roots in `τ` of `h(·, θ) = e`.
fn tau_roots(h: &RadialFourierSymbol, e: f64, theta: f64) -> Vec<f64> {
    let f = |t: f64| value(h, t, theta) - e;
    sign_changes(f, CHART_EPS, 1.0 - CHART_EPS, 400)
        .into_iter()
        .map(|(a, b)| bisect(f, a, b, 1e-14))
        .collect()
}

/// `τ(θ)` on a level curve that is a graph over the angle.
fn graph_point(h: &RadialFourierSymbol, e: f64, theta: f64) -> Result<f64> {
    match tau_roots(h, e, theta)[..] {
        [t] => Ok(t),
        [] => Err(Error::EmptyLevelSet),
        _ => Err(Error::Domain(format!("level {e} is not a graph over θ at θ={theta}"))),
    }
}

fn is_graph(h: &RadialFourierSymbol, e: f64) -> bool {
    (0..16).all(|k| tau_roots(h, e, 2.0 * PI * (k as f64 + 0.37) / 16.0).len() == 1)
}

/// Period of the Hamiltonian flow of `h` on the level `e`.
///
/// A level curve winding around the poles is integrated over `θ`; a
/// contractible one (bandwidth 1 only) over `τ` between its turning points.
pub fn period(h: &RadialFourierSymbol, e: f64, spec: &QuadratureSpec) -> Result<f64> {
    if is_graph(h, e) {
        let integrand = |theta: f64| match graph_point(h, e, theta) {
            Ok(t) => 1.0 / d_tau(h, t, theta).abs(),
            Err(_) => f64::NAN,
        };
        let est = integrate_1d(integrand, 0.0, 2.0 * PI, &[], spec)?;
        return Ok(KAPPA * est.value);
    }
    if h.bandwidth() != 1 {
        return Err(Error::Domain("contractible level curves need a bandwidth-1 symbol".into()));
    }
    let a0 = |t: f64| h.mode(0).map(|f| f(t).re).unwrap_or(0.0);
    let a1 = |t: f64| h.mode(1).map(|f| f(t).norm()).unwrap_or(0.0);
    // The slice {θ : h = e} is nonempty exactly where q ≥ 0.
    let q = |t: f64| 4.0 * a1(t).powi(2) - (e - a0(t)).powi(2);
    let (ta, tb) = turning_points(&q)?;
    let (mid, half) = (0.5 * (ta + tb), 0.5 * (tb - ta));
    // Each slice has two roots with |∂θh| = √q/2; the cosine substitution
    // absorbs the inverse square roots at the turning points.
    let integrand = |u: f64| {
        let t = mid - half * u.cos();
        let qt = q(t);
        if qt <= 0.0 {
            0.0
        } else {
            2.0 / qt.sqrt() * half * u.sin()
        }
    };
    let est = integrate_1d(integrand, 0.0, PI, &[], spec)?;
    Ok(KAPPA * est.value)
}

/// The single interval of `(0,1)` on which `q ≥ 0`.
fn turning_points(q: &dyn Fn(f64) -> f64) -> Result<(f64, f64)> {
    let roots: Vec<f64> = sign_changes(q, CHART_EPS, 1.0 - CHART_EPS, 2000)
        .into_iter()
        .map(|(a, b)| bisect(q, a, b, 1e-15))
        .collect();
    match roots[..] {
        [ta, tb] if q(0.5 * (ta + tb)) > 0.0 => Ok((ta, tb)),
        [] => Err(Error::EmptyLevelSet),
        _ => Err(Error::Domain(format!("level curve is not a single oval ({} turning points)", roots.len()))),
    }
}

/// Geometry of two level curves `H₀ = E₀`, `H₁ = E₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelGeometry {
    /// Intersection points `(τ, θ)`.
    pub intersections: Vec<(f64, f64)>,
    /// `{H₀, H₁}` at each intersection.
    pub brackets: Vec<f64>,
    /// Periods `(T₀, T₁)` of the two flows.
    pub periods: (f64, f64),
    /// `ω`-area of `{H₀ ≥ E₀} ∩ {H₁ ≥ E₁}`.
    pub area: f64,
}

/// Intersections, brackets, periods and enclosed area of two level curves.
/// The level curve of `h0` must be a graph over `θ`.
pub fn level_geometry(
    h0: &RadialFourierSymbol,
    h1: &RadialFourierSymbol,
    e0: f64,
    e1: f64,
) -> Result<LevelGeometry> {
    let spec = QuadratureSpec::new(1e-11, 1e-10);
    let start = 0.123;
    let g = |theta: f64| match graph_point(h0, e0, theta) {
        Ok(t) => value(h1, t, theta) - e1,
        Err(_) => f64::NAN,
    };
    graph_point(h0, e0, start)?;
    let mut intersections = Vec::new();
    let mut brackets = Vec::new();
    for (a, b) in sign_changes(g, start, start + 2.0 * PI, 512) {
        let theta = bisect(g, a, b, 1e-14).rem_euclid(2.0 * PI);
        let tau = graph_point(h0, e0, theta)?;
        let b = poisson_bracket(h0, h1, tau, theta);
        if b.abs() < 1e-8 {
            return Err(Error::Tangency(b));
        }
        intersections.push((tau, theta));
        brackets.push(b);
    }
    if intersections.is_empty() {
        return Err(Error::EmptyLevelSet);
    }
    let periods = (period(h0, e0, &spec)?, period(h1, e1, &spec)?);
    let breaks: Vec<f64> = intersections.iter().map(|p| p.0).collect();
    let area = region_area(h0, h1, e0, e1, &breaks)?;
    Ok(LevelGeometry { intersections, brackets, periods, area })
}

/// `ω`-area of `{H₀ ≥ E₀} ∩ {H₁ ≥ E₁}`; `breaks` are `τ` values where the
/// slice length has kinks.
pub fn region_area(
    h0: &RadialFourierSymbol,
    h1: &RadialFourierSymbol,
    e0: f64,
    e1: f64,
    breaks: &[f64],
) -> Result<f64> {
    let c0 = |t: f64, th: f64| value(h0, t, th) - e0;
    let c1 = |t: f64, th: f64| value(h1, t, th) - e1;
    let rect = Rect { x0: CHART_EPS, x1: 1.0 - CHART_EPS, y0: 0.0, y1: 2.0 * PI };
    let est = integrate_region_2d(&[&c0, &c1], rect, breaks, &QuadratureSpec::new(1e-10, 1e-9))?;
    Ok(KAPPA * est.value)
}

/// Modulus of the stationary-phase pairing at `ħ = 1/N` for two transversal
/// intersection points of opposite orientation:
/// `√ħ/√(T₀T₁)·|e^{−iπ/4}e^{2πi·S/ħ}/√|B₊| + e^{iπ/4}/√|B₋||`,
/// with `S` the area of `{H₀ ≥ E₀} ∩ {H₁ ≥ E₁}`.
///
/// The prefactor `√ħ` (not `2√ħ`) is the one for which the pairings of a
/// fixed `ψ₀` with a whole eigenbasis have total weight 1.
pub fn pairing_modulus(geometry: &LevelGeometry, n: f64) -> Result<f64> {
    let (plus, minus) = match geometry.brackets[..] {
        [a, b] if a > 0.0 && b < 0.0 => (a, b),
        [a, b] if a < 0.0 && b > 0.0 => (b, a),
        _ => {
            return Err(Error::Domain(format!(
                "expected two intersections of opposite orientation, got brackets {:?}",
                geometry.brackets
            )))
        }
    };
    let (t0, t1) = geometry.periods;
    let prefactor = 1.0 / (n * t0 * t1).sqrt();
    let quarter = Complex64::from_polar(1.0, PI / 4.0);
    let action = Complex64::from_polar(1.0, 2.0 * PI * n * geometry.area);
    let sum = quarter.conj() * action / plus.sqrt() + quarter / (-minus).sqrt();
    Ok(prefactor * sum.norm())
}

/// The stated form of [`pairing_modulus`]: prefactor `2√ħ` and the opposite
/// quarter phases, which for equal brackets reads `|cos(πNS + π/4)|`. Kept for
/// comparison; it overestimates the pairings by a factor near 2.
pub fn pairing_modulus_printed(geometry: &LevelGeometry, n: f64) -> Result<f64> {
    let mirrored = LevelGeometry { area: -geometry.area, ..geometry.clone() };
    Ok(2.0 * pairing_modulus(&mirrored, n)?)
}

/// Asymptotic modulus of the eigenvector pairing of the levels `E₀`, `E₁`
/// in dimension `N`.
pub fn pairing_asymptotic(
    h0: &RadialFourierSymbol,
    h1: &RadialFourierSymbol,
    e0: f64,
    e1: f64,
    n: usize,
) -> Result<f64> {
    pairing_modulus(&level_geometry(h0, h1, e0, e1)?, n as f64)
}

fn level_of(op: &BandedOperator) -> Result<u32> {
    match op.meta.level {
        0 => Err(Error::Domain("operator carries no level".into())),
        r => Ok(r),
    }
}

fn unit_eigenvector(op: &BandedOperator, m: i64) -> Result<Vec<Complex64>> {
    let r = level_of(op)?;
    let eig = eigensolve_banded(op)?;
    let k = eig.find(-2.0 * (PI * m as f64 / r as f64).cos(), EIGEN_TOL)?;
    Ok(eig.vector(k))
}

/// `⟨ψ₀, ψ₁⟩` for unit eigenvectors with eigenvalues `−2cos(πmᵢ/r)`, under
/// the phase convention of [`eigensolve_banded`].
pub fn pairing_exact(t0: &BandedOperator, t1: &BandedOperator, m0: i64, m1: i64) -> Result<Complex64> {
    if t0.dim() != t1.dim() {
        return Err(Error::Domain(format!("dimensions {} and {} differ", t0.dim(), t1.dim())));
    }
    let (v0, v1) = (unit_eigenvector(t0, m0)?, unit_eigenvector(t1, m1)?);
    Ok(v0.iter().zip(&v1).map(|(a, b)| a.conj() * b).sum())
}

/// Matrix of all pairings `⟨ψ₀⁽ⁱ⁾, ψ₁⁽ʲ⁾⟩` between the two eigenbases.
pub fn basis_change(t0: &BandedOperator, t1: &BandedOperator) -> Result<DMatrix<Complex64>> {
    let (e0, e1) = (eigensolve_banded(t0)?, eigensolve_banded(t1)?);
    Ok(e0.vectors.adjoint() * e1.vectors)
}

/// Exact and asymptotic pairing at one member of a scaling family.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingReport {
    pub rbar: u32,
    pub level: u32,
    pub dim: usize,
    pub exact: Complex64,
    pub asymptotic: f64,
    /// [`pairing_modulus_printed`] at the same geometry.
    pub asymptotic_printed: f64,
    pub geometry: LevelGeometry,
    /// `2π·N·S`, the relative action phase of the two intersections.
    pub action_phase: f64,
    /// `||exact| − asymptotic| / asymptotic`.
    pub relative_error: f64,
}

/// Pairing reports along `r̄` for base labels `m₀`, `m₁`.
pub fn pairing_sweep(
    base_level: u32,
    base: BaseColoring,
    m0: i64,
    m1: i64,
    rbars: &[u32],
) -> Result<Vec<PairingReport>> {
    let first = ScalingFamily::new(base_level, base, *rbars.first().ok_or(Error::Domain("empty sweep".into()))?)?;
    let (h0, h1) = first.principal_symbols();
    let geometry = level_geometry(&h0, &h1, first.energy(m0), first.energy(m1))?;
    rbars
        .iter()
        .map(|&rbar| {
            let family = ScalingFamily::new(base_level, base, rbar)?;
            let (t0, t1) = family.operators()?;
            let exact = pairing_exact(&t0, &t1, family.label(m0), family.label(m1))?;
            let dim = family.dim()?;
            let asymptotic = pairing_modulus(&geometry, dim as f64)?;
            Ok(PairingReport {
                rbar,
                level: family.level(),
                dim,
                exact,
                asymptotic,
                asymptotic_printed: pairing_modulus_printed(&geometry, dim as f64)?,
                geometry: geometry.clone(),
                action_phase: 2.0 * PI * dim as f64 * geometry.area,
                relative_error: (exact.norm() - asymptotic).abs() / asymptotic,
            })
        })
        .collect()
}

/// 6j-symbol moduli extracted from a sphere pairing sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SixjSweep {
    pub reports: Vec<PairingReport>,
    /// `|pairing|·sin(π/r)/√(sin(πm₀/D)sin(πm₁/D))` from the exact pairing.
    pub exact: Vec<f64>,
    /// The same from the asymptotic pairing.
    pub asymptotic: Vec<f64>,
    /// Set when some `a ± b ± c ± d ≡ 0 mod 2D`, where the moduli space is singular.
    pub singular: bool,
}

/// Whether the four-punctured sphere moduli space is singular for `colors`
/// at level `d`.
pub fn singular_moduli(colors: [i64; 4], d: u32) -> bool {
    let [a, b, c, e] = colors;
    let modulus = 2 * d as i64;
    [1i64, -1].iter().any(|&sb| {
        [1i64, -1].iter().any(|&sc| [1i64, -1].iter().any(|&sd| (a + sb * b + sc * c + sd * e).rem_euclid(modulus) == 0))
    })
}

pub fn sixj(d: u32, colors: [i64; 4], m0: i64, m1: i64, rbars: &[u32]) -> Result<SixjSweep> {
    let reports = pairing_sweep(d, BaseColoring::Sphere { colors }, m0, m1, rbars)?;
    let scale = |p: &PairingReport, v: f64| {
        let s = |m: i64| (PI * m as f64 / d as f64).sin();
        v * (PI / p.level as f64).sin() / (s(m0) * s(m1)).sqrt()
    };
    Ok(SixjSweep {
        exact: reports.iter().map(|p| scale(p, p.exact.norm())).collect(),
        asymptotic: reports.iter().map(|p| scale(p, p.asymptotic)).collect(),
        singular: singular_moduli(colors, d),
        reports,
    })
}

/// Gram determinant `det(cos l_ij)` of a spherical quadrilateral with sides
/// `(l₁₂, l₂₃, l₃₄, l₁₄)` and diagonals `(l₁₃, l₂₄)`.
pub fn quadrilateral_gram(sides: [f64; 4], diagonals: [f64; 2]) -> f64 {
    let [l12, l23, l34, l14] = sides.map(f64::cos);
    let [l13, l24] = diagonals.map(f64::cos);
    #[rustfmt::skip]
    let m = Matrix4::new(
        1.0, l12, l13, l14,
        l12, 1.0, l23, l24,
        l13, l23, 1.0, l34,
        l14, l24, l34, 1.0,
    );
    m.determinant()
}

/// The quadrilateral Gram determinant for sphere colors `(a, b, c, d)` at
/// level `r`, with diagonals the `ζ` and `η` actions.
pub fn sphere_gram(colors: [i64; 4], level: f64, tau0: f64, tau1: f64) -> f64 {
    let l = |c: i64| PI * c as f64 / level;
    let [a, b, c, d] = colors;
    quadrilateral_gram([l(a), l(d), l(c), l(b)], [tau0, tau1])
}

/// `cos²(α/2) − cos²τ₀ − cos²τ₁ + cos²τ₀cos²τ₁`.
pub fn torus_gram(alpha: f64, tau0: f64, tau1: f64) -> f64 {
    let (c0, c1) = (tau0.cos().powi(2), tau1.cos().powi(2));
    (alpha / 2.0).cos().powi(2) - c0 - c1 + c0 * c1
}

/// Norm `‖Γ‖` of the one-vertex torus graph with loop color `m` and marked
/// color `a`.
pub fn torus_graph_norm(a: i64, m: i64, r: u32) -> Result<f64> {
    Ok(psi_norm_squared(&[(a, m, m)], &[m], 0, r)?.sqrt())
}

/// The S-matrix prefactor
/// `(⟨m₀+(a−1)/2⟩!⟨m₀−(a+1)/2⟩!⟨m₁+(a−1)/2⟩!⟨m₁−(a+1)/2⟩!)^{1/2}⟨(a−1)/2⟩!²/(⟨a−1⟩!⟨m₀−1⟩!⟨m₁−1⟩!)`.
pub fn smatrix_prefactor(a: i64, m0: i64, m1: i64, r: u32) -> Result<f64> {
    let f = |n: i64| bracket_factorial(n, r);
    let (lo, hi) = ((a + 1) / 2, (a - 1) / 2);
    let upper = (f(m0 + hi)? * f(m0 - lo)? * f(m1 + hi)? * f(m1 - lo)?).sqrt() * f(hi)?.powi(2);
    Ok(upper / (f(a - 1)? * f(m0 - 1)? * f(m1 - 1)?))
}

/// Punctured S-matrix entries along a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SMatrixSweep {
    pub reports: Vec<PairingReport>,
    /// `|⟨Γ, r̄c⟩| = ‖Γ₀‖‖Γ₁‖/η·|⟨ψ₀, ψ₁⟩|` with `η = √(2/r)sin(π/r)`.
    pub exact: Vec<f64>,
    /// The same with the stationary-phase pairing modulus.
    pub asymptotic: Vec<f64>,
    /// The closed form `(2r/π)·N_r·G^{−1/4}·cos(r·S/2π + π/4)`, `S` the
    /// area of `{f_γ ≥ E₀} ∩ {f_δ ≥ E₁}` in the `(τ, θ)` angle chart.
    pub closed_form: Vec<f64>,
    /// `N_r` at each level.
    pub prefactor: Vec<f64>,
}

pub fn smatrix_entry(d: u32, a: u32, m0: i64, m1: i64, rbars: &[u32]) -> Result<SMatrixSweep> {
    if a % 2 == 0 {
        return Err(Error::InvalidColoring(format!("marked color {a} must be odd")));
    }
    for m in [m0, m1] {
        if !(2 * m > a as i64 && 2 * m < 2 * d as i64 - a as i64) {
            return Err(Error::InvalidColoring(format!("label {m} outside ({a}/2, {d} − {a}/2)")));
        }
    }
    let reports = pairing_sweep(d, BaseColoring::Torus { a }, m0, m1, rbars)?;
    let alpha = PI * a as f64 / d as f64;
    let gram = torus_gram(alpha, PI * m0 as f64 / d as f64, PI * m1 as f64 / d as f64);
    let mut sweep = SMatrixSweep {
        reports: Vec::new(),
        exact: Vec::new(),
        asymptotic: Vec::new(),
        closed_form: Vec::new(),
        prefactor: Vec::new(),
    };
    for p in &reports {
        let r = p.level;
        let (ar, l0, l1) = (a as i64 * p.rbar as i64, m0 * p.rbar as i64, m1 * p.rbar as i64);
        let eta = (2.0 / r as f64).sqrt() * (PI / r as f64).sin();
        let norms = torus_graph_norm(ar, l0, r)? * torus_graph_norm(ar, l1, r)?;
        sweep.exact.push(norms / eta * p.exact.norm());
        sweep.asymptotic.push(norms / eta * p.asymptotic);
        let n_r = smatrix_prefactor(ar, l0, l1, r)?;
        let raw_area = 2.0 * PI * (PI - alpha) * p.geometry.area;
        let cos = (r as f64 * raw_area / (2.0 * PI) + PI / 4.0).cos();
        sweep.closed_form.push(2.0 * r as f64 / PI * n_r * gram.powf(-0.25) * cos);
        sweep.prefactor.push(n_r);
    }
    sweep.reports = reports;
    Ok(sweep)
}

/// `‖Γ₀‖‖Γ₁‖·√(⟨m₀⟩⟨m₁⟩)`, which equals [`smatrix_prefactor`].
pub fn smatrix_prefactor_from_norms(a: i64, m0: i64, m1: i64, r: u32) -> Result<f64> {
    Ok(torus_graph_norm(a, m0, r)? * torus_graph_norm(a, m1, r)? * (bracket(m0, r) * bracket(m1, r)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::eta_dual_colors;
    use proptest::prelude::*;

    const SWEEP: [u32; 5] = [3, 5, 7, 9, 11];

    #[test]
    fn eigensolve_examples() {
        let mut op = BandedOperator::zeros(3, 0);
        for (n, v) in [2.0, -1.0, 0.5].iter().enumerate() {
            op.set(n, 0, Complex64::new(*v, 0.0));
        }
        let eig = eigensolve_banded(&op).unwrap();
        assert_eq!(eig.values, vec![-1.0, 0.5, 2.0]);
        assert_eq!(eig.vectors[(1, 0)], Complex64::new(1.0, 0.0));

        let r = 13;
        let delta = op_delta_torus(r, 1).unwrap();
        let eig = eigensolve_banded(&delta).unwrap();
        let mut expected: Vec<f64> = (1..r).map(|k| -2.0 * (PI * k as f64 / r as f64).cos()).collect();
        expected.sort_by(f64::total_cmp);
        let dense = delta.to_dense();
        for (k, (v, e)) in eig.values.iter().zip(&expected).enumerate() {
            assert!((v - e).abs() < 1e-12);
            let x = eig.vectors.column(k);
            assert!((&dense * x - x * Complex64::new(*v, 0.0)).norm() < 1e-9 * 2.0);
        }
    }

    #[test]
    fn torus_geometry_matches_closed_forms() {
        let (d, a) = (9u32, 3u32);
        let alpha = PI * a as f64 / d as f64;
        let (h0, h1) = torus_symbols(alpha);
        for (m0, m1) in [(3i64, 5i64), (4, 4), (5, 3)] {
            let (t0, t1) = (PI * m0 as f64 / d as f64, PI * m1 as f64 / d as f64);
            let g = level_geometry(&h0, &h1, -2.0 * t0.cos(), -2.0 * t1.cos()).unwrap();
            let closed = 8.0 * PI * (PI - alpha) * torus_gram(alpha, t0, t1).sqrt();
            assert_eq!(g.intersections.len(), 2);
            for b in &g.brackets {
                assert!((b.abs() / closed - 1.0).abs() < 1e-6, "{b} vs {closed}");
            }
            // The opposite sign of the quartic term does not match.
            let (c0, c1) = (t0.cos().powi(2), t1.cos().powi(2));
            let flipped = (alpha / 2.0).cos().powi(2) - c0 - c1 - c0 * c1;
            assert!(flipped <= 0.0 || (8.0 * PI * (PI - alpha) * flipped.sqrt() / closed - 1.0).abs() > 1e-3);
            let period = |t: f64| 1.0 / (2.0 * (PI - alpha) * t.sin());
            assert!((g.periods.0 / period(t0) - 1.0).abs() < 1e-8);
            assert!((g.periods.1 / period(t1) - 1.0).abs() < 1e-8);
        }
        assert_eq!(torus_gram(alpha, PI / 2.0, PI / 2.0), (alpha / 2.0).cos().powi(2));
    }

    #[test]
    fn region_area_extremes() {
        let alpha = PI / 3.0;
        let (h0, h1) = torus_symbols(alpha);
        let full = region_area(&h0, &h1, -3.0, -3.0, &[]).unwrap();
        assert!((full - 1.0).abs() < 1e-8);
        // In the angle chart the full box has area 2π(π − α).
        let raw = full * 2.0 * PI * (PI - alpha);
        assert!((raw / (2.0 * PI * (PI - alpha)) - 1.0).abs() < 1e-8);
        assert_eq!(region_area(&h0, &h1, 3.0, -3.0, &[]).unwrap(), 0.0);
    }

    #[test]
    fn sphere_geometry_matches_closed_forms() {
        let (d, colors) = (11u32, [4i64, 6, 7, 7]);
        let family = ScalingFamily::new(d, BaseColoring::Sphere { colors }, 3).unwrap();
        let (h0, h1) = family.principal_symbols();
        let (m0, m1) = (6i64, 5i64);
        let (t0, t1) = (PI * m0 as f64 / d as f64, PI * m1 as f64 / d as f64);
        let g = level_geometry(&h0, &h1, family.energy(m0), family.energy(m1)).unwrap();
        let ratio = family.dim().unwrap() as f64 / family.level() as f64;
        let closed = 16.0 * PI * PI * ratio * sphere_gram(colors, d as f64, t0, t1).sqrt();
        for b in &g.brackets {
            assert!((b.abs() / closed - 1.0).abs() < 1e-6, "{b} vs {closed}");
        }
        let period = |t: f64| 1.0 / (4.0 * PI * ratio * t.sin());
        assert!((g.periods.0 / period(t0) - 1.0).abs() < 1e-8);
        assert!((g.periods.1 / period(t1) - 1.0).abs() < 1e-8, "{:?} {}", g.periods, period(t1));
    }

    #[test]
    fn two_point_interference() {
        let g = LevelGeometry { intersections: vec![(0.3, 1.0), (0.3, 5.0)], brackets: vec![4.0, -4.0], periods: (1.0, 1.0), area: 0.0 };
        for n in [1.0, 10.0] {
            for area in [0.0, 0.1, 0.37] {
                let v = pairing_modulus(&LevelGeometry { area, ..g.clone() }, n).unwrap();
                let expected = 2.0 / (n * 4.0).sqrt() * (PI * n * area - PI / 4.0).cos().abs();
                assert!((v - expected).abs() < 1e-14);
            }
        }
        let same_sign = LevelGeometry { brackets: vec![4.0, 4.0], ..g };
        assert!(pairing_modulus(&same_sign, 1.0).is_err());
    }

    #[test]
    fn pairing_exact_orthogonality_and_parseval() {
        let (r, a) = (15u32, 3u32);
        let (t0, t1) = (op_gamma_torus(r, a).unwrap(), op_delta_torus(r, a).unwrap());
        assert!(pairing_exact(&t0, &t0, 4, 6).unwrap().norm() < 1e-14);
        assert!((pairing_exact(&t1, &t1, 5, 5).unwrap().norm() - 1.0).abs() < 1e-12);
        let labels = TorusBasis::new(r, a).unwrap().labels();
        let total: f64 = labels.iter().map(|&m1| pairing_exact(&t0, &t1, 6, m1).unwrap().norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(matches!(pairing_exact(&t0, &t1, 1, 5), Err(Error::EigenvalueMissing { .. })));
    }

    #[test]
    fn stationary_phase_weights_sum_to_one() {
        // Summed over a whole eigenbasis the squared moduli must total 1;
        // twice the prefactor would give 4.
        let (d, a, rbar) = (9u32, 1u32, 5u32);
        let family = ScalingFamily::new(d, BaseColoring::Torus { a }, rbar).unwrap();
        let (h0, h1) = family.principal_symbols();
        let n = family.dim().unwrap();
        let m0 = 22i64;
        let e0 = -2.0 * (PI * m0 as f64 / family.level() as f64).cos();
        let mut total = 0.0;
        for m1 in 1..family.level() as i64 {
            let e1 = -2.0 * (PI * m1 as f64 / family.level() as f64).cos();
            if let Ok(v) = pairing_asymptotic(&h0, &h1, e0, e1, n) {
                total += v * v;
            }
        }
        assert!((total - 1.0).abs() < 0.1, "{total}");
    }

    #[test]
    fn torus_pairing_converges() {
        let s = smatrix_entry(7, 1, 2, 4, &SWEEP).unwrap();
        for p in &s.reports {
            assert!(p.relative_error < 0.05, "{p:?}");
            let alpha = PI / 7.0;
            let (t0, t1) = (2.0 * PI / 7.0, 4.0 * PI / 7.0);
            let closed = (2.0 * t0.sin() * t1.sin() / p.level as f64).sqrt()
                * (p.action_phase / 2.0 - PI / 4.0).cos().abs()
                / torus_gram(alpha, t0, t1).powf(0.25);
            assert!((p.asymptotic / closed - 1.0).abs() < 1e-6, "{} vs {closed}", p.asymptotic);
        }
        let last = s.exact.len() - 1;
        assert!((s.asymptotic[last] / s.exact[last] - 1.0).abs() < 0.05);
    }

    #[test]
    fn smatrix_prefactor_from_graph_norms() {
        for (r, a, m0, m1) in [(21u32, 3i64, 5i64, 9i64), (35, 5, 12, 20), (15, 1, 7, 7)] {
            let printed = smatrix_prefactor(a, m0, m1, r).unwrap();
            let norms = smatrix_prefactor_from_norms(a, m0, m1, r).unwrap();
            assert!((printed / norms - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sixj_sweep_and_symmetry() {
        let (d, colors, m0, m1) = (11u32, [4i64, 6, 7, 7], 6i64, 5i64);
        let s = sixj(d, colors, m0, m1, &SWEEP).unwrap();
        assert!(!s.singular);
        assert!(s.reports.last().unwrap().relative_error < 0.05);
        let [a, b, c, e] = colors;
        let swapped = sixj(d, [b, a, e, c], m0, m1, &[3, 5]).unwrap();
        for (x, y) in s.exact.iter().zip(&swapped.exact) {
            assert!((x - y).abs() < 1e-10 * x.abs().max(1e-300));
        }
        assert!(singular_moduli([3, 3, 3, 3], 9));
    }

    #[test]
    fn one_dimensional_window() {
        let colors = [1i64, 1, 1, 1];
        let (z, e) = (op_zeta(7, colors).unwrap(), op_eta(7, colors).unwrap());
        assert_eq!(z.dim(), 1);
        let m = SphereBasis::new(7, eta_dual_colors(colors)).unwrap().label(0);
        assert!((pairing_exact(&z, &e, 1, m).unwrap().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn scaling_family_dimensions() {
        let f = ScalingFamily::new(11, BaseColoring::Sphere { colors: [4, 6, 7, 7] }, 1).unwrap();
        for rbar in [3, 5, 7] {
            let g = ScalingFamily { rbar, ..f };
            assert_eq!(g.dim().unwrap(), f.dim().unwrap() * rbar as usize);
        }
        let t = ScalingFamily::new(7, BaseColoring::Torus { a: 3 }, 5).unwrap();
        assert_eq!((t.level(), t.dim().unwrap(), t.growth().unwrap()), (35, 20, 4.0));
        assert!(ScalingFamily::new(7, BaseColoring::Torus { a: 3 }, 4).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn basis_change_is_unitary(half in 3u32..12, a_half in 0u32..3) {
            let r = 2 * half + 1;
            let a = 2 * a_half + 1;
            prop_assume!(a + 2 < r);
            let u = basis_change(&op_gamma_torus(r, a).unwrap(), &op_delta_torus(r, a).unwrap()).unwrap();
            let dev = (u.adjoint() * &u - DMatrix::identity(u.nrows(), u.ncols())).camax();
            prop_assert!(dev < 1e-9);
        }
    }
}
