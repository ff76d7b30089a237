//! Verification suites shared by the acceptance tests and the command line.
//!
//! Each suite returns rows `check, id, value, threshold, pass`. A row passes
//! when `value ≤ threshold` unless its check name says otherwise.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::banded::BandedOperator;
use crate::error::{Error, Result};
use crate::genus2::{self, Alpha, Form, G2Curve, MU_ETA, NU_DELTA, NU_ETA};
use crate::mellin::{exact_symbol_function, symbol_asymptotics, AnalyticEntryFamily};
use crate::numerics::{eigensolve, fit_slope, QuadratureSpec};
use crate::semiclassics::{
    basis_change, level_geometry, poisson_bracket, sixj, smatrix_entry, smatrix_prefactor,
    smatrix_prefactor_from_norms, torus_gram, BaseColoring, PairingReport, ScalingFamily,
};
use crate::sphere::{eta_dual_colors, op_eta, op_xi_sphere, op_zeta};
use crate::toeplitz::{
    chart_z, laplacian_mode, laplacian_s2, toeplitz_matrix, toeplitz_matrix_with, wick_symbol,
    RadialFourierSymbol,
};
use crate::torus::{farey_graph, longitude_amplitude, op_gamma_torus, TorusOperators};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub check: String,
    pub id: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value ≤ threshold` (NaN fails).
    pub fn at_most(check: &str, id: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { check: check.into(), id: id.into(), value, threshold, pass: value <= threshold }
    }

    /// Passes when `value ≥ threshold` (NaN fails).
    pub fn at_least(check: &str, id: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { check: check.into(), id: id.into(), value, threshold, pass: value >= threshold }
    }
}

pub fn all_pass(rows: &[Check]) -> bool {
    !rows.is_empty() && rows.iter().all(|c| c.pass)
}

fn slope_of(points: &[(f64, f64)]) -> f64 {
    let clean: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x, y.max(1e-300))).collect();
    fit_slope(&clean).map(|f| f.slope).unwrap_or(f64::NAN)
}

/// Largest ratio of consecutive values; below 1 iff strictly decreasing.
fn max_step_ratio(values: &[f64]) -> f64 {
    values.windows(2).map(|w| w[1] / w[0]).fold(f64::NEG_INFINITY, f64::max)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn diagonal_values(op: &BandedOperator) -> Vec<f64> {
    sorted(op.diagonal(0).iter().map(|z| z.re).collect())
}

// ---- torus skein products and spectra --------------------------------------

/// `max ‖T^{s₁}T^{s₂} − A·T^{d₁} − A⁻¹·T^{d₂}‖_max` over Farey edges, per `(r, a)`.
pub fn products(levels: &[u32], colors: &[u32], depth: usize) -> Result<Vec<Check>> {
    let (_, edges) = farey_graph(depth);
    let jobs: Vec<(u32, u32)> = levels
        .iter()
        .flat_map(|&r| colors.iter().filter(move |&&a| a < r).map(move |&a| (r, a)))
        .collect();
    jobs.par_iter()
        .map(|&(r, a)| {
            let mut ops = TorusOperators::new(r, a)?;
            let zeta = ops.params().zeta;
            let mut worst = 0.0f64;
            for &(s1, s2) in &edges {
                for (x, y) in [(s1, s2), (s2, s1)] {
                    let (d1, d2) = x.smoothings(y)?;
                    let lhs = ops.slope(x)?.compose(&ops.slope(y)?);
                    let (t1, t2) = (ops.slope(d1)?, ops.slope(d2)?);
                    let rhs = BandedOperator::linear_combination(&[(zeta, &t1), (zeta.inv(), &t2)]);
                    worst = worst.max(lhs.max_abs_diff(&rhs));
                }
            }
            Ok(Check::at_most("skein_product", format!("r={r} a={a} depth={depth}"), worst, 1e-10))
        })
        .collect()
}

/// Spectra of slope operators against the `γ` diagonal, per `(r, a)`.
pub fn torus_spectra(levels: &[u32], colors: &[u32], depth: usize) -> Result<Vec<Check>> {
    let (slopes, _) = farey_graph(depth);
    let jobs: Vec<(u32, u32)> = levels
        .iter()
        .flat_map(|&r| colors.iter().filter(move |&&a| a < r).map(move |&a| (r, a)))
        .collect();
    jobs.par_iter()
        .map(|&(r, a)| {
            let mut ops = TorusOperators::new(r, a)?;
            let want = diagonal_values(&op_gamma_torus(r, a)?);
            let mut worst = 0.0f64;
            for &s in &slopes {
                let got = eigensolve(&ops.slope(s)?)?.values;
                worst = worst.max(max_gap(&got, &want));
            }
            Ok(Check::at_most("torus_spectrum", format!("r={r} a={a} depth={depth}"), worst, 1e-8))
        })
        .collect()
}

/// Spectra of `ζ`, `η`, `ξ` against the `ζ` labels of their windows.
pub fn sphere_spectra(r: u32, tuples: &[[i64; 4]]) -> Result<Vec<Check>> {
    let mut rows = Vec::new();
    for &colors in tuples {
        let [a, b, c, d] = colors;
        let id = |curve: &str| format!("r={r} colors={a},{b},{c},{d} curve={curve}");
        let zeta = op_zeta(r, colors)?;
        let own = diagonal_values(&zeta);
        rows.push(Check::at_most("sphere_spectrum", id("zeta"), max_gap(&eigensolve(&zeta)?.values, &own), 1e-8));
        let want_eta = diagonal_values(&op_zeta(r, eta_dual_colors(colors))?);
        let got_eta = eigensolve(&op_eta(r, colors)?)?.values;
        rows.push(Check::at_most("sphere_spectrum", id("eta"), max_gap(&got_eta, &want_eta), 1e-8));
        let want_xi = diagonal_values(&op_zeta(r, eta_dual_colors([a, c, b, d]))?);
        let got_xi = eigensolve(&op_xi_sphere(r, colors)?)?.values;
        rows.push(Check::at_most("sphere_spectrum", id("xi"), max_gap(&got_xi, &want_xi), 1e-8));
    }
    Ok(rows)
}

// ---- principal and subprincipal symbols ------------------------------------

/// A scaling family together with the label of its second operator.
#[derive(Debug, Clone, Copy)]
pub struct SymbolFamily {
    pub name: &'static str,
    pub base_level: u32,
    pub base: BaseColoring,
}

pub const TORUS_DELTA: SymbolFamily =
    SymbolFamily { name: "torus_delta", base_level: 7, base: BaseColoring::Torus { a: 3 } };
pub const SPHERE_ETA: SymbolFamily =
    SymbolFamily { name: "sphere_eta", base_level: 11, base: BaseColoring::Sphere { colors: [4, 6, 7, 7] } };

/// Entry-vs-symbol error along a sweep at the sample point `τ`.
///
/// Without `shift`, `F(τ, μ)` is the `μ`-th diagonal interpolated linearly
/// between the chart points `(n+½)/N` and compared with `f_μ(τ)`. With
/// `shift`, the entry at the chart point `τ_n` nearest `τ` is compared with
/// `f_μ(τ_n + μ/2N)`; interpolation would add an `O(1/N²)` error there.
fn entry_symbol_errors(
    family: &SymbolFamily,
    mu: i64,
    tau: f64,
    rbars: &[u32],
    shift: bool,
) -> Result<Vec<(f64, f64)>> {
    rbars
        .iter()
        .map(|&rbar| {
            let fam = ScalingFamily::new(family.base_level, family.base, rbar)?;
            let (_, op) = fam.operators()?;
            let (_, symbol) = fam.principal_symbols();
            let profile = symbol.mode(mu).ok_or_else(|| Error::Range(format!("no mode μ={mu}")))?;
            let n_dim = op.dim();
            let x = tau * n_dim as f64 - 0.5;
            let n = if shift { x.round() } else { x.floor() };
            if n < 0.0 || n as usize + 1 + mu.unsigned_abs() as usize >= n_dim {
                return Err(Error::Range(format!("τ={tau} is too close to the boundary for N={n_dim}")));
            }
            let (w, n) = (x - n, n as usize);
            let err = if shift {
                let t = (n as f64 + 0.5 + mu as f64 / 2.0) / n_dim as f64;
                (op.get(n, mu) - profile(t)).norm()
            } else {
                (op.get(n, mu) * (1.0 - w) + op.get(n + 1, mu) * w - profile(tau)).norm()
            };
            Ok((n_dim as f64, err))
        })
        .collect()
}

fn symbol_rows(
    check: &str,
    families: &[SymbolFamily],
    taus: &[f64],
    rbars: &[u32],
    shift: bool,
    threshold: f64,
) -> Result<Vec<Check>> {
    let mut rows = Vec::new();
    for family in families {
        let (_, h1) = ScalingFamily::new(family.base_level, family.base, rbars[0])?.principal_symbols();
        let modes: Vec<i64> = h1.modes().map(|(mu, _)| mu).filter(|&mu| mu >= 0).collect();
        for &mu in &modes {
            for &tau in taus {
                let errs = entry_symbol_errors(family, mu, tau, rbars, shift)?;
                let id = format!("{} mu={mu} tau={tau}", family.name);
                rows.push(Check::at_most(check, id, slope_of(&errs), threshold));
            }
        }
    }
    Ok(rows)
}

pub const SYMBOL_TAUS: [f64; 5] = [0.2, 0.35, 0.5, 0.65, 0.8];
pub const SYMBOL_RBARS: [u32; 4] = [5, 9, 17, 33];

/// Entries against the principal symbol at the sample point: slope ≤ −0.9.
pub fn principal_symbol(families: &[SymbolFamily], taus: &[f64], rbars: &[u32]) -> Result<Vec<Check>> {
    symbol_rows("principal_symbol_slope", families, taus, rbars, false, -0.9)
}

/// Entries against the principal symbol at the midpoint `τ + μħ/2`: slope ≤ −1.8.
pub fn subprincipal(families: &[SymbolFamily], taus: &[f64], rbars: &[u32]) -> Result<Vec<Check>> {
    symbol_rows("subprincipal_slope", families, taus, rbars, true, -1.8)
}

// ---- Wick expansion ------------------------------------------------------------

/// Smooth test symbols on the sphere, by Fourier profile in the chart.
pub fn wick_test_symbols() -> Vec<(&'static str, RadialFourierSymbol)> {
    vec![
        (
            "quadratic_plus_x",
            RadialFourierSymbol::real()
                .with_real_mode(0, |t| 1.0 + t * t)
                .with_real_mode(1, |t| (t * (1.0 - t)).sqrt()),
        ),
        ("height_cubed", RadialFourierSymbol::real().with_real_mode(0, |t| t.powi(3))),
        (
            "second_harmonic",
            RadialFourierSymbol::real()
                .with_real_mode(0, |t| t.cos())
                .with_real_mode(2, |t| 0.5 * t * (1.0 - t)),
        ),
    ]
}

/// Chart points `(τ, θ)` for [`wick`]. The second-order coefficient of
/// `height_cubed` vanishes near `τ = 0.3`, so that height is avoided.
pub const WICK_POINTS: [(f64, f64); 3] = [(0.2, 0.4), (0.5, 1.7), (0.7, 4.0)];
pub const WICK_NS: [usize; 5] = [32, 64, 128, 256, 512];

/// `|W(T_f) − f − Δf/N|` over `N`: slope ≤ −1.8.
pub fn wick(points: &[(f64, f64)], ns: &[usize]) -> Result<Vec<Check>> {
    let mut rows = Vec::new();
    for (name, sym) in wick_test_symbols() {
        for &(tau, theta) in points {
            let f = sym.eval(tau, theta).re;
            let lap = laplacian_s2(&sym, tau, theta)?;
            let z = chart_z(tau, theta);
            let errs = ns
                .par_iter()
                .map(|&n| {
                    let w = wick_symbol(&toeplitz_matrix(&sym, n)?, z).re;
                    Ok((n as f64, (w - f - lap / n as f64).abs()))
                })
                .collect::<Result<Vec<_>>>()?;
            let id = format!("{name} tau={tau} theta={theta}");
            rows.push(Check::at_most("wick_remainder_slope", id, slope_of(&errs), -1.8));
        }
    }
    Ok(rows)
}

// ---- Mellin inversion ------------------------------------------------------------

/// Re-quantizing the reconstructed exact symbol of torus `γ` and `δ`.
pub fn mellin_roundtrip(levels: &[u32], a: u32) -> Result<Vec<Check>> {
    let spec = QuadratureSpec::new(1e-11, 1e-10);
    let jobs: Vec<(u32, &str)> = levels.iter().flat_map(|&r| [(r, "gamma"), (r, "delta")]).collect();
    jobs.par_iter()
        .map(|&(r, curve)| {
            let (fam, op) = match curve {
                "gamma" => (AnalyticEntryFamily::torus_gamma(r, a)?, op_gamma_torus(r, a)?),
                _ => (AnalyticEntryFamily::torus_delta(r, a)?, crate::torus::op_delta_torus(r, a)?),
            };
            let back = toeplitz_matrix_with(&exact_symbol_function(&fam), fam.dim, &spec)?;
            Ok(Check::at_most("mellin_roundtrip", format!("r={r} a={a} curve={curve}"), back.max_abs_diff(&op), 1e-7))
        })
        .collect()
}

/// Richardson first-order coefficient of the exact torus `δ` symbol against
/// `sign·½Δσ₀`: relative deviation ≤ 5%.
pub fn first_order_relation(sign: f64, taus: &[f64]) -> Result<Vec<Check>> {
    let (d, a0) = (7u32, 3u32);
    let fams = [3u32, 5, 7, 9, 11]
        .par_iter()
        .map(|&rb| AnalyticEntryFamily::torus_delta(d * rb, a0 * rb))
        .collect::<Result<Vec<_>>>()?;
    let alpha = PI * a0 as f64 / d as f64;
    let profile = move |t: f64| Complex64::new(-longitude_amplitude(alpha / 2.0 + (PI - alpha) * t, alpha), 0.0);
    let est = symbol_asymptotics(&fams, 1, taus)?;
    let label = if sign > 0.0 { "plus_half_laplacian" } else { "minus_half_laplacian" };
    est.iter()
        .map(|e| {
            let target = laplacian_mode(&profile, 1, e.tau)? * (0.5 * sign);
            let dev = (e.first_order - target).norm() / target.norm();
            Ok(Check::at_most("first_order_symbol", format!("{label} tau={}", e.tau), dev, 0.05))
        })
        .collect()
}

// ---- pairings ---------------------------------------------------------------------

pub const PAIRING_RBARS: [u32; 5] = [3, 5, 7, 9, 11];

/// Cosine factor `|cos(πNS − π/4)|` of a report.
pub fn cosine_factor(p: &PairingReport) -> f64 {
    (p.action_phase / 2.0 - PI / 4.0).cos().abs()
}

fn convergence_rows(check: &str, id: &str, rbars: &[u32], errors: &[f64], cosines: &[f64]) -> Vec<Check> {
    let pts: Vec<(f64, f64)> = rbars.iter().zip(errors).map(|(&r, &e)| (r as f64, e)).collect();
    let min_cos = cosines.iter().copied().fold(f64::INFINITY, f64::min);
    vec![
        Check::at_least(&format!("{check}_cosine_factor"), id, min_cos, 0.3),
        Check::at_most(&format!("{check}_error_last"), id, *errors.last().unwrap_or(&f64::NAN), 0.15),
        Check::at_most(&format!("{check}_error_step_ratio"), id, max_step_ratio(errors), 1.0),
        Check::at_most(&format!("{check}_error_slope"), id, slope_of(&pts), -0.8),
    ]
}

fn rel(exact: f64, approx: f64) -> f64 {
    (exact - approx).abs() / approx.abs()
}

/// A sphere pairing configuration `(D, colors, m₀, m₁)`.
pub type SixjConfig = (u32, [i64; 4], i64, i64);

/// 6j moduli against the stationary-phase pairing.
pub fn sixj_convergence(configs: &[SixjConfig], rbars: &[u32], form: Form) -> Result<Vec<Check>> {
    let sweeps = configs
        .par_iter()
        .map(|&(d, colors, m0, m1)| Ok(((d, colors, m0, m1), sixj(d, colors, m0, m1, rbars)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for ((d, [a, b, c, e], m0, m1), sweep) in sweeps {
        if sweep.singular {
            return Err(Error::Domain(format!("colors {a},{b},{c},{e} are singular at D={d}")));
        }
        let errors: Vec<f64> = sweep
            .reports
            .iter()
            .map(|p| match form {
                Form::Corrected => rel(p.exact.norm(), p.asymptotic),
                Form::Printed => rel(p.exact.norm(), p.asymptotic_printed),
            })
            .collect();
        let cosines: Vec<f64> = sweep.reports.iter().map(cosine_factor).collect();
        let id = format!("D={d} colors={a},{b},{c},{e} m={m0},{m1}");
        rows.extend(convergence_rows("sixj", &id, rbars, &errors, &cosines));
    }
    Ok(rows)
}

/// A torus S-matrix configuration `(D, a, m₀, m₁)`.
pub type SMatrixConfig = (u32, u32, i64, i64);

/// Punctured S-matrix entries against the asymptotic formula, plus the
/// prefactor and bracket closed forms.
pub fn smatrix_convergence(configs: &[SMatrixConfig], rbars: &[u32], form: Form) -> Result<Vec<Check>> {
    let sweeps = configs
        .par_iter()
        .map(|&(d, a, m0, m1)| Ok(((d, a, m0, m1), smatrix_entry(d, a, m0, m1, rbars)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for ((d, a, m0, m1), sweep) in sweeps {
        let errors: Vec<f64> = match form {
            Form::Corrected => sweep.exact.iter().zip(&sweep.asymptotic).map(|(&x, &y)| rel(x, y)).collect(),
            Form::Printed => sweep.exact.iter().zip(&sweep.closed_form).map(|(&x, &y)| rel(x, y.abs())).collect(),
        };
        let cosines: Vec<f64> = sweep.reports.iter().map(cosine_factor).collect();
        let id = format!("D={d} a={a} m={m0},{m1}");
        rows.extend(convergence_rows("smatrix", &id, rbars, &errors, &cosines));
    }
    Ok(rows)
}

/// `N_r` against the graph norms, and the chart bracket against
/// `8π(π−α)√G`. `G` with `+cos²τ₀cos²τ₁` must match; the variant with
/// `−cos²τ₀cos²τ₁` must miss by at least `1e-3`.
pub fn smatrix_closed_forms(configs: &[SMatrixConfig], rbars: &[u32]) -> Result<Vec<Check>> {
    let mut rows = Vec::new();
    for &(d, a, m0, m1) in configs {
        let id = format!("D={d} a={a} m={m0},{m1}");
        let mut worst = 0.0f64;
        for &rb in rbars {
            let r = d * rb;
            let (ar, l0, l1) = (a as i64 * rb as i64, m0 * rb as i64, m1 * rb as i64);
            let printed = smatrix_prefactor(ar, l0, l1, r)?;
            let norms = smatrix_prefactor_from_norms(ar, l0, l1, r)?;
            worst = worst.max(rel(norms, printed));
        }
        rows.push(Check::at_most("smatrix_prefactor", id.clone(), worst, 1e-6));

        let family = ScalingFamily::new(d, BaseColoring::Torus { a }, 1)?;
        let (h0, h1) = family.principal_symbols();
        let geometry = level_geometry(&h0, &h1, family.energy(m0), family.energy(m1))?;
        let alpha = PI * a as f64 / d as f64;
        let (t0, t1) = (PI * m0 as f64 / d as f64, PI * m1 as f64 / d as f64);
        let plus = torus_gram(alpha, t0, t1);
        let minus = plus - 2.0 * (t0.cos() * t1.cos()).powi(2);
        let bracket_dev = |g: f64| {
            let closed = 8.0 * PI * (PI - alpha) * g.max(0.0).sqrt();
            geometry
                .intersections
                .iter()
                .map(|&(tau, theta)| rel(poisson_bracket(&h0, &h1, tau, theta).abs(), closed))
                .fold(0.0, f64::max)
        };
        rows.push(Check::at_most("smatrix_bracket_gram_plus", id.clone(), bracket_dev(plus), 1e-6));
        rows.push(Check::at_least("smatrix_bracket_gram_minus_rejected", id.clone(), bracket_dev(minus), 1e-3));
    }
    Ok(rows)
}

// ---- genus 2 ----------------------------------------------------------------------

pub const G2_LEVELS: [u32; 4] = [24, 48, 96, 192];

/// Interior points `τ/π`; `rτ/π` is integral for every level in [`G2_LEVELS`].
pub const G2_TAUS: [[f64; 3]; 5] = [
    [6.0 / 24.0, 5.0 / 24.0, 4.0 / 24.0],
    [4.0 / 24.0, 4.0 / 24.0, 4.0 / 24.0],
    [7.0 / 24.0, 4.0 / 24.0, 6.0 / 24.0],
    [8.0 / 24.0, 3.0 / 24.0, 6.0 / 24.0],
    [5.0 / 24.0, 6.0 / 24.0, 9.0 / 24.0],
];

fn neg(a: Alpha) -> Alpha {
    a.map(|x| -x)
}

/// Entry-vs-symbol-coefficient slopes for `δ` and `η`: slope ≤ −0.8.
pub fn genus2_limits(form: Form, taus: &[[f64; 3]], levels: &[u32]) -> Result<Vec<Check>> {
    let cases: [(G2Curve, &str, Vec<Alpha>); 2] = [
        (G2Curve::Delta, "delta", vec![[0, 0, 0], NU_DELTA, neg(NU_DELTA)]),
        (G2Curve::Eta, "eta", vec![MU_ETA, neg(MU_ETA), NU_ETA, neg(NU_ETA)]),
    ];
    let mut rows = Vec::new();
    for (curve, name, offsets) in &cases {
        for &mu in offsets {
            for t in taus {
                let tau = t.map(|x| PI * x);
                let errs = levels
                    .iter()
                    .map(|&r| Ok((r as f64, genus2::coefficient_error(*curve, form, r, tau, mu)?)))
                    .collect::<Result<Vec<_>>>()?;
                let id = format!("{name} mu={},{},{} tau/pi={:.4},{:.4},{:.4}", mu[0], mu[1], mu[2], t[0], t[1], t[2]);
                rows.push(Check::at_most("genus2_limit_slope", id, slope_of(&errs), -0.8));
            }
        }
    }
    Ok(rows)
}

/// Hermiticity of the genus-2 operators and the spectral relations between them.
pub fn genus2_structure(r: u32, form: Form) -> Result<Vec<Check>> {
    let mut rows = Vec::new();
    let ops: Vec<_> = [G2Curve::Gamma, G2Curve::Delta, G2Curve::Eta]
        .iter()
        .map(|&c| genus2::op_g2(c, r, form))
        .collect::<Result<_>>()?;
    for op in &ops {
        rows.push(Check::at_most("genus2_hermitian", format!("r={r} curve={:?}", op.curve), op.hermitian_deviation(), 1e-12));
    }
    let gamma = ops[0].eigenvalues();
    let eta = ops[2].eigenvalues();
    rows.push(Check::at_most("genus2_eta_gamma_spectrum", format!("r={r}"), max_gap(&eta, &gamma), 1e-8));
    let odd_lattice = ops[1]
        .eigenvalues()
        .iter()
        .map(|&ev| {
            let k = (-ev / 2.0).clamp(-1.0, 1.0).acos() * r as f64 / PI;
            let odd = (k.round() as i64).rem_euclid(2) == 1;
            if odd { (k - k.round()).abs() } else { 1.0 }
        })
        .fold(0.0, f64::max);
    rows.push(Check::at_most("genus2_delta_odd_lattice", format!("r={r}"), odd_lattice, 1e-7));
    Ok(rows)
}

// ---- structural properties ------------------------------------------------------------

/// Hermiticity, bandedness, positivity, norm bound, basis-change unitarity
/// and the reproducing property.
pub fn properties() -> Result<Vec<Check>> {
    let mut rows = Vec::new();

    let (slopes, _) = farey_graph(4);
    for (r, a) in [(21u32, 1u32), (31, 3)] {
        let mut ops = TorusOperators::new(r, a)?;
        let mut herm = 0.0f64;
        let mut band_err = 0usize;
        for &s in &slopes {
            let op = ops.slope(s)?;
            herm = herm.max(op.hermitian_deviation());
            band_err = band_err.max(op.band().abs_diff(s.q as usize));
            band_err = band_err.max(op.effective_band(1e-12).abs_diff(s.q as usize));
        }
        rows.push(Check::at_most("hermitian", format!("torus slopes r={r} a={a}"), herm, 1e-10));
        rows.push(Check::at_most("band_equals_q", format!("torus slopes r={r} a={a}"), band_err as f64, 0.0));
    }
    for (r, colors) in [(17u32, [5i64, 6, 7, 8]), (23, [7, 9, 10, 12])] {
        let dev = op_eta(r, colors)?.hermitian_deviation().max(op_xi_sphere(r, colors)?.hermitian_deviation());
        rows.push(Check::at_most("hermitian", format!("sphere eta/xi r={r}"), dev, 1e-12));
    }
    for form in [Form::Corrected] {
        for curve in [G2Curve::Gamma, G2Curve::Delta, G2Curve::Eta] {
            let dev = genus2::op_g2(curve, 12, form)?.hermitian_deviation();
            rows.push(Check::at_most("hermitian", format!("genus2 {curve:?} r=12"), dev, 1e-12));
        }
    }

    // Nonnegative: the constant part is at least ½ and the first mode at most ½.
    let bump = RadialFourierSymbol::real()
        .with_real_mode(0, |t| 1.0 + 0.5 * (2.0 * t - 1.0))
        .with_real_mode(1, |t| 0.5 * (t * (1.0 - t)).sqrt());
    // Grid maximum, a lower bound for sup|f|.
    let sup = (0..=400)
        .flat_map(|i| (0..64).map(move |j| (i as f64 / 400.0, j as f64 * PI / 32.0)))
        .map(|(t, th)| bump.eval(t, th).norm())
        .fold(0.0, f64::max);
    for n in [10usize, 30] {
        let t = toeplitz_matrix(&bump, n)?;
        rows.push(Check::at_most("hermitian", format!("toeplitz n={n}"), t.hermitian_deviation(), 1e-10));
        rows.push(Check::at_most("band", format!("toeplitz n={n}"), t.effective_band(1e-12) as f64, 1.0));
        let eig = eigensolve(&t)?;
        rows.push(Check::at_least("positivity", format!("toeplitz n={n}"), eig.values[0], -1e-10));
        let norm = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        rows.push(Check::at_most("norm_bound", format!("toeplitz n={n}"), norm - sup, 1e-10));
    }

    for (d, a, rbar) in [(7u32, 1u32, 3u32), (9, 3, 3)] {
        let family = ScalingFamily::new(d, BaseColoring::Torus { a }, rbar)?;
        let (t0, t1) = family.operators()?;
        let u = basis_change(&t0, &t1)?;
        let dev = (u.adjoint() * &u - nalgebra::DMatrix::identity(u.nrows(), u.ncols())).camax();
        rows.push(Check::at_most("unitarity", format!("torus D={d} a={a} rbar={rbar}"), dev, 1e-9));
    }
    let family = ScalingFamily::new(11, BaseColoring::Sphere { colors: [4, 6, 7, 7] }, 3)?;
    let (t0, t1) = family.operators()?;
    let u = basis_change(&t0, &t1)?;
    let dev = (u.adjoint() * &u - nalgebra::DMatrix::identity(u.nrows(), u.ncols())).camax();
    rows.push(Check::at_most("unitarity", "sphere D=11 colors=4,6,7,7 rbar=3", dev, 1e-9));

    rows.push(Check::at_most("reproducing", "genus2 r=8", genus2_reproducing_defect(8)?, 1e-10));
    rows.push(Check::at_most("reproducing", "sphere n=12", sphere_reproducing_defect(12)?, 1e-10));
    Ok(rows)
}

fn sample_points() -> ([Complex64; 3], [Complex64; 3]) {
    (
        [Complex64::new(0.3, -0.2), Complex64::new(-0.1, 0.4), Complex64::new(0.25, 0.1)],
        [Complex64::new(-0.2, 0.1), Complex64::new(0.5, 0.3), Complex64::new(0.0, -0.35)],
    )
}

/// Relative gap between `Σ_α φ_α(z)·conj φ_α(w)` and the closed-form kernel.
pub fn genus2_reproducing_defect(r: u32) -> Result<f64> {
    let basis = genus2::P3Basis::new(r)?;
    let (z, w) = sample_points();
    let mut sum = Complex64::new(0.0, 0.0);
    for &alpha in basis.alphas() {
        let mono = |p: [Complex64; 3]| (0..3).map(|i| p[i].powi(alpha[i] as i32)).product::<Complex64>();
        sum += basis.normalizer(alpha)?.powi(2) * mono(z) * mono(w).conj();
    }
    let k = genus2::kernel_p3(w, z, r);
    Ok((sum - k).norm() / k.norm())
}

/// Same identity for the sphere basis and its coherent states.
pub fn sphere_reproducing_defect(n: usize) -> Result<f64> {
    let basis = crate::toeplitz::FockBasisS2::new(n)?;
    let (z, w) = (Complex64::new(0.4, 0.7), Complex64::new(-0.3, 0.2));
    let sum: Complex64 = (0..n).map(|k| basis.eval(k, z) * basis.eval(k, w).conj()).sum();
    let k = crate::toeplitz::coherent_eval(w, z, n);
    Ok((sum - k).norm() / k.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        assert!(!Check::at_most("x", "nan", f64::NAN, 1.0).pass);
        assert!(!Check::at_least("x", "nan", f64::NAN, 1.0).pass);
        assert!(Check::at_most("x", "edge", 1.0, 1.0).pass);
        assert!(!all_pass(&[]));
    }

    #[test]
    fn step_ratio_detects_increase() {
        assert!(max_step_ratio(&[4.0, 2.0, 1.0]) < 1.0);
        assert_eq!(max_step_ratio(&[4.0, 2.0, 3.0]), 1.5);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [8.0, 16.0, 32.0].iter().map(|&n: &f64| (n, 3.0 / (n * n))).collect();
        assert!((slope_of(&pts) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn property_suite_passes() {
        let rows = properties().unwrap();
        assert!(all_pass(&rows), "{:?}", rows.iter().filter(|c| !c.pass).collect::<Vec<_>>());
        assert!(rows.iter().any(|c| c.check == "norm_bound"));
    }

    #[test]
    fn small_product_and_spectrum_suites() {
        assert!(all_pass(&products(&[9, 10], &[1], 3).unwrap()));
        let rows = sphere_spectra(13, &[[4, 5, 6, 7]]).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(all_pass(&rows));
    }

    #[test]
    fn gram_sign_is_adjudicated() {
        let rows = smatrix_closed_forms(&[(11, 1, 2, 4)], &[3]).unwrap();
        assert!(all_pass(&rows), "{rows:?}");
    }
}
