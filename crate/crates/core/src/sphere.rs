//! Curve operators on the four-punctured sphere with boundary colors
//! `(a, b, c, d)`.
//!
//! The basis vectors are labeled by the color `m` of the curve `ζ` separating
//! `{a, d}` from `{b, c}`; labels step by two and are stored at position
//! `n = (m − m_min)/2`, so the pentadiagonal (in `m`) operators `η` and `ξ`
//! are tridiagonal in storage.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::banded::BandedOperator;
use crate::error::{Error, Result};
use crate::qnum::{admissible_triple, bracket};

const RADICAND_SLACK: f64 = 1e-12;

/// Boundary colors and level of a four-punctured sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphereBasis {
    pub r: u32,
    pub colors: [i64; 4],
    /// Smallest label `m`.
    pub first: i64,
    pub dim: usize,
}

impl SphereBasis {
    pub fn new(r: u32, colors: [i64; 4]) -> Result<Self> {
        let [a, b, c, d] = colors;
        for x in colors {
            if x < 1 || x > r as i64 - 1 {
                return Err(Error::ColorRange { color: x, r: r as i64 });
            }
        }
        if (a + d - b - c) % 2 != 0 {
            return Err(Error::EmptyBasis);
        }
        let r2 = 2 * r as i64;
        let lo = (a - d).abs().max((b - c).abs());
        let hi = (a + d).min(r2 - a - d).min(b + c).min(r2 - b - c);
        if hi <= lo + 1 {
            return Err(Error::EmptyBasis);
        }
        Ok(Self { r, colors, first: lo + 1, dim: ((hi - lo) / 2) as usize })
    }

    pub fn label(&self, n: usize) -> i64 {
        self.first + 2 * n as i64
    }

    pub fn labels(&self) -> Vec<i64> {
        (0..self.dim).map(|n| self.label(n)).collect()
    }

    /// Colors with `b` and `c` exchanged.
    pub fn swapped_colors(&self) -> [i64; 4] {
        let [a, b, c, d] = self.colors;
        [a, c, b, d]
    }
}

/// `⟨x/2⟩` for an even integer `x`.
fn half_bracket(x2: i64, r: u32) -> f64 {
    debug_assert!(x2 % 2 == 0, "odd half-integer argument {x2}");
    bracket(x2 / 2, r)
}

fn ratio(num: f64, den: f64) -> f64 {
    // Boundary labels can produce 0/0 with a double zero upstairs.
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Off-diagonal coefficient `w_m` of `η` (coefficient of `φ_{m+2}` in `ηφ_m`).
fn eta_w(m: i64, colors: [i64; 4], r: u32) -> Result<f64> {
    let [a, b, c, d] = colors;
    let h = |x| half_bracket(x, r);
    let ad = h(a + d - m - 1) * h(a - d + m + 1) * h(-a + d + m + 1) * h(a + d + m + 1);
    let bc = h(b + c - m - 1) * h(b - c + m + 1) * h(-b + c + m + 1) * h(b + c + m + 1);
    let rad = ratio(ad, bracket(m, r) * bracket(m + 1, r))
        * ratio(bc, bracket(m + 1, r) * bracket(m + 2, r));
    if rad < -RADICAND_SLACK {
        return Err(Error::NegativeRadicand { index: m, value: rad });
    }
    Ok(-4.0 * rad.max(0.0).sqrt())
}

/// Diagonal coefficient `v_m` of `η`.
fn eta_v(m: i64, colors: [i64; 4], r: u32) -> f64 {
    let [a, b, c, d] = colors;
    let h = |x| half_bracket(x, r);
    let lower = h(a + d - m - 1) * h(a - d + m + 1) * h(b + c - m - 1) * h(b - c + m + 1);
    let upper = h(a + d + m - 1) * h(-a + d + m - 1) * h(b + c + m - 1) * h(-b + c + m - 1);
    -2.0 * (PI * (c + d - 1) as f64 / r as f64).cos()
        - 4.0 * ratio(lower, bracket(m, r) * bracket(m + 1, r))
        - 4.0 * ratio(upper, bracket(m - 1, r) * bracket(m, r))
}

/// Diagonal operator `−2cos(πm/r)`.
pub fn op_zeta(r: u32, colors: [i64; 4]) -> Result<BandedOperator> {
    let basis = SphereBasis::new(r, colors)?;
    let mut op = BandedOperator::zeros(basis.dim, 0);
    for n in 0..basis.dim {
        let m = basis.label(n) as f64;
        op.set(n, 0, Complex64::new(-2.0 * (PI * m / r as f64).cos(), 0.0));
    }
    Ok(op.with_meta("sphere4", "zeta", r))
}

/// Operator of the curve `η` separating `{a, b}` from `{c, d}`.
pub fn op_eta(r: u32, colors: [i64; 4]) -> Result<BandedOperator> {
    let basis = SphereBasis::new(r, colors)?;
    let mut op = BandedOperator::zeros(basis.dim, 1);
    for n in 0..basis.dim {
        let m = basis.label(n);
        op.set(n, 0, Complex64::new(eta_v(m, colors, r), 0.0));
        if n + 1 < basis.dim {
            let w = Complex64::new(eta_w(m, colors, r)?, 0.0);
            op.set(n, 1, w);
            op.set(n + 1, -1, w);
        }
    }
    Ok(op.with_meta("sphere4", "eta", r))
}

/// Half-twist eigenvalue `H(c; a, b) = (−1)^ε exp(iπ(c²−a²−b²+1)/4r)`.
pub fn half_twist_coeff(c: i64, a: i64, b: i64, r: u32) -> Result<Complex64> {
    if !admissible_triple(a, b, c, r)? {
        return Err(Error::Admissibility(a, b, c, r as i64));
    }
    let eps4 = -a * a - b * b - c * c + 2 * a * b + 2 * b * c + 2 * a * c - 2 * a - 2 * b - 2 * c + 3;
    debug_assert!(eps4 % 4 == 0);
    let sign = if (eps4 / 4).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let phase = PI * (c * c - a * a - b * b + 1) as f64 / (4.0 * r as f64);
    Ok(Complex64::from_polar(sign, phase))
}

/// Operator of the curve `ξ` separating `{a, c}` from `{b, d}`: the half-twist
/// image of `η`, built from the `η` coefficients with `b` and `c` exchanged.
pub fn op_xi_sphere(r: u32, colors: [i64; 4]) -> Result<BandedOperator> {
    let basis = SphereBasis::new(r, colors)?;
    let swapped = basis.swapped_colors();
    let mut op = BandedOperator::zeros(basis.dim, 1);
    for n in 0..basis.dim {
        let m = basis.label(n);
        op.set(n, 0, Complex64::new(eta_v(m, swapped, r), 0.0));
        if n + 1 < basis.dim {
            let w = eta_w(m, swapped, r)?;
            let phase = -Complex64::from_polar(1.0, -PI * (m + 1) as f64 / r as f64);
            op.set(n, 1, phase * w);
            op.set(n + 1, -1, phase.conj() * w);
        }
    }
    Ok(op.with_meta("sphere4", "xi", r))
}

/// Boundary holonomy angles `(α, β, γ, δ)` of the four punctures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl SphereAngles {
    pub fn from_colors(colors: [i64; 4], level: f64) -> Self {
        let t = |c: i64| PI * c as f64 / level;
        Self { alpha: t(colors[0]), beta: t(colors[1]), gamma: t(colors[2]), delta: t(colors[3]) }
    }

    /// Interval of the action `τ` on which the moduli space is nonempty.
    pub fn action_range(&self) -> (f64, f64) {
        let Self { alpha, beta, gamma, delta } = *self;
        let lo = (alpha - delta).abs().max((beta - gamma).abs());
        let hi = (alpha + delta)
            .min(2.0 * PI - alpha - delta)
            .min(beta + gamma)
            .min(2.0 * PI - beta - gamma);
        (lo, hi)
    }

    /// Diagonal part `I(τ, ħ)` of the `η` symbol.
    pub fn i_fn(&self, tau: f64, hbar: f64) -> f64 {
        let Self { alpha, beta, gamma, delta } = *self;
        let s = |x: f64| (x / 2.0).sin();
        let lower = s(alpha + delta - tau - hbar)
            * s(alpha - delta + tau + hbar)
            * s(beta + gamma - tau - hbar)
            * s(beta - gamma + tau + hbar);
        let upper = s(alpha + delta + tau - hbar)
            * s(-alpha + delta + tau - hbar)
            * s(beta + gamma + tau - hbar)
            * s(-beta + gamma + tau - hbar);
        2.0 * (gamma + delta - hbar).cos()
            + 4.0 * lower / (tau.sin() * (tau + hbar).sin())
            + 4.0 * upper / (tau.sin() * (tau - hbar).sin())
    }

    /// Off-diagonal part `J(τ, ħ)` of the `η` symbol.
    pub fn j_fn(&self, tau: f64, hbar: f64) -> f64 {
        let Self { alpha, beta, gamma, delta } = *self;
        let s = |x: f64| (x / 2.0).sin();
        let t = tau + hbar;
        let ad = s(alpha + delta - t) * s(alpha - delta + t) * s(-alpha + delta + t) * s(alpha + delta + t);
        let bc = s(beta + gamma - t) * s(beta - gamma + t) * s(-beta + gamma + t) * s(beta + gamma + t);
        let rad = ad / (tau.sin() * t.sin()) * bc / (t.sin() * (t + hbar).sin());
        4.0 * rad.max(0.0).sqrt()
    }
}

/// Which sphere curve a trace function refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereCurve {
    Zeta,
    Eta,
}

/// Classical trace function `−tr ρ(curve)` at `(τ, θ)`.
pub fn trace_fn_sphere(angles: &SphereAngles, which: SphereCurve, tau: f64, theta: f64) -> Result<f64> {
    let (lo, hi) = angles.action_range();
    if !(tau > lo && tau < hi) {
        return Err(Error::Domain(format!("τ={tau} outside ({lo}, {hi})")));
    }
    Ok(match which {
        SphereCurve::Zeta => -2.0 * tau.cos(),
        SphereCurve::Eta => -angles.i_fn(tau, 0.0) - 2.0 * angles.j_fn(tau, 0.0) * (2.0 * theta).cos(),
    })
}

/// Labels of the basis for the decomposition along `η`, i.e. with the roles
/// of `d` and `b` exchanged; its `ζ`-spectrum is the spectrum of `η`.
pub fn eta_dual_colors(colors: [i64; 4]) -> [i64; 4] {
    let [a, b, c, d] = colors;
    [a, d, c, b]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::eigensolve;
    use proptest::prelude::*;

    fn spectrum(op: &BandedOperator) -> Vec<f64> {
        eigensolve(op).unwrap().values
    }

    fn sorted_diag(op: &BandedOperator) -> Vec<f64> {
        let mut v: Vec<f64> = op.diagonal(0).iter().map(|z| z.re).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    fn same(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn zeta_window_example() {
        let basis = SphereBasis::new(7, [2, 2, 2, 2]).unwrap();
        assert_eq!(basis.labels(), vec![1, 3]);
        let z = op_zeta(7, [2, 2, 2, 2]).unwrap();
        assert!((z.get(0, 0).re + 2.0 * (PI / 7.0).cos()).abs() < 1e-15);
        assert!((z.get(1, 0).re + 2.0 * (3.0 * PI / 7.0).cos()).abs() < 1e-15);
        assert!(matches!(op_zeta(7, [1, 2, 2, 2]), Err(Error::EmptyBasis)));
    }

    #[test]
    fn eta_spectrum_is_dual_window() {
        for (r, colors) in [(7, [2, 2, 2, 2]), (11, [3, 4, 5, 6]), (13, [5, 4, 6, 7]), (17, [6, 9, 8, 5])] {
            let eta = op_eta(r, colors).unwrap();
            assert!(eta.hermitian_deviation() < 1e-12);
            let dual = op_zeta(r, eta_dual_colors(colors)).unwrap();
            assert!(same(&spectrum(&eta), &sorted_diag(&dual), 1e-8), "{colors:?}");
        }
    }

    #[test]
    fn xi_spectrum_and_moduli() {
        let (r, colors) = (13, [5, 4, 6, 7]);
        let xi = op_xi_sphere(r, colors).unwrap();
        assert!(xi.hermitian_deviation() < 1e-12);
        let swapped_eta = op_eta(r, [5, 6, 4, 7]).unwrap();
        for mu in -1..=1 {
            for n in xi.diagonal_range(mu) {
                assert!((xi.get(n, mu).norm() - swapped_eta.get(n, mu).norm()).abs() < 1e-13);
            }
        }
        assert!(same(&spectrum(&xi), &spectrum(&swapped_eta), 1e-8));
    }

    #[test]
    fn half_twist_examples() {
        assert!((half_twist_coeff(1, 1, 1, 9).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let (r, b, c) = (15, 4, 6);
        for m in [3i64, 5, 7] {
            let h2 = half_twist_coeff(m + 2, b, c, r).unwrap();
            let h0 = half_twist_coeff(m, c, b, r).unwrap();
            assert!((h2.norm() - 1.0).abs() < 1e-15);
            // Conjugated ratio reproduces the phase used in ξ.
            let expect = -Complex64::from_polar(1.0, -PI * (m + 1) as f64 / r as f64);
            assert!((h2.conj() * h0 - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn trace_function_examples() {
        let right = SphereAngles { alpha: PI / 2.0, beta: PI / 2.0, gamma: PI / 2.0, delta: PI / 2.0 };
        for (tau, theta) in [(0.4, 0.3), (1.2, 2.0), (2.5, -1.0)] {
            let f = trace_fn_sphere(&right, SphereCurve::Eta, tau, theta).unwrap();
            assert!((f + 2.0 * (2.0 * theta).cos()).abs() < 1e-13);
        }
        assert!(trace_fn_sphere(&right, SphereCurve::Zeta, PI / 2.0, 0.0).unwrap().abs() < 1e-15);
        assert!(trace_fn_sphere(&right, SphereCurve::Zeta, 3.2, 0.0).is_err());
    }

    #[test]
    fn entries_are_symbol_values() {
        let (r, colors) = (23, [7, 9, 10, 12]);
        let eta = op_eta(r, colors).unwrap();
        let basis = SphereBasis::new(r, colors).unwrap();
        let ang = SphereAngles::from_colors(colors, r as f64);
        let h = PI / r as f64;
        for n in 0..basis.dim {
            let tau = h * basis.label(n) as f64;
            assert!((eta.get(n, 0).re + ang.i_fn(tau, h)).abs() < 1e-12);
            if n + 1 < basis.dim {
                assert!((eta.get(n, 1).re + ang.j_fn(tau, h)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn subprincipal_shift_is_second_order() {
        let ang = SphereAngles { alpha: 1.1, beta: 1.4, gamma: 1.7, delta: 1.3 };
        let tau = 1.5;
        let mut pts_i = Vec::new();
        let mut pts_j = Vec::new();
        for r in [40.0, 80.0, 160.0, 320.0] {
            let h = PI / r;
            pts_i.push((r, (ang.i_fn(tau, h) - ang.i_fn(tau, 0.0)).abs()));
            pts_j.push((r, (ang.j_fn(tau - h, h) - ang.j_fn(tau, 0.0)).abs()));
        }
        assert!(crate::numerics::fit_slope(&pts_i).unwrap().slope <= -1.8);
        assert!(crate::numerics::fit_slope(&pts_j).unwrap().slope <= -1.8);
    }

    #[test]
    fn literal_upper_factor_breaks_spectrum() {
        // Variant with ⟨(−a+d+m−1)/2⟩ in place of ⟨(−a+d+m+1)/2⟩ in w_m.
        let (r, colors) = (13u32, [5i64, 4, 6, 7]);
        let [a, b, c, d] = colors;
        let mut eta = op_eta(r, colors).unwrap();
        let basis = SphereBasis::new(r, colors).unwrap();
        let h = |x| half_bracket(x, r);
        for n in 0..basis.dim - 1 {
            let m = basis.label(n);
            let ad = h(a + d - m - 1) * h(a - d + m + 1) * h(-a + d + m - 1) * h(a + d + m + 1);
            let bc = h(b + c - m - 1) * h(b - c + m + 1) * h(-b + c + m + 1) * h(b + c + m + 1);
            let rad = ad * bc / (bracket(m, r) * bracket(m + 1, r).powi(2) * bracket(m + 2, r));
            let w = Complex64::new(-4.0 * rad.max(0.0).sqrt(), 0.0);
            eta.set(n, 1, w);
            eta.set(n + 1, -1, w);
        }
        let want = sorted_diag(&op_zeta(r, eta_dual_colors(colors)).unwrap());
        assert!(!same(&spectrum(&eta), &want, 1e-4));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn sphere_operators_hermitian_with_window_spectra(
            r in 5u32..26, a in 1i64..25, b in 1i64..25, c in 1i64..25, d in 1i64..25,
        ) {
            let colors = [a, b, c, d];
            prop_assume!(colors.iter().all(|&x| x < r as i64));
            prop_assume!(SphereBasis::new(r, colors).is_ok());
            let eta = op_eta(r, colors).unwrap();
            let xi = op_xi_sphere(r, colors).unwrap();
            prop_assert!(eta.hermitian_deviation() < 1e-12);
            prop_assert!(xi.hermitian_deviation() < 1e-12);
            let want_eta = sorted_diag(&op_zeta(r, eta_dual_colors(colors)).unwrap());
            prop_assert!(same(&spectrum(&eta), &want_eta, 1e-8));
            let want_xi = sorted_diag(&op_zeta(r, eta_dual_colors([a, c, b, d])).unwrap());
            prop_assert!(same(&spectrum(&xi), &want_xi, 1e-8));
        }
    }
}
