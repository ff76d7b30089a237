//! Exact Toeplitz symbols from matrix entries by inverse Mellin transform.
//!
//! An operator with entries `F(n, μ)` on `ℋ_N` equals `T_f` for
//! `f_μ(ρ) = (1/2π)·ρ^{−1−μ/2}(1+ρ)^{N+1} ∫ G(μ, c+iξ) Π(N, c+iξ) ρ^{−c−iξ} dξ`,
//! where `G(μ, s) = F(s, μ)·E(N, μ, s)` is the analytic continuation of the
//! entries times the normalization ratio and `Π(N, s) = Γ(s+1)Γ(N−s)/Γ(N+1)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::richardson;
use crate::toeplitz::RadialFourierSymbol;
use crate::torus::{delta_radicand, TorusBasis};

type Holo = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn near_integer(s: Complex64) -> Option<i64> {
    let k = s.re.round();
    ((s.re - k).abs() < 1e-12 && s.im.abs() < 1e-12).then_some(k as i64)
}

/// `ln sin(πs)`, stable for large `|Im s|`.
fn ln_sin_pi(s: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let two_i = Complex64::new(0.0, 2.0);
    if s.im >= 0.0 {
        // sin(πs) = e^{−iπs}(e^{2iπs} − 1)/(2i)
        -i * PI * s + ((i * 2.0 * PI * s).exp() - ONE).ln() - two_i.ln()
    } else {
        i * PI * s + (ONE - (-i * 2.0 * PI * s).exp()).ln() - two_i.ln()
    }
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln Π(N, s)` from `π·s(1−s)⋯(N−1−s)/(sin(πs)·N!)`, valid off the integers.
fn ln_pi_generic(n: usize, s: Complex64, ln_n_fact: f64) -> Complex64 {
    let mut acc = Complex64::new(PI.ln() - ln_n_fact, 0.0) + s.ln();
    for k in 1..n {
        acc += (Complex64::new(k as f64, 0.0) - s).ln();
    }
    acc - ln_sin_pi(s)
}

/// `Π(N, s) = Γ(s+1)Γ(N−s)/Γ(N+1)`.
pub fn pi_factor(n: usize, s: Complex64) -> Result<Complex64> {
    if let Some(k) = near_integer(s) {
        if k < 0 || k >= n as i64 {
            return Err(Error::Pole(format!("Π(N={n}, s={k})")));
        }
        let k = k as usize;
        return Ok(Complex64::new(
            (ln_factorial(k) + ln_factorial(n - 1 - k) - ln_factorial(n)).exp(),
            0.0,
        ));
    }
    Ok(ln_pi_generic(n, s, ln_factorial(n)).exp())
}

/// `E(N, μ, s)`, the square root of the finite product relating the Gamma
/// normalizations of rows `s` and `s + μ`, on the branch positive for real
/// `s` between the poles.
pub fn e_factor(n: usize, mu: i64, s: Complex64) -> Result<Complex64> {
    let nf = n as f64;
    let mut ln = Complex64::new(0.0, 0.0);
    for k in 1..=mu.unsigned_abs() as i64 {
        let k = k as f64;
        let (num, den) = if mu > 0 {
            (s + k, Complex64::new(nf - k, 0.0) - s)
        } else {
            (Complex64::new(nf - 1.0 + k, 0.0) - s, s + (1.0 - k))
        };
        if den.norm() == 0.0 {
            return Err(Error::Pole(format!("E(N={n}, μ={mu}, s={s})")));
        }
        if num.norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        ln += num.ln() - den.ln();
    }
    Ok((ln * 0.5).exp())
}

/// One diagonal of an operator as a holomorphic function:
/// `G(μ, s) = prefactor(s)·√radicand(s)` on `lo < Re s < hi`.
#[derive(Clone)]
pub struct EntryMode {
    pub mu: i64,
    pub strip: (f64, f64),
    prefactor: Holo,
    radicand: Option<Holo>,
}

impl std::fmt::Debug for EntryMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EntryMode").field("mu", &self.mu).field("strip", &self.strip).finish()
    }
}

impl EntryMode {
    pub fn new<P>(mu: i64, strip: (f64, f64), prefactor: P) -> Self
    where
        P: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self { mu, strip, prefactor: Arc::new(prefactor), radicand: None }
    }

    pub fn with_radicand<R>(mut self, radicand: R) -> Self
    where
        R: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        self.radicand = Some(Arc::new(radicand));
        self
    }

    /// `G` on the vertical line `c + iξ`, `ξ = k·h` for `k = −K..=K`, with
    /// the square root continued from its positive value at `ξ = 0`.
    pub fn on_line(&self, c: f64, h: f64, k_max: usize) -> Vec<Complex64> {
        let len = 2 * k_max + 1;
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        let at = |k: i64| Complex64::new(c, k as f64 * h);
        let Some(rad) = &self.radicand else {
            for (idx, v) in out.iter_mut().enumerate() {
                *v = (self.prefactor)(at(idx as i64 - k_max as i64));
            }
            return out;
        };
        let root0 = {
            let q = rad(at(0));
            let r = q.sqrt();
            if r.re < 0.0 { -r } else { r }
        };
        out[k_max] = (self.prefactor)(at(0)) * root0;
        for dir in [1i64, -1] {
            let mut prev = root0;
            for step in 1..=k_max as i64 {
                let k = dir * step;
                let r = rad(at(k)).sqrt();
                let r = if (r - prev).norm() <= (r + prev).norm() { r } else { -r };
                prev = r;
                out[(k + k_max as i64) as usize] = (self.prefactor)(at(k)) * r;
            }
        }
        out
    }

    /// `G(μ, s)` at one point, continued vertically from `Re s`.
    pub fn value(&self, s: Complex64) -> Complex64 {
        if self.radicand.is_none() || s.im == 0.0 {
            let q = self.radicand.as_ref().map(|r| r(s).sqrt()).unwrap_or(ONE);
            let q = if q.re < 0.0 { -q } else { q };
            return (self.prefactor)(s) * q;
        }
        let steps = (s.im.abs() / 0.02).ceil().max(1.0) as usize;
        let h = s.im / steps as f64;
        self.on_line(s.re, h, steps)[2 * steps]
    }
}

/// Analytic continuation of all diagonals of an operator on `ℋ_N`.
#[derive(Debug, Clone)]
pub struct AnalyticEntryFamily {
    pub dim: usize,
    pub modes: Vec<EntryMode>,
}

impl AnalyticEntryFamily {
    pub fn mode(&self, mu: i64) -> Option<&EntryMode> {
        self.modes.iter().find(|m| m.mu == mu)
    }

    /// Meridian operator of the punctured torus, `G(0, s) = −2cos(π(s+(a+1)/2)/r)`.
    pub fn torus_gamma(r: u32, a: u32) -> Result<Self> {
        let basis = TorusBasis::new(r, a)?;
        let n = basis.dim();
        let shift = (a as f64 + 1.0) / 2.0;
        let rf = r as f64;
        let mode = EntryMode::new(0, (-1.0, n as f64), move |s| -((s + shift) * (PI / rf)).cos() * 2.0);
        Ok(Self { dim: n, modes: vec![mode] })
    }

    /// Longitude operator of the punctured torus.
    pub fn torus_delta(r: u32, a: u32) -> Result<Self> {
        let basis = TorusBasis::new(r, a)?;
        let n = basis.dim();
        let nf = n as f64;
        let af = a as f64;
        let up = EntryMode::new(1, ((-(af + 1.0) / 2.0).max(-1.0), (r as f64 - (af + 3.0) / 2.0).min(nf)), |_| -ONE)
            .with_radicand(move |s| {
                delta_radicand(s + (af + 3.0) / 2.0, r, a) * (s + 1.0) / (Complex64::new(nf - 1.0, 0.0) - s)
            });
        let down = EntryMode::new(-1, ((-(af - 1.0) / 2.0).max(-1.0), nf), |_| -ONE).with_radicand(move |s| {
            delta_radicand(s + (af + 1.0) / 2.0, r, a) * (Complex64::new(nf, 0.0) - s) / s
        });
        Ok(Self { dim: n, modes: vec![down, up] })
    }

    /// Largest deviation of `G(μ, n)/E(N, μ, n)` from the stored entries.
    pub fn integer_agreement(&self, op: &crate::banded::BandedOperator) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for m in &self.modes {
            for k in op.diagonal_range(m.mu) {
                let s = Complex64::new(k as f64, 0.0);
                let g = m.value(s) / e_factor(self.dim, m.mu, s)?;
                worst = worst.max((g - op.get(k, m.mu)).norm());
            }
        }
        Ok(worst)
    }
}

/// Default contour abscissa: the saddle of `|Π(N, c)ρ^{−c}|` pulled inside
/// the strip.
pub fn default_abscissa(mode: &EntryMode, dim: usize, rho: f64) -> f64 {
    let tau = rho / (1.0 + rho);
    let (lo, hi) = mode.strip;
    let margin = (0.5f64).min((hi - lo) / 3.0);
    let c = (dim as f64 * tau - 0.5 - mode.mu as f64 / 2.0).clamp(lo + margin, hi - margin);
    // Keep the line off the integers, where the product form of Π is 0/0.
    let frac = c - c.round();
    if frac.abs() < 0.1 {
        let shifted = c.round() + 0.1f64.copysign(if frac == 0.0 { 1.0 } else { frac });
        if shifted > lo + margin / 2.0 && shifted < hi - margin / 2.0 {
            return shifted;
        }
    }
    c
}

/// `f_μ(ρ)` by trapezoid quadrature along `Re s = c`, halving the step until
/// two successive sums agree.
pub fn exact_symbol(entries: &AnalyticEntryFamily, mu: i64, rho: f64, c: f64) -> Result<Complex64> {
    let Some(mode) = entries.mode(mu) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let (lo, hi) = mode.strip;
    if !(c > lo && c < hi) {
        return Err(Error::Strip { c, lo, hi });
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("ρ={rho}")));
    }
    let n = entries.dim;
    let ln_rho = rho.ln();
    let ln_pref = (-1.0 - mu as f64 / 2.0) * ln_rho + (n as f64 + 1.0) * rho.ln_1p();
    let ln_nf = ln_factorial(n);
    let d = (c - lo).min(hi - c);
    let mut h = (d / 4.0).min(0.5).min(2.0 / (1.0 + ln_rho.abs()));
    let mut previous: Option<Complex64> = None;
    for _ in 0..6 {
        let (value, mass) = trapezoid(mode, n, c, h, ln_rho, ln_pref, ln_nf)?;
        if let Some(p) = previous {
            // Relative to the integrand mass: away from the saddle the sum
            // cancels and only absolute accuracy is attainable.
            if (value - p).norm() <= 1e-13 * mass.max(value.norm()) + 1e-15 {
                return Ok(value);
            }
        }
        previous = Some(value);
        h /= 2.0;
    }
    Err(Error::Truncation(format!("step refinement stalled for μ={mu}, ρ={rho}, c={c}")))
}

fn trapezoid(
    mode: &EntryMode,
    n: usize,
    c: f64,
    h: f64,
    ln_rho: f64,
    ln_pref: f64,
    ln_nf: f64,
) -> Result<(Complex64, f64)> {
    // Envelope |ξ|^N e^{−π|ξ|} peaks near N/π; go well past before testing decay.
    let min_xi = n as f64 / PI + 8.0;
    let max_xi = 60.0 + 4.0 * n as f64;
    let mut k_max = ((min_xi / h).ceil() as usize).max(16);
    loop {
        let g = mode.on_line(c, h, k_max);
        let terms: Vec<Complex64> = g
            .iter()
            .enumerate()
            .map(|(idx, &gv)| {
                if gv.norm() == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let s = Complex64::new(c, (idx as f64 - k_max as f64) * h);
                let ln_pi = match near_integer(s) {
                    Some(_) => pi_factor(n, s).map(|p| p.ln()).unwrap_or(Complex64::new(f64::NAN, 0.0)),
                    None => ln_pi_generic(n, s, ln_nf),
                };
                let expo = ln_pi - s * ln_rho + ln_pref;
                gv * expo.exp()
            })
            .collect();
        let sum: Complex64 = terms.iter().sum();
        let tail = terms[0].norm().max(terms[terms.len() - 1].norm());
        let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
        if tail <= 1e-17 * scale {
            let mass: f64 = terms.iter().map(|t| t.norm()).sum::<f64>() * h / (2.0 * PI);
            return Ok((sum * (h / (2.0 * PI)), mass));
        }
        if k_max as f64 * h > max_xi {
            return Err(Error::Truncation(format!("integrand not decayed by |ξ|={}", k_max as f64 * h)));
        }
        k_max *= 2;
    }
}

/// Reconstructed exact symbol of every mode, as a sphere function. Each
/// profile evaluates the contour integral at the default abscissa; failures
/// surface as NaN.
pub fn exact_symbol_function(entries: &AnalyticEntryFamily) -> RadialFourierSymbol {
    let mut sym = RadialFourierSymbol::complex();
    for m in &entries.modes {
        let fam = entries.clone();
        let mu = m.mu;
        sym = sym.with_mode(mu, move |tau: f64| {
            let rho = tau / (1.0 - tau);
            let mode = fam.mode(mu).expect("mode present");
            exact_symbol(&fam, mu, rho, default_abscissa(mode, fam.dim, rho))
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        });
    }
    sym
}

/// Richardson estimate of the first two terms of `f^N_μ(τ) ≈ f⁽⁰⁾ + f⁽¹⁾/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticEstimate {
    pub tau: f64,
    pub leading: Complex64,
    pub first_order: Complex64,
}

/// Extrapolates the exact symbol at fixed sphere points along a sequence of
/// operators of growing dimension.
pub fn symbol_asymptotics(
    families: &[AnalyticEntryFamily],
    mu: i64,
    taus: &[f64],
) -> Result<Vec<AsymptoticEstimate>> {
    let ns: Vec<f64> = families.iter().map(|f| f.dim as f64).collect();
    let terms = families.len().min(4);
    if terms < 3 {
        return Err(Error::Fit(format!("need at least 3 sweep points, got {}", families.len())));
    }
    taus.iter()
        .map(|&tau| {
            let rho = tau / (1.0 - tau);
            let mut re = Vec::new();
            let mut im = Vec::new();
            for fam in families {
                let mode = fam.mode(mu).ok_or_else(|| Error::Range(format!("no mode μ={mu}")))?;
                let v = exact_symbol(fam, mu, rho, default_abscissa(mode, fam.dim, rho))?;
                re.push(v.re);
                im.push(v.im);
            }
            let cr = richardson(&ns, &re, terms)?;
            let ci = richardson(&ns, &im, terms)?;
            let leading = Complex64::new(cr[0], ci[0]);
            let resid: Vec<f64> = re
                .iter()
                .zip(&im)
                .map(|(x, y)| (Complex64::new(*x, *y) - leading).norm())
                .collect();
            if resid.windows(2).any(|w| w[1] > w[0] * 1.05 + 1e-13) {
                return Err(Error::Fit(format!("residuals not decreasing at τ={tau}: {resid:?}")));
            }
            Ok(AsymptoticEstimate { tau, leading, first_order: Complex64::new(cr[1], ci[1]) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toeplitz::{laplacian_mode, toeplitz_matrix_with};
    use crate::numerics::QuadratureSpec;
    use crate::torus::{longitude_amplitude, op_delta_torus, op_gamma_torus};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pi_factor_examples() {
        for n in [1usize, 4, 9] {
            assert!((pi_factor(n, c(0.0, 0.0)).unwrap() - c(1.0 / n as f64, 0.0)).norm() < 1e-15);
            let last = pi_factor(n, c(n as f64 - 1.0, 0.0)).unwrap();
            assert!((last - c(1.0 / n as f64, 0.0)).norm() < 1e-15);
        }
        // Off-integer value against the Beta integral Γ(s+1)Γ(N−s)/Γ(N+1) at s = 1/2, N = 2.
        let v = pi_factor(2, c(0.5, 0.0)).unwrap();
        assert!((v.re - PI / 8.0).abs() < 1e-14);
        assert!(matches!(pi_factor(3, c(-1.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(pi_factor(3, c(3.0, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn pi_factor_vertical_decay() {
        for n in [3usize, 6] {
            let xi = 30.0 * n as f64;
            let v = pi_factor(n, c(0.3, xi)).unwrap().norm();
            let envelope = 2.0 * PI * xi.powi(n as i32) * (-PI * xi).exp() / (1..=n).product::<usize>() as f64;
            assert!((v / envelope - 1.0).abs() < 0.05, "n={n}: {}", v / envelope);
        }
    }

    #[test]
    fn e_factor_examples() {
        assert_eq!(e_factor(7, 0, c(2.3, 1.0)).unwrap(), c(1.0, 0.0));
        let s = 2.4;
        let e = e_factor(9, 1, c(s, 0.0)).unwrap();
        assert!((e.re - ((s + 1.0) / (9.0 - s - 1.0)).sqrt()).abs() < 1e-15 && e.im == 0.0);
        for mu in 1..3 {
            for s in [0.3, 1.7, 4.2] {
                let prod = e_factor(9, -mu, c(s + mu as f64, 0.0)).unwrap() * e_factor(9, mu, c(s, 0.0)).unwrap();
                assert!((prod - c(1.0, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn continuation_agrees_on_integers() {
        for (r, a) in [(11, 1), (15, 3), (21, 5)] {
            let g = AnalyticEntryFamily::torus_gamma(r, a).unwrap();
            assert!(g.integer_agreement(&op_gamma_torus(r, a).unwrap()).unwrap() < 1e-12);
            let d = AnalyticEntryFamily::torus_delta(r, a).unwrap();
            assert!(d.integer_agreement(&op_delta_torus(r, a).unwrap()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn hermitian_continuation_and_forced_zeros() {
        let (r, a) = (15, 3);
        let fam = AnalyticEntryFamily::torus_delta(r, a).unwrap();
        let n = fam.dim;
        let (up, down) = (fam.mode(1).unwrap(), fam.mode(-1).unwrap());
        for (re, im) in [(2.3, 0.0), (4.5, 0.7), (7.1, -2.5), (1.2, 6.0)] {
            let s = c(re, im);
            let lhs = down.value(s + 1.0).conj() * e_factor(n, 1, s.conj()).unwrap().powi(2);
            let rhs = up.value(s.conj());
            assert!((lhs - rhs).norm() < 1e-9 * rhs.norm().max(1.0), "{lhs} vs {rhs}");
        }
        assert!(up.value(c(-1.0, 0.0)).norm() < 1e-10);
        assert!(down.value(c(n as f64, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn growth_rate_below_pi() {
        let fam = AnalyticEntryFamily::torus_delta(21, 3).unwrap();
        for m in &fam.modes {
            let c0 = 0.5 * (m.strip.0 + m.strip.1);
            let a = m.value(c(c0, 20.0)).norm().ln();
            let b = m.value(c(c0, 40.0)).norm().ln();
            assert!((b - a) / 20.0 < PI);
        }
    }

    #[test]
    fn contour_shift_invariance() {
        let fam = AnalyticEntryFamily::torus_delta(15, 3).unwrap();
        for mu in [-1, 1] {
            let m = fam.mode(mu).unwrap();
            for rho in [0.2, 1.0, 3.5] {
                let c0 = default_abscissa(m, fam.dim, rho);
                let a = exact_symbol(&fam, mu, rho, c0).unwrap();
                let b = exact_symbol(&fam, mu, rho, (c0 + 1.5).min(m.strip.1 - 0.4)).unwrap();
                assert!((a - b).norm() < 1e-10, "{a} vs {b}");
            }
        }
        assert!(matches!(exact_symbol(&fam, 1, 1.0, 100.0), Err(Error::Strip { .. })));
        assert_eq!(exact_symbol(&fam, 2, 1.0, 0.0).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn requantization_roundtrip() {
        let (r, a) = (11, 1);
        let spec = QuadratureSpec::new(1e-11, 1e-10);
        for (fam, op) in [
            (AnalyticEntryFamily::torus_gamma(r, a).unwrap(), op_gamma_torus(r, a).unwrap()),
            (AnalyticEntryFamily::torus_delta(r, a).unwrap(), op_delta_torus(r, a).unwrap()),
        ] {
            let sym = exact_symbol_function(&fam);
            let back = toeplitz_matrix_with(&sym, fam.dim, &spec).unwrap();
            assert!(back.max_abs_diff(&op) < 1e-7, "{}", back.max_abs_diff(&op));
        }
    }

    #[test]
    fn leading_term_and_first_order_sign() {
        // Torus longitude at D = 7, colors 3r̄, in the sphere coordinate τ_s.
        let (d, a0) = (7u32, 3u32);
        let fams: Vec<_> = [3u32, 5, 7, 9, 11]
            .iter()
            .map(|&rb| AnalyticEntryFamily::torus_delta(d * rb, a0 * rb).unwrap())
            .collect();
        let alpha = PI * a0 as f64 / d as f64;
        let profile = move |t: f64| c(-longitude_amplitude(alpha / 2.0 + (PI - alpha) * t, alpha), 0.0);
        let est = symbol_asymptotics(&fams, 1, &[0.3, 0.5, 0.7]).unwrap();
        for e in est {
            assert!((e.leading - profile(e.tau)).norm() < 1e-3, "{e:?}");
            let half_lap = laplacian_mode(&profile, 1, e.tau).unwrap() * 0.5;
            // Midpoint-sampled entries give the Toeplitz correction with a minus sign.
            assert!((e.first_order + half_lap).norm() < 0.05 * half_lap.norm(), "{e:?} vs {half_lap}");
            assert!((e.first_order - half_lap).norm() > half_lap.norm());
        }
    }
}
