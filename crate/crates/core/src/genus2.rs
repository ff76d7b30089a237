//! Genus-2 curve operators on the quantization of `ℙ³`.
//!
//! The theta-graph basis is labelled by `α ∈ ℕ³` with `|α| ≤ r−2`, matched to
//! edge colors by `cᵢ = αⱼ + α_k + 1`. The monomials `D(r;α) z^α` form a
//! Hermitian basis of the degree `r−2` sections.
//!
//! Each operator comes in two forms. [`Form::Printed`] follows the stated
//! matrix entries verbatim. [`Form::Corrected`] uses the label `c₂` for `γ`,
//! the four-holed-sphere `η` coefficients at colors `(c₁,c₁,c₃,c₃)` for `δ`,
//! and Hermitian completion of the `+ν` family for `η`.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qnum::bracket;

pub type Alpha = [i64; 3];

/// Offset `(0,0,1)` of `η`.
pub const MU_ETA: Alpha = [0, 0, 1];
/// Offset `(1,−1,0)` of `η`.
pub const NU_ETA: Alpha = [1, -1, 0];
/// Offset `(1,−1,1)` of `δ`.
pub const NU_DELTA: Alpha = [1, -1, 1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Printed,
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum G2Curve {
    Gamma,
    Delta,
    Eta,
}

fn add(a: Alpha, b: Alpha) -> Alpha {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn neg(a: Alpha) -> Alpha {
    [-a[0], -a[1], -a[2]]
}

fn ln_factorial(n: i64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Index set `A_r` with its normalizers.
#[derive(Debug, Clone)]
pub struct P3Basis {
    pub r: u32,
    alphas: Vec<Alpha>,
    index: HashMap<Alpha, usize>,
}

impl P3Basis {
    pub fn new(r: u32) -> Result<Self> {
        if r < 3 {
            return Err(Error::Range(format!("genus-2 level r={r} must be at least 3")));
        }
        let top = r as i64 - 2;
        let mut alphas = Vec::new();
        for a1 in 0..=top {
            for a2 in 0..=top - a1 {
                for a3 in 0..=top - a1 - a2 {
                    alphas.push([a1, a2, a3]);
                }
            }
        }
        let index = alphas.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        Ok(Self { r, alphas, index })
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[Alpha] {
        &self.alphas
    }

    pub fn alpha(&self, i: usize) -> Alpha {
        self.alphas[i]
    }

    pub fn index_of(&self, alpha: Alpha) -> Option<usize> {
        self.index.get(&alpha).copied()
    }

    /// `D(r;α) = ((r+1)!/(α₁!α₂!α₃!(r−2−|α|)!))^{1/2}`.
    pub fn normalizer(&self, alpha: Alpha) -> Result<f64> {
        if self.index_of(alpha).is_none() {
            return Err(Error::Range(format!("{alpha:?} is not in A_{}", self.r)));
        }
        let rest = self.r as i64 - 2 - alpha.iter().sum::<i64>();
        let ln = ln_factorial(self.r as i64 + 1)
            - alpha.iter().map(|&a| ln_factorial(a)).sum::<f64>()
            - ln_factorial(rest);
        Ok((0.5 * ln).exp())
    }
}

/// `α ↦ c` with `cᵢ = αⱼ + α_k + 1`.
pub fn colors_of(alpha: Alpha, r: u32) -> Result<[i64; 3]> {
    if alpha.iter().any(|&a| a < 0) || alpha.iter().sum::<i64>() > r as i64 - 2 {
        return Err(Error::Range(format!("{alpha:?} is not in A_{r}")));
    }
    let [a1, a2, a3] = alpha;
    Ok([a2 + a3 + 1, a1 + a3 + 1, a1 + a2 + 1])
}

/// `c ↦ α` with `αᵢ = (cⱼ + c_k − cᵢ − 1)/2`.
pub fn alpha_of(colors: [i64; 3], r: u32) -> Result<Alpha> {
    let [c1, c2, c3] = colors;
    let sum = c1 + c2 + c3;
    let out = || Error::Range(format!("{colors:?} is not an admissible theta coloring at r={r}"));
    if colors.iter().any(|&c| c < 1 || c > r as i64 - 1) || sum % 2 == 0 || sum >= 2 * r as i64 {
        return Err(out());
    }
    let alpha = [(c2 + c3 - c1 - 1) / 2, (c1 + c3 - c2 - 1) / 2, (c1 + c2 - c3 - 1) / 2];
    if alpha.iter().any(|&a| a < 0) {
        return Err(out());
    }
    Ok(alpha)
}

/// Sparse Hermitian operator on `A_r`, stored per offset.
#[derive(Debug, Clone)]
pub struct G2Operator {
    pub basis: P3Basis,
    pub curve: G2Curve,
    pub form: Form,
    diagonals: BTreeMap<Alpha, Vec<Complex64>>,
}

impl G2Operator {
    fn new(basis: P3Basis, curve: G2Curve, form: Form) -> Self {
        Self { basis, curve, form, diagonals: BTreeMap::new() }
    }

    /// Operator from stored offsets, each diagonal in basis order.
    pub fn from_diagonals(
        r: u32,
        curve: G2Curve,
        form: Form,
        diagonals: BTreeMap<Alpha, Vec<Complex64>>,
    ) -> Result<Self> {
        let basis = P3Basis::new(r)?;
        if let Some((mu, d)) = diagonals.iter().find(|(_, d)| d.len() != basis.dim()) {
            return Err(Error::Range(format!("offset {mu:?} has {} entries, basis has {}", d.len(), basis.dim())));
        }
        Ok(Self { basis, curve, form, diagonals })
    }

    pub fn level(&self) -> u32 {
        self.basis.r
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn offsets(&self) -> impl Iterator<Item = &Alpha> {
        self.diagonals.keys()
    }

    /// Entries `F(α, α+μ)` in basis order; zero where `α+μ ∉ A_r`.
    pub fn diagonal(&self, mu: Alpha) -> Option<&[Complex64]> {
        self.diagonals.get(&mu).map(Vec::as_slice)
    }

    pub fn entry(&self, alpha: Alpha, mu: Alpha) -> Complex64 {
        match (self.basis.index_of(alpha), self.diagonals.get(&mu)) {
            (Some(i), Some(d)) => d[i],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Fills offset `μ` from `f` and `−μ` by conjugate transposition.
    fn fill_pair(&mut self, mu: Alpha, f: impl Fn(Alpha) -> f64) {
        let n = self.dim();
        let mut plus = vec![Complex64::new(0.0, 0.0); n];
        let mut minus = plus.clone();
        for (i, &alpha) in self.basis.alphas.iter().enumerate() {
            if let Some(j) = self.basis.index_of(add(alpha, mu)) {
                let v = Complex64::new(f(alpha), 0.0);
                plus[i] = v;
                minus[j] = v.conj();
            }
        }
        self.diagonals.insert(mu, plus);
        self.diagonals.insert(neg(mu), minus);
    }

    /// Fills offset `μ` alone; the caller is responsible for `−μ`.
    fn fill_one(&mut self, mu: Alpha, f: impl Fn(Alpha) -> f64) {
        let values = self
            .basis
            .alphas
            .iter()
            .map(|&alpha| match self.basis.index_of(add(alpha, mu)) {
                Some(_) => Complex64::new(f(alpha), 0.0),
                None => Complex64::new(0.0, 0.0),
            })
            .collect();
        self.diagonals.insert(mu, values);
    }

    /// `max |F(α,α+μ) − conj F(α+μ,−μ)|` over all stored entries.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for (&mu, values) in &self.diagonals {
            for (i, &v) in values.iter().enumerate() {
                let alpha = self.basis.alpha(i);
                let back = self.entry(add(alpha, mu), neg(mu));
                worst = worst.max((v - back.conj()).norm());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (&mu, values) in &self.diagonals {
            for (i, &v) in values.iter().enumerate() {
                if let Some(j) = self.basis.index_of(add(self.basis.alpha(i), mu)) {
                    // Row j, column i: F(α,α+μ) is the coefficient of φ_{α+μ} in Tφ_α.
                    m[(j, i)] += v;
                }
            }
        }
        m
    }

    /// Sorted eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let dense = self.to_dense();
        let herm = (&dense + dense.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

fn br(x: i64, r: u32) -> f64 {
    bracket(x, r)
}

/// `num/den` with a vanishing numerator winning over a vanishing denominator.
fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Diagonal curve `γ`: `−2cos(π(α₁+α₃)/r)` as printed, `−2cos(πc₂/r)` corrected.
pub fn op_gamma_g2(r: u32, form: Form) -> Result<G2Operator> {
    let basis = P3Basis::new(r)?;
    let mut op = G2Operator::new(basis, G2Curve::Gamma, form);
    let shift = match form {
        Form::Printed => 0,
        Form::Corrected => 1,
    };
    op.fill_one([0, 0, 0], |[a1, _, a3]| -2.0 * (PI * (a1 + a3 + shift) as f64 / r as f64).cos());
    Ok(op)
}

fn delta_diagonal([a1, a2, a3]: Alpha, r: u32) -> f64 {
    let b = |x| br(x, r);
    let s = a1 + a2 + a3;
    -2.0 * (PI * (2 * a1 + 2 * a2 + 1) as f64 / r as f64).cos()
        - 4.0 * ratio(b(a2).powi(2) * b(a3 + 1).powi(2), b(a1 + a3 + 1) * b(a1 + a3 + 2))
        - 4.0 * ratio(b(s + 1).powi(2) * b(a1).powi(2), b(a1 + a3) * b(a1 + a3 + 1))
}

fn delta_off_printed([a1, a2, a3]: Alpha, r: u32) -> f64 {
    let b = |x| br(x, r);
    let s = a1 + a2 + a3;
    let num = b(s + 2) * b(a3) * b(a2) * b(a1) * b(a1 + 1);
    let den = (b(a1 + a3 + 2) * b(a1 + a3 + 3)).powi(2);
    4.0 * ratio(num, den).max(0.0).sqrt()
}

fn delta_off_corrected([a1, a2, a3]: Alpha, r: u32) -> f64 {
    let b = |x| br(x, r);
    let s = a1 + a2 + a3;
    let num = b(a2) * b(a3 + 1) * b(a1 + 1) * b(s + 2);
    let den = b(a1 + a3 + 2) * (b(a1 + a3 + 1) * b(a1 + a3 + 3)).sqrt();
    -4.0 * ratio(num, den)
}

/// Curve `δ`, offsets `0, ±(1,−1,1)`.
pub fn op_delta_g2(r: u32, form: Form) -> Result<G2Operator> {
    let basis = P3Basis::new(r)?;
    let mut op = G2Operator::new(basis, G2Curve::Delta, form);
    op.fill_one([0, 0, 0], |alpha| delta_diagonal(alpha, r));
    match form {
        Form::Printed => op.fill_pair(NU_DELTA, |alpha| delta_off_printed(alpha, r)),
        Form::Corrected => op.fill_pair(NU_DELTA, |alpha| delta_off_corrected(alpha, r)),
    }
    Ok(op)
}

fn eta_plus_mu([a1, a2, a3]: Alpha, r: u32) -> f64 {
    let b = |x| br(x, r);
    let den = b(a1 + a3 + 1) * b(a1 + a3 + 2) * b(a2 + a3 + 1) * b(a2 + a3 + 2);
    ratio(b(a1 + a2 + a3 + 2) * b(a3 + 1), den.sqrt())
}

fn eta_minus_mu([a1, a2, a3]: Alpha, r: u32) -> f64 {
    let b = |x| br(x, r);
    let den = b(a1 + a3) * b(a1 + a3 + 1) * b(a2 + a3) * b(a2 + a3 + 1);
    ratio(b(a1 + a2 + a3 + 1) * b(a3), den.sqrt())
}

fn eta_plus_nu([a1, a2, a3]: Alpha, r: u32) -> f64 {
    let b = |x| br(x, r);
    let den = b(a1 + a3 + 1) * b(a1 + a3 + 2) * b(a2 + a3) * b(a2 + a3 + 1);
    -ratio(b(a2) * b(a1 + 1), den.sqrt())
}

fn eta_minus_nu_printed([a1, a2, a3]: Alpha, r: u32) -> f64 {
    let b = |x| br(x, r);
    let den = b(a1 + a3) * b(a1 + a3 + 1) * b(a1 + a2 + 1) * b(a1 + a2 + 2);
    // On the face |α| = r−2 this denominator vanishes with a nonzero numerator;
    // the entry is truncated to zero there like the other boundary terms.
    if den == 0.0 {
        return 0.0;
    }
    -ratio(b(a1) * b(a2 + 1), den.sqrt())
}

/// Curve `η`, offsets `±(0,0,1)`, `±(1,−1,0)`.
///
/// The printed form stores all four families as given, so it is Hermitian only
/// where they agree; the corrected form completes `−ν` from `+ν`.
pub fn op_eta_g2(r: u32, form: Form) -> Result<G2Operator> {
    let basis = P3Basis::new(r)?;
    let mut op = G2Operator::new(basis, G2Curve::Eta, form);
    match form {
        Form::Printed => {
            op.fill_one(MU_ETA, |alpha| eta_plus_mu(alpha, r));
            op.fill_one(neg(MU_ETA), |alpha| eta_minus_mu(alpha, r));
            op.fill_one(NU_ETA, |alpha| eta_plus_nu(alpha, r));
            op.fill_one(neg(NU_ETA), |alpha| eta_minus_nu_printed(alpha, r));
        }
        Form::Corrected => {
            op.fill_pair(MU_ETA, |alpha| eta_plus_mu(alpha, r));
            op.fill_pair(NU_ETA, |alpha| eta_plus_nu(alpha, r));
        }
    }
    Ok(op)
}

pub fn op_g2(curve: G2Curve, r: u32, form: Form) -> Result<G2Operator> {
    match curve {
        G2Curve::Gamma => op_gamma_g2(r, form),
        G2Curve::Delta => op_delta_g2(r, form),
        G2Curve::Eta => op_eta_g2(r, form),
    }
}

fn check_interior(tau: [f64; 3]) -> Result<()> {
    let sum: f64 = tau.iter().sum();
    let ok = tau.iter().all(|&t| t > 0.0 && t < PI)
        && sum < 2.0 * PI
        && (0..3).all(|i| tau[i] < tau[(i + 1) % 3] + tau[(i + 2) % 3]);
    if ok {
        Ok(())
    } else {
        Err(Error::Pole(format!("τ = {tau:?} is on or outside the boundary of the moment polytope")))
    }
}

/// Fourier coefficient of `e^{iμ·θ}` in the leading symbol, in angle variables
/// `τᵢ = παᵢ/r`. Zero for offsets outside the operator's set.
pub fn symbol_coefficient(curve: G2Curve, form: Form, tau: [f64; 3], mu: Alpha) -> Result<f64> {
    check_interior(tau)?;
    let [t1, t2, t3] = tau;
    let s = t1 + t2 + t3;
    let (s1, s2, s3, ss) = (t1.sin(), t2.sin(), t3.sin(), s.sin());
    let s13 = (t1 + t3).sin();
    let s23 = (t2 + t3).sin();
    let coefficient = match curve {
        G2Curve::Gamma => match (mu, form) {
            ([0, 0, 0], _) => -2.0 * (t1 + t3).cos(),
            _ => 0.0,
        },
        G2Curve::Delta => {
            let well = (s2 * s2 * s3 * s3 + s1 * s1 * ss * ss) / (s13 * s13);
            let hop = -4.0 * s1 * s2 * s3 * ss / (s13 * s13);
            match (mu, form) {
                ([0, 0, 0], Form::Printed) => 2.0 * (t1 + t2).cos() + 4.0 * well,
                ([0, 0, 0], Form::Corrected) => -2.0 * (2.0 * (t1 + t2)).cos() - 4.0 * well,
                (m, _) if m == NU_DELTA || m == neg(NU_DELTA) => hop,
                _ => 0.0,
            }
        }
        G2Curve::Eta => match mu {
            m if m == MU_ETA || m == neg(MU_ETA) => ss * s3 / (s13 * s23),
            m if m == NU_ETA || m == neg(NU_ETA) => -s1 * s2 / (s13 * s23),
            _ => 0.0,
        },
    };
    Ok(coefficient)
}

/// Leading symbol at `(τ, θ)`. `Form::Printed` evaluates the published `f^δ₀`
/// and `f^η₀` term by term.
pub fn symbol_g2(curve: G2Curve, form: Form, tau: [f64; 3], theta: [f64; 3]) -> Result<f64> {
    check_interior(tau)?;
    let [t1, t2, t3] = tau;
    let [th1, th2, th3] = theta;
    let s = t1 + t2 + t3;
    let s13 = (t1 + t3).sin();
    let s23 = (t2 + t3).sin();
    let value = match curve {
        G2Curve::Gamma => -2.0 * (t1 + t3).cos(),
        G2Curve::Delta => {
            let well = (t2.sin().powi(2) * t3.sin().powi(2) + t1.sin().powi(2) * s.sin().powi(2))
                / s13.powi(2);
            let base = match form {
                Form::Printed => 2.0 * (t1 + t2).cos() + 4.0 * well,
                Form::Corrected => -2.0 * (2.0 * (t1 + t2)).cos() - 4.0 * well,
            };
            base - 8.0 * t1.sin() * t2.sin() * t3.sin() * s.sin() / s13.powi(2)
                * (th1 - th2 + th3).cos()
        }
        G2Curve::Eta => {
            2.0 * s.sin() * t3.sin() / (s13 * s23) * th3.cos()
                - 2.0 * t1.sin() * t2.sin() / (s13 * s23) * (th1 - th2).cos()
        }
    };
    Ok(value)
}

/// Reproducing kernel `(r−1)r(r+1)(1 + Σ conj(z′ᵢ)zᵢ)^{r−2}` in the affine chart.
pub fn kernel_p3(z_prime: [Complex64; 3], z: [Complex64; 3], r: u32) -> Complex64 {
    let inner: Complex64 = Complex64::new(1.0, 0.0)
        + z_prime.iter().zip(&z).map(|(a, b)| a.conj() * b).sum::<Complex64>();
    let r = r as f64;
    (r - 1.0) * r * (r + 1.0) * inner.powi(r as i32 - 2)
}

fn in_set(alpha: Alpha, r: u32) -> bool {
    alpha.iter().all(|&a| a >= 0) && alpha.iter().sum::<i64>() <= r as i64 - 2
}

/// Single entry `F(α, α+μ)` without building the operator; zero off the
/// offset set or outside `A_r`.
pub fn entry_g2(curve: G2Curve, form: Form, r: u32, alpha: Alpha, mu: Alpha) -> f64 {
    if !in_set(alpha, r) || !in_set(add(alpha, mu), r) {
        return 0.0;
    }
    let back = add(alpha, mu);
    match curve {
        G2Curve::Gamma if mu == [0, 0, 0] => {
            let shift = if form == Form::Printed { 0 } else { 1 };
            -2.0 * (PI * (alpha[0] + alpha[2] + shift) as f64 / r as f64).cos()
        }
        G2Curve::Delta if mu == [0, 0, 0] => delta_diagonal(alpha, r),
        G2Curve::Delta if mu == NU_DELTA || mu == neg(NU_DELTA) => {
            let base = if mu == NU_DELTA { alpha } else { back };
            match form {
                Form::Printed => delta_off_printed(base, r),
                Form::Corrected => delta_off_corrected(base, r),
            }
        }
        G2Curve::Eta if mu == MU_ETA => eta_plus_mu(alpha, r),
        G2Curve::Eta if mu == neg(MU_ETA) => match form {
            Form::Printed => eta_minus_mu(alpha, r),
            Form::Corrected => eta_plus_mu(back, r),
        },
        G2Curve::Eta if mu == NU_ETA => eta_plus_nu(alpha, r),
        G2Curve::Eta if mu == neg(NU_ETA) => match form {
            Form::Printed => eta_minus_nu_printed(alpha, r),
            Form::Corrected => eta_plus_nu(back, r),
        },
        _ => 0.0,
    }
}

/// `|F(α, α+μ) − f_μ(πα/r)|` at the lattice point `α` nearest `rτ/π`.
pub fn coefficient_error(curve: G2Curve, form: Form, r: u32, tau: [f64; 3], mu: Alpha) -> Result<f64> {
    let alpha = tau.map(|t| (r as f64 * t / PI).round() as i64);
    if !in_set(alpha, r) || !in_set(add(alpha, mu), r) {
        return Err(Error::Range(format!("{alpha:?} + {mu:?} leaves A_{r}")));
    }
    let exact_tau = alpha.map(|a| PI * a as f64 / r as f64);
    let symbol = symbol_coefficient(curve, form, exact_tau, mu)?;
    Ok((entry_g2(curve, form, r, alpha, mu) - symbol).abs())
}
