//! Curve operators on the once-punctured torus.
//!
//! The basis is indexed by colors `m` with `a/2 < m < r − a/2`, stored at
//! position `n = m − (a+1)/2`. The meridian `γ` is diagonal, the longitude `δ`
//! tridiagonal, and every other slope is produced by walking the Farey graph
//! with the skein product rule.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::banded::BandedOperator;
use crate::error::{Error, Result};
use crate::qnum::{bracket, QuantumParams};

/// Radicands this far below zero are boundary roundoff and clamp to zero.
const RADICAND_SLACK: f64 = 1e-12;

/// Basis of the punctured-torus space with marked color `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusBasis {
    pub r: u32,
    pub a: u32,
}

impl TorusBasis {
    pub fn new(r: u32, a: u32) -> Result<Self> {
        if a % 2 == 0 || a == 0 || a >= r {
            return Err(Error::InvalidColoring(format!(
                "torus color a={a} must be odd with 1 <= a < r={r}"
            )));
        }
        Ok(Self { r, a })
    }

    pub fn dim(&self) -> usize {
        (self.r - self.a) as usize
    }

    /// Color label of basis position `n`.
    pub fn label(&self, n: usize) -> i64 {
        n as i64 + (self.a as i64 + 1) / 2
    }

    pub fn labels(&self) -> Vec<i64> {
        (0..self.dim()).map(|n| self.label(n)).collect()
    }
}

/// A primitive vector `(p, q)` naming a simple closed curve, normalized to
/// `q > 0`, or `(1, 0)` for the meridian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slope {
    pub p: i64,
    pub q: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Slope {
    pub const MERIDIAN: Slope = Slope { p: 1, q: 0 };
    pub const LONGITUDE: Slope = Slope { p: 0, q: 1 };
    pub const DIAGONAL: Slope = Slope { p: 1, q: 1 };

    pub fn new(p: i64, q: i64) -> Result<Self> {
        if gcd(p, q) != 1 {
            return Err(Error::InvalidSlope(p, q));
        }
        Ok(if q < 0 || (q == 0 && p < 0) { Slope { p: -p, q: -q } } else { Slope { p, q } })
    }

    /// Intersection pairing `p₁q₂ − p₂q₁` of the chosen representatives.
    pub fn det(self, other: Slope) -> i64 {
        self.p * other.q - other.p * self.q
    }

    fn add(self, other: Slope, sign: i64) -> Result<Slope> {
        Slope::new(self.p + sign * other.p, self.q + sign * other.q)
    }

    /// Slopes obtained by resolving the single crossing of two Farey-adjacent
    /// curves: `(s₁ + d·s₂, s₁ − d·s₂)` with `d = det(s₁, s₂) = ±1`. They carry
    /// the coefficients `A` and `A⁻¹` of the skein product.
    pub fn smoothings(self, other: Slope) -> Result<(Slope, Slope)> {
        let d = self.det(other);
        if d.abs() != 1 {
            return Err(Error::InvalidSlope(other.p, other.q));
        }
        Ok((self.add(other, d)?, self.add(other, -d)?))
    }

    fn is_base(self) -> bool {
        self == Self::MERIDIAN || self == Self::LONGITUDE || self == Self::DIAGONAL
    }

    /// Farey parents `(left, right)` with `self = left + right`, and the mirror
    /// vertex `left − right` of the triangle below. `None` for base slopes.
    pub fn farey_parents(self) -> Option<(Slope, Slope, Slope)> {
        if self.is_base() {
            return None;
        }
        let (mut left, mut right) = if self.p > 0 { ((0, 1), (1, 0)) } else { ((-1, 0), (0, 1)) };
        loop {
            let mid = (left.0 + right.0, left.1 + right.1);
            if mid == (self.p, self.q) {
                let l = Slope { p: left.0, q: left.1 };
                let r = Slope { p: right.0, q: right.1 };
                let mirror = l.add(r, -1).expect("Farey neighbours are unimodular");
                let norm = |s: Slope| Slope::new(s.p, s.q).expect("primitive");
                return Some((norm(l), norm(r), mirror));
            }
            // Compare p/q with mid.0/mid.1 (denominators are positive).
            if self.p * mid.1 < mid.0 * self.q {
                right = mid;
            } else {
                left = mid;
            }
        }
    }

    /// Depth in the Farey graph, counting the triangle `{∞, 0, 1}` as depth 0.
    pub fn depth(self) -> usize {
        match self.farey_parents() {
            None => 0,
            Some((l, r, _)) => 1 + l.depth().max(r.depth()),
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.p, self.q)
    }
}

impl FromStr for Slope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let parse = |t: &str| t.parse::<i64>().map_err(|_| Error::Range(format!("bad slope '{s}'")));
        match parts.as_slice() {
            [p, q] => Slope::new(parse(p)?, parse(q)?),
            _ => Err(Error::Range(format!("slope must be 'p,q', got '{s}'"))),
        }
    }
}

/// Every slope of depth at most `max_depth`, with every Farey edge among them.
pub fn farey_graph(max_depth: usize) -> (Vec<Slope>, Vec<(Slope, Slope)>) {
    let base = [Slope::MERIDIAN, Slope::LONGITUDE, Slope::DIAGONAL];
    let mut slopes = base.to_vec();
    let mut edges = vec![(base[0], base[1]), (base[1], base[2]), (base[2], base[0])];
    // Frontier edges with the opposite vertex of the triangle already built.
    let mut frontier = vec![(base[0], base[1], base[2]), (base[1], base[2], base[0]), (base[2], base[0], base[1])];
    for _ in 0..max_depth {
        let mut next = Vec::new();
        for (u, v, w) in frontier {
            let plus = u.add(v, 1).expect("adjacent");
            let child = if plus == w { u.add(v, -1).expect("adjacent") } else { plus };
            slopes.push(child);
            edges.push((u, child));
            edges.push((child, v));
            next.push((u, child, v));
            next.push((child, v, u));
        }
        frontier = next;
    }
    (slopes, edges)
}

/// `−2cos(πm/r)` on the diagonal.
pub fn op_gamma_torus(r: u32, a: u32) -> Result<BandedOperator> {
    let basis = TorusBasis::new(r, a)?;
    let mut op = BandedOperator::zeros(basis.dim(), 0);
    for n in 0..basis.dim() {
        let m = basis.label(n);
        op.set(n, 0, Complex64::new(-2.0 * (PI * m as f64 / r as f64).cos(), 0.0));
    }
    Ok(op.with_meta("torus", "1,0", r))
}

/// Square of the longitude coefficient `u_m`, continued to complex labels.
pub fn delta_radicand(m: Complex64, r: u32, a: u32) -> Complex64 {
    let s = |x: Complex64| (x * (PI / r as f64)).sin();
    let ha = Complex64::new((a as f64 - 1.0) / 2.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    s(m + ha) * s(m - ha - one) / (s(m) * s(m - one))
}

/// `u_m = −√(⟨m+(a−1)/2⟩⟨m−(a+1)/2⟩ / ⟨m⟩⟨m−1⟩)`.
fn delta_coefficient(m: i64, r: u32, a: u32) -> Result<f64> {
    let ha = (a as i64 - 1) / 2;
    let num = bracket(m + ha, r) * bracket(m - ha - 1, r);
    let den = bracket(m, r) * bracket(m - 1, r);
    let rad = num / den;
    if rad < -RADICAND_SLACK {
        return Err(Error::NegativeRadicand { index: m, value: rad });
    }
    Ok(-rad.max(0.0).sqrt())
}

/// Tridiagonal longitude operator `φ_m ↦ u_{m+1}φ_{m+1} + u_m φ_{m−1}`.
pub fn op_delta_torus(r: u32, a: u32) -> Result<BandedOperator> {
    let basis = TorusBasis::new(r, a)?;
    let dim = basis.dim();
    let mut op = BandedOperator::zeros(dim, 1);
    for n in 0..dim.saturating_sub(1) {
        let u = Complex64::new(delta_coefficient(basis.label(n) + 1, r, a)?, 0.0);
        op.set(n, 1, u);
        op.set(n + 1, -1, u);
    }
    Ok(op.with_meta("torus", "0,1", r))
}

/// Diagonal of the Dehn twist along the meridian, `exp(iπ(m²−1)/2r)`.
pub fn dehn_twist_torus(r: u32, a: u32) -> Result<Vec<Complex64>> {
    let basis = TorusBasis::new(r, a)?;
    let q = QuantumParams::new(r);
    // exp(iπ(m²−1)/2r) = (−A)^{m²−1}
    Ok(basis
        .labels()
        .into_iter()
        .map(|m| {
            let k = m * m - 1;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            q.zeta_pow(k) * sign
        })
        .collect())
}

/// Builds and memoizes slope operators for one `(r, a)`.
#[derive(Debug, Clone)]
pub struct TorusOperators {
    pub basis: TorusBasis,
    params: QuantumParams,
    cache: HashMap<Slope, BandedOperator>,
}

impl TorusOperators {
    pub fn new(r: u32, a: u32) -> Result<Self> {
        let basis = TorusBasis::new(r, a)?;
        let mut cache = HashMap::new();
        let gamma = op_gamma_torus(r, a)?;
        let delta = op_delta_torus(r, a)?;
        let twist = dehn_twist_torus(r, a)?;
        let diag = delta.conjugate_by_diagonal(&twist).with_meta("torus", "1,1", r);
        cache.insert(Slope::MERIDIAN, gamma);
        cache.insert(Slope::LONGITUDE, delta);
        cache.insert(Slope::DIAGONAL, diag);
        Ok(Self { basis, params: QuantumParams::new(r), cache })
    }

    pub fn params(&self) -> &QuantumParams {
        &self.params
    }

    /// Operator of `slope`, from `A⁻¹T₁T₂ − A⁻²T₃` over the Farey parents.
    pub fn slope(&mut self, slope: Slope) -> Result<BandedOperator> {
        if let Some(op) = self.cache.get(&slope) {
            return Ok(op.clone());
        }
        let (left, right, mirror) = slope.farey_parents().expect("base slopes are cached");
        let tl = self.slope(left)?;
        let tr = self.slope(right)?;
        let tm = self.slope(mirror)?;
        let a_inv = self.params.zeta_pow(-1);
        let a_inv2 = self.params.zeta_pow(-2);
        let combine = |x: &BandedOperator, y: &BandedOperator| {
            BandedOperator::linear_combination(&[(a_inv, &x.compose(y)), (-a_inv2, &tm)])
        };
        let lr = combine(&tl, &tr);
        let rl = combine(&tr, &tl);
        let tol = 1e-10 * lr.max_abs().max(1.0);
        // Only one stacking order of the parents yields a Hermitian operator.
        let chosen = if lr.hermitian_deviation() <= rl.hermitian_deviation() { lr } else { rl };
        let dev = chosen.hermitian_deviation();
        if dev > tol {
            return Err(Error::Hermitian(dev));
        }
        let band = slope.q as usize;
        let mut op = BandedOperator::zeros(chosen.dim(), band);
        for mu in -(band as i64)..=band as i64 {
            for n in op.diagonal_range(mu) {
                op.set(n, mu, chosen.get(n, mu));
            }
        }
        let op = op.with_meta("torus", &slope.to_string(), self.basis.r);
        self.cache.insert(slope, op.clone());
        Ok(op)
    }
}

/// Operator of an arbitrary slope at level `r` with marked color `a`.
pub fn op_slope_torus(slope: Slope, r: u32, a: u32) -> Result<BandedOperator> {
    TorusOperators::new(r, a)?.slope(slope)
}

/// Amplitude `√(sin(τ+α/2)sin(τ−α/2))/sin τ` of the longitude trace function.
pub fn longitude_amplitude(tau: f64, alpha: f64) -> f64 {
    ((tau + alpha / 2.0).sin() * (tau - alpha / 2.0).sin()).max(0.0).sqrt() / tau.sin()
}

/// Classical trace function `−tr ρ(curve)` at moduli point `(τ, θ)` with
/// boundary holonomy angle `α`.
pub fn trace_fn_torus(slope: Slope, alpha: f64, tau: f64, theta: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < PI) && alpha != 0.0 {
        return Err(Error::Domain(format!("holonomy angle {alpha} outside [0, π)")));
    }
    if !(tau > alpha / 2.0 && tau < PI - alpha / 2.0) {
        return Err(Error::Domain(format!("τ={tau} outside ({}, {})", alpha / 2.0, PI - alpha / 2.0)));
    }
    fn eval(s: Slope, alpha: f64, tau: f64, theta: f64) -> f64 {
        let amp = longitude_amplitude(tau, alpha);
        if s == Slope::MERIDIAN {
            -2.0 * tau.cos()
        } else if s == Slope::LONGITUDE {
            -2.0 * amp * theta.cos()
        } else if s == Slope::DIAGONAL {
            -2.0 * amp * (theta + tau).cos()
        } else {
            let (l, r, m) = s.farey_parents().expect("non-base slope");
            -eval(l, alpha, tau, theta) * eval(r, alpha, tau, theta) - eval(m, alpha, tau, theta)
        }
    }
    Ok(eval(slope, alpha, tau, theta))
}
