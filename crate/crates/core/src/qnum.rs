//! Quantum numbers at the root `A = −exp(iπ/2r)` and the normalization
//! constants of the colored-graph basis vectors.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Level-dependent constants shared by every operator builder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumParams {
    pub r: u32,
    /// The root `A = −exp(iπ/2r)`.
    pub zeta: Complex64,
    /// `π/r`, the step of the moduli coordinate per color.
    pub hbar_pi: f64,
}

impl QuantumParams {
    pub fn new(r: u32) -> Self {
        assert!(r >= 2, "level must be at least 2");
        Self {
            r,
            zeta: -Complex64::from_polar(1.0, PI / (2.0 * r as f64)),
            hbar_pi: PI / r as f64,
        }
    }

    /// `A^k` for any integer `k`, reduced modulo the order `4r`.
    pub fn zeta_pow(&self, k: i64) -> Complex64 {
        let order = 4 * self.r as i64;
        let k = k.rem_euclid(order);
        // A^k = (−1)^k exp(iπk/2r)
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::from_polar(sign, PI * k as f64 / (2.0 * self.r as f64))
    }
}

/// `[n] = sin(πn/r)/sin(π/r)`.
pub fn quantum_integer(n: i64, r: u32) -> f64 {
    bracket(n, r) / bracket(1, r)
}

/// `⟨n⟩ = sin(πn/r)`, exact zero at multiples of `r`.
pub fn bracket(n: i64, r: u32) -> f64 {
    let r = r as i64;
    let k = n.rem_euclid(2 * r);
    if k % r == 0 {
        return 0.0;
    }
    // Reduce to (0, r/2] for accuracy.
    let (k, sign) = if k > r { (k - r, -1.0) } else { (k, 1.0) };
    let k = if 2 * k > r { r - k } else { k };
    sign * (PI * k as f64 / r as f64).sin()
}

/// `⟨n⟩! = ⟨1⟩⟨2⟩⋯⟨n⟩`, with `⟨0⟩! = 1`.
pub fn bracket_factorial(n: i64, r: u32) -> Result<f64> {
    if n < 0 {
        return Err(Error::Range(format!("bracket factorial of negative {n}")));
    }
    Ok((1..=n).map(|k| bracket(k, r)).product())
}

fn check_color(c: i64, r: u32) -> Result<()> {
    if c < 1 || c > r as i64 - 1 {
        Err(Error::ColorRange { color: c, r: r as i64 })
    } else {
        Ok(())
    }
}

/// Parity, triangle and level conditions on the colors around a vertex.
pub fn admissible_triple(a: i64, b: i64, c: i64, r: u32) -> Result<bool> {
    for x in [a, b, c] {
        check_color(x, r)?;
    }
    let s = a + b + c;
    Ok(s % 2 == 1 && a < b + c && b < a + c && c < a + b && s < 2 * r as i64)
}

/// Vertex weight `⟨a,b,c⟩` of an admissible triple.
pub fn vertex_weight(a: i64, b: i64, c: i64, r: u32) -> Result<f64> {
    if !admissible_triple(a, b, c, r)? {
        return Err(Error::Admissibility(a, b, c, r as i64));
    }
    let i = (b + c - a - 1) / 2;
    let j = (a + c - b - 1) / 2;
    let k = (a + b - c - 1) / 2;
    let f = |n| bracket_factorial(n, r);
    Ok(f(i + j + k + 1)? * f(i)? * f(j)? * f(k)? / (f(j + k)? * f(i + k)? * f(i + j)?))
}

/// Squared norm of a colored-graph vector,
/// `(2/r)^{χ/2} Π_v ⟨c_v⟩ / Π_e ⟨c_e⟩`, from its vertex triples, the colors
/// of its internal edges and its Euler characteristic.
pub fn psi_norm_squared(
    vertex_triples: &[(i64, i64, i64)],
    internal_edges: &[i64],
    chi: i64,
    r: u32,
) -> Result<f64> {
    let mut value = (2.0 / r as f64).powf(chi as f64 / 2.0);
    for &(a, b, c) in vertex_triples {
        value *= vertex_weight(a, b, c, r)?;
    }
    for &e in internal_edges {
        check_color(e, r)?;
        value /= bracket(e, r);
    }
    Ok(value)
}
