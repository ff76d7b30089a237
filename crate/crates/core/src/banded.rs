//! Banded Hermitian matrices stored by diagonals.
//!
//! Entry `F(n, μ)` is the coefficient of basis vector `n + μ` in the image of
//! basis vector `n`; as an ordinary matrix this is row `n + μ`, column `n`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Where an operator came from; carried along for reporting.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OperatorMeta {
    pub surface: String,
    pub curve: String,
    pub level: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandedOperator {
    dim: usize,
    band: usize,
    // diagonals[μ + band][n]; slots with n + μ outside 0..dim are unused zeros.
    diagonals: Vec<Vec<Complex64>>,
    pub meta: OperatorMeta,
}

impl BandedOperator {
    pub fn zeros(dim: usize, band: usize) -> Self {
        Self {
            dim,
            band,
            diagonals: vec![vec![Complex64::new(0.0, 0.0); dim]; 2 * band + 1],
            meta: OperatorMeta::default(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim, 0);
        op.diagonals[0].iter_mut().for_each(|z| *z = Complex64::new(1.0, 0.0));
        op
    }

    pub fn with_meta(mut self, surface: &str, curve: &str, level: u32) -> Self {
        self.meta = OperatorMeta { surface: surface.into(), curve: curve.into(), level };
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Declared bandwidth `k`: storage covers `|μ| ≤ k`.
    pub fn band(&self) -> usize {
        self.band
    }

    fn in_range(&self, n: usize, mu: i64) -> bool {
        let m = n as i64 + mu;
        n < self.dim && m >= 0 && (m as usize) < self.dim && mu.unsigned_abs() as usize <= self.band
    }

    /// `F(n, μ)`; zero outside the band or the matrix.
    pub fn get(&self, n: usize, mu: i64) -> Complex64 {
        if self.in_range(n, mu) {
            self.diagonals[(mu + self.band as i64) as usize][n]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Sets `F(n, μ)`.
    ///
    /// # Panics
    /// If `(n, μ)` lies outside the matrix or the declared band.
    pub fn set(&mut self, n: usize, mu: i64, value: Complex64) {
        assert!(self.in_range(n, mu), "entry ({n}, {mu}) outside {}x{} band {}", self.dim, self.dim, self.band);
        self.diagonals[(mu + self.band as i64) as usize][n] = value;
    }

    /// Valid `n` for diagonal `μ`.
    pub fn diagonal_range(&self, mu: i64) -> std::ops::Range<usize> {
        let lo = (-mu).max(0) as usize;
        let hi = (self.dim as i64 - mu.max(0)).max(lo as i64) as usize;
        lo..hi
    }

    /// Entries of diagonal `μ` in increasing `n`.
    pub fn diagonal(&self, mu: i64) -> Vec<Complex64> {
        self.diagonal_range(mu).map(|n| self.get(n, mu)).collect()
    }

    /// Largest `|μ|` carrying an entry of modulus above `tol`.
    pub fn effective_band(&self, tol: f64) -> usize {
        (0..=self.band)
            .rev()
            .find(|&k| {
                let k = k as i64;
                self.diagonal(k).iter().chain(self.diagonal(-k).iter()).any(|z| z.norm() > tol)
            })
            .unwrap_or(0)
    }

    /// Dense matrix with `M[(n + μ, n)] = F(n, μ)`.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for mu in -(self.band as i64)..=self.band as i64 {
            for n in self.diagonal_range(mu) {
                m[((n as i64 + mu) as usize, n)] = self.get(n, mu);
            }
        }
        m
    }

    /// Reads the band `|μ| ≤ band` out of a dense matrix; entries outside it are dropped.
    pub fn from_dense(m: &DMatrix<Complex64>, band: usize) -> Self {
        let dim = m.nrows();
        let mut op = Self::zeros(dim, band);
        for mu in -(band as i64)..=band as i64 {
            for n in op.diagonal_range(mu) {
                op.set(n, mu, m[((n as i64 + mu) as usize, n)]);
            }
        }
        op
    }

    /// Operator composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let band = self.band + other.band;
        let mut out = Self::zeros(self.dim, band);
        for mu2 in -(other.band as i64)..=other.band as i64 {
            for n in other.diagonal_range(mu2) {
                let b = other.get(n, mu2);
                if b == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let mid = (n as i64 + mu2) as usize;
                for mu1 in -(self.band as i64)..=self.band as i64 {
                    if self.in_range(mid, mu1) {
                        let idx = (mu1 + mu2 + band as i64) as usize;
                        out.diagonals[idx][n] += b * self.get(mid, mu1);
                    }
                }
            }
        }
        out
    }

    /// `Σ cᵢ·Aᵢ` over operators of equal dimension.
    pub fn linear_combination(terms: &[(Complex64, &Self)]) -> Self {
        let dim = terms[0].1.dim;
        let band = terms.iter().map(|t| t.1.band).max().unwrap_or(0);
        let mut out = Self::zeros(dim, band);
        for (c, op) in terms {
            assert_eq!(op.dim, dim, "dimension mismatch");
            for mu in -(op.band as i64)..=op.band as i64 {
                for n in op.diagonal_range(mu) {
                    out.diagonals[(mu + band as i64) as usize][n] += *c * op.get(n, mu);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim, self.band);
        out.meta = self.meta.clone();
        for mu in -(self.band as i64)..=self.band as i64 {
            for n in self.diagonal_range(mu) {
                let m = (n as i64 + mu) as usize;
                out.set(m, -mu, self.get(n, mu).conj());
            }
        }
        out
    }

    /// Conjugation `U·self·U⁻¹` by a diagonal unitary given by its entries.
    pub fn conjugate_by_diagonal(&self, u: &[Complex64]) -> Self {
        assert_eq!(u.len(), self.dim, "dimension mismatch");
        let mut out = self.clone();
        for mu in -(self.band as i64)..=self.band as i64 {
            for n in self.diagonal_range(mu) {
                let m = (n as i64 + mu) as usize;
                out.set(n, mu, u[m] * self.get(n, mu) * u[n].conj());
            }
        }
        out
    }

    /// Largest `|F(n, μ) − G(n, μ)|` over the union of both bands.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let band = self.band.max(other.band) as i64;
        let mut worst: f64 = 0.0;
        for mu in -band..=band {
            let lo = (-mu).max(0) as usize;
            let hi = (self.dim as i64 - mu.max(0)).max(0) as usize;
            for n in lo..hi.max(lo) {
                worst = worst.max((self.get(n, mu) - other.get(n, mu)).norm());
            }
        }
        worst
    }

    /// Largest `|F(n, μ) − conj F(n + μ, −μ)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.diagonals.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Sum of the diagonal.
    pub fn trace(&self) -> Complex64 {
        self.diagonal(0).iter().sum()
    }
}
