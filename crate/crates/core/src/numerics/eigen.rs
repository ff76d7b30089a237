use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::banded::BandedOperator;
use crate::error::{Error, Result};

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
///
/// Each eigenvector is rotated so that its largest-modulus component (first
/// such index on ties) is real and positive.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl Eigenpairs {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k).iter().copied().collect()
    }

    /// Index of the eigenvalue closest to `target`, if within `tol`.
    pub fn find(&self, target: f64, tol: f64) -> Result<usize> {
        let (k, d) = self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| (k, (v - target).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or(Error::EmptyBasis)?;
        if d <= tol {
            Ok(k)
        } else {
            Err(Error::EigenvalueMissing { target, tol })
        }
    }
}

/// Full eigendecomposition of a Hermitian banded operator.
pub fn eigensolve(op: &BandedOperator) -> Result<Eigenpairs> {
    if op.dim() == 0 {
        return Err(Error::EmptyBasis);
    }
    let dev = op.hermitian_deviation();
    if dev > 1e-10 * op.max_abs().max(1.0) {
        return Err(Error::Hermitian(dev));
    }
    let dense = op.to_dense();
    // Symmetrize exactly so roundoff-level asymmetry cannot leak into the solver.
    let herm = (&dense + dense.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let dim = op.dim();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut vectors = DMatrix::zeros(dim, dim);
    let mut values = Vec::with_capacity(dim);
    for (col, &k) in order.iter().enumerate() {
        values.push(eig.eigenvalues[k]);
        let v = eig.eigenvectors.column(k);
        let top = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let pivot = v.iter().position(|z| z.norm() >= top * (1.0 - 1e-9)).unwrap_or(0);
        let phase = v[pivot].conj() / v[pivot].norm();
        for i in 0..dim {
            vectors[(i, col)] = v[i] * phase;
        }
    }
    Ok(Eigenpairs { values, vectors })
}
