use thiserror::Error;

/// Errors raised by operator construction and the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("color {color} outside 1..{max} at level {r}", max = r - 1)]
    ColorRange { color: i64, r: i64 },

    #[error("triple ({0}, {1}, {2}) is not admissible at level {3}")]
    Admissibility(i64, i64, i64, i64),

    #[error("invalid coloring: {0}")]
    InvalidColoring(String),

    #[error("slope ({0}, {1}) is not a primitive vector")]
    InvalidSlope(i64, i64),

    #[error("empty basis")]
    EmptyBasis,

    #[error("negative radicand {value:e} at index {index}")]
    NegativeRadicand { index: i64, value: f64 },

    #[error("point outside the domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge (estimated error {error:e}{at})", at = location.as_deref().map(|s| format!(" at {s}")).unwrap_or_default())]
    Quadrature { error: f64, location: Option<String> },

    #[error("evaluation at a pole: {0}")]
    Pole(String),

    #[error("contour abscissa {c} outside the strip ({lo}, {hi})")]
    Strip { c: f64, lo: f64, hi: f64 },

    #[error("contour truncation failed: {0}")]
    Truncation(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    Hermitian(f64),

    #[error("no eigenvalue within {tol:e} of {target}")]
    EigenvalueMissing { target: f64, tol: f64 },

    #[error("level sets are tangent (bracket {0:e})")]
    Tangency(f64),

    #[error("empty level set")]
    EmptyLevelSet,

    #[error("index out of range: {0}")]
    Range(String),
}

pub type Result<T> = std::result::Result<T, Error>;
