//! Shared numerical kernels: adaptive quadrature in one and two dimensions,
//! the dense Hermitian eigensolver wrapper, scalar root bracketing, and the
//! log-log slope fits used by the convergence checks.

mod eigen;
mod fit;
mod quad;
mod region;
mod roots;

pub use eigen::{eigensolve, Eigenpairs};
pub use fit::{fit_slope, richardson, SlopeFit};
pub use quad::{integrate_1d, integrate_half_line, Estimate, QuadratureSpec, Scalar};
pub use region::{integrate_region_2d, Rect};
pub use roots::{bisect, sign_changes};
