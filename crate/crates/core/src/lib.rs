//! Curve operators of the SU(2) TQFT at level `r` as banded Hermitian
//! matrices, their realization as Toeplitz operators on the quantized sphere,
//! exact symbols by inverse Mellin transform, and the semiclassical pairing
//! asymptotics for 6j-symbols and the punctured S-matrix.

pub mod banded;
pub mod checks;
pub mod error;
pub mod genus2;
pub mod mellin;
pub mod numerics;
pub mod qnum;
pub mod semiclassics;
pub mod sphere;
pub mod toeplitz;
pub mod torus;

pub use banded::{BandedOperator, OperatorMeta};
pub use error::{Error, Result};
