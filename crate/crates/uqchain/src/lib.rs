//! Numerical toolkit for the four-dimensional typical representation of
//! U_q(sl(2|1)): Casimirs, the braid pair and its Baxterisation, diagonal
//! K-matrices, and the closed/open chain Hamiltonians built from them.
//!
//! Everything is dense complex linear algebra; chain operators live in
//! dimension 4^L and every identity is checked as a relative Frobenius residual.

pub mod boundary;
pub mod braid;
pub mod chains;
pub mod cli;
pub mod coproduct;
pub mod error;
pub mod linalg;
pub mod report;
pub mod scalars;
pub mod spectral;
pub mod uqsl21;

pub use error::{Error, Result};
pub use linalg::{Mat, C64};
pub use report::{CheckReport, RelationReport};
pub use scalars::{DeformParams, ToleranceConfig};
