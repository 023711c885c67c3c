//! Exact and numeric verification of twisted quantum-group geometry:
//! multiparametric R-matrices and their twists, q-bein coordinate changes,
//! invariant Jackson calculus, and a two-dimensional q-deformed quantum model.

pub mod jackson;
pub mod ncalg;
pub mod qm2d;
pub mod qspace;
pub mod report;
pub mod rmatrix;
pub mod scalars;

pub use report::{Entry, Residual, VerificationReport};
pub use scalars::{DeformationParams, LaurentPoly, ScalarError, Universe, Var};

/// Version string echoed into every report.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
