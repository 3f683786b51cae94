//! A computational laboratory for modulated Hilbert transforms along the
//! monomial curves (t, t^m) in the plane.
//!
//! The crate discretizes the operators exactly enough that algebraic
//! identities (dilation, modulation and quadratic-twist symmetries, even-power
//! cancellation, determinant factorizations) hold to rounding, and measures
//! the decay rates that the estimates only assert qualitatively: oscillatory
//! kernel decay in the coefficient scale r, adjoint-composition kernel decay
//! in the dyadic index, and operator-norm decay of the band pieces.

pub mod config;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod kernels;
pub mod linalg;
pub mod operators;
pub mod phase;
pub mod quad;
pub mod radon;
pub mod report;
pub mod rng;
pub mod signal;
pub mod tolerances;

pub use error::{LabError, Result};
