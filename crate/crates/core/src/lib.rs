//! Spectral toolkit for Dirichlet-to-Neumann maps, boundary Laplacians, and
//! their commutators.
//!
//! The crate builds these operators in truncated Fourier bases on conformally
//! flat discs and cylinders, implements the exact Fourier-support criterion
//! for the commutator to vanish, reconstructs the domains realizing the
//! vanishing class (discs, logarithmic ovals, flat cylinders) through
//! constructive Fejér–Riesz factorization and conformal integration, and
//! cross-checks everything with an independent planar solver based on
//! fundamental-solutions collocation that never sees a conformal factor.

pub mod acceptance;
pub mod atlas;
pub mod curve;
pub mod cylinder;
pub mod disc;
pub mod error;
pub mod fejer_riesz;
mod fft;
pub mod fourier;
pub mod json;
pub mod obstruction;
pub mod operator;
pub mod oracle;
pub mod tol;

pub use error::{Error, Result};
pub use fourier::BoundarySignal;
pub use operator::FrequencyOperator;
