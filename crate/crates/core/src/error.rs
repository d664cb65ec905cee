//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Requested truncation order does not fit on the sample grid (need M >= 2N+2).
    #[error("grid of {grid} samples is too small for truncation order {order} (need at least {min})")]
    TruncationOrder { grid: usize, order: usize, min: usize },

    /// Coefficients violate the Hermitian symmetry c(-k) = conj(c(k)).
    #[error("coefficients are not Hermitian-symmetric: max deviation {max_dev:.3e} vs scale {scale:.3e}")]
    SymmetryViolation { max_dev: f64, scale: f64 },

    /// Synthesis left an imaginary residue too large to discard.
    #[error("synthesis imaginary residue {residue:.3e} exceeds {tolerance:.3e}")]
    ImaginaryResidue { residue: f64, tolerance: f64 },

    /// Evaluation window is too large for the truncation order, or a tail start
    /// index lies outside the stored band.
    #[error("window {window} is not admissible at order {order} (limit {limit})")]
    Window { window: usize, order: usize, limit: usize },

    /// The synthesized metric factor e^{-2phi} is not strictly positive.
    #[error("metric positivity violated: min grid value {min_value:.3e}")]
    MetricPositivity { min_value: f64 },

    /// Cached derived signals disagree with pointwise exponentials of phi.
    #[error("derived-signal cache deviates from pointwise values by {max_rel_dev:.3e} (relative)")]
    CacheConsistency { max_rel_dev: f64 },

    /// A polynomial root lies within the guard band of the unit circle.
    #[error("root at ({re:.12e}, {im:.12e}) lies within {distance:.3e} of the unit circle")]
    BoundaryRoot { re: f64, im: f64, distance: f64 },

    /// Strict positivity hypothesis violated.
    #[error("positivity violated: {context} = {value:.6e}")]
    Positivity { context: &'static str, value: f64 },

    /// Root set cannot be partitioned into reciprocal-conjugate pairs.
    #[error("root pairing failed: {unpaired} roots left unpaired (best mismatch {mismatch:.3e})")]
    Pairing { unpaired: usize, mismatch: f64 },

    /// Factorization residual check failed.
    #[error("factorization residual {residual:.3e} exceeds guard {guard:.3e}")]
    FactorResidual { residual: f64, guard: f64 },

    /// Polynomial degree outside the classified range.
    #[error("degree {degree} outside supported range (max {max})")]
    Degree { degree: usize, max: usize },

    /// A root of the integrand polynomial lies inside the closed unit disc.
    #[error("outer-polynomial violation: root of modulus {modulus:.12e} inside the closed unit disc")]
    OuterViolation { modulus: f64 },

    /// Invalid scalar parameter (heights, oval parameters, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Geometric defect of a sampled curve (vanishing tangent, self-intersection,
    /// failure to close).
    #[error("curve geometry: {0}")]
    CurveGeometry(String),

    /// Invalid source layout or rank collapse in the collocation system.
    #[error("source layout: {0}")]
    Layout(String),

    /// Collocation residual above the accuracy gate.
    #[error("boundary residual {residual:.3e} exceeds accuracy gate {gate:.3e}")]
    AccuracyFailure { residual: f64, gate: f64 },

    /// Eigenvalue computation failed to converge.
    #[error("eigenvalue computation failed: {0}")]
    Eigen(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed input file or flag value.
    #[error("parse: {0}")]
    Parse(String),
}
