//! Centralized tolerances.
//!
//! Every zero test and guard band in the crate reads from here, so a tolerance
//! is changed in exactly one place.

/// Relative threshold under which a coefficient counts as zero.
///
/// The exact-vanishing criteria are exact-zero statements; numerically they are
/// tested relative to the largest coefficient magnitude.
pub const ZERO_REL: f64 = 1e-12;

/// Relative floor for windowed commutator norms of exactly commuting operators.
///
/// Accumulated rounding in the windowed products grows like sqrt(N) * eps, so a
/// refinement step cannot be required to decrease once both norms sit below
/// this floor.
pub const COMMUTATOR_FLOOR_REL: f64 = 1e-12;

/// Guard band around the unit circle for factorization roots (relative to unit
/// radius). Roots closer than this make the factorization ill-posed and are
/// rejected rather than guessed.
pub const TOL_CIRCLE: f64 = 1e-6;

/// Trailing-coefficient trim threshold, relative to the largest coefficient.
pub const TRIM_REL: f64 = 1e-13;

/// Acceptable mismatch of beta * conj(alpha) - 1 when pairing roots.
pub const PAIRING_TOL: f64 = 1e-6;

/// Runtime sanity guard on |p|^2 vs the input symbol after factorization
/// (relative). Tests assert tighter bounds on the well-conditioned families.
pub const FACTOR_RESIDUAL_GUARD: f64 = 1e-8;

/// Two roots closer than this (relative) collapse to a double root.
pub const ROOT_COINCIDE_REL: f64 = 1e-8;

/// Separations inside (ROOT_COINCIDE_REL, BORDERLINE_REL] report both candidate
/// classifications instead of silently picking one.
pub const BORDERLINE_REL: f64 = 1e-6;

/// Relative deviation allowed between cached derived signals and pointwise
/// exponentials of phi at the grid nodes.
pub const CACHE_REL: f64 = 1e-12;

/// Default boundary-residual gate for the collocation solver, relative to the
/// data amplitude.
pub const MFS_ACCURACY: f64 = 1e-6;

/// Default relative singular-value cutoff for the truncated-SVD solve.
pub const SVD_CUTOFF: f64 = 1e-12;

/// Default source offset in units of the local collocation spacing.
pub const MFS_OFFSET: f64 = 4.0;

/// Source offset cap as a fraction of the curve-to-curve clearance.
pub const MFS_OFFSET_CLEARANCE_CAP: f64 = 0.3;

/// Default relative tolerance for the commuting/non-commuting verdict.
pub const VERDICT_REL: f64 = 1e-10;

/// Largest supported dense truncation order.
pub const MAX_ORDER: usize = 1024;
