//! Numerical tolerances shared across the crate.

/// Allowed deviation of the ordered-pair mass from 1.
pub const MASS_TOL: f64 = 1e-9;

/// Structural matrix identities, Frobenius norm.
pub const MATRIX_TOL: f64 = 1e-7;

/// Scalar identities.
pub const SCALAR_TOL: f64 = 1e-8;

/// Two Laplacian eigenvalues closer than this are treated as equal.
pub const EIGEN_GAP_TOL: f64 = 1e-8;

/// Absolute slack granted to inequality checks for floating-point rounding.
/// A lemma instance counts as violated only if its margin is below `-LEMMA_TOL`.
pub const LEMMA_TOL: f64 = 1e-12;

/// Relative slack on the half-mass condition `w(A) <= w(C)/2`.
pub const HALF_MASS_TOL: f64 = 1e-12;
