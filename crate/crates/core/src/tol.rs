//! Numeric tolerances, centralized so every module draws from one table.
//!
//! Three tiers: algebraic identities that must hold to near machine
//! precision, reconstruction and round-trip checks that accumulate a few
//! floating-point operations, and optimization targets limited by the
//! convergence of iterative solvers.

/// Entrywise tolerance for algebraic identities: hermiticity, unitarity,
/// ket normalization, prior sums.
pub const ALGEBRAIC: f64 = 1e-12;

/// Tolerance for reconstruction-style checks: eigendecomposition residuals,
/// Kraus completeness, density-matrix validation.
pub const RECONSTRUCTION: f64 = 1e-10;

/// Acceptable primal-dual gap for a discrimination value to count as
/// certified.
pub const OPTIMIZATION: f64 = 1e-6;

/// Slack permitted between a primal value and its dual upper bound before
/// the certificate itself is considered inconsistent.
pub const CERTIFICATE: f64 = 1e-9;

/// Outcome weights at or below this floor are treated as never occurring.
pub const PROB_FLOOR: f64 = 1e-12;

/// A discrimination value within this of the total ensemble weight counts
/// as perfect.
pub const PERFECT: f64 = 1e-8;

/// Off-diagonal Frobenius norm at which Jacobi eigensolver sweeps stop.
pub const JACOBI_OFF: f64 = 1e-13;

/// Gap target the iterative ensemble solver aims for, well under
/// [`OPTIMIZATION`] so certified values have headroom.
pub const SOLVER_GAP_TARGET: f64 = 1e-9;
