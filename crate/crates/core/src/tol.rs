//! Centralised tolerance constants.
//!
//! Every threshold a decision depends on lives here with its origin. Residual
//! tolerances are relative to a problem-dependent scale recorded alongside the
//! check; nothing compares against an absolute epsilon.

/// Hermiticity claim on inputs: max |A - A*| <= HERMITIAN * max |A|.
pub const HERMITIAN: f64 = 1e-12;

/// Resolvent residual: ||(N - z) R - I|| <= RESOLVENT_RESIDUAL * cond(N - z).
pub const RESOLVENT_RESIDUAL: f64 = 1e-10;

/// Relative singular-value cutoff for rank and kernel decisions.
pub const RANK_CUT: f64 = 1e-10;

/// Mandatory multiplicative gap across a rank or pole-order cut. Cuts without
/// this gap error out instead of guessing.
pub const DECISION_GAP: f64 = 10.0;

/// Pole-order threshold relative to ||K0||.
pub const POLE_THRESHOLD: f64 = 1e-7;

/// Laurent / operator identity residuals, relative to the identity's scale.
pub const IDENTITY: f64 = 1e-8;

/// Maximum principal angle (radians) for subspace-equality assertions.
pub const SUBSPACE_ANGLE: f64 = 1e-6;

/// Residuals of differentiated eigenvalue-equation chains.
pub const CHAIN_RESIDUAL: f64 = 1e-6;

/// Negative-index Fourier content allowed in a path claimed analytic.
pub const CAUCHY_RESIDUAL: f64 = 1e-6;

/// Quadrature stability: node doubling must move coefficients less than this
/// (relative) before a series is accepted.
pub const QUADRATURE_STABLE: f64 = 1e-8;

/// Node doubling beyond this relative change is reported as divergence.
pub const QUADRATURE_DIVERGED: f64 = 1e-6;

/// Condition-number ceiling on the conjugate Gram matrix.
pub const GRAM_COND_MAX: f64 = 1e8;

/// Default and maximum contour node counts (auto-doubling in between).
pub const DEFAULT_NODES: usize = 64;
pub const MAX_NODES: usize = 4096;

/// Default ratio of contour radius to the nearest excluded singularity.
pub const RADIUS_SAFETY: f64 = 0.5;

/// Fallback contour radius when no other singularity bounds it.
pub const RADIUS_CAP: f64 = 1.0;

/// Eigenvalue drift allowed when integrating an isospectral commutator flow to
/// t = 1 with RK4.
pub const ISOSPECTRAL_DRIFT: f64 = 1e-6;

/// Directional eigenvalue derivative along a commutator field at t = 0.
pub const COMMUTATOR_PAIRING: f64 = 1e-9;
