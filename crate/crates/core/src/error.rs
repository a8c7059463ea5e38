//! Error taxonomy. Every tolerance-driven decision that cannot be made safely maps
//! to its own variant so callers can tell a genuine structural finding from a
//! numerically ambiguous one.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The shift z is (numerically) in the spectrum; the resolvent does not exist
    /// and Laurent machinery must be used instead.
    #[error("shift z = {z} is numerically in the spectrum (smallest singular value {sigma_min:.3e} below cutoff {cutoff:.3e})")]
    SingularShift { z: num_complex::Complex64, sigma_min: f64, cutoff: f64 },

    /// Two eigenvalue clusters sit within twice the clustering tolerance of each
    /// other; the caller must refine the tolerance.
    #[error("eigenvalue clusters at {a} and {b} are separated by {dist:.3e} < 2 x cluster tolerance {tol:.3e}")]
    AmbiguousClustering { a: num_complex::Complex64, b: num_complex::Complex64, dist: f64, tol: f64 },

    /// The requested contour would enclose a resonance point other than the one
    /// being expanded around.
    #[error("contour of radius {radius:.3e} encloses another resonance point at distance {nearest:.3e}")]
    ContourTooLarge { radius: f64, nearest: f64 },

    /// Halving the quadrature node spacing still moves a coefficient more than the
    /// stability tolerance.
    #[error("quadrature did not stabilise: relative change {change:.3e} > {tol:.3e} at {nodes} nodes")]
    QuadratureDivergence { change: f64, tol: f64, nodes: usize },

    /// A norm lies within a factor 10 of a decision threshold; the cut would be
    /// arbitrary.
    #[error("threshold decision ambiguous: value {value:.3e} within factor 10 of cut {cut:.3e}")]
    ThresholdAmbiguous { value: f64, cut: f64 },

    /// A singular-value ladder has no factor-10 gap at the requested rank cut.
    #[error("rank decision ambiguous: sigma[{index}] = {kept:.3e} vs sigma[{index_next}] = {dropped:.3e} (gap < 10)")]
    RankDecisionAmbiguous { index: usize, kept: f64, index_next: usize, dropped: f64 },

    /// The probe coupling used to build the filtration is itself a resonance point.
    #[error("probe coupling v = {v} is a resonance point of z0")]
    ProbeAtResonance { v: num_complex::Complex64 },

    /// A vector handed to `depth` is not in the resonance subspace.
    #[error("vector is not a resonance vector: ||P phi - phi|| / ||phi|| = {defect:.3e} > {tol:.3e}")]
    NotResonanceVector { defect: f64, tol: f64 },

    /// The eigenprojection contour passes through (or too close to) the spectrum.
    #[error("contour of radius {radius:.3e} around {z0} passes too close to spectrum (margin {margin:.3e})")]
    ContourHitsSpectrum { z0: num_complex::Complex64, radius: f64, margin: f64 },

    /// Continuation around the coupling circle did not return every eigenvalue to
    /// its start: z(v) itself branches at v = 0.
    #[error("eigenvalue branches permute around the contour (z(v) branches at v = 0); permutation {permutation:?}")]
    BranchingDetected { permutation: Vec<usize> },

    /// Two tracked values approached within the matching tolerance and refinement
    /// hit its cap.
    #[error("path matching ambiguous after {refinements} refinements: minimum separation {separation:.3e}")]
    MatchingAmbiguity { separation: f64, refinements: usize },

    /// The Gram matrix of generating eigenvectors against their conjugates is
    /// numerically singular.
    #[error("conjugate-pairing assumption violated: Gram matrix condition {cond:.3e} (smallest singular value {sigma_min:.3e})")]
    AssumptionViolated { cond: f64, sigma_min: f64 },

    /// The derivative-based and orthogonality-based order criteria disagree.
    #[error("order criteria disagree: derivative route gives {derivative_order}, orthogonality route gives {orthogonality_order}")]
    CriteriaDisagree { derivative_order: usize, orthogonality_order: usize },

    /// An eigenvalue required to be simple has higher multiplicity.
    #[error("eigenvalue {z} is not simple (algebraic {algebraic}, geometric {geometric})")]
    NotSimple { z: num_complex::Complex64, algebraic: usize, geometric: usize },

    /// Two tracked points collided even at the maximum step refinement.
    #[error("tracked points collided: separation {separation:.3e} at {steps} steps")]
    TrackingCollision { separation: f64, steps: usize },

    /// Richardson extrapolation across z-samples disagrees beyond tolerance.
    #[error("extrapolation unstable: successive estimates differ by {change:.3e} > {tol:.3e}")]
    ExtrapolationUnstable { change: f64, tol: f64 },

    /// A Hankel block that theory guarantees invertible is numerically singular.
    #[error("beta block {block} is numerically singular (smallest singular value {sigma_min:.3e})")]
    SingularBeta { block: usize, sigma_min: f64 },

    /// Half-plane assignment of cluster eigenvalues kept flipping along the tail
    /// of the y-sequence.
    #[error("resonance index did not converge over the last {window} y-values")]
    NotConverged { window: usize },

    /// An interval endpoint is itself a resonance point.
    #[error("interval endpoint {endpoint} is a resonance point (distance {dist:.3e})")]
    EndpointResonance { endpoint: f64, dist: f64 },

    /// An eigenvalue of H_r sits on the level lambda at an interval endpoint.
    #[error("eigenvalue crossing at interval endpoint r = {endpoint} (distance to level {dist:.3e})")]
    CrossingAtEndpoint { endpoint: f64, dist: f64 },

    /// A stated precondition does not hold for the given data.
    #[error("precondition violated: {reason}")]
    PreconditionViolated { reason: String },

    /// Newton iteration on the resonant curve failed to converge.
    #[error("Newton iteration diverged at v = {v} after {iterations} steps (residual {residual:.3e})")]
    NewtonDiverged { v: num_complex::Complex64, iterations: usize, residual: f64 },

    /// A second eigenvalue entered the Newton basin while tracking the curve.
    #[error("second eigenvalue entered the tracking basin at v = {v} (gap {gap:.3e})")]
    MultiplicityCollision { v: num_complex::Complex64, gap: f64 },

    /// A gauge functional vanished on the sampling contour; the eigenpath cannot
    /// be normalised there.
    #[error("gauge functional breaks down on the contour (min |denominator| = {min_abs:.3e}, winding {winding})")]
    GaugeBreakdown { min_abs: f64, winding: i64 },

    /// Backend linear-algebra failure (factorisation did not converge etc.).
    #[error("linear algebra backend error: {0}")]
    Backend(#[from] ndarray_linalg::error::LinalgError),

    /// Instance file I/O and validation.
    #[error("instance error: {0}")]
    Instance(String),
}

impl Error {
    pub fn precondition(reason: impl Into<String>) -> Self {
        Error::PreconditionViolated { reason: reason.into() }
    }
}
