//! Numerical laboratory for the coupling-resonance structure of finite-dimensional
//! operator pairs.
//!
//! Given a self-adjoint matrix `H0`, a self-adjoint perturbation `V` and a
//! self-adjoint direction `W`, this crate computes the spectral machinery attached
//! to the product `(H0 - z)^{-1} V`: Laurent coefficients of the resolvent
//! `v ↦ R_z(N0 + vW)` at a resonance point, the idempotents and nilpotents built
//! from them, root-space filtrations and Jordan structure, analytic eigenvalue and
//! eigenvector paths with their conjugates, branching criteria, monodromy cycles of
//! resonance points, cycle projections with their Hankel Schmidt representation,
//! resonance indices, spectral flow and the finite-dimensional spectral shift
//! function, and tangency of directions to the resonance set.
//!
//! Everything is dense, double-precision and tolerance-explicit: every rank cut,
//! order decision and cluster assignment either passes with a recorded gap or
//! fails loudly with a dedicated error.

pub mod ensemble;
pub mod error;
pub mod flow;
pub mod instance;
pub mod laurent;
pub mod linalg;
pub mod operator;
pub mod path;
pub mod projection;
pub mod structure;
pub mod tangency;
pub mod tol;

pub use error::{Error, Result};
pub use operator::{AffinePoint, MatrixOperator, SpectralData};
