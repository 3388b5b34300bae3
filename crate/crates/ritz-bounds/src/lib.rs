//! Residual-based a posteriori error bounds for approximate eigenvalues and
//! singular values obtained by subspace projection.
//!
//! The crate has three layers:
//!
//! * [`linalg`] — dense primitives, seeded random generation, and test-matrix
//!   constructors (prescribed spectra, geometric singular values, Haar bases).
//! * [`extraction`] and [`subspace`] — the projection methods themselves
//!   (Rayleigh-Ritz, Petrov-Galerkin, the one-sided randomized-SVD structure,
//!   Lanczos with full reorthogonalization, subspace iteration, basic LOBPCG),
//!   exposed as the block perturbation structures they induce.
//! * [`bounds`] — per-value quadratic error bounds computed from the residual
//!   norms and gap information those structures carry, together with the
//!   classical comparison bounds (Weyl, Li-Li, the off-diagonal quadratic
//!   bound, and the classical single-vector bound).
//!
//! [`experiments`] wires the layers into reproducible scenario runs that write
//! CSV reports; [`structure_file`] defines the on-disk format consumed by the
//! CLI's one-shot `bound` mode.

pub mod bounds;
pub mod error;
pub mod experiments;
pub mod extraction;
pub mod linalg;
pub mod structure_file;
pub mod subspace;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
