//! Local structure of a scalar-field vacuum in a Dirichlet cavity.
//!
//! A massive scalar field on `[0, R]` with Dirichlet walls has a global mode
//! basis; slamming one or two mirrors into the box at `t = 0` defines local
//! Dirichlet mode families on the sub-regions. The global vacuum, expressed
//! in the local families, is a correlated Gaussian state. This crate builds
//! that state and takes it apart:
//!
//! - [`cavity`]: geometry, frequencies, mode functions.
//! - [`bogoliubov`]: global-to-local overlap tables (α, β), Wronskian
//!   residuals, particle spectra.
//! - [`covariance`]: quadrature covariance matrices for one, two or three
//!   regions, symplectic forms, free evolution, reductions.
//! - [`williamson`]: symplectic (normal-form) diagonalization and the
//!   spatial profiles of the diagonalizing mode functions.
//! - [`entanglement`]: symplectic spectra, entropy, logarithmic negativity,
//!   pairwise negativity maps, mutual information.
//! - [`quadrature`]: adaptive numerical integration, used as an independent
//!   oracle for the closed-form overlaps and mode norms.
//! - [`export`]: CSV/JSON serialization and deterministic float formatting.
//!
//! Conventions: ⟨x_i x_j + x_j x_i⟩ covariance normalization (vacuum = I),
//! natural logarithms for entropy and negativity, 1-based mode indices,
//! interleaved (q1, p1, q2, p2, ...) quadrature ordering unless stated.

pub mod bogoliubov;
pub mod cavity;
pub mod covariance;
pub mod entanglement;
pub mod error;
pub mod export;
pub mod quadrature;
pub mod williamson;

pub use error::{Error, Result};
