//! Component reduced-order modeling for 2D elliptic problems.
//!
//! Large domains are built from a handful of unit-square *reference
//! components* laid out on an integer grid. Subdomains are coupled weakly
//! with symmetric interior-penalty terms, so each component keeps its own
//! continuous Galerkin space and non-matching meshes meet through mortar
//! quadrature. A POD basis is trained per reference component from small
//! sample problems; projecting the component, interface and boundary
//! operators once per reference yields a library of dense blocks that can be
//! stitched into a reduced system for any layout without ever forming the
//! full-order global matrix.
//!
//! Two physics are provided: Poisson (Q1/P1) and Stokes (Taylor–Hood P2/P1,
//! Q2/Q1 on quadrilaterals).
//!
//! Module map:
//!
//! - [`mesh`]: unit-square component meshes, MESH1 I/O, side traces.
//! - [`fem`]: quadrature, reference elements, function spaces, volume assembly.
//! - [`linalg`]: CSR/dense matrices, sparse LU, CG, MINRES, preconditioners, SVD.
//! - [`physics`]: closed-form problem data and parameter sampling.
//! - [`dgdd`]: layouts, mortar quadrature, interface/boundary forms, FOM assembly.
//! - [`rom`]: snapshots, POD, projected block library, reduced assembly and solve.
//! - [`experiments`]: configuration and the reproducible experiment drivers
//!   behind the `romdd` binary.

pub mod dgdd;
pub mod error;
pub mod experiments;
pub mod fem;
pub mod linalg;
pub mod mesh;
pub mod physics;
pub mod rom;

pub use error::{Error, Result};
