//! Sparse and dense linear algebra: CSR storage, sparse LU, Krylov solvers,
//! thin SVD and the MAT1/CSR1 text formats.

mod dense;
pub mod io;
mod krylov;
mod lu;
mod ordering;
mod precond;
mod sparse;
mod svd;
mod system;

pub use dense::DenseMatrix;
pub use krylov::{cg_solve, minres_solve, pcg, CgPreconditioner, SolveReport};
pub use lu::{direct_solve, SparseLu, PIVOT_TOLERANCE};
pub use ordering::{bandwidth, rcm_ordering};
pub use precond::{BlockDiagonal, Identity, Jacobi, Preconditioner, SymmetricGaussSeidel};
pub use sparse::{SparseMatrix, Triplets};
pub use svd::{thin_svd, ThinSvd};
pub use system::LinearSystem;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
