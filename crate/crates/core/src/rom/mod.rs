//! Component reduced-order model: snapshot collection, POD, the projected
//! block library, and reduced assembly that never forms the full-order
//! global matrix.

mod library;
mod pod;
mod reduced;
mod snapshots;

pub use library::{project, ReducedBlockLibrary};
pub use pod::{choose_rank, parse_basis, pod_train, write_basis, PodBasis, Truncation};
pub use reduced::{
    assemble_reduced_matrix, assemble_reduced_system, lift_solution, reduced_rhs, relative_error,
    solve_reduced, AssemblyTiming, REDUCED_RESIDUAL_TOLERANCE, ReducedSystem,
};
pub use snapshots::{collect_snapshots_poisson, collect_snapshots_stokes, sample_rng, SnapshotSet};
