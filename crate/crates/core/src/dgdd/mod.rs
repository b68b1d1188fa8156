//! Domain decomposition by symmetric interior penalty: component layouts,
//! mortar quadrature on non-matching interfaces, interface and boundary
//! forms, and full-order global assembly.

mod component;
mod forms;
mod global;
mod layout;
mod mortar;

pub use component::{Physics, ReferenceDomain};
pub use forms::{
    assemble_boundary_poisson, assemble_boundary_stokes, assemble_interface,
    assemble_interface_penalty, assemble_interface_poisson, assemble_interface_stokes,
    assemble_neumann_poisson, boundary_operator, boundary_rhs, face_points, BoundaryData,
    FacePoint, InterfaceBlocks, InterfaceQuad,
};
pub use global::{
    assemble_global_fom, default_penalty, dirichlet_sides, fom_assembly_count, subdomain_rhs, ComponentOperators,
    ComponentPool, GlobalSystem, InterfaceKey, Problem,
};
pub use layout::{find_interfaces, parse_layout, write_layout, Axis, Interface, Layout};
pub use mortar::{build_mortar, MortarSegment, FACE_POINTS};

#[cfg(test)]
mod tests;
