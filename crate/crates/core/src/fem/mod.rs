//! Lagrange finite elements on a single mesh: quadrature, reference
//! elements, continuous spaces and volume assembly.

mod assembly;
mod element;
mod quadrature;
mod space;

pub use assembly::{
    assemble_divergence, assemble_load, assemble_mass, assemble_stiffness, assemble_vector_load,
    l2_error,
};
pub use element::{Basis, CellMap, Element, MapPoint, MAX_LOCAL};
pub use quadrature::{gauss_legendre, quad_rule, QuadratureRule};
pub use space::{build_space, FunctionSpace, PointValues, SpaceKind};
