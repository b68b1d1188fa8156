//! Closed-form problem data and parameter sampling.

mod poisson;
mod stokes;

use serde::{Deserialize, Serialize};

pub use poisson::{poisson_fields, sample_poisson_params, PoissonProblem, SpiralRange, WaveRange};
pub use stokes::{
    assign_upwind_sides, mms_forcing, mms_pressure, mms_velocity, sample_stokes_params,
    stokes_fields, stokes_mms, FlowRange, StokesFlow, StokesProblem, DEFAULT_VISCOSITY,
};

/// Condition imposed on an outer side of the global domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

impl BoundaryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryKind::Dirichlet => "dirichlet",
            BoundaryKind::Neumann => "neumann",
        }
    }

    pub fn parse(s: &str) -> Option<BoundaryKind> {
        match s {
            "dirichlet" => Some(BoundaryKind::Dirichlet),
            "neumann" => Some(BoundaryKind::Neumann),
            _ => None,
        }
    }
}
