use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::{
    assemble_divergence, assemble_load, assemble_mass, assemble_stiffness, assemble_vector_load,
    FunctionSpace, SpaceKind,
};
use crate::linalg::{SparseMatrix, Triplets};
use crate::mesh::{side_trace, Mesh2D, Side, SideTrace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Physics {
    Poisson,
    Stokes,
}

/// A reference component: one unit-square mesh with its discrete spaces.
///
/// Local dof vector: the primary field (scalar, or interleaved velocity),
/// followed by the pressure for Stokes.
#[derive(Clone, Debug)]
pub struct ReferenceDomain {
    name: String,
    primary: FunctionSpace,
    pressure: Option<FunctionSpace>,
    traces: [SideTrace; 4],
}

impl ReferenceDomain {
    /// Linear Lagrange (P1 or Q1, by mesh shape).
    pub fn poisson(name: &str, mesh: Arc<Mesh2D>) -> Result<Self> {
        let shape = mesh
            .uniform_shape()
            .ok_or_else(|| Error::IncompatibleSpace("mixed or empty mesh".into()))?;
        let space = FunctionSpace::new(mesh, SpaceKind::linear_for(shape))?;
        Self::build(name, space, None)
    }

    /// Taylor-Hood: quadratic velocity, linear pressure.
    pub fn stokes(name: &str, mesh: Arc<Mesh2D>) -> Result<Self> {
        let shape = mesh
            .uniform_shape()
            .ok_or_else(|| Error::IncompatibleSpace("mixed or empty mesh".into()))?;
        let velocity = FunctionSpace::new(mesh.clone(), SpaceKind::VectorP2)?;
        let pressure = FunctionSpace::new(mesh, SpaceKind::linear_for(shape))?;
        Self::build(name, velocity, Some(pressure))
    }

    fn build(name: &str, primary: FunctionSpace, pressure: Option<FunctionSpace>) -> Result<Self> {
        let mesh = primary.mesh();
        let traces = [
            side_trace(mesh, Side::Left)?,
            side_trace(mesh, Side::Right)?,
            side_trace(mesh, Side::Bottom)?,
            side_trace(mesh, Side::Top)?,
        ];
        Ok(ReferenceDomain { name: name.to_string(), primary, pressure, traces })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn physics(&self) -> Physics {
        if self.pressure.is_some() {
            Physics::Stokes
        } else {
            Physics::Poisson
        }
    }

    pub fn mesh(&self) -> &Arc<Mesh2D> {
        self.primary.mesh()
    }

    /// Scalar space (Poisson) or velocity space (Stokes).
    pub fn primary(&self) -> &FunctionSpace {
        &self.primary
    }

    pub fn pressure(&self) -> Option<&FunctionSpace> {
        self.pressure.as_ref()
    }

    pub fn trace(&self, side: Side) -> &SideTrace {
        let k = Side::OUTER.iter().position(|&s| s == side).expect("outer side");
        &self.traces[k]
    }

    /// First pressure dof in the local vector.
    pub fn pressure_offset(&self) -> usize {
        self.primary.dof_count()
    }

    pub fn dof_count(&self) -> usize {
        self.primary.dof_count() + self.pressure.as_ref().map_or(0, |p| p.dof_count())
    }

    /// Volume operator: `(grad u, grad v)` or the Stokes saddle block
    /// `[[nu K, D^T], [D, 0]]` with `D = -(div u, q)`.
    pub fn volume_operator(&self, nu: f64) -> Result<SparseMatrix> {
        match &self.pressure {
            None => Ok(assemble_stiffness(&self.primary, 1.0)),
            Some(p) => {
                let k = assemble_stiffness(&self.primary, nu);
                let d = assemble_divergence(&self.primary, p)?;
                let (nv, n) = (self.primary.dof_count(), self.dof_count());
                let mut t = Triplets::with_capacity(n, n, k.nnz() + 2 * d.nnz());
                t.add_sparse(0, 0, &k);
                t.add_sparse(nv, 0, &d);
                t.add_sparse_transposed(0, nv, &d);
                Ok(t.to_csr())
            }
        }
    }

    /// Mass matrix of the whole local vector (velocity mass plus pressure
    /// mass for Stokes).
    pub fn mass_matrix(&self) -> SparseMatrix {
        let m = assemble_mass(&self.primary);
        match &self.pressure {
            None => m,
            Some(p) => {
                let mp = assemble_mass(p);
                let nv = self.primary.dof_count();
                let n = self.dof_count();
                let mut t = Triplets::with_capacity(n, n, m.nnz() + mp.nnz());
                t.add_sparse(0, 0, &m);
                t.add_sparse(nv, nv, &mp);
                t.to_csr()
            }
        }
    }

    /// `int psi_i` per local dof (zero on velocity dofs); the mean-zero
    /// pressure functional.
    pub fn pressure_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.dof_count()];
        if let Some(p) = &self.pressure {
            let mp = assemble_mass(p);
            let nv = self.primary.dof_count();
            for i in 0..p.dof_count() {
                w[nv + i] = mp.row(i).map(|(_, v)| v).sum();
            }
        }
        w
    }

    /// Volume load for forcing given in local coordinates.
    pub fn volume_load(&self, f: &dyn Fn([f64; 2]) -> [f64; 2]) -> Result<Vec<f64>> {
        match &self.pressure {
            None => assemble_load(&self.primary, |x| f(x)[0]),
            Some(_) => {
                let mut v = assemble_vector_load(&self.primary, f)?;
                v.resize(self.dof_count(), 0.0);
                Ok(v)
            }
        }
    }
}
