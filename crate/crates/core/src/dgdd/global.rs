use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};

use super::component::{Physics, ReferenceDomain};
use super::forms::{assemble_interface, boundary_operator, boundary_rhs, BoundaryData, InterfaceBlocks, InterfaceQuad};
use super::layout::{find_interfaces, Axis, Layout};
use crate::error::{Error, Result};
use crate::linalg::{direct_solve, LinearSystem, SparseMatrix, Triplets};
use crate::mesh::Side;
use crate::physics::{BoundaryKind, PoissonProblem, StokesProblem};

static FOM_ASSEMBLIES: AtomicUsize = AtomicUsize::new(0);

/// Number of full-order global assemblies performed by this process.
pub fn fom_assembly_count() -> usize {
    FOM_ASSEMBLIES.load(Ordering::SeqCst)
}

/// Penalty `nu (s+1)^2`, `s` the degree of the penalised field (1 for the
/// Poisson unknown, 2 for the velocity). Smaller Stokes values leave the
/// velocity block indefinite on distorted cells.
pub fn default_penalty(physics: Physics, nu: f64) -> f64 {
    match physics {
        Physics::Poisson => 4.0,
        Physics::Stokes => 9.0 * nu,
    }
}

/// Problem data in global coordinates.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "physics", rename_all = "snake_case")]
pub enum Problem {
    Poisson(PoissonProblem),
    Stokes(StokesProblem),
}

impl Problem {
    pub fn physics(&self) -> Physics {
        match self {
            Problem::Poisson(_) => Physics::Poisson,
            Problem::Stokes(_) => Physics::Stokes,
        }
    }

    pub fn nu(&self) -> f64 {
        match self {
            Problem::Poisson(_) => 1.0,
            Problem::Stokes(s) => s.nu,
        }
    }

    /// See [`default_penalty`].
    pub fn default_gamma(&self) -> f64 {
        default_penalty(self.physics(), self.nu())
    }

    /// Outer-side conditions: the layout's override or the problem default
    /// (all Dirichlet for Poisson).
    pub fn side_conditions(&self, layout: &Layout) -> [BoundaryKind; 4] {
        if let Some(bc) = layout.bc {
            return bc;
        }
        match self {
            Problem::Poisson(_) => [BoundaryKind::Dirichlet; 4],
            Problem::Stokes(s) => s.side_conditions(),
        }
    }

    /// Whether the pressure is only determined up to a constant.
    pub fn needs_mean_zero(&self, layout: &Layout) -> bool {
        matches!(self, Problem::Stokes(_))
            && self.side_conditions(layout).iter().all(|&k| k == BoundaryKind::Dirichlet)
    }

    pub fn forcing(&self, x: [f64; 2]) -> [f64; 2] {
        match self {
            Problem::Poisson(p) => [p.forcing(x), 0.0],
            Problem::Stokes(s) => s.forcing(x),
        }
    }

    pub fn dirichlet(&self, x: [f64; 2], side: Side) -> [f64; 2] {
        match self {
            Problem::Poisson(p) => [p.dirichlet(x), 0.0],
            Problem::Stokes(s) => s.dirichlet(x, side),
        }
    }

    pub fn neumann(&self, x: [f64; 2], n: [f64; 2]) -> [f64; 2] {
        match self {
            Problem::Poisson(p) => [p.neumann(x, n), 0.0],
            Problem::Stokes(s) => s.neumann(x, n),
        }
    }
}

/// Reference components by name.
#[derive(Clone, Debug, Default)]
pub struct ComponentPool {
    refs: BTreeMap<String, ReferenceDomain>,
}

impl ComponentPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, domain: ReferenceDomain) {
        self.refs.insert(domain.name().to_string(), domain);
    }

    pub fn with(mut self, domain: ReferenceDomain) -> Self {
        self.insert(domain);
        self
    }

    pub fn get(&self, name: &str) -> Result<&ReferenceDomain> {
        self.refs.get(name).ok_or_else(|| Error::UnknownReference(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.refs.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ReferenceDomain> {
        self.refs.values()
    }

    /// Resolves every cell of `layout` and checks the physics agree.
    pub fn resolve<'a>(&'a self, layout: &Layout, physics: Physics) -> Result<Vec<&'a ReferenceDomain>> {
        (0..layout.n_subdomains())
            .map(|m| {
                let d = self.get(layout.reference(m))?;
                if d.physics() != physics {
                    return Err(Error::IncompatibleSpace(format!(
                        "component `{}` is {:?}, problem is {physics:?}",
                        d.name(),
                        d.physics()
                    )));
                }
                Ok(d)
            })
            .collect()
    }
}

/// Key of a reference interface: (component below/left, component
/// above/right, axis).
pub type InterfaceKey = (String, String, Axis);

/// Per-reference full-order operators: volume blocks, interface blocks for
/// each reference pair, and Dirichlet blocks for each (reference, side).
#[derive(Clone, Debug, Default)]
pub struct ComponentOperators {
    pub volume: HashMap<String, SparseMatrix>,
    pub interface: HashMap<InterfaceKey, InterfaceBlocks>,
    pub boundary: HashMap<(String, Side), SparseMatrix>,
}

impl ComponentOperators {
    /// Operators needed by `layout` with Dirichlet outer sides `bc`.
    pub fn for_layout(
        pool: &ComponentPool,
        layout: &Layout,
        problem: &Problem,
        gamma: f64,
    ) -> Result<Self> {
        let doms = pool.resolve(layout, problem.physics())?;
        let bc = problem.side_conditions(layout);
        let nu = problem.nu();
        let mut ops = ComponentOperators::default();
        for d in &doms {
            if !ops.volume.contains_key(d.name()) {
                ops.volume.insert(d.name().to_string(), d.volume_operator(nu)?);
            }
        }
        for f in find_interfaces(layout) {
            let key = (doms[f.m].name().to_string(), doms[f.n].name().to_string(), f.axis);
            if let Entry::Vacant(slot) = ops.interface.entry(key) {
                let q = InterfaceQuad::new(doms[f.m], doms[f.n], f.axis)?;
                slot.insert(assemble_interface(doms[f.m], doms[f.n], &q, gamma, nu)?);
            }
        }
        for (m, d) in doms.iter().enumerate() {
            for side in dirichlet_sides(layout, m, &bc, d) {
                let key = (d.name().to_string(), side);
                ops.boundary.entry(key).or_insert_with(|| boundary_operator(d, side, gamma, nu));
            }
        }
        Ok(ops)
    }
}

/// Dirichlet sides of subdomain `m`: its global sides tagged Dirichlet, and
/// the obstacle if the mesh has one (no-slip).
pub fn dirichlet_sides(layout: &Layout, m: usize, bc: &[BoundaryKind; 4], d: &ReferenceDomain) -> Vec<Side> {
    let mut out: Vec<Side> = layout
        .global_sides(m)
        .into_iter()
        .filter(|s| bc[side_index(*s)] == BoundaryKind::Dirichlet)
        .collect();
    if d.mesh().has_side(Side::Obstacle) {
        out.push(Side::Obstacle);
    }
    out
}

fn side_index(s: Side) -> usize {
    Side::OUTER.iter().position(|&o| o == s).expect("outer side")
}

/// Full-order right-hand side of subdomain `m` in its local numbering:
/// volume load plus Dirichlet and Neumann boundary data, evaluated in global
/// coordinates.
pub fn subdomain_rhs(
    layout: &Layout,
    d: &ReferenceDomain,
    m: usize,
    problem: &Problem,
    gamma: f64,
) -> Result<Vec<f64>> {
    let o = layout.origin(m);
    let shift = move |x: [f64; 2]| [x[0] + o[0], x[1] + o[1]];
    let mut rhs = d.volume_load(&|x| problem.forcing(shift(x)))?;
    let bc = problem.side_conditions(layout);
    let nu = problem.nu();
    for side in layout.global_sides(m) {
        let part = match bc[side_index(side)] {
            BoundaryKind::Dirichlet => {
                let g = |x: [f64; 2]| problem.dirichlet(shift(x), side);
                boundary_rhs(d, side, gamma, nu, BoundaryData::Dirichlet(&g))
            }
            BoundaryKind::Neumann => {
                let g = |x: [f64; 2], n: [f64; 2]| problem.neumann(shift(x), n);
                boundary_rhs(d, side, gamma, nu, BoundaryData::Neumann(&g))
            }
        };
        rhs.iter_mut().zip(part).for_each(|(r, p)| *r += p);
    }
    Ok(rhs)
}

/// Assembled full-order system of a layout.
#[derive(Clone, Debug)]
pub struct GlobalSystem {
    pub physics: Physics,
    /// `offsets[m]..offsets[m+1]` are subdomain `m`'s dofs.
    pub offsets: Vec<usize>,
    pub system: LinearSystem,
}

impl GlobalSystem {
    pub fn n_subdomains(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Unknowns excluding a mean-zero multiplier.
    pub fn n_field_dofs(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_constrained(&self) -> bool {
        self.system.is_constrained()
    }

    pub fn block<'a>(&self, x: &'a [f64], m: usize) -> &'a [f64] {
        &x[self.offsets[m]..self.offsets[m + 1]]
    }

    pub fn solve_direct(&self) -> Result<Vec<f64>> {
        direct_solve(&self.system.matrix, &self.system.rhs)
    }

    /// Per-subdomain solution vectors.
    pub fn split(&self, x: &[f64]) -> Vec<Vec<f64>> {
        (0..self.n_subdomains()).map(|m| self.block(x, m).to_vec()).collect()
    }
}

/// Assembles `sum B_m + sum B_mn + sum B_m,di` and the matching rhs.
pub fn assemble_global_fom(
    pool: &ComponentPool,
    layout: &Layout,
    problem: &Problem,
    gamma: f64,
) -> Result<GlobalSystem> {
    FOM_ASSEMBLIES.fetch_add(1, Ordering::SeqCst);
    let ops = ComponentOperators::for_layout(pool, layout, problem, gamma)?;
    let doms = pool.resolve(layout, problem.physics())?;
    let mut offsets = Vec::with_capacity(doms.len() + 1);
    offsets.push(0);
    for d in &doms {
        offsets.push(offsets.last().unwrap() + d.dof_count());
    }
    let n = *offsets.last().unwrap();
    let nnz: usize = doms.iter().map(|d| ops.volume[d.name()].nnz()).sum();
    let mut t = Triplets::with_capacity(n, n, 2 * nnz);
    let mut rhs = vec![0.0; n];
    let bc = problem.side_conditions(layout);
    for (m, d) in doms.iter().enumerate() {
        let o = offsets[m];
        t.add_sparse(o, o, &ops.volume[d.name()]);
        for side in dirichlet_sides(layout, m, &bc, d) {
            t.add_sparse(o, o, &ops.boundary[&(d.name().to_string(), side)]);
        }
        let r = subdomain_rhs(layout, d, m, problem, gamma)?;
        rhs[o..o + r.len()].copy_from_slice(&r);
    }
    for f in find_interfaces(layout) {
        let key = (doms[f.m].name().to_string(), doms[f.n].name().to_string(), f.axis);
        let b = &ops.interface[&key];
        let (om, on) = (offsets[f.m], offsets[f.n]);
        t.add_sparse(om, om, &b.mm);
        t.add_sparse(om, on, &b.mn);
        t.add_sparse(on, om, &b.nm);
        t.add_sparse(on, on, &b.nn);
    }
    let mut system = LinearSystem::new(t.to_csr(), rhs)?;
    if problem.needs_mean_zero(layout) {
        let mut w = Vec::with_capacity(n);
        for d in &doms {
            w.extend(d.pressure_weights());
        }
        system.add_mean_zero_constraint(&w)?;
    }
    Ok(GlobalSystem { physics: problem.physics(), offsets, system })
}
