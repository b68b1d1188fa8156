use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use super::library::ReducedBlockLibrary;
use super::pod::PodBasis;
use crate::dgdd::{find_interfaces, subdomain_rhs, ComponentPool, Layout, Problem};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, LinearSystem, SparseLu, SparseMatrix, Triplets};
use crate::mesh::Side;
use crate::physics::BoundaryKind;

/// Reduced system of a layout, assembled from library blocks.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    /// `offsets[m]..offsets[m+1]` are subdomain `m`'s reduced coordinates.
    pub offsets: Vec<usize>,
    pub system: LinearSystem,
}

impl ReducedSystem {
    pub fn n_reduced(&self) -> usize {
        *self.offsets.last().unwrap()
    }
}

/// Wall time of the two assembly stages, kept apart because the matrix can
/// be reused across right-hand sides.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AssemblyTiming {
    pub matrix: Duration,
    pub rhs: Duration,
}

fn check_library(lib: &ReducedBlockLibrary, problem: &Problem) -> Result<()> {
    if lib.physics != problem.physics() {
        return Err(Error::IncompatibleSpace(format!(
            "library is {:?}, problem is {:?}",
            lib.physics,
            problem.physics()
        )));
    }
    if (lib.nu - problem.nu()).abs() > 1e-12 * lib.nu.abs() {
        return Err(Error::Config(format!(
            "library projected with nu = {}, problem has nu = {}",
            lib.nu,
            problem.nu()
        )));
    }
    Ok(())
}

/// Sides of subdomain `m` carrying a Dirichlet block.
fn reduced_dirichlet_sides(layout: &Layout, m: usize, bc: &[BoundaryKind; 4], lib: &ReducedBlockLibrary) -> Vec<Side> {
    let r = layout.reference(m);
    let mut out: Vec<Side> = layout
        .global_sides(m)
        .into_iter()
        .filter(|s| bc[Side::OUTER.iter().position(|o| o == s).unwrap()] == BoundaryKind::Dirichlet)
        .collect();
    if lib.boundary.contains_key(&(r.to_string(), Side::Obstacle)) {
        out.push(Side::Obstacle);
    }
    out
}

/// Block-sparse reduced matrix of `layout`, bordered with the pressure-mean
/// multiplier when the problem needs one. Touches no full-order operator.
pub fn assemble_reduced_matrix(
    layout: &Layout,
    lib: &ReducedBlockLibrary,
    problem: &Problem,
) -> Result<(SparseMatrix, Vec<usize>)> {
    check_library(lib, problem)?;
    let n_sub = layout.n_subdomains();
    let mut offsets = Vec::with_capacity(n_sub + 1);
    offsets.push(0);
    for m in 0..n_sub {
        offsets.push(offsets[m] + lib.rank(layout.reference(m))?);
    }
    let n = offsets[n_sub];
    let mean_zero = problem.needs_mean_zero(layout);
    let size = n + usize::from(mean_zero);
    let block_nnz: usize = (0..n_sub).map(|m| (offsets[m + 1] - offsets[m]).pow(2)).sum();
    let mut t = Triplets::with_capacity(size, size, 5 * block_nnz + 2 * n);
    let bc = problem.side_conditions(layout);
    for m in 0..n_sub {
        let r = layout.reference(m);
        let o = offsets[m];
        t.add_dense(o, o, &lib.domain[r]);
        for side in reduced_dirichlet_sides(layout, m, &bc, lib) {
            t.add_dense(o, o, lib.boundary_block(r, side)?);
        }
    }
    for f in find_interfaces(layout) {
        let q = lib.interface_blocks(layout.reference(f.m), layout.reference(f.n), f.axis)?;
        let (om, on) = (offsets[f.m], offsets[f.n]);
        t.add_dense(om, om, &q[0]);
        t.add_dense(om, on, &q[1]);
        t.add_dense(on, om, &q[2]);
        t.add_dense(on, on, &q[3]);
    }
    if mean_zero {
        for m in 0..n_sub {
            let w = lib
                .mean
                .get(layout.reference(m))
                .ok_or_else(|| Error::MissingBlock(format!("mean_{}", layout.reference(m))))?;
            for (i, &wi) in w.iter().enumerate() {
                t.push(offsets[m] + i, n, wi);
                t.push(n, offsets[m] + i, wi);
            }
        }
    }
    Ok((t.to_csr(), offsets))
}

/// `Phi_r^T F_m` per subdomain, truncated to the library ranks. The
/// full-order right-hand side is formed per subdomain only.
pub fn reduced_rhs(
    layout: &Layout,
    lib: &ReducedBlockLibrary,
    pool: &ComponentPool,
    bases: &BTreeMap<String, PodBasis>,
    problem: &Problem,
) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for m in 0..layout.n_subdomains() {
        let r = layout.reference(m);
        let basis = bases.get(r).ok_or_else(|| Error::UnknownReference(r.to_string()))?;
        let f = subdomain_rhs(layout, pool.get(r)?, m, problem, lib.gamma)?;
        let k = lib.rank(r)?;
        if k > basis.rank() {
            return Err(Error::DimensionMismatch(format!(
                "library rank {k} exceeds basis rank {} for `{r}`",
                basis.rank()
            )));
        }
        let mut q = basis.project(&f);
        q.truncate(k);
        out.extend(q);
    }
    if problem.needs_mean_zero(layout) {
        out.push(0.0);
    }
    Ok(out)
}

pub fn assemble_reduced_system(
    layout: &Layout,
    lib: &ReducedBlockLibrary,
    pool: &ComponentPool,
    bases: &BTreeMap<String, PodBasis>,
    problem: &Problem,
) -> Result<(ReducedSystem, AssemblyTiming)> {
    let t0 = Instant::now();
    let (matrix, offsets) = assemble_reduced_matrix(layout, lib, problem)?;
    let t1 = Instant::now();
    let rhs = reduced_rhs(layout, lib, pool, bases, problem)?;
    let timing = AssemblyTiming { matrix: t1 - t0, rhs: t1.elapsed() };
    Ok((ReducedSystem { offsets, system: LinearSystem::new(matrix, rhs)? }, timing))
}

/// Relative residual accepted from the reduced direct solve.
pub const REDUCED_RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Sparse LU solve of the reduced system with one step of iterative
/// refinement; returns the reduced coordinates without the multiplier.
pub fn solve_reduced(sys: &ReducedSystem) -> Result<Vec<f64>> {
    let (a, b) = (&sys.system.matrix, &sys.system.rhs);
    let lu = SparseLu::factor(a)?;
    let mut q = lu.solve(b)?;
    let residual = |q: &[f64]| -> Vec<f64> { b.iter().zip(a.mul_vec(q)).map(|(u, v)| u - v).collect() };
    let dq = lu.solve(&residual(&q))?;
    q.iter_mut().zip(dq).for_each(|(x, d)| *x += d);
    let bn = norm2(b);
    if bn > 0.0 {
        let rel = norm2(&residual(&q)) / bn;
        if !(rel <= REDUCED_RESIDUAL_TOLERANCE) {
            return Err(Error::Contract(format!(
                "reduced solve left relative residual {rel:.3e}; the basis may be deficient"
            )));
        }
    }
    q.truncate(sys.n_reduced());
    Ok(q)
}

/// `u_m = Phi_r q_m`, using the leading columns when the reduced block is
/// shorter than the basis.
pub fn lift_solution(
    layout: &Layout,
    bases: &BTreeMap<String, PodBasis>,
    offsets: &[usize],
    q: &[f64],
) -> Result<Vec<Vec<f64>>> {
    (0..layout.n_subdomains())
        .map(|m| {
            let r = layout.reference(m);
            let basis = bases.get(r).ok_or_else(|| Error::UnknownReference(r.to_string()))?;
            let mut qm = q[offsets[m]..offsets[m + 1]].to_vec();
            if qm.len() > basis.rank() {
                return Err(Error::DimensionMismatch(format!("{} coordinates for a rank-{} basis", qm.len(), basis.rank())));
            }
            qm.resize(basis.rank(), 0.0);
            Ok(basis.lift(&qm))
        })
        .collect()
}

/// `||u - u_rom|| / ||u||` in the broken mass norm of the layout
/// (velocity and pressure masses summed for Stokes).
pub fn relative_error(pool: &ComponentPool, layout: &Layout, fom: &[Vec<f64>], rom: &[Vec<f64>]) -> Result<f64> {
    if fom.len() != layout.n_subdomains() || rom.len() != fom.len() {
        return Err(Error::DimensionMismatch("solution count differs from layout".into()));
    }
    let mut masses: BTreeMap<&str, SparseMatrix> = BTreeMap::new();
    let (mut num, mut den) = (0.0, 0.0);
    for m in 0..layout.n_subdomains() {
        let r = layout.reference(m);
        if !masses.contains_key(r) {
            masses.insert(r, pool.get(r)?.mass_matrix());
        }
        let mass = &masses[r];
        if fom[m].len() != mass.nrows() || rom[m].len() != mass.nrows() {
            return Err(Error::DimensionMismatch(format!("subdomain {m} vector length")));
        }
        let e: Vec<f64> = fom[m].iter().zip(&rom[m]).map(|(a, b)| a - b).collect();
        num += dot(&e, &mass.mul_vec(&e));
        den += dot(&fom[m], &mass.mul_vec(&fom[m]));
    }
    if den <= 0.0 {
        return Err(Error::InvalidArgument("reference solution has zero norm".into()));
    }
    Ok((num.max(0.0) / den).sqrt())
}
