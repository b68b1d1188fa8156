use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dgdd::{assemble_global_fom, subdomain_rhs, ComponentPool, Layout, Problem, ReferenceDomain};
use crate::error::{Error, Result};
use crate::linalg::{direct_solve, DenseMatrix, SparseLu};
use crate::physics::{FlowRange, PoissonProblem, StokesProblem, WaveRange};

/// Snapshot columns of one reference component.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotSet {
    pub reference: String,
    pub seed: u64,
    columns: Vec<Vec<f64>>,
}

impl SnapshotSet {
    pub fn new(reference: &str, seed: u64) -> Self {
        SnapshotSet { reference: reference.to_string(), seed, columns: Vec::new() }
    }

    pub fn push(&mut self, column: Vec<f64>) -> Result<()> {
        if let Some(first) = self.columns.first() {
            if first.len() != column.len() {
                return Err(Error::DimensionMismatch(format!(
                    "snapshot of length {} in a set of length {}",
                    column.len(),
                    first.len()
                )));
            }
        }
        self.columns.push(column);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// `N x S` snapshot matrix.
    pub fn matrix(&self) -> Result<DenseMatrix> {
        DenseMatrix::from_columns(&self.columns)
    }
}

/// Generator of sample `i`: the seed's ChaCha stream `i`, so samples are
/// independent of how many were drawn before.
pub fn sample_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(i as u64);
    r
}

/// Solves the single-component problem with random sinusoidal forcing and
/// boundary data `count` times. The component matrix is factored once.
pub fn collect_snapshots_poisson(
    domain: &ReferenceDomain,
    count: usize,
    seed: u64,
    range: WaveRange,
) -> Result<SnapshotSet> {
    if count == 0 {
        return Err(Error::InvalidArgument("snapshot count must be at least 1".into()));
    }
    let pool = ComponentPool::new().with(domain.clone());
    let layout = Layout::uniform(1, 1, domain.name())?;
    let probe = Problem::Poisson(PoissonProblem::Linear { a: 0.0, b: [0.0; 2] });
    let gamma = probe.default_gamma();
    let sys = assemble_global_fom(&pool, &layout, &probe, gamma)?;
    let lu = SparseLu::factor(&sys.system.matrix)?;
    let mut set = SnapshotSet::new(domain.name(), seed);
    for i in 0..count {
        let mut rng = sample_rng(seed, i);
        let problem = Problem::Poisson(PoissonProblem::sample_wave(&mut rng, range));
        let column = subdomain_rhs(&layout, domain, 0, &problem, gamma)
            .and_then(|rhs| lu.solve(&rhs))
            .map_err(|e| Error::Sample { index: i, source: Box::new(e) })?;
        set.push(column)?;
    }
    Ok(set)
}

/// Solves `count` random 2x2 flow-past-array layouts, each cell drawn
/// uniformly from `pool`, and files every subdomain solution under its
/// reference. Returns one set per pool member (possibly empty).
pub fn collect_snapshots_stokes(
    pool: &ComponentPool,
    count: usize,
    seed: u64,
    range: FlowRange,
    nu: f64,
) -> Result<BTreeMap<String, SnapshotSet>> {
    let names: Vec<&str> = pool.names().collect();
    if names.is_empty() || count == 0 {
        return Err(Error::InvalidArgument("need a nonempty pool and at least one sample".into()));
    }
    let mut sets: BTreeMap<String, SnapshotSet> =
        names.iter().map(|n| (n.to_string(), SnapshotSet::new(n, seed))).collect();
    for i in 0..count {
        let mut rng = sample_rng(seed, i);
        let cells: Vec<&str> = (0..4).map(|_| names[rng.gen_range(0..names.len())]).collect();
        let problem = Problem::Stokes(StokesProblem::sample_flow_past_array(&mut rng, range, nu));
        let layout = Layout::new(2, 2, &cells)?;
        let solve = || -> Result<Vec<Vec<f64>>> {
            let g = assemble_global_fom(pool, &layout, &problem, problem.default_gamma())?;
            let x = direct_solve(&g.system.matrix, &g.system.rhs)?;
            Ok(g.split(&x))
        };
        let parts = solve().map_err(|e| Error::Sample { index: i, source: Box::new(e) })?;
        for (m, part) in parts.into_iter().enumerate() {
            sets.get_mut(cells[m]).expect("pool member").push(part)?;
        }
    }
    Ok(sets)
}
