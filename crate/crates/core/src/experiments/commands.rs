use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::config::ExperimentConfig;
use super::metrics::{metrics_csv, mms_csv, MetricsRow, MmsRow};
use crate::dgdd::{
    assemble_global_fom, default_penalty, ComponentPool, Layout, Physics, Problem, ReferenceDomain,
};
use crate::error::{Error, Result};
use crate::fem::{assemble_mass, l2_error};
use crate::linalg::io::singular_values_csv;
use crate::linalg::{minres_solve, BlockDiagonal, SparseLu};
use crate::mesh::{gen_quad_grid, gen_tri_grid, Mesh2D, Side};
use crate::physics::{
    mms_pressure, mms_velocity, stokes_mms, FlowRange, PoissonProblem, StokesFlow, StokesProblem, WaveRange,
};
use crate::rom::{
    assemble_reduced_matrix, collect_snapshots_poisson, collect_snapshots_stokes, lift_solution, parse_basis,
    pod_train, reduced_rhs, relative_error, sample_rng, solve_reduced, write_basis, PodBasis,
    ReducedBlockLibrary, ReducedSystem, SnapshotSet, Truncation,
};

/// Stream families, kept disjoint from the training streams `0..samples`.
const TEST_STREAMS: u64 = 1 << 40;
const EXTRAPOLATION_STREAMS: u64 = 2 << 40;

fn trial_rng(seed: u64, family: u64, trial: usize) -> ChaCha8Rng {
    sample_rng(seed, (family + trial as u64) as usize)
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    }
    fs::write(path, body).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn basis_path(out: &Path, reference: &str) -> PathBuf {
    out.join(format!("basis_{reference}.pod"))
}

pub fn blocks_dir(out: &Path) -> PathBuf {
    out.join("blocks")
}

/// Trained bases and projected library of one configuration.
#[derive(Clone, Debug)]
pub struct TrainedModel {
    pub pool: ComponentPool,
    pub bases: BTreeMap<String, PodBasis>,
    pub library: ReducedBlockLibrary,
}

impl TrainedModel {
    pub fn gamma(&self) -> f64 {
        self.library.gamma
    }

    /// Library restricted to the leading `rank` modes of every reference.
    pub fn library_at_rank(&self, rank: usize) -> Result<ReducedBlockLibrary> {
        let ranks = self.bases.keys().map(|r| (r.clone(), rank)).collect();
        self.library.truncated(&ranks)
    }
}

/// Per-reference training record.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainRecord {
    pub reference: String,
    pub snapshots: usize,
    pub dofs: usize,
    pub rank: usize,
    pub energy: f64,
}

/// Snapshot collection, POD and projection; writes `basis_<r>.pod`,
/// `sigma_<r>.csv`, `train.csv` and the block library under `cfg.out`.
pub fn cmd_train(cfg: &ExperimentConfig) -> Result<(TrainedModel, Vec<TrainRecord>)> {
    let pool = cfg.pool()?;
    let sets: BTreeMap<String, SnapshotSet> = match cfg.physics {
        Physics::Poisson => pool
            .iter()
            .map(|d| {
                let range = WaveRange { k_max: cfg.train.k_max };
                Ok((d.name().to_string(), collect_snapshots_poisson(d, cfg.train.samples, cfg.seed, range)?))
            })
            .collect::<Result<_>>()?,
        Physics::Stokes => {
            let range = FlowRange { g_max: cfg.train.g_max };
            collect_snapshots_stokes(&pool, cfg.train.samples, cfg.seed, range, cfg.nu)?
        }
    };
    let mut bases = BTreeMap::new();
    let mut records = Vec::new();
    for (name, set) in &sets {
        if set.is_empty() {
            return Err(Error::Config(format!("component `{name}` received no snapshots")));
        }
        let rank = cfg.train.max_rank.min(set.len()).min(set.dim());
        let basis = pod_train(set, Truncation::Rank(rank))?;
        write_file(&basis_path(&cfg.out, name), &write_basis(&basis))?;
        write_file(&cfg.out.join(format!("sigma_{name}.csv")), &singular_values_csv(&basis.sigma))?;
        records.push(TrainRecord {
            reference: name.clone(),
            snapshots: set.len(),
            dofs: set.dim(),
            rank,
            energy: basis.energy(rank),
        });
        bases.insert(name.clone(), basis);
    }
    let gamma = default_penalty(cfg.physics, cfg.nu);
    let library = ReducedBlockLibrary::project_operators(&pool, &bases, gamma, cfg.nu)?;
    library.write_dir(&blocks_dir(&cfg.out))?;
    let mut summary = String::from("reference,snapshots,dofs,rank,energy\n");
    for r in &records {
        summary.push_str(&format!("{},{},{},{},{:.16e}\n", r.reference, r.snapshots, r.dofs, r.rank, r.energy));
    }
    write_file(&cfg.out.join("train.csv"), &summary)?;
    Ok((TrainedModel { pool, bases, library }, records))
}

/// Reads what [`cmd_train`] wrote.
pub fn load_trained(cfg: &ExperimentConfig) -> Result<TrainedModel> {
    let pool = cfg.pool()?;
    let mut bases = BTreeMap::new();
    for name in pool.names() {
        let path = basis_path(&cfg.out, name);
        let text = fs::read_to_string(&path)
            .map_err(|e| Error::io(format!("reading {} (run `train` first)", path.display()), e))?;
        let basis = parse_basis(&text)?;
        if basis.dim() != pool.get(name)?.dof_count() {
            return Err(Error::DimensionMismatch(format!("{} does not fit component `{name}`", path.display())));
        }
        bases.insert(name.to_string(), basis);
    }
    let library = ReducedBlockLibrary::read_dir(&blocks_dir(&cfg.out))?;
    if library.physics != cfg.physics || (library.nu - cfg.nu).abs() > 1e-12 * cfg.nu {
        return Err(Error::Config("stored library was trained for a different physics or viscosity".into()));
    }
    Ok(TrainedModel { pool, bases, library })
}

fn random_layout(rng: &mut ChaCha8Rng, pool: &ComponentPool, n: usize) -> Result<Layout> {
    let names: Vec<&str> = pool.names().collect();
    let cells: Vec<&str> = (0..n * n).map(|_| names[rng.gen_range(0..names.len())]).collect();
    Layout::new(n, n, &cells)
}

/// Test instance `trial` of the scale-up study on an `n x n` layout.
pub fn test_instance(cfg: &ExperimentConfig, pool: &ComponentPool, n: usize, trial: usize) -> Result<(Layout, Problem)> {
    let mut rng = trial_rng(cfg.seed, TEST_STREAMS, trial);
    let layout = random_layout(&mut rng, pool, n)?;
    let problem = match cfg.physics {
        Physics::Poisson => {
            Problem::Poisson(PoissonProblem::sample_wave(&mut rng, WaveRange { k_max: cfg.scaleup.k_max }))
        }
        Physics::Stokes => Problem::Stokes(StokesProblem::sample_flow_past_array(
            &mut rng,
            FlowRange { g_max: cfg.scaleup.g_max },
            cfg.nu,
        )),
    };
    Ok((layout, problem))
}

/// Out-of-training instance: a spiral source (Poisson) or a channel flow
/// spanning the layout height (Stokes).
pub fn extrapolation_instance(
    cfg: &ExperimentConfig,
    pool: &ComponentPool,
    n: usize,
    trial: usize,
) -> Result<(Layout, Problem)> {
    let mut rng = trial_rng(cfg.seed, EXTRAPOLATION_STREAMS, trial);
    let layout = random_layout(&mut rng, pool, n)?;
    let problem = match cfg.physics {
        Physics::Poisson => {
            Problem::Poisson(PoissonProblem::sample_spiral(&mut rng, cfg.extrapolate.spiral, n as f64))
        }
        Physics::Stokes => Problem::Stokes(StokesProblem {
            nu: cfg.nu,
            flow: StokesFlow::Channel { u_in: cfg.extrapolate.u_in, n_c: n as f64 },
        }),
    };
    Ok((layout, problem))
}

/// Full-order reference solution with its timings.
struct FomSolve {
    parts: Vec<Vec<f64>>,
    assembly_s: f64,
    solve_s: f64,
}

fn solve_fom(model: &TrainedModel, layout: &Layout, problem: &Problem) -> Result<FomSolve> {
    let t0 = Instant::now();
    let g = assemble_global_fom(&model.pool, layout, problem, model.gamma())?;
    let t1 = Instant::now();
    let x = SparseLu::factor(&g.system.matrix)?.solve(&g.system.rhs)?;
    let t2 = Instant::now();
    Ok(FomSolve { parts: g.split(&x), assembly_s: (t1 - t0).as_secs_f64(), solve_s: (t2 - t1).as_secs_f64() })
}

/// Reduced solve of one instance; fills the ROM columns of a row.
fn solve_rom(
    model: &TrainedModel,
    lib: &ReducedBlockLibrary,
    layout: &Layout,
    problem: &Problem,
    trial: usize,
    rank: usize,
) -> Result<(Vec<Vec<f64>>, MetricsRow)> {
    let t0 = Instant::now();
    let (matrix, offsets) = assemble_reduced_matrix(layout, lib, problem)?;
    let t1 = Instant::now();
    let rhs = reduced_rhs(layout, lib, &model.pool, &model.bases, problem)?;
    let t2 = Instant::now();
    let sys = ReducedSystem { offsets, system: crate::linalg::LinearSystem::new(matrix, rhs)? };
    let q = solve_reduced(&sys)?;
    let t3 = Instant::now();
    let parts = lift_solution(layout, &model.bases, &sys.offsets, &q)?;
    let row = MetricsRow {
        m: layout.n_subdomains(),
        trial,
        epsilon: None,
        fom_assembly_s: None,
        fom_solve_s: None,
        rom_assembly_s: (t2 - t0).as_secs_f64(),
        rom_solve_s: (t3 - t2).as_secs_f64(),
        iterations: 0,
        rank,
        rom_matrix_s: (t1 - t0).as_secs_f64(),
        rom_rhs_s: (t2 - t1).as_secs_f64(),
    };
    Ok((parts, row))
}

fn with_fom(model: &TrainedModel, layout: &Layout, fom: &FomSolve, rom: &[Vec<f64>], row: &mut MetricsRow) -> Result<()> {
    row.epsilon = Some(relative_error(&model.pool, layout, &fom.parts, rom)?);
    row.fom_assembly_s = Some(fom.assembly_s);
    row.fom_solve_s = Some(fom.solve_s);
    Ok(())
}

fn sample_error(trial: usize) -> impl Fn(Error) -> Error {
    move |e| Error::Sample { index: trial, source: Box::new(e) }
}

/// One row per (size, trial). Full-order columns and the error are filled
/// only for layouts of at most `fom_cutoff` components.
pub fn cmd_scaleup(cfg: &ExperimentConfig, model: &TrainedModel) -> Result<Vec<MetricsRow>> {
    let rank = cfg.scaleup.rank;
    let lib = model.library_at_rank(rank)?;
    let mut rows = Vec::new();
    for &n in &cfg.scaleup.sizes {
        for trial in 0..cfg.scaleup.trials {
            let run = || -> Result<MetricsRow> {
                let (layout, problem) = test_instance(cfg, &model.pool, n, trial)?;
                let (rom, mut row) = solve_rom(model, &lib, &layout, &problem, trial, rank)?;
                if layout.n_subdomains() <= cfg.scaleup.fom_cutoff {
                    let fom = solve_fom(model, &layout, &problem)?;
                    with_fom(model, &layout, &fom, &rom, &mut row)?;
                }
                Ok(row)
            };
            rows.push(run().map_err(sample_error(trial))?);
        }
    }
    Ok(rows)
}

/// Error and reduced solve time against rank on the scale-up test
/// instances. Rows are ordered by trial, then rank.
pub fn cmd_rank_sweep(cfg: &ExperimentConfig, model: &TrainedModel) -> Result<Vec<MetricsRow>> {
    let libs: Vec<(usize, ReducedBlockLibrary)> =
        cfg.ranksweep.ranks.iter().map(|&r| Ok((r, model.library_at_rank(r)?))).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for trial in 0..cfg.ranksweep.trials {
        let run = || -> Result<Vec<MetricsRow>> {
            let (layout, problem) = test_instance(cfg, &model.pool, cfg.ranksweep.size, trial)?;
            let fom = solve_fom(model, &layout, &problem)?;
            libs.iter()
                .map(|(r, lib)| {
                    let (rom, mut row) = solve_rom(model, lib, &layout, &problem, trial, *r)?;
                    with_fom(model, &layout, &fom, &rom, &mut row)?;
                    Ok(row)
                })
                .collect()
        };
        rows.extend(run().map_err(sample_error(trial))?);
    }
    Ok(rows)
}

/// Reduced and full-order solves of out-of-training problems.
pub fn cmd_extrapolate(cfg: &ExperimentConfig, model: &TrainedModel) -> Result<Vec<MetricsRow>> {
    let rank = cfg.extrapolate.rank;
    let lib = model.library_at_rank(rank)?;
    (0..cfg.extrapolate.trials)
        .map(|trial| {
            let run = || -> Result<MetricsRow> {
                let (layout, problem) = extrapolation_instance(cfg, &model.pool, cfg.extrapolate.size, trial)?;
                let (rom, mut row) = solve_rom(model, &lib, &layout, &problem, trial, rank)?;
                let fom = solve_fom(model, &layout, &problem)?;
                with_fom(model, &layout, &fom, &rom, &mut row)?;
                Ok(row)
            };
            run().map_err(sample_error(trial))
        })
        .collect()
}

fn mms_mesh(shape: &str, n: usize) -> Result<Mesh2D> {
    match shape {
        "tri" => gen_tri_grid(n),
        _ => gen_quad_grid(n),
    }
}

/// Mean of `f` over the mesh by volume quadrature.
fn domain_mean(d: &ReferenceDomain, f: impl Fn([f64; 2]) -> f64) -> f64 {
    let space = d.pressure().expect("Stokes component");
    let rule = space.volume_rule();
    let (mut int, mut area) = (0.0, 0.0);
    for cell in 0..space.mesh().n_cells() {
        let map = space.cell_map(cell);
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let q = space.point_values(&map, *p, *w);
            int += f(q.x) * q.jxw;
            area += q.jxw;
        }
    }
    int / area
}

/// Manufactured-solution convergence study on the unit square, solved with
/// MINRES with and without the block-diagonal preconditioner. Errors are
/// taken from the preconditioned solution.
pub fn cmd_mms(cfg: &ExperimentConfig) -> Result<Vec<MmsRow>> {
    let mut rows: Vec<MmsRow> = Vec::new();
    for &n in &cfg.mms.levels {
        let d = ReferenceDomain::stokes("mms", Arc::new(mms_mesh(&cfg.mms.shape, n)?))?;
        let pool = ComponentPool::new().with(d.clone());
        let layout = Layout::uniform(1, 1, "mms")?;
        let problem = Problem::Stokes(stokes_mms(cfg.nu));
        let g = assemble_global_fom(&pool, &layout, &problem, problem.default_gamma())?;
        let (a, b) = (&g.system.matrix, &g.system.rhs);
        let max_iter = cfg.mms.max_iter_factor * a.nrows();
        let (_, plain) = minres_solve(a, b, cfg.mms.tol, max_iter, None)?;
        let po = d.pressure_offset();
        let pressure_mass = assemble_mass(d.pressure().unwrap()).scaled(1.0 / cfg.nu);
        let pre = BlockDiagonal::stokes(a, (0..po).collect(), (po..d.dof_count()).collect(), pressure_mass, cfg.mms.sweeps);
        let (x, report) = minres_solve(a, b, cfg.mms.tol, max_iter, Some(&pre))?;
        let (eu, nu_) = l2_error(d.primary(), &x[..po], mms_velocity);
        let nu = cfg.nu;
        let shift = domain_mean(&d, |y| mms_pressure(nu, y));
        let (ep, np) = l2_error(d.pressure().unwrap(), &x[po..d.dof_count()], |y| [mms_pressure(nu, y) - shift, 0.0]);
        let h = 1.0 / n as f64;
        let (velocity_error, pressure_error) = (eu / nu_, ep / np);
        let order = |prev: Option<&MmsRow>, e: f64, pick: fn(&MmsRow) -> f64| {
            prev.map(|p| (pick(p) / e).ln() / (p.h / h).ln())
        };
        let prev = rows.last();
        rows.push(MmsRow {
            h,
            dofs: a.nrows(),
            velocity_error,
            pressure_error,
            velocity_order: order(prev, velocity_error, |r| r.velocity_error),
            pressure_order: order(prev, pressure_error, |r| r.pressure_error),
            iterations_plain: plain.iterations,
            iterations_precond: report.iterations,
            converged_plain: plain.converged,
            converged_precond: report.converged,
            residual_plain: plain.relative_residual,
            residual_precond: report.relative_residual,
            seconds_plain: plain.seconds,
            seconds_precond: report.seconds,
        });
    }
    Ok(rows)
}

pub fn write_metrics(cfg: &ExperimentConfig, name: &str, rows: &[MetricsRow]) -> Result<PathBuf> {
    let path = cfg.out.join(name);
    write_file(&path, &metrics_csv(rows))?;
    Ok(path)
}

pub fn write_mms(cfg: &ExperimentConfig, rows: &[MmsRow]) -> Result<PathBuf> {
    let path = cfg.out.join("mms.csv");
    write_file(&path, &mms_csv(rows))?;
    Ok(path)
}

/// The parameter draws behind training samples `0..count` (or the test
/// instances) as TOML `[[samples]]` tables.
pub fn cmd_sample(cfg: &ExperimentConfig, count: usize, test: bool) -> Result<String> {
    let pool = cfg.pool()?;
    let names: Vec<&str> = pool.names().collect();
    let mut samples = Vec::with_capacity(count);
    for i in 0..count {
        let (cells, problem) = if test {
            let (layout, problem) = test_instance(cfg, &pool, 2, i)?;
            ((0..4).map(|m| layout.reference(m).to_string()).collect(), problem)
        } else {
            let mut rng = sample_rng(cfg.seed, i);
            match cfg.physics {
                Physics::Poisson => {
                    let range = WaveRange { k_max: cfg.train.k_max };
                    (Vec::new(), Problem::Poisson(PoissonProblem::sample_wave(&mut rng, range)))
                }
                // Same draw order as the Stokes snapshot collection.
                Physics::Stokes => {
                    let cells: Vec<String> =
                        (0..4).map(|_| names[rng.gen_range(0..names.len())].to_string()).collect();
                    let range = FlowRange { g_max: cfg.train.g_max };
                    (cells, Problem::Stokes(StokesProblem::sample_flow_past_array(&mut rng, range, cfg.nu)))
                }
            }
        };
        let mut t = match toml::Value::try_from(problem).map_err(|e| Error::Config(e.to_string()))? {
            toml::Value::Table(t) => t,
            _ => unreachable!("problems serialize to tables"),
        };
        t.insert("index".into(), toml::Value::Integer(i as i64));
        if !cells.is_empty() {
            t.insert("cells".into(), toml::Value::Array(cells.into_iter().map(toml::Value::String).collect()));
        }
        samples.push(toml::Value::Table(t));
    }
    let mut doc = toml::Table::new();
    doc.insert("samples".into(), toml::Value::Array(samples));
    toml::to_string(&doc).map_err(|e| Error::Config(e.to_string()))
}

/// Human-readable mesh statistics.
pub fn mesh_summary(mesh: &Mesh2D) -> String {
    let shape = match mesh.uniform_shape() {
        Some(s) => format!("{s:?}"),
        None => "mixed".into(),
    };
    let mut s = format!(
        "vertices {}\ncells {} ({shape})\narea {:.12}\n",
        mesh.n_vertices(),
        mesh.n_cells(),
        mesh.area()
    );
    for side in [Side::Left, Side::Right, Side::Bottom, Side::Top, Side::Obstacle] {
        let n = mesh.boundary_edges().iter().filter(|e| e.side == side).count();
        if n > 0 {
            s.push_str(&format!("side {} edges {n}\n", side.code()));
        }
    }
    s
}
