//! End-to-end acceptance checks. Runs sequentially (timings and the global
//! FOM-assembly counter must not see other work) and prints one line per
//! criterion; exits nonzero if any criterion fails.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use romdd::dgdd::{assemble_global_fom, fom_assembly_count, ComponentPool, Layout, Physics, Problem, ReferenceDomain};
use romdd::experiments::{
    cmd_extrapolate, cmd_mms, cmd_rank_sweep, cmd_sample, cmd_scaleup, cmd_train, loglog_slope, median, metrics_csv,
    mms_csv, strip_columns, ExperimentConfig, MeshSpec, MetricsRow, MmsRow, TrainedModel,
};
use romdd::fem::{assemble_load, assemble_stiffness, build_space, SpaceKind};
use romdd::linalg::{direct_solve, DenseMatrix, Triplets};
use romdd::mesh::{gen_quad_grid, gen_tri_grid, Side};
use romdd::physics::PoissonProblem;
use romdd::rom::{
    assemble_reduced_system, collect_snapshots_poisson, lift_solution, pod_train, relative_error, solve_reduced,
    PodBasis, ReducedBlockLibrary, SnapshotSet, Truncation,
};
use romdd::Result;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn fom_parts(pool: &ComponentPool, layout: &Layout, problem: &Problem) -> Result<Vec<Vec<f64>>> {
    let g = assemble_global_fom(pool, layout, problem, problem.default_gamma())?;
    Ok(g.split(&g.solve_direct()?))
}

fn desk(physics: Physics, out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::desk(physics);
    cfg.out = out.to_path_buf();
    cfg
}

fn eps(rows: &[MetricsRow]) -> Vec<f64> {
    rows.iter().filter_map(|r| r.epsilon).collect()
}

// 1: linear data through non-matching interfaces.
fn patch_test() -> Result<Outcome> {
    let pool = ComponentPool::new()
        .with(ReferenceDomain::poisson("q", Arc::new(gen_quad_grid(4)?))?)
        .with(ReferenceDomain::poisson("t", Arc::new(gen_tri_grid(3)?))?);
    let layout = Layout::new(2, 2, &["q", "t", "t", "q"])?;
    let exact = PoissonProblem::Linear { a: 0.3, b: [0.7, -0.2] };
    let u = fom_parts(&pool, &layout, &Problem::Poisson(exact))?;
    let want: Vec<Vec<f64>> = (0..4)
        .map(|m| {
            let o = layout.origin(m);
            pool.get(layout.reference(m))?.primary().interpolate(|p| exact.dirichlet([p[0] + o[0], p[1] + o[1]]))
        })
        .collect::<Result<_>>()?;
    let e = relative_error(&pool, &layout, &want, &u)?;
    outcome(e <= 1e-10, format!("eps {e:.2e} (<= 1e-10)"))
}

/// Conforming Q1 solve of the wave problem on `[0, 2]^2`, done on the unit
/// square after scaling `x = 2 xi` (so the load picks up a factor 4), with
/// strongly imposed Dirichlet values. Returns nodal values keyed by the
/// global grid index of each node.
fn monolithic(problem: &PoissonProblem, n: usize) -> Result<HashMap<(i64, i64), f64>> {
    let space = build_space(Arc::new(gen_quad_grid(n)?), SpaceKind::ScalarQ1)?;
    let k = assemble_stiffness(&space, 1.0);
    let f = assemble_load(&space, |xi| 4.0 * problem.forcing([2.0 * xi[0], 2.0 * xi[1]]))?;
    let nd = space.dof_count();
    let mut fixed: Vec<Option<f64>> = vec![None; nd];
    for side in Side::OUTER {
        for i in space.boundary_dofs(side) {
            let xi = space.node_coords()[i];
            fixed[i] = Some(problem.dirichlet([2.0 * xi[0], 2.0 * xi[1]]));
        }
    }
    let mut t = Triplets::new(nd, nd);
    let mut rhs = f;
    for i in 0..nd {
        if let Some(g) = fixed[i] {
            t.push(i, i, 1.0);
            rhs[i] = g;
            continue;
        }
        for (j, v) in k.row(i) {
            match fixed[j] {
                Some(g) => rhs[i] -= v * g,
                None => t.push(i, j, v),
            }
        }
    }
    let u = direct_solve(&t.to_csr(), &rhs)?;
    let key = |x: f64| (x * n as f64).round() as i64;
    Ok(space.node_coords().iter().zip(u).map(|(p, v)| ((key(p[0]), key(p[1])), v)).collect())
}

fn dgdd_vs_monolithic(problem: &PoissonProblem, n_sub: usize) -> Result<f64> {
    let pool = ComponentPool::new().with(ReferenceDomain::poisson("q", Arc::new(gen_quad_grid(n_sub)?))?);
    let layout = Layout::uniform(2, 2, "q")?;
    let dg = fom_parts(&pool, &layout, &Problem::Poisson(*problem))?;
    let mono = monolithic(problem, 2 * n_sub)?;
    let d = pool.get("q")?;
    let key = |x: f64| (x * n_sub as f64).round() as i64;
    let reference: Vec<Vec<f64>> = (0..4)
        .map(|m| {
            let o = layout.origin(m);
            d.primary().node_coords().iter().map(|p| mono[&(key(p[0] + o[0]), key(p[1] + o[1]))]).collect()
        })
        .collect();
    relative_error(&pool, &layout, &reference, &dg)
}

fn dgdd_matches_monolithic() -> Result<Outcome> {
    let wave = PoissonProblem::Wave { k: [0.35, -0.25], theta: 0.1, kb: [0.2, 0.45], theta_b: 0.3 };
    let coarse = dgdd_vs_monolithic(&wave, 16)?;
    let fine = dgdd_vs_monolithic(&wave, 32)?;
    let ratio = coarse / fine;
    outcome(
        coarse <= 1e-2 && ratio >= 1.8,
        format!("difference {coarse:.3e} at 16x16, {fine:.3e} at 32x32, ratio {ratio:.2} (<= 1e-2, >= 1.8)"),
    )
}

fn stokes_mms(out: &Path) -> Result<Outcome> {
    let rows: Vec<MmsRow> = cmd_mms(&desk(Physics::Stokes, out))?;
    let mut pass = rows.len() >= 4 && rows[0].h == 0.125;
    let mut orders = Vec::new();
    for r in &rows[1..] {
        let (v, p) = (r.velocity_order.unwrap_or(f64::NAN), r.pressure_order.unwrap_or(f64::NAN));
        pass &= within(v, 3.0, 0.4) && within(p, 2.0, 0.4);
        orders.push(format!("{v:.2}/{p:.2}"));
    }
    for r in &rows {
        pass &= r.converged_plain && r.converged_precond;
        pass &= r.residual_plain <= 1e-10 && r.residual_precond <= 1e-10;
        pass &= r.iterations_precond <= r.iterations_plain;
    }
    let its: Vec<String> = rows.iter().map(|r| format!("{}/{}", r.iterations_precond, r.iterations_plain)).collect();
    outcome(
        pass,
        format!(
            "velocity/pressure orders [{}] (3.0/2.0 +- 0.4), MINRES precond/plain [{}]",
            orders.join(", "),
            its.join(", ")
        ),
    )
}

fn pod_correctness() -> Result<Outcome> {
    let (mut ey, mut ortho) = (0.0f64, 0.0f64);
    for seed in 0..3 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut set = SnapshotSet::new("rand", seed);
        for _ in 0..40 {
            set.push((0..200).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
        }
        let q = set.matrix()?;
        let qn = q.frobenius_norm();
        for r in [1, 5, 17, 39, 40] {
            let b = pod_train(&set, Truncation::Rank(r))?;
            let err = q.sub(&b.phi.matmul(&b.phi.tr_matmul(&q))).frobenius_norm();
            let tail = b.sigma[r..].iter().map(|s| s * s).sum::<f64>().sqrt();
            ey = ey.max((err - tail).abs() / qn);
            ortho = ortho.max(b.phi.tr_matmul(&b.phi).max_abs_diff(&DenseMatrix::identity(r)));
        }
    }
    outcome(
        ey <= 1e-10 && ortho <= 1e-12,
        format!("Eckart-Young defect {ey:.2e} (<= 1e-10), orthonormality {ortho:.2e} (<= 1e-12)"),
    )
}

fn full_rank_rom() -> Result<Outcome> {
    let d = ReferenceDomain::poisson("q", Arc::new(gen_quad_grid(4)?))?;
    let n = d.dof_count();
    let set = collect_snapshots_poisson(&d, 2 * n, 7, romdd::physics::WaveRange::TRAIN)?;
    let basis = pod_train(&set, Truncation::Rank(n))?;
    let pool = ComponentPool::new().with(d);
    let bases: BTreeMap<String, PodBasis> = [("q".to_string(), basis)].into();
    let problem = Problem::Poisson(PoissonProblem::Wave { k: [0.6, -0.4], theta: 0.2, kb: [-0.3, 0.5], theta_b: 0.7 });
    let lib = ReducedBlockLibrary::project_operators(&pool, &bases, problem.default_gamma(), 1.0)?;
    let layout = Layout::uniform(2, 2, "q")?;
    let (sys, _) = assemble_reduced_system(&layout, &lib, &pool, &bases, &problem)?;
    let rom = lift_solution(&layout, &bases, &sys.offsets, &solve_reduced(&sys)?)?;
    let e = relative_error(&pool, &layout, &fom_parts(&pool, &layout, &problem)?, &rom)?;
    outcome(e <= 1e-8, format!("R = N = {n}: eps {e:.2e} (<= 1e-8)"))
}

fn poisson_scaleup(cfg: &ExperimentConfig, model: &TrainedModel) -> Result<Outcome> {
    let rows = cmd_scaleup(cfg, model)?;
    let e = eps(&rows);
    let (med, max) = (median(e.iter().copied()).unwrap_or(f64::NAN), e.iter().copied().fold(0.0, f64::max));
    let pass = e.len() == 40 && med <= 0.03 && max <= 0.10;
    outcome(pass, format!("{} trials: median eps {med:.3e} (<= 3e-2), max {max:.3e} (<= 1e-1)", e.len()))
}

fn rank_scaling(cfg: &ExperimentConfig, model: &TrainedModel) -> Result<Outcome> {
    let rows = cmd_rank_sweep(cfg, model)?;
    let ranks = &cfg.ranksweep.ranks;
    let at = |r: usize, f: &dyn Fn(&MetricsRow) -> f64| {
        median(rows.iter().filter(|row| row.rank == r).map(f)).unwrap_or(f64::NAN)
    };
    let err: Vec<(f64, f64)> = ranks.iter().map(|&r| (r as f64, at(r, &|row| row.epsilon.unwrap_or(f64::NAN)))).collect();
    let time: Vec<(f64, f64)> = ranks.iter().map(|&r| (r as f64, at(r, &|row| row.rom_solve_s))).collect();
    let es = loglog_slope(&err).unwrap_or(f64::NAN);
    let ts = loglog_slope(&time).unwrap_or(f64::NAN);
    outcome(
        es <= -3.0 && within(ts, 1.0, 0.5),
        format!("error slope {es:.2} (<= -3), ROM solve-time slope {ts:.2} (1.0 +- 0.5)"),
    )
}

fn stokes_scaleup(cfg: &ExperimentConfig, model: &TrainedModel) -> Result<Outcome> {
    let rows = cmd_scaleup(cfg, model)?;
    let e = eps(&rows);
    let med = median(e.iter().copied()).unwrap_or(f64::NAN);
    outcome(e.len() == 10 && med <= 0.05, format!("{} trials: median eps {med:.3e} (<= 5e-2)", e.len()))
}

fn extrapolation(
    pc: &ExperimentConfig,
    pm: &TrainedModel,
    sc: &ExperimentConfig,
    sm: &TrainedModel,
) -> Result<Outcome> {
    let spiral = median(eps(&cmd_extrapolate(pc, pm)?)).unwrap_or(f64::NAN);
    let channel = median(eps(&cmd_extrapolate(sc, sm)?)).unwrap_or(f64::NAN);
    outcome(
        spiral <= 0.10 && channel <= 0.10,
        format!("median eps spiral {spiral:.3e}, channel {channel:.3e} (<= 1e-1)"),
    )
}

fn speedup(cfg: &ExperimentConfig, model: &TrainedModel) -> Result<Outcome> {
    let mut c = cfg.clone();
    c.scaleup.sizes = vec![8];
    c.scaleup.trials = 5;
    let rows = cmd_scaleup(&c, model)?;
    let rom: f64 = rows.iter().map(|r| r.rom_assembly_s + r.rom_solve_s).sum();
    let fom: f64 = rows.iter().map(|r| r.fom_assembly_s.unwrap_or(f64::NAN) + r.fom_solve_s.unwrap_or(f64::NAN)).sum();
    let ratio = fom / rom;

    let lib = model.library_at_rank(c.scaleup.rank)?;
    let bases: BTreeMap<String, PodBasis> =
        model.bases.iter().map(|(k, b)| Ok((k.clone(), b.truncated(c.scaleup.rank)?))).collect::<Result<_>>()?;
    let (layout, problem) = romdd::experiments::test_instance(&c, &model.pool, 8, 0)?;
    let before = fom_assembly_count();
    let (sys, _) = assemble_reduced_system(&layout, &lib, &model.pool, &bases, &problem)?;
    let q = solve_reduced(&sys)?;
    lift_solution(&layout, &bases, &sys.offsets, &q)?;
    let untouched = fom_assembly_count() == before;
    let rom_bytes = lib.memory_bytes() + sys.system.matrix.memory_bytes();
    let fom_bytes = assemble_global_fom(&model.pool, &layout, &problem, model.gamma())?.system.matrix.memory_bytes();
    outcome(
        ratio >= 5.0 && untouched && rom_bytes < fom_bytes,
        format!(
            "8x8 FOM/ROM wall time {ratio:.1}x (>= 5), FOM assembly skipped: {untouched}, \
             ROM {rom_bytes} B < FOM matrix {fom_bytes} B"
        ),
    )
}

fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).expect("readable dir").flatten() {
            let p = e.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                out.insert(rel, fs::read(&p).expect("readable file"));
            }
        }
    }
    out
}

/// Every command's non-timing output, rerun from scratch.
fn run_all(physics: Physics, out: &Path) -> Result<(BTreeMap<String, Vec<u8>>, Vec<String>)> {
    let mut cfg = desk(physics, out);
    match physics {
        Physics::Poisson => {
            cfg.components = vec![romdd::experiments::ComponentSpec { name: "empty".into(), mesh: MeshSpec::Quad { n: 6 } }];
            cfg.train.samples = 40;
            cfg.train.max_rank = 12;
        }
        Physics::Stokes => {
            cfg.components = vec![
                romdd::experiments::ComponentSpec { name: "empty".into(), mesh: MeshSpec::Quad { n: 3 } },
                romdd::experiments::ComponentSpec {
                    name: "circle".into(),
                    mesh: MeshSpec::Circle { radius: 0.25, n_boundary: 4, n_ring: 2 },
                },
            ];
            cfg.train.samples = 8;
            cfg.train.max_rank = 10;
            cfg.mms.levels = vec![4, 8];
        }
    }
    cfg.scaleup.sizes = vec![2, 3];
    cfg.scaleup.trials = 2;
    cfg.scaleup.rank = 6;
    cfg.ranksweep.ranks = vec![4, 6];
    cfg.ranksweep.size = 2;
    cfg.ranksweep.trials = 2;
    cfg.extrapolate.size = 2;
    cfg.extrapolate.trials = 2;
    cfg.extrapolate.rank = 6;
    let (model, _) = cmd_train(&cfg)?;
    let strip = |rows: &[MetricsRow]| strip_columns(&metrics_csv(rows), MetricsRow::TIMING_COLUMNS);
    let mut csv = vec![
        strip(&cmd_scaleup(&cfg, &model)?),
        strip(&cmd_rank_sweep(&cfg, &model)?),
        strip(&cmd_extrapolate(&cfg, &model)?),
        cmd_sample(&cfg, 4, false)?,
        cmd_sample(&cfg, 4, true)?,
    ];
    if physics == Physics::Stokes {
        csv.push(strip_columns(&mms_csv(&cmd_mms(&cfg)?), MmsRow::TIMING_COLUMNS));
    }
    Ok((read_tree(out), csv))
}

fn determinism(root: &Path) -> Result<Outcome> {
    let mut same = true;
    let mut files = 0;
    for physics in [Physics::Poisson, Physics::Stokes] {
        let a = run_all(physics, &root.join(format!("{physics:?}-a")))?;
        let b = run_all(physics, &root.join(format!("{physics:?}-b")))?;
        files += a.0.len();
        same &= a == b;
    }
    outcome(same, format!("{files} training files and all stripped command outputs identical: {same}"))
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let poisson_cfg = desk(Physics::Poisson, &tmp.path().join("poisson"));
    let stokes_cfg = desk(Physics::Stokes, &tmp.path().join("stokes"));
    let mut poisson: Option<TrainedModel> = None;
    let mut stokes: Option<TrainedModel> = None;

    let mut failed = 0;
    let mut record = |id: &str, budget_s: f64, run: &mut dyn FnMut() -> Result<Outcome>| {
        let t = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let s = t.elapsed().as_secs_f64();
        let ok = pass && s < budget_s;
        if !ok {
            failed += 1;
        }
        println!("{id} {}: {detail}; {s:.1} s (< {budget_s} s)", if ok { "PASS" } else { "FAIL" });
    };

    record("A1", 1.0, &mut patch_test);
    record("A2", 10.0, &mut dgdd_matches_monolithic);
    record("A3", 120.0, &mut || stokes_mms(&tmp.path().join("mms")));
    record("A4", 1.0, &mut pod_correctness);
    record("A5", 5.0, &mut full_rank_rom);
    record("A6", 300.0, &mut || {
        poisson = Some(cmd_train(&poisson_cfg)?.0);
        poisson_scaleup(&poisson_cfg, poisson.as_ref().unwrap())
    });
    record("A7", 600.0, &mut || match &poisson {
        Some(m) => rank_scaling(&poisson_cfg, m),
        None => outcome(false, "no trained Poisson model".into()),
    });
    record("A8", 900.0, &mut || {
        stokes = Some(cmd_train(&stokes_cfg)?.0);
        stokes_scaleup(&stokes_cfg, stokes.as_ref().unwrap())
    });
    record("A9", 600.0, &mut || match (&poisson, &stokes) {
        (Some(p), Some(s)) => extrapolation(&poisson_cfg, p, &stokes_cfg, s),
        _ => outcome(false, "missing trained models".into()),
    });
    record("A10", 300.0, &mut || match &poisson {
        Some(m) => speedup(&poisson_cfg, m),
        None => outcome(false, "no trained Poisson model".into()),
    });
    record("A11", 600.0, &mut || determinism(&tmp.path().join("determinism")));

    println!("acceptance: {} of 11 criteria failed", failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
