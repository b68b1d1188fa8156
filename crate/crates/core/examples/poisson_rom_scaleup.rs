//! Train once on a single component, then solve ever larger layouts with
//! the reduced model only; the full-order model is solved where it is
//! cheap enough to compare.

use std::time::Instant;

use romdd::dgdd::{assemble_global_fom, fom_assembly_count, Physics};
use romdd::experiments::{cmd_train, test_instance, ExperimentConfig};
use romdd::linalg::SparseLu;
use romdd::rom::{assemble_reduced_system, lift_solution, relative_error, solve_reduced};

fn main() -> romdd::Result<()> {
    let tmp = std::env::temp_dir().join("romdd-poisson-scaleup");
    let mut cfg = ExperimentConfig::desk(Physics::Poisson);
    cfg.out = tmp.clone();
    let (model, records) = cmd_train(&cfg)?;
    let r = &records[0];
    println!("trained `{}`: {} snapshots, N = {}, stored rank {}", r.reference, r.snapshots, r.dofs, r.rank);

    let rank = cfg.scaleup.rank;
    let lib = model.library_at_rank(rank)?;
    let bases = model.bases.iter().map(|(k, b)| Ok((k.clone(), b.truncated(rank)?))).collect::<romdd::Result<_>>()?;
    println!("library at R = {rank}: {} bytes", lib.memory_bytes());

    for n in [2, 4, 8, 16] {
        let (layout, problem) = test_instance(&cfg, &model.pool, n, 0)?;
        let before = fom_assembly_count();
        let t = Instant::now();
        let (sys, _) = assemble_reduced_system(&layout, &lib, &model.pool, &bases, &problem)?;
        let q = solve_reduced(&sys)?;
        let rom_s = t.elapsed().as_secs_f64();
        assert_eq!(fom_assembly_count(), before);
        let rom = lift_solution(&layout, &bases, &sys.offsets, &q)?;
        print!("{n:>2}x{n:<2}: {:>5} reduced unknowns, ROM {rom_s:.4} s", sys.n_reduced());
        if n <= 8 {
            let t = Instant::now();
            let g = assemble_global_fom(&model.pool, &layout, &problem, model.gamma())?;
            let x = SparseLu::factor(&g.system.matrix)?.solve(&g.system.rhs)?;
            let fom_s = t.elapsed().as_secs_f64();
            let e = relative_error(&model.pool, &layout, &g.split(&x), &rom)?;
            print!(", FOM {fom_s:.4} s ({} unknowns), relative error {e:.3e}", g.system.matrix.nrows());
        }
        println!();
    }
    std::fs::remove_dir_all(tmp).ok();
    Ok(())
}
