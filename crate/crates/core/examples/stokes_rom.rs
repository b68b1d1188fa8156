//! Coupled velocity-pressure ROM for flow past an array of obstacles,
//! trained on random 2x2 sample domains drawn from a two-component pool.

use romdd::dgdd::Physics;
use romdd::experiments::{cmd_scaleup, cmd_train, median, ComponentSpec, ExperimentConfig, MeshSpec};

fn main() -> romdd::Result<()> {
    let tmp = std::env::temp_dir().join("romdd-stokes-rom");
    let mut cfg = ExperimentConfig::desk(Physics::Stokes);
    cfg.out = tmp.clone();
    // Coarser than the desk pool so the example runs in seconds.
    cfg.components = vec![
        ComponentSpec { name: "empty".into(), mesh: MeshSpec::Quad { n: 4 } },
        ComponentSpec { name: "circle".into(), mesh: MeshSpec::Circle { radius: 0.25, n_boundary: 4, n_ring: 2 } },
    ];
    cfg.train.samples = 60;
    cfg.train.max_rank = 30;
    cfg.scaleup.rank = 30;
    cfg.scaleup.sizes = vec![2, 3];
    cfg.scaleup.trials = 4;

    let (model, records) = cmd_train(&cfg)?;
    for r in &records {
        println!("{:>6}: {} snapshots, N = {}, rank {}, energy {:.5}", r.reference, r.snapshots, r.dofs, r.rank, r.energy);
    }
    let rows = cmd_scaleup(&cfg, &model)?;
    for n in &cfg.scaleup.sizes {
        let eps: Vec<f64> = rows.iter().filter(|r| r.m == n * n).filter_map(|r| r.epsilon).collect();
        let fom: Vec<f64> = rows.iter().filter(|r| r.m == n * n).filter_map(|r| r.fom_solve_s).collect();
        let rom: Vec<f64> = rows.iter().filter(|r| r.m == n * n).map(|r| r.rom_solve_s).collect();
        println!(
            "{n}x{n}: median error {:.3e}, median solve FOM {:.4} s vs ROM {:.5} s",
            median(eps).unwrap(),
            median(fom).unwrap(),
            median(rom).unwrap()
        );
    }
    std::fs::remove_dir_all(tmp).ok();
    Ok(())
}
