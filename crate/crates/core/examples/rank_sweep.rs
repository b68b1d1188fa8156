//! Reduced error and solve time against basis rank on a 4x4 Poisson layout.

use romdd::dgdd::Physics;
use romdd::experiments::{cmd_rank_sweep, cmd_train, loglog_slope, median, ExperimentConfig};

fn main() -> romdd::Result<()> {
    let tmp = std::env::temp_dir().join("romdd-rank-sweep");
    let mut cfg = ExperimentConfig::desk(Physics::Poisson);
    cfg.out = tmp.clone();
    cfg.ranksweep.trials = 8;
    let (model, _) = cmd_train(&cfg)?;
    let rows = cmd_rank_sweep(&cfg, &model)?;

    let (mut err, mut time) = (Vec::new(), Vec::new());
    for &r in &cfg.ranksweep.ranks {
        let e = median(rows.iter().filter(|x| x.rank == r).filter_map(|x| x.epsilon)).unwrap();
        let t = median(rows.iter().filter(|x| x.rank == r).map(|x| x.rom_solve_s)).unwrap();
        println!("R = {r:>2}: median error {e:.3e}, median solve {t:.2e} s");
        err.push((r as f64, e));
        time.push((r as f64, t));
    }
    println!("log-log slopes: error {:.2}, solve time {:.2}", loglog_slope(&err).unwrap(), loglog_slope(&time).unwrap());
    std::fs::remove_dir_all(tmp).ok();
    Ok(())
}
