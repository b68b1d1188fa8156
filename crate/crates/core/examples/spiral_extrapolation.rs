//! A model trained on plane waves applied to a spiral source spanning the
//! whole layout, a load it never saw during training.

use romdd::dgdd::Physics;
use romdd::experiments::{cmd_extrapolate, cmd_train, extrapolation_instance, ExperimentConfig};

fn main() -> romdd::Result<()> {
    let tmp = std::env::temp_dir().join("romdd-spiral");
    let mut cfg = ExperimentConfig::desk(Physics::Poisson);
    cfg.out = tmp.clone();
    cfg.extrapolate.trials = 6;
    let (model, _) = cmd_train(&cfg)?;
    for row in cmd_extrapolate(&cfg, &model)? {
        let (_, problem) = extrapolation_instance(&cfg, &model.pool, cfg.extrapolate.size, row.trial)?;
        println!("trial {}: {:?}\n    relative error {:.3e}", row.trial, problem, row.epsilon.unwrap());
    }
    std::fs::remove_dir_all(tmp).ok();
    Ok(())
}
