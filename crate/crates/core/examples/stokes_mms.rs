//! Manufactured-solution convergence of the Taylor-Hood discretization,
//! solved with MINRES with and without the block preconditioner.

use romdd::dgdd::Physics;
use romdd::experiments::{cmd_mms, ExperimentConfig};

fn main() -> romdd::Result<()> {
    let mut cfg = ExperimentConfig::desk(Physics::Stokes);
    cfg.mms.levels = vec![4, 8, 16, 32];
    for shape in ["tri", "quad"] {
        cfg.mms.shape = shape.into();
        println!("== {shape}");
        println!("{:>8} {:>7} {:>10} {:>6} {:>10} {:>6} {:>12}", "h", "dofs", "|u-uh|", "order", "|p-ph|", "order", "minres");
        for r in cmd_mms(&cfg)? {
            let order = |o: Option<f64>| o.map_or("-".into(), |v| format!("{v:.2}"));
            println!(
                "{:>8.4} {:>7} {:>10.3e} {:>6} {:>10.3e} {:>6} {:>5} / {:<5}",
                r.h,
                r.dofs,
                r.velocity_error,
                order(r.velocity_order),
                r.pressure_error,
                order(r.pressure_order),
                r.iterations_precond,
                r.iterations_plain
            );
        }
    }
    Ok(())
}
