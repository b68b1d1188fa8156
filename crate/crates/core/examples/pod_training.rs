//! Snapshot collection and POD on one Poisson component: singular value
//! decay, the energy criterion, and how well a held-out solution is captured.

use std::sync::Arc;

use romdd::dgdd::ReferenceDomain;
use romdd::linalg::norm2;
use romdd::mesh::gen_quad_grid;
use romdd::physics::WaveRange;
use romdd::rom::{choose_rank, collect_snapshots_poisson, pod_train, Truncation};

fn main() -> romdd::Result<()> {
    let d = ReferenceDomain::poisson("empty", Arc::new(gen_quad_grid(16)?))?;
    let train = collect_snapshots_poisson(&d, 300, 42, WaveRange::TRAIN)?;
    let basis = pod_train(&train, Truncation::Rank(30))?;
    println!("{} snapshots of dimension {}", train.len(), train.dim());
    for r in [1, 5, 10, 15, 20, 30] {
        println!("sigma_{r:<2} = {:.3e}   energy({r}) = {:.6}", basis.sigma[r - 1], basis.energy(r));
    }
    for eta in [0.99, 0.999, 0.9999] {
        let r = choose_rank(&basis.sigma, train.dim(), train.len(), Truncation::Energy(eta))?;
        println!("energy {eta} needs R = {r}");
    }

    // Held-out solutions from a different seed.
    let test = collect_snapshots_poisson(&d, 20, 7, WaveRange::TRAIN)?;
    for r in [5, 15, 30] {
        let b = basis.truncated(r)?;
        let worst = test
            .columns()
            .iter()
            .map(|u| {
                let p = b.lift(&b.project(u));
                let diff: Vec<f64> = u.iter().zip(&p).map(|(a, b)| a - b).collect();
                norm2(&diff) / norm2(u)
            })
            .fold(0.0, f64::max);
        println!("R = {r:<2}: worst held-out projection error {worst:.3e}");
    }
    Ok(())
}
