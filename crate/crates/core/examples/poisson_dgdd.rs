//! Full-order DG domain decomposition for Poisson on a 3x2 layout that mixes
//! quadrilateral and triangular components, so every vertical interface is
//! non-matching.

use std::sync::Arc;

use romdd::dgdd::{assemble_global_fom, find_interfaces, write_layout, ComponentPool, Layout, Problem, ReferenceDomain};
use romdd::mesh::{gen_quad_grid, gen_tri_grid};
use romdd::physics::PoissonProblem;
use romdd::rom::relative_error;

fn main() -> romdd::Result<()> {
    let pool = ComponentPool::new()
        .with(ReferenceDomain::poisson("q", Arc::new(gen_quad_grid(8)?))?)
        .with(ReferenceDomain::poisson("t", Arc::new(gen_tri_grid(6)?))?);
    let layout = Layout::new(3, 2, &["q", "t", "q", "t", "q", "t"])?;
    print!("{}", write_layout(&layout));
    println!("{} interfaces", find_interfaces(&layout).len());

    // Linear data is reproduced exactly, whatever the meshes.
    let linear = PoissonProblem::Linear { a: 1.0, b: [0.5, -2.0] };
    let g = assemble_global_fom(&pool, &layout, &Problem::Poisson(linear), 4.0)?;
    let u = g.split(&g.solve_direct()?);
    let exact: Vec<Vec<f64>> = (0..layout.n_subdomains())
        .map(|m| {
            let o = layout.origin(m);
            pool.get(layout.reference(m))?.primary().interpolate(|p| linear.dirichlet([p[0] + o[0], p[1] + o[1]]))
        })
        .collect::<romdd::Result<_>>()?;
    println!("patch test relative error: {:.2e}", relative_error(&pool, &layout, &exact, &u)?);

    let wave = Problem::Poisson(PoissonProblem::Wave { k: [0.4, 0.3], theta: 0.0, kb: [-0.2, 0.5], theta_b: 0.25 });
    let g = assemble_global_fom(&pool, &layout, &wave, wave.default_gamma())?;
    println!(
        "wave problem: {} unknowns, {} nonzeros, symmetry defect {:.1e}",
        g.system.matrix.nrows(),
        g.system.matrix.nnz(),
        g.system.matrix.symmetry_defect()
    );
    let x = g.solve_direct()?;
    for m in 0..layout.n_subdomains() {
        let b = g.block(&x, m);
        let (lo, hi) = b.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
        println!("subdomain {m} ({}): u in [{lo:.4}, {hi:.4}]", layout.reference(m));
    }
    Ok(())
}
