//! Iterative solvers on an assembled DG system: CG with the available
//! preconditioners against the sparse direct solve.

use std::sync::Arc;

use romdd::dgdd::{assemble_global_fom, ComponentPool, Layout, Problem, ReferenceDomain};
use romdd::linalg::{cg_solve, norm2, CgPreconditioner, SparseLu};
use romdd::mesh::gen_quad_grid;
use romdd::physics::PoissonProblem;

fn main() -> romdd::Result<()> {
    let pool = ComponentPool::new().with(ReferenceDomain::poisson("q", Arc::new(gen_quad_grid(16)?))?);
    let layout = Layout::uniform(4, 4, "q")?;
    let problem = Problem::Poisson(PoissonProblem::Wave { k: [0.5, 0.2], theta: 0.1, kb: [0.3, -0.6], theta_b: 0.0 });
    let g = assemble_global_fom(&pool, &layout, &problem, problem.default_gamma())?;
    let (a, b) = (&g.system.matrix, &g.system.rhs);
    println!("{} unknowns, {} nonzeros", a.nrows(), a.nnz());

    let lu = SparseLu::factor(a)?;
    let direct = lu.solve(b)?;
    println!("sparse LU: fill {} entries", lu.fill());

    for p in [CgPreconditioner::None, CgPreconditioner::Jacobi, CgPreconditioner::SymmetricGaussSeidel] {
        let (x, rep) = cg_solve(a, b, 1e-10, 10 * a.nrows(), p)?;
        let diff: Vec<f64> = x.iter().zip(&direct).map(|(u, v)| u - v).collect();
        println!(
            "CG {p:?}: {} iterations, residual {:.2e}, {:.3} s, distance to LU {:.2e}",
            rep.iterations,
            rep.relative_residual,
            rep.seconds,
            norm2(&diff) / norm2(&direct)
        );
    }
    Ok(())
}
