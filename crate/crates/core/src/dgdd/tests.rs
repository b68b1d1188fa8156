use std::sync::Arc;

use nalgebra::SymmetricEigen;

use super::*;
use crate::linalg::{direct_solve, SparseMatrix};
use crate::mesh::{gen_circle_obstacle, gen_quad_grid, gen_tri_grid, Side};
use crate::physics::{BoundaryKind, PoissonProblem, StokesFlow, StokesProblem};

fn poisson_pool() -> ComponentPool {
    ComponentPool::new()
        .with(ReferenceDomain::poisson("q", Arc::new(gen_quad_grid(4).unwrap())).unwrap())
        .with(ReferenceDomain::poisson("t", Arc::new(gen_tri_grid(3).unwrap())).unwrap())
}

fn stokes_pool() -> ComponentPool {
    ComponentPool::new()
        .with(ReferenceDomain::stokes("q", Arc::new(gen_quad_grid(2).unwrap())).unwrap())
        .with(ReferenceDomain::stokes("t", Arc::new(gen_tri_grid(3).unwrap())).unwrap())
}

fn min_eig(a: &SparseMatrix) -> f64 {
    let d = a.to_dense();
    let m = nalgebra::DMatrix::from_fn(d.rows(), d.cols(), |i, j| d[(i, j)]);
    SymmetricEigen::new(m).eigenvalues.min()
}

const LINEAR: PoissonProblem = PoissonProblem::Linear { a: 0.3, b: [0.7, -0.2] };

#[test]
fn poisson_patch_test_through_non_matching_interfaces() {
    let pool = poisson_pool();
    let layout = Layout::new(2, 2, &["q", "t", "t", "q"]).unwrap();
    let problem = Problem::Poisson(LINEAR);
    let g = assemble_global_fom(&pool, &layout, &problem, 4.0).unwrap();
    assert!(g.system.matrix.symmetry_defect() < 1e-14);
    let x = g.solve_direct().unwrap();
    for m in 0..4 {
        let d = pool.get(layout.reference(m)).unwrap();
        let o = layout.origin(m);
        let want = d.primary().interpolate(|p| LINEAR.dirichlet([p[0] + o[0], p[1] + o[1]])).unwrap();
        for (a, b) in g.block(&x, m).iter().zip(&want) {
            assert!((a - b).abs() < 1e-10, "subdomain {m}: {a} vs {b}");
        }
    }
}

#[test]
fn exact_linear_field_has_zero_residual_with_neumann_sides() {
    let pool = poisson_pool();
    use BoundaryKind::{Dirichlet as D, Neumann as N};
    let layout = Layout::uniform(3, 2, "q").unwrap().with_bc([D, N, N, D]);
    let problem = Problem::Poisson(LINEAR);
    let g = assemble_global_fom(&pool, &layout, &problem, 4.0).unwrap();
    let mut u = Vec::new();
    for m in 0..layout.n_subdomains() {
        let o = layout.origin(m);
        let d = pool.get("q").unwrap();
        u.extend(d.primary().interpolate(|p| LINEAR.dirichlet([p[0] + o[0], p[1] + o[1]])).unwrap());
    }
    let r = g.system.matrix.mul_vec(&u);
    let res = r.iter().zip(&g.system.rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(res < 1e-12, "residual {res}");
}

#[test]
fn two_single_cell_components_are_positive_definite() {
    let pool = ComponentPool::new()
        .with(ReferenceDomain::poisson("one", Arc::new(gen_quad_grid(1).unwrap())).unwrap());
    for (nx, ny) in [(2, 1), (1, 2), (2, 2)] {
        let layout = Layout::uniform(nx, ny, "one").unwrap();
        let g = assemble_global_fom(&pool, &layout, &Problem::Poisson(LINEAR), 4.0).unwrap();
        assert!(g.system.matrix.symmetry_defect() < 1e-14);
        assert!(min_eig(&g.system.matrix) > 0.0);
    }
    let pool = poisson_pool();
    let layout = Layout::new(2, 2, &["q", "t", "q", "t"]).unwrap();
    let g = assemble_global_fom(&pool, &layout, &Problem::Poisson(LINEAR), 4.0).unwrap();
    assert!(min_eig(&g.system.matrix) > 0.0);
}

#[test]
fn interface_blocks_are_linear_in_gamma() {
    let pool = poisson_pool();
    let (q, t) = (pool.get("q").unwrap(), pool.get("t").unwrap());
    for axis in [Axis::Horizontal, Axis::Vertical] {
        let iq = InterfaceQuad::new(q, t, axis).unwrap();
        let b1 = assemble_interface_poisson(q.primary(), t.primary(), &iq, 4.0);
        let b2 = assemble_interface_poisson(q.primary(), t.primary(), &iq, 8.0);
        let p = assemble_interface_penalty(q.primary(), t.primary(), &iq, 4.0);
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let diff = b2.get(a, b).add(&b1.get(a, b).scaled(-1.0)).unwrap();
            let d = diff.add(&p.get(a, b).scaled(-1.0)).unwrap();
            assert!(d.max_abs() < 1e-12);
        }
        // composite block is symmetric
        let nm_t = b1.nm.transpose();
        assert!(b1.mn.add(&nm_t.scaled(-1.0)).unwrap().max_abs() < 1e-14);
        assert!(b1.mm.symmetry_defect() < 1e-14 && b1.nn.symmetry_defect() < 1e-14);
    }
}

#[test]
fn boundary_rhs_penalty_part_matches_the_matrix() {
    let pool = poisson_pool();
    let t = pool.get("t").unwrap().primary();
    let one = |_: [f64; 2]| 1.0;
    let (m1, r1) = assemble_boundary_poisson(t, Side::Left, 4.0, &one);
    let (m2, r2) = assemble_boundary_poisson(t, Side::Left, 8.0, &one);
    let ones = vec![1.0; t.dof_count()];
    let dm = m2.add(&m1.scaled(-1.0)).unwrap().mul_vec(&ones);
    for (i, d) in dm.iter().enumerate() {
        assert!((d - (r2[i] - r1[i])).abs() < 1e-13);
    }
    let zero = |_: [f64; 2]| 0.0;
    let (_, r0) = assemble_boundary_poisson(t, Side::Top, 4.0, &zero);
    assert!(r0.iter().all(|&v| v == 0.0));
}

#[test]
fn interface_jump_shrinks_with_penalty() {
    let pool = poisson_pool();
    let layout = Layout::new(2, 2, &["q", "t", "t", "q"]).unwrap();
    let problem =
        Problem::Poisson(PoissonProblem::Wave { k: [0.3, -0.4], theta: 0.2, kb: [0.1, 0.2], theta_b: 0.6 });
    let mut last = f64::INFINITY;
    for gamma in [4.0, 40.0, 400.0] {
        let g = assemble_global_fom(&pool, &layout, &problem, gamma).unwrap();
        let x = g.solve_direct().unwrap();
        let mut jump = 0.0;
        for f in find_interfaces(&layout) {
            let (dm, dn) = (pool.get(layout.reference(f.m)).unwrap(), pool.get(layout.reference(f.n)).unwrap());
            let pen = assemble_interface_penalty(dm.primary(), dn.primary(), &InterfaceQuad::new(dm, dn, f.axis).unwrap(), 1.0);
            // sum of dx^-1 ||[[u]]||^2 over the interface
            let (um, un) = (g.block(&x, f.m), g.block(&x, f.n));
            let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
            jump += dot(um, &pen.mm.mul_vec(um))
                + dot(um, &pen.mn.mul_vec(un))
                + dot(un, &pen.nm.mul_vec(um))
                + dot(un, &pen.nn.mul_vec(un));
        }
        assert!(jump < last, "gamma {gamma}: {jump} >= {last}");
        last = jump;
    }
}

#[test]
fn obstacle_normals_point_into_the_hole() {
    let d = ReferenceDomain::poisson("c", Arc::new(gen_circle_obstacle(0.25, 16, 3).unwrap())).unwrap();
    let pts = face_points(d.primary(), Side::Obstacle);
    let perimeter: f64 = pts.iter().map(|p| p.w).sum();
    assert!((perimeter - 2.0 * std::f64::consts::PI * 0.25).abs() < 0.02);
    for p in &pts {
        let r = [p.x[0] - 0.5, p.x[1] - 0.5];
        assert!(p.normal[0] * r[0] + p.normal[1] * r[1] < 0.0);
    }
}

#[test]
fn stokes_patch_test_with_linear_velocity() {
    let pool = stokes_pool();
    let a = [[0.5, 0.3], [-0.2, -0.5]];
    for (bc, p) in [(None, 0.0), (Some([BoundaryKind::Dirichlet, BoundaryKind::Neumann, BoundaryKind::Dirichlet, BoundaryKind::Neumann]), 0.7)] {
        let mut layout = Layout::new(2, 2, &["q", "t", "t", "q"]).unwrap();
        layout.bc = bc;
        let problem = StokesProblem::new(StokesFlow::Linear { a, c: [0.1, -0.3], p });
        let pr = Problem::Stokes(problem);
        let g = assemble_global_fom(&pool, &layout, &pr, pr.default_gamma()).unwrap();
        assert_eq!(g.is_constrained(), bc.is_none());
        assert!(g.system.matrix.symmetry_defect() < 1e-13);
        let x = direct_solve(&g.system.matrix, &g.system.rhs).unwrap();
        for m in 0..4 {
            let d = pool.get(layout.reference(m)).unwrap();
            let o = layout.origin(m);
            let uw = d
                .primary()
                .interpolate_vector(|y| problem.dirichlet([y[0] + o[0], y[1] + o[1]], Side::Left))
                .unwrap();
            let xm = g.block(&x, m);
            let nv = d.pressure_offset();
            for (u, w) in xm[..nv].iter().zip(&uw) {
                assert!((u - w).abs() < 1e-9, "velocity {u} vs {w}");
            }
            for q in &xm[nv..] {
                assert!((q - p).abs() < 1e-9, "pressure {q} vs {p}");
            }
        }
    }
}

#[test]
fn unknown_reference_is_an_error() {
    let layout = Layout::uniform(1, 1, "nope").unwrap();
    let err = assemble_global_fom(&poisson_pool(), &layout, &Problem::Poisson(LINEAR), 4.0).unwrap_err();
    assert!(matches!(err, crate::Error::UnknownReference(_)));
    let err = assemble_global_fom(&stokes_pool(), &Layout::uniform(1, 1, "q").unwrap(), &Problem::Poisson(LINEAR), 4.0)
        .unwrap_err();
    assert!(matches!(err, crate::Error::IncompatibleSpace(_)));
}

#[test]
fn stokes_default_penalty() {
    let p = Problem::Stokes(StokesProblem::new(StokesFlow::Mms));
    assert!((p.default_gamma() - 9.9).abs() < 1e-15);
    assert_eq!(Problem::Poisson(LINEAR).default_gamma(), 4.0);
}
