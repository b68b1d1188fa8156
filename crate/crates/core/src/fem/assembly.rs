use std::sync::Arc;

use super::space::FunctionSpace;
use crate::error::{Error, Result};
use crate::linalg::{SparseMatrix, Triplets};

fn triplets_for(space: &FunctionSpace, rows: usize, cols: usize) -> Triplets {
    let nl = space.element().n_local() * space.components();
    Triplets::with_capacity(rows, cols, space.mesh().n_cells() * nl * nl)
}

/// `nu (grad u, grad v)`, componentwise for vector spaces.
pub fn assemble_stiffness(space: &FunctionSpace, nu: f64) -> SparseMatrix {
    let n = space.dof_count();
    let nc = space.components();
    let rule = space.volume_rule();
    let mut t = triplets_for(space, n, n);
    let nl = space.element().n_local();
    let mut local = vec![0.0; nl * nl];
    for cell in 0..space.mesh().n_cells() {
        local.iter_mut().for_each(|v| *v = 0.0);
        for q in space.cell_values(cell, &rule) {
            for i in 0..nl {
                let gi = q.grad[i];
                for j in 0..nl {
                    let gj = q.grad[j];
                    local[i * nl + j] += nu * (gi[0] * gj[0] + gi[1] * gj[1]) * q.jxw;
                }
            }
        }
        let nodes = space.cell_nodes(cell);
        for i in 0..nl {
            for j in 0..nl {
                for c in 0..nc {
                    t.push(space.dof(nodes[i], c), space.dof(nodes[j], c), local[i * nl + j]);
                }
            }
        }
    }
    t.to_csr()
}

/// `(u, v)`, componentwise for vector spaces.
pub fn assemble_mass(space: &FunctionSpace) -> SparseMatrix {
    let n = space.dof_count();
    let nc = space.components();
    let rule = space.volume_rule();
    let mut t = triplets_for(space, n, n);
    let nl = space.element().n_local();
    let mut local = vec![0.0; nl * nl];
    for cell in 0..space.mesh().n_cells() {
        local.iter_mut().for_each(|v| *v = 0.0);
        for q in space.cell_values(cell, &rule) {
            for i in 0..nl {
                for j in 0..nl {
                    local[i * nl + j] += q.val[i] * q.val[j] * q.jxw;
                }
            }
        }
        let nodes = space.cell_nodes(cell);
        for i in 0..nl {
            for j in 0..nl {
                for c in 0..nc {
                    t.push(space.dof(nodes[i], c), space.dof(nodes[j], c), local[i * nl + j]);
                }
            }
        }
    }
    t.to_csr()
}

/// `-(div u, q)` as a (pressure dofs x velocity dofs) matrix.
pub fn assemble_divergence(velocity: &FunctionSpace, pressure: &FunctionSpace) -> Result<SparseMatrix> {
    if !Arc::ptr_eq(velocity.mesh(), pressure.mesh()) && velocity.mesh() != pressure.mesh() {
        return Err(Error::IncompatibleSpace("velocity and pressure live on different meshes".into()));
    }
    if velocity.components() != 2 || pressure.components() != 1 {
        return Err(Error::IncompatibleSpace("divergence needs (vector, scalar) spaces".into()));
    }
    if velocity.degree() != pressure.degree() + 1 {
        return Err(Error::IncompatibleSpace("velocity must be one degree above pressure".into()));
    }
    let rule = velocity.volume_rule();
    let mut t = Triplets::new(pressure.dof_count(), velocity.dof_count());
    let (nv, np) = (velocity.element().n_local(), pressure.element().n_local());
    let mut local = vec![[0.0; 2]; np * nv];
    for cell in 0..velocity.mesh().n_cells() {
        local.iter_mut().for_each(|v| *v = [0.0; 2]);
        let map = velocity.cell_map(cell);
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let qv = velocity.point_values(&map, *p, *w);
            let qp = pressure.element().eval(*p);
            for i in 0..np {
                for j in 0..nv {
                    let f = -qp.val[i] * qv.jxw;
                    local[i * nv + j][0] += f * qv.grad[j][0];
                    local[i * nv + j][1] += f * qv.grad[j][1];
                }
            }
        }
        let pn = pressure.cell_nodes(cell);
        let vn = velocity.cell_nodes(cell);
        for i in 0..np {
            for j in 0..nv {
                for c in 0..2 {
                    t.push(pn[i], velocity.dof(vn[j], c), local[i * nv + j][c]);
                }
            }
        }
    }
    Ok(t.to_csr())
}

/// `(f, v)` for a scalar space.
pub fn assemble_load(space: &FunctionSpace, f: impl Fn([f64; 2]) -> f64) -> Result<Vec<f64>> {
    if space.components() != 1 {
        return Err(Error::IncompatibleSpace("scalar load on a vector space".into()));
    }
    let rule = space.volume_rule();
    let mut out = vec![0.0; space.dof_count()];
    for cell in 0..space.mesh().n_cells() {
        let nodes = space.cell_nodes(cell);
        for q in space.cell_values(cell, &rule) {
            let fx = f(q.x) * q.jxw;
            if fx == 0.0 {
                continue;
            }
            for (k, &n) in nodes.iter().enumerate() {
                out[n] += q.val[k] * fx;
            }
        }
    }
    Ok(out)
}

/// `(f, v)` for a vector space, interleaved.
pub fn assemble_vector_load(
    space: &FunctionSpace,
    f: impl Fn([f64; 2]) -> [f64; 2],
) -> Result<Vec<f64>> {
    if space.components() != 2 {
        return Err(Error::IncompatibleSpace("vector load on a scalar space".into()));
    }
    let rule = space.volume_rule();
    let mut out = vec![0.0; space.dof_count()];
    for cell in 0..space.mesh().n_cells() {
        let nodes = space.cell_nodes(cell);
        for q in space.cell_values(cell, &rule) {
            let fx = f(q.x);
            for (k, &n) in nodes.iter().enumerate() {
                out[2 * n] += q.val[k] * fx[0] * q.jxw;
                out[2 * n + 1] += q.val[k] * fx[1] * q.jxw;
            }
        }
    }
    Ok(out)
}

/// `sqrt(sum_c ||u_h,c - u_c||^2)` by volume quadrature, plus the norm of
/// the exact field.
pub fn l2_error(
    space: &FunctionSpace,
    coeffs: &[f64],
    exact: impl Fn([f64; 2]) -> [f64; 2],
) -> (f64, f64) {
    let rule = space.volume_rule();
    let nc = space.components();
    let (mut err, mut norm) = (0.0, 0.0);
    for cell in 0..space.mesh().n_cells() {
        let map = space.cell_map(cell);
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let q = space.point_values(&map, *p, *w);
            let uh = space.evaluate(coeffs, cell, *p);
            let u = exact(q.x);
            for c in 0..nc {
                err += (uh[c] - u[c]).powi(2) * q.jxw;
                norm += u[c].powi(2) * q.jxw;
            }
        }
    }
    (err.sqrt(), norm.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::SpaceKind;
    use crate::mesh::{gen_circle_obstacle, gen_quad_grid, gen_tri_grid, Mesh2D};
    use std::f64::consts::PI;

    fn space(m: Mesh2D, k: SpaceKind) -> FunctionSpace {
        FunctionSpace::new(Arc::new(m), k).unwrap()
    }

    #[test]
    fn unit_q1_stiffness_by_hand() {
        let s = space(gen_quad_grid(1).unwrap(), SpaceKind::ScalarQ1);
        let k = assemble_stiffness(&s, 1.0);
        let v = s.cell_nodes(0);
        for i in 0..4 {
            assert!((k.get(v[i], v[i]) - 2.0 / 3.0).abs() < 1e-14);
            assert!((k.get(v[i], v[(i + 1) % 4]) + 1.0 / 6.0).abs() < 1e-14);
            assert!((k.get(v[i], v[(i + 2) % 4]) + 1.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn stiffness_kernel_and_symmetry() {
        for s in [
            space(gen_quad_grid(4).unwrap(), SpaceKind::ScalarQ1),
            space(gen_tri_grid(4).unwrap(), SpaceKind::ScalarP1),
            space(gen_circle_obstacle(0.25, 8, 3).unwrap(), SpaceKind::ScalarP2),
            space(gen_quad_grid(3).unwrap(), SpaceKind::VectorP2),
        ] {
            let k = assemble_stiffness(&s, 1.1);
            assert_eq!(k.symmetry_defect(), 0.0);
            let ones = vec![1.0; s.dof_count()];
            assert!(k.mul_vec(&ones).iter().all(|v| v.abs() < 1e-10));
        }
    }

    #[test]
    fn mass_integrates_area() {
        let s = space(gen_quad_grid(1).unwrap(), SpaceKind::ScalarQ1);
        let m = assemble_mass(&s);
        let ones = vec![1.0; 4];
        assert!((crate::linalg::dot(&ones, &m.mul_vec(&ones)) - 1.0).abs() < 1e-14);
        let mesh = gen_circle_obstacle(0.25, 8, 3).unwrap();
        let area = mesh.area();
        for k in [SpaceKind::ScalarP1, SpaceKind::ScalarP2] {
            let s = space(mesh.clone(), k);
            let m = assemble_mass(&s);
            let ones = vec![1.0; s.dof_count()];
            assert!((crate::linalg::dot(&ones, &m.mul_vec(&ones)) - area).abs() < 1e-10);
        }
    }

    #[test]
    fn mass_matches_brute_force_quadrature() {
        let s = space(gen_tri_grid(1).unwrap(), SpaceKind::ScalarP1);
        let m = assemble_mass(&s);
        // exact P1 mass on a triangle of area A: A/12 (1 + delta_ij)
        let mut want = [[0.0; 4]; 4];
        for c in 0..2 {
            let nodes = s.cell_nodes(c);
            for &i in nodes {
                for &j in nodes {
                    want[i][j] += 0.5 / 12.0 * if i == j { 2.0 } else { 1.0 };
                }
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                assert!((m.get(i, j) - want[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn divergence_of_simple_fields() {
        for (mesh, pk) in [
            (gen_tri_grid(3).unwrap(), SpaceKind::ScalarP1),
            (gen_quad_grid(3).unwrap(), SpaceKind::ScalarQ1),
        ] {
            let m = Arc::new(mesh);
            let v = FunctionSpace::new(m.clone(), SpaceKind::VectorP2).unwrap();
            let p = FunctionSpace::new(m, pk).unwrap();
            let b = assemble_divergence(&v, &p).unwrap();
            assert_eq!((b.nrows(), b.ncols()), (p.dof_count(), v.dof_count()));
            let ones = vec![1.0; p.dof_count()];
            for (field, want) in [
                (v.interpolate_vector(|_| [1.0, 0.0]).unwrap(), 0.0),
                (v.interpolate_vector(|x| [x[0], -x[1]]).unwrap(), 0.0),
                (v.interpolate_vector(|x| [x[0], 0.0]).unwrap(), -1.0),
            ] {
                let bu = b.mul_vec(&field);
                assert!((crate::linalg::dot(&ones, &bu) - want).abs() < 1e-10);
                if want == 0.0 {
                    assert!(bu.iter().all(|x| x.abs() < 1e-10));
                }
            }
        }
    }

    #[test]
    fn divergence_rejects_other_meshes() {
        let v = space(gen_tri_grid(2).unwrap(), SpaceKind::VectorP2);
        let p = space(gen_tri_grid(3).unwrap(), SpaceKind::ScalarP1);
        assert!(assemble_divergence(&v, &p).is_err());
    }

    #[test]
    fn load_vectors() {
        let s = space(gen_quad_grid(5).unwrap(), SpaceKind::ScalarQ1);
        let l = assemble_load(&s, |_| 1.0).unwrap();
        assert!((l.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(assemble_load(&s, |_| 0.0).unwrap().iter().all(|&v| v == 0.0));

        // brute-force per-element oracle on a 4-element mesh
        let s = space(gen_quad_grid(2).unwrap(), SpaceKind::ScalarQ1);
        let f = |x: [f64; 2]| (2.0 * PI * (0.4 * x[0] - 0.3 * x[1] + 0.1)).sin();
        let l = assemble_load(&s, f).unwrap();
        let (g, w) = crate::fem::gauss_legendre(2);
        let mut want = vec![0.0; 9];
        for (cell, c) in s.mesh().cells().iter().enumerate() {
            let x0 = s.mesh().vertices()[c.vertices()[0]];
            for a in 0..2 {
                for b in 0..2 {
                    let x = [x0[0] + 0.5 * g[a], x0[1] + 0.5 * g[b]];
                    let phi = [
                        (1.0 - g[a]) * (1.0 - g[b]),
                        g[a] * (1.0 - g[b]),
                        g[a] * g[b],
                        (1.0 - g[a]) * g[b],
                    ];
                    for k in 0..4 {
                        want[s.cell_nodes(cell)[k]] += w[a] * w[b] * 0.25 * phi[k] * f(x);
                    }
                }
            }
        }
        for i in 0..9 {
            assert!((l[i] - want[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_fields_have_zero_l2_error() {
        let s = space(gen_quad_grid(2).unwrap(), SpaceKind::VectorP2);
        let f = |x: [f64; 2]| [x[0] * x[0] * x[1] * x[1], x[0] * x[1] - 0.5];
        let u = s.interpolate_vector(f).unwrap();
        let (e, n) = l2_error(&s, &u, f);
        assert!(e < 1e-14 && n > 0.1);
    }
}
