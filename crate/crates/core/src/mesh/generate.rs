use std::f64::consts::PI;

use super::{BoundaryEdge, Cell, Mesh2D, Side};
use crate::error::{Error, Result};

fn grid_vertices(n: usize) -> Vec<[f64; 2]> {
    let h = 1.0 / n as f64;
    let mut v = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            // exact endpoints so side membership holds without rounding
            let x = if i == n { 1.0 } else { i as f64 * h };
            let y = if j == n { 1.0 } else { j as f64 * h };
            v.push([x, y]);
        }
    }
    v
}

/// Boundary of the structured (n+1)^2 vertex grid, oriented counter-clockwise
/// around the square.
fn grid_boundary(n: usize) -> Vec<BoundaryEdge> {
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut b = Vec::with_capacity(4 * n);
    for i in 0..n {
        b.push(BoundaryEdge { a: id(i, 0), b: id(i + 1, 0), side: Side::Bottom });
    }
    for j in 0..n {
        b.push(BoundaryEdge { a: id(n, j), b: id(n, j + 1), side: Side::Right });
    }
    for i in (0..n).rev() {
        b.push(BoundaryEdge { a: id(i + 1, n), b: id(i, n), side: Side::Top });
    }
    for j in (0..n).rev() {
        b.push(BoundaryEdge { a: id(0, j + 1), b: id(0, j), side: Side::Left });
    }
    b
}

/// Uniform `n x n` quadrilateral grid of the unit square.
pub fn gen_quad_grid(n: usize) -> Result<Mesh2D> {
    if n == 0 {
        return Err(Error::InvalidArgument("quad grid needs n >= 1".into()));
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(Cell::Quad([id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]));
        }
    }
    Mesh2D::new(grid_vertices(n), cells, grid_boundary(n))
}

/// The quad grid with every cell split along its lower-left to upper-right
/// diagonal.
pub fn gen_tri_grid(n: usize) -> Result<Mesh2D> {
    if n == 0 {
        return Err(Error::InvalidArgument("triangle grid needs n >= 1".into()));
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v0, v1, v2, v3) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            cells.push(Cell::Tri([v0, v1, v2]));
            cells.push(Cell::Tri([v0, v2, v3]));
        }
    }
    Mesh2D::new(grid_vertices(n), cells, grid_boundary(n))
}

/// Point `k` of the square perimeter split into `4 * n_side` equal segments,
/// walking counter-clockwise from the origin.
fn perimeter_point(k: usize, n_side: usize) -> ([f64; 2], Side) {
    let s = k / n_side;
    let i = k % n_side;
    let t = i as f64 / n_side as f64;
    match s {
        0 => ([t, 0.0], Side::Bottom),
        1 => ([1.0, t], Side::Right),
        2 => ([if i == 0 { 1.0 } else { 1.0 - t }, 1.0], Side::Top),
        _ => ([0.0, if i == 0 { 1.0 } else { 1.0 - t }], Side::Left),
    }
}

/// Triangulated unit square with a polygonal hole approximating the disk of
/// radius `radius` centred at (0.5, 0.5).
///
/// The mesh is an O-grid: `n_ring + 1` rings of `4 * n_boundary` vertices
/// blend linearly from the inscribed circle polygon to the square perimeter,
/// and each ring cell is split into two triangles.
pub fn gen_circle_obstacle(radius: f64, n_boundary: usize, n_ring: usize) -> Result<Mesh2D> {
    if !(radius > 0.0 && radius < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "circle radius {radius} must lie in (0, 0.5)"
        )));
    }
    if n_boundary < 4 || n_ring < 2 {
        return Err(Error::InvalidArgument(
            "circle obstacle needs n_boundary >= 4 and n_ring >= 2".into(),
        ));
    }
    let per_ring = 4 * n_boundary;
    let mut vertices = Vec::with_capacity(per_ring * (n_ring + 1));
    for l in 0..=n_ring {
        let tau = l as f64 / n_ring as f64;
        for k in 0..per_ring {
            let angle = 1.25 * PI + 2.0 * PI * k as f64 / per_ring as f64;
            let c = [0.5 + radius * angle.cos(), 0.5 + radius * angle.sin()];
            let (s, _) = perimeter_point(k, n_boundary);
            if l == 0 {
                vertices.push(c);
            } else if l == n_ring {
                vertices.push(s);
            } else {
                vertices.push([
                    c[0] + tau * (s[0] - c[0]),
                    c[1] + tau * (s[1] - c[1]),
                ]);
            }
        }
    }
    let id = |l: usize, k: usize| l * per_ring + (k % per_ring);
    let mut cells = Vec::with_capacity(2 * per_ring * n_ring);
    for l in 0..n_ring {
        for k in 0..per_ring {
            let a = id(l, k);
            let b = id(l, k + 1);
            let c = id(l + 1, k + 1);
            let d = id(l + 1, k);
            cells.push(Cell::Tri([a, d, c]));
            cells.push(Cell::Tri([a, c, b]));
        }
    }
    let mut boundary = Vec::with_capacity(2 * per_ring);
    for k in 0..per_ring {
        let (_, side) = perimeter_point(k, n_boundary);
        boundary.push(BoundaryEdge { a: id(n_ring, k), b: id(n_ring, k + 1), side });
    }
    for k in 0..per_ring {
        boundary.push(BoundaryEdge { a: id(0, k + 1), b: id(0, k), side: Side::Obstacle });
    }
    Mesh2D::new(vertices, cells, boundary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::side_trace;

    #[test]
    fn quad_grid_counts() {
        let m = gen_quad_grid(1).unwrap();
        assert_eq!((m.n_vertices(), m.n_cells(), m.boundary_edges().len()), (4, 1, 4));
        let m = gen_quad_grid(8).unwrap();
        assert_eq!((m.n_vertices(), m.n_cells(), m.boundary_edges().len()), (81, 64, 32));
        // 64^2 grid: one P1/Q1 dof per vertex
        assert_eq!(gen_quad_grid(64).unwrap().n_vertices(), 4225);
        assert!(gen_quad_grid(0).is_err());
    }

    #[test]
    fn tri_grid_counts_and_area() {
        let m = gen_tri_grid(1).unwrap();
        assert_eq!(m.n_cells(), 2);
        assert!((m.area() - 1.0).abs() < 1e-12);
        let m = gen_tri_grid(8).unwrap();
        assert_eq!((m.n_cells(), m.n_vertices()), (128, 81));
        for n in 1..12 {
            assert!((gen_tri_grid(n).unwrap().area() - 1.0).abs() < 1e-12);
        }
        assert_eq!(
            gen_tri_grid(5).unwrap().boundary_edges(),
            gen_quad_grid(5).unwrap().boundary_edges()
        );
        assert!(gen_tri_grid(0).is_err());
    }

    #[test]
    fn circle_obstacle_geometry() {
        let r = 0.25;
        let m = gen_circle_obstacle(r, 8, 3).unwrap();
        let obstacle: Vec<_> = m
            .boundary_edges()
            .iter()
            .filter(|b| b.side == Side::Obstacle)
            .collect();
        assert_eq!(obstacle.len(), 32);
        for b in &obstacle {
            for v in [b.a, b.b] {
                let p = m.vertices()[v];
                let d = ((p[0] - 0.5).powi(2) + (p[1] - 0.5).powi(2)).sqrt();
                assert!((d - r).abs() <= 1e-12);
            }
        }
        // inscribed 32-gon: area = 16 r^2 sin(2 pi / 32)
        let polygon = 16.0 * r * r * (2.0 * PI / 32.0).sin();
        assert!((m.area() + polygon - 1.0).abs() < 1e-10);
        assert!((m.obstacle_area() - polygon).abs() < 1e-12);
        let exact = 1.0 - PI * r * r;
        assert!((m.area() - exact).abs() / exact <= 0.02);
        let top = side_trace(&m, Side::Top).unwrap();
        assert_eq!(top.segments.len(), 8);
        for s in &top.segments {
            assert!((s.t1 - s.t0 - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_obstacle_rejects_large_radius() {
        assert!(gen_circle_obstacle(0.5, 8, 3).is_err());
        assert!(gen_circle_obstacle(0.6, 8, 3).is_err());
        assert!(gen_circle_obstacle(0.2, 3, 3).is_err());
        assert!(gen_circle_obstacle(0.2, 8, 1).is_err());
    }
}
