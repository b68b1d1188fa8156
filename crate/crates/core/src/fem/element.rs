use crate::mesh::ElementShape;

/// Lagrange reference elements.
///
/// Local node order: vertices, then edge midpoints in local edge order
/// (edge `k` joins vertex `k` and `k+1`), then the cell centre (Q2 only).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Element {
    P1,
    P2,
    Q1,
    Q2,
}

pub const MAX_LOCAL: usize = 9;

/// Basis values and reference gradients at one point.
#[derive(Clone, Copy, Debug)]
pub struct Basis {
    pub n: usize,
    pub val: [f64; MAX_LOCAL],
    pub grad: [[f64; 2]; MAX_LOCAL],
}

const TRI_VERTICES: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
const QUAD_VERTICES: [[f64; 2]; 4] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];

// 1-D quadratic Lagrange on nodes 0, 1, 1/2
fn lq(x: f64) -> [f64; 3] {
    [2.0 * (x - 0.5) * (x - 1.0), 2.0 * x * (x - 0.5), 4.0 * x * (1.0 - x)]
}

fn dlq(x: f64) -> [f64; 3] {
    [4.0 * x - 3.0, 4.0 * x - 1.0, 4.0 - 8.0 * x]
}

impl Element {
    pub fn shape(self) -> ElementShape {
        match self {
            Element::P1 | Element::P2 => ElementShape::Triangle,
            Element::Q1 | Element::Q2 => ElementShape::Quad,
        }
    }

    pub fn degree(self) -> usize {
        match self {
            Element::P1 | Element::Q1 => 1,
            Element::P2 | Element::Q2 => 2,
        }
    }

    pub fn n_local(self) -> usize {
        match self {
            Element::P1 => 3,
            Element::Q1 => 4,
            Element::P2 => 6,
            Element::Q2 => 9,
        }
    }

    pub fn lagrange(shape: ElementShape, degree: usize) -> Option<Element> {
        match (shape, degree) {
            (ElementShape::Triangle, 1) => Some(Element::P1),
            (ElementShape::Triangle, 2) => Some(Element::P2),
            (ElementShape::Quad, 1) => Some(Element::Q1),
            (ElementShape::Quad, 2) => Some(Element::Q2),
            _ => None,
        }
    }

    pub fn reference_vertices(self) -> &'static [[f64; 2]] {
        match self.shape() {
            ElementShape::Triangle => &TRI_VERTICES,
            ElementShape::Quad => &QUAD_VERTICES,
        }
    }

    /// Reference coordinates of the local nodes.
    pub fn nodes(self) -> Vec<[f64; 2]> {
        let v = self.reference_vertices();
        let mut out = v.to_vec();
        if self.degree() == 2 {
            for k in 0..v.len() {
                let (a, b) = (v[k], v[(k + 1) % v.len()]);
                out.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
            }
            if self == Element::Q2 {
                out.push([0.5, 0.5]);
            }
        }
        out
    }

    /// Local node indices lying on local edge `k`: both vertices, then the
    /// midpoint for quadratic elements.
    pub fn edge_nodes(self, k: usize) -> Vec<usize> {
        let nv = self.reference_vertices().len();
        let mut out = vec![k, (k + 1) % nv];
        if self.degree() == 2 {
            out.push(nv + k);
        }
        out
    }

    pub fn eval(self, p: [f64; 2]) -> Basis {
        let (x, y) = (p[0], p[1]);
        let mut b = Basis { n: self.n_local(), val: [0.0; MAX_LOCAL], grad: [[0.0; 2]; MAX_LOCAL] };
        match self {
            Element::P1 => {
                b.val[..3].copy_from_slice(&[1.0 - x - y, x, y]);
                b.grad[..3].copy_from_slice(&[[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]);
            }
            Element::P2 => {
                let l = [1.0 - x - y, x, y];
                let dl = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
                for i in 0..3 {
                    b.val[i] = l[i] * (2.0 * l[i] - 1.0);
                    let f = 4.0 * l[i] - 1.0;
                    b.grad[i] = [f * dl[i][0], f * dl[i][1]];
                }
                for k in 0..3 {
                    let (i, j) = (k, (k + 1) % 3);
                    b.val[3 + k] = 4.0 * l[i] * l[j];
                    b.grad[3 + k] = [
                        4.0 * (dl[i][0] * l[j] + l[i] * dl[j][0]),
                        4.0 * (dl[i][1] * l[j] + l[i] * dl[j][1]),
                    ];
                }
            }
            Element::Q1 => {
                b.val[..4].copy_from_slice(&[
                    (1.0 - x) * (1.0 - y),
                    x * (1.0 - y),
                    x * y,
                    (1.0 - x) * y,
                ]);
                b.grad[..4].copy_from_slice(&[
                    [-(1.0 - y), -(1.0 - x)],
                    [1.0 - y, -x],
                    [y, x],
                    [-y, 1.0 - x],
                ]);
            }
            Element::Q2 => {
                let (lx, ly, dx, dy) = (lq(x), lq(y), dlq(x), dlq(y));
                // (index along x, index along y) per local node
                const IJ: [(usize, usize); 9] =
                    [(0, 0), (1, 0), (1, 1), (0, 1), (2, 0), (1, 2), (2, 1), (0, 2), (2, 2)];
                for (k, &(i, j)) in IJ.iter().enumerate() {
                    b.val[k] = lx[i] * ly[j];
                    b.grad[k] = [dx[i] * ly[j], lx[i] * dy[j]];
                }
            }
        }
        b
    }
}

/// Affine (triangle) or bilinear (quad) map of one cell.
#[derive(Clone, Copy, Debug)]
pub struct CellMap {
    shape: ElementShape,
    x: [[f64; 2]; 4],
}

/// Physical point, Jacobian determinant and inverse-transpose Jacobian.
#[derive(Clone, Copy, Debug)]
pub struct MapPoint {
    pub x: [f64; 2],
    pub det: f64,
    /// `J^{-T}`: physical gradient = `jit * reference gradient`.
    pub jit: [[f64; 2]; 2],
}

impl CellMap {
    pub fn new(shape: ElementShape, coords: &[[f64; 2]]) -> Self {
        let mut x = [[0.0; 2]; 4];
        x[..coords.len()].copy_from_slice(coords);
        CellMap { shape, x }
    }

    pub fn at(&self, p: [f64; 2]) -> MapPoint {
        let (phys, j) = match self.shape {
            ElementShape::Triangle => {
                let [a, b, c] = [self.x[0], self.x[1], self.x[2]];
                let j = [[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]];
                let phys = [
                    a[0] + j[0][0] * p[0] + j[0][1] * p[1],
                    a[1] + j[1][0] * p[0] + j[1][1] * p[1],
                ];
                (phys, j)
            }
            ElementShape::Quad => {
                let b = Element::Q1.eval(p);
                let mut phys = [0.0; 2];
                let mut j = [[0.0; 2]; 2];
                for k in 0..4 {
                    for d in 0..2 {
                        phys[d] += b.val[k] * self.x[k][d];
                        j[d][0] += b.grad[k][0] * self.x[k][d];
                        j[d][1] += b.grad[k][1] * self.x[k][d];
                    }
                }
                (phys, j)
            }
        };
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let jit = [[j[1][1] / det, -j[1][0] / det], [-j[0][1] / det, j[0][0] / det]];
        MapPoint { x: phys, det, jit }
    }
}

impl MapPoint {
    #[inline]
    pub fn grad(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.jit[0][0] * g[0] + self.jit[0][1] * g[1],
            self.jit[1][0] * g[0] + self.jit[1][1] * g[1],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodal_basis_is_kronecker() {
        for e in [Element::P1, Element::P2, Element::Q1, Element::Q2] {
            let nodes = e.nodes();
            assert_eq!(nodes.len(), e.n_local());
            for (i, p) in nodes.iter().enumerate() {
                let b = e.eval(*p);
                for j in 0..e.n_local() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((b.val[j] - want).abs() < 1e-14, "{e:?} node {i} fn {j}");
                }
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let h = 1e-6;
        let p = [0.23, 0.31];
        for e in [Element::P1, Element::P2, Element::Q1, Element::Q2] {
            let b = e.eval(p);
            let bx = e.eval([p[0] + h, p[1]]);
            let by = e.eval([p[0], p[1] + h]);
            let bx0 = e.eval([p[0] - h, p[1]]);
            let by0 = e.eval([p[0], p[1] - h]);
            for k in 0..e.n_local() {
                let fx = (bx.val[k] - bx0.val[k]) / (2.0 * h);
                let fy = (by.val[k] - by0.val[k]) / (2.0 * h);
                assert!((b.grad[k][0] - fx).abs() < 1e-8);
                assert!((b.grad[k][1] - fy).abs() < 1e-8);
            }
            assert!((b.val[..e.n_local()].iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn bilinear_map_of_a_parallelogram() {
        let m = CellMap::new(ElementShape::Quad, &[[0.0, 0.0], [2.0, 0.0], [3.0, 1.0], [1.0, 1.0]]);
        let q = m.at([0.5, 0.5]);
        assert!((q.det - 2.0).abs() < 1e-15);
        assert!((q.x[0] - 1.5).abs() < 1e-15 && (q.x[1] - 0.5).abs() < 1e-15);
    }
}
