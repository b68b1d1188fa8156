use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::element::{CellMap, Element, MAX_LOCAL};
use super::quadrature::{quad_rule, QuadratureRule};
use crate::error::{Error, Result};
use crate::mesh::{ElementShape, Mesh2D, Side};

/// Space kinds. The quadratic kinds are P2 on triangle meshes and
/// biquadratic Q2 on quad meshes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceKind {
    ScalarP1,
    ScalarQ1,
    ScalarP2,
    VectorP2,
}

impl SpaceKind {
    pub fn components(self) -> usize {
        if self == SpaceKind::VectorP2 {
            2
        } else {
            1
        }
    }

    pub fn degree(self) -> usize {
        match self {
            SpaceKind::ScalarP1 | SpaceKind::ScalarQ1 => 1,
            SpaceKind::ScalarP2 | SpaceKind::VectorP2 => 2,
        }
    }

    /// Scalar degree-1 kind matching a mesh shape.
    pub fn linear_for(shape: ElementShape) -> SpaceKind {
        match shape {
            ElementShape::Triangle => SpaceKind::ScalarP1,
            ElementShape::Quad => SpaceKind::ScalarQ1,
        }
    }
}

/// Basis values and physical gradients at one quadrature point of a cell.
#[derive(Clone, Copy, Debug)]
pub struct PointValues {
    pub n: usize,
    pub x: [f64; 2],
    pub val: [f64; MAX_LOCAL],
    pub grad: [[f64; 2]; MAX_LOCAL],
    /// Quadrature weight times Jacobian determinant (volume points only).
    pub jxw: f64,
}

/// Continuous Lagrange space on one mesh.
///
/// Node numbering: mesh vertices, then mesh edges sorted by vertex pair,
/// then cell centres (Q2). Vector dofs are interleaved: `2 * node + c`.
#[derive(Clone, Debug)]
pub struct FunctionSpace {
    mesh: Arc<Mesh2D>,
    kind: SpaceKind,
    element: Element,
    n_nodes: usize,
    node_coords: Vec<[f64; 2]>,
    cell_nodes: Vec<usize>,
    boundary_nodes: [Vec<usize>; 5],
}

fn side_slot(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
        Side::Bottom => 2,
        Side::Top => 3,
        Side::Obstacle => 4,
    }
}

pub fn build_space(mesh: Arc<Mesh2D>, kind: SpaceKind) -> Result<FunctionSpace> {
    FunctionSpace::new(mesh, kind)
}

impl FunctionSpace {
    pub fn new(mesh: Arc<Mesh2D>, kind: SpaceKind) -> Result<Self> {
        let shape = mesh.uniform_shape().ok_or_else(|| {
            Error::IncompatibleSpace("mixed or empty meshes are not supported".into())
        })?;
        let element = match (kind, shape) {
            (SpaceKind::ScalarP1, ElementShape::Triangle) => Element::P1,
            (SpaceKind::ScalarQ1, ElementShape::Quad) => Element::Q1,
            (SpaceKind::ScalarP2 | SpaceKind::VectorP2, s) => {
                Element::lagrange(s, 2).expect("quadratic element exists for every shape")
            }
            (k, s) => {
                return Err(Error::IncompatibleSpace(format!("{k:?} on a {s:?} mesh")));
            }
        };
        let nv = mesh.n_vertices();
        let mut node_coords: Vec<[f64; 2]> = mesh.vertices().to_vec();
        let nl = element.n_local();
        let mut cell_nodes = Vec::with_capacity(mesh.n_cells() * nl);
        let mut edge_id: HashMap<(usize, usize), usize> = HashMap::new();

        if element.degree() == 2 {
            let mut edges: Vec<(usize, usize)> = Vec::new();
            for c in mesh.cells() {
                for k in 0..c.vertices().len() {
                    let (a, b) = c.edge(k);
                    edges.push((a.min(b), a.max(b)));
                }
            }
            edges.sort_unstable();
            edges.dedup();
            for (i, &(a, b)) in edges.iter().enumerate() {
                edge_id.insert((a, b), nv + i);
                let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
                node_coords.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
            }
        }
        let n_edges = node_coords.len() - nv;
        for (ci, c) in mesh.cells().iter().enumerate() {
            let vs = c.vertices();
            cell_nodes.extend_from_slice(vs);
            if element.degree() == 2 {
                for k in 0..vs.len() {
                    let (a, b) = c.edge(k);
                    cell_nodes.push(edge_id[&(a.min(b), a.max(b))]);
                }
            }
            if element == Element::Q2 {
                cell_nodes.push(nv + n_edges + ci);
            }
        }
        if element == Element::Q2 {
            for c in mesh.cells() {
                let vs = c.vertices();
                let mut m = [0.0; 2];
                for &v in vs {
                    m[0] += 0.25 * mesh.vertices()[v][0];
                    m[1] += 0.25 * mesh.vertices()[v][1];
                }
                node_coords.push(m);
            }
        }
        let mut boundary_nodes: [Vec<usize>; 5] = Default::default();
        for e in mesh.boundary_edges() {
            let slot = &mut boundary_nodes[side_slot(e.side)];
            slot.push(e.a);
            slot.push(e.b);
            if element.degree() == 2 {
                slot.push(edge_id[&(e.a.min(e.b), e.a.max(e.b))]);
            }
        }
        for b in &mut boundary_nodes {
            b.sort_unstable();
            b.dedup();
        }
        Ok(FunctionSpace {
            n_nodes: node_coords.len(),
            mesh,
            kind,
            element,
            node_coords,
            cell_nodes,
            boundary_nodes,
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh2D> {
        &self.mesh
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn element(&self) -> Element {
        self.element
    }

    pub fn degree(&self) -> usize {
        self.element.degree()
    }

    pub fn components(&self) -> usize {
        self.kind.components()
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn dof_count(&self) -> usize {
        self.n_nodes * self.components()
    }

    pub fn node_coords(&self) -> &[[f64; 2]] {
        &self.node_coords
    }

    pub fn cell_nodes(&self, cell: usize) -> &[usize] {
        let nl = self.element.n_local();
        &self.cell_nodes[cell * nl..(cell + 1) * nl]
    }

    /// Global dof of local node `k`, component `c`.
    #[inline]
    pub fn dof(&self, node: usize, c: usize) -> usize {
        node * self.components() + c
    }

    /// Sorted dofs on one side (all components).
    pub fn boundary_dofs(&self, side: Side) -> Vec<usize> {
        let nc = self.components();
        self.boundary_nodes[side_slot(side)]
            .iter()
            .flat_map(|&n| (0..nc).map(move |c| n * nc + c))
            .collect()
    }

    pub fn cell_map(&self, cell: usize) -> CellMap {
        let c = &self.mesh.cells()[cell];
        let coords: Vec<[f64; 2]> = c.vertices().iter().map(|&v| self.mesh.vertices()[v]).collect();
        CellMap::new(c.shape(), &coords)
    }

    /// Volume rule of order `2s + 1`.
    pub fn volume_rule(&self) -> QuadratureRule {
        quad_rule(self.element.shape(), 2 * self.degree() + 1).expect("order within 1..=6")
    }

    pub fn point_values(&self, map: &CellMap, p: [f64; 2], w: f64) -> PointValues {
        let mp = map.at(p);
        let b = self.element.eval(p);
        let mut pv = PointValues {
            n: b.n,
            x: mp.x,
            val: b.val,
            grad: [[0.0; 2]; MAX_LOCAL],
            jxw: w * mp.det,
        };
        for k in 0..b.n {
            pv.grad[k] = mp.grad(b.grad[k]);
        }
        pv
    }

    /// Point values at every volume quadrature point of `cell`.
    pub fn cell_values(&self, cell: usize, rule: &QuadratureRule) -> Vec<PointValues> {
        let map = self.cell_map(cell);
        rule.points
            .iter()
            .zip(&rule.weights)
            .map(|(p, w)| self.point_values(&map, *p, *w))
            .collect()
    }

    /// Owning cell and reference point of the point at fraction `s` along
    /// boundary edge `edge`, measured from its first vertex.
    pub fn boundary_point(&self, edge: usize, s: f64) -> (usize, [f64; 2]) {
        let owner = self.mesh.edge_owner(edge);
        let be = self.mesh.boundary_edges()[edge];
        let cell = &self.mesh.cells()[owner.element];
        let k = owner.local_edge;
        let nv = cell.vertices().len();
        let rv = self.element.reference_vertices();
        let (ra, rb) = if cell.vertices()[k] == be.a {
            (rv[k], rv[(k + 1) % nv])
        } else {
            (rv[(k + 1) % nv], rv[k])
        };
        (owner.element, [ra[0] + s * (rb[0] - ra[0]), ra[1] + s * (rb[1] - ra[1])])
    }

    /// Nodal interpolant of a scalar function.
    pub fn interpolate(&self, f: impl Fn([f64; 2]) -> f64) -> Result<Vec<f64>> {
        if self.components() != 1 {
            return Err(Error::IncompatibleSpace("scalar interpolation on a vector space".into()));
        }
        Ok(self.node_coords.iter().map(|&x| f(x)).collect())
    }

    /// Nodal interpolant of a vector function, interleaved.
    pub fn interpolate_vector(&self, f: impl Fn([f64; 2]) -> [f64; 2]) -> Result<Vec<f64>> {
        if self.components() != 2 {
            return Err(Error::IncompatibleSpace("vector interpolation on a scalar space".into()));
        }
        Ok(self.node_coords.iter().flat_map(|&x| f(x)).collect())
    }

    /// Field value (all components) at reference point `p` of `cell`.
    pub fn evaluate(&self, coeffs: &[f64], cell: usize, p: [f64; 2]) -> [f64; 2] {
        let b = self.element.eval(p);
        let nc = self.components();
        let mut out = [0.0; 2];
        for (k, &node) in self.cell_nodes(cell).iter().enumerate() {
            for c in 0..nc {
                out[c] += b.val[k] * coeffs[node * nc + c];
            }
        }
        out
    }
}
