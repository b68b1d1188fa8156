//! Unit-square component meshes.
//!
//! Every component lives on `[0,1]^2` (minus an optional obstacle). Boundary
//! edges carry a [`Side`] attribute; the four outer sides are where a
//! component touches its neighbours or the global boundary.

mod generate;
mod io;
mod trace;

use std::collections::HashMap;

pub use generate::{gen_circle_obstacle, gen_quad_grid, gen_tri_grid};
pub use io::{parse_mesh, write_mesh};
pub use trace::{side_trace, SideTrace, TraceSegment};

use crate::error::{Error, Result};

/// Tolerance for "lies on the unit-square boundary".
pub const SIDE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
    Obstacle,
}

impl Side {
    pub const OUTER: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    pub fn code(self) -> char {
        match self {
            Side::Left => 'L',
            Side::Right => 'R',
            Side::Bottom => 'B',
            Side::Top => 'T',
            Side::Obstacle => 'O',
        }
    }

    pub fn from_code(code: &str) -> Option<Side> {
        match code {
            "L" => Some(Side::Left),
            "R" => Some(Side::Right),
            "B" => Some(Side::Bottom),
            "T" => Some(Side::Top),
            "O" => Some(Side::Obstacle),
            _ => None,
        }
    }

    pub fn is_outer(self) -> bool {
        self != Side::Obstacle
    }

    /// Outward unit normal of an outer side of the unit square.
    pub fn outward_normal(self) -> Option<[f64; 2]> {
        match self {
            Side::Left => Some([-1.0, 0.0]),
            Side::Right => Some([1.0, 0.0]),
            Side::Bottom => Some([0.0, -1.0]),
            Side::Top => Some([0.0, 1.0]),
            Side::Obstacle => None,
        }
    }

    pub fn opposite(self) -> Option<Side> {
        match self {
            Side::Left => Some(Side::Right),
            Side::Right => Some(Side::Left),
            Side::Bottom => Some(Side::Top),
            Side::Top => Some(Side::Bottom),
            Side::Obstacle => None,
        }
    }

    /// Coordinate along the side used as trace parameter (x2 for vertical
    /// sides, x1 for horizontal ones).
    pub fn trace_param(self, x: [f64; 2]) -> f64 {
        match self {
            Side::Left | Side::Right => x[1],
            _ => x[0],
        }
    }

    /// Point of the unit square's side at trace parameter `t`.
    pub fn point_at(self, t: f64) -> [f64; 2] {
        match self {
            Side::Left => [0.0, t],
            Side::Right => [1.0, t],
            Side::Bottom => [t, 0.0],
            Side::Top => [t, 1.0],
            Side::Obstacle => panic!("obstacle has no side parameterisation"),
        }
    }

    fn on_side(self, x: [f64; 2]) -> bool {
        match self {
            Side::Left => x[0].abs() <= SIDE_TOL,
            Side::Right => (x[0] - 1.0).abs() <= SIDE_TOL,
            Side::Bottom => x[1].abs() <= SIDE_TOL,
            Side::Top => (x[1] - 1.0).abs() <= SIDE_TOL,
            Side::Obstacle => true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementShape {
    Triangle,
    Quad,
}

impl ElementShape {
    pub fn vertex_count(self) -> usize {
        match self {
            ElementShape::Triangle => 3,
            ElementShape::Quad => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Tri([usize; 3]),
    Quad([usize; 4]),
}

impl Cell {
    pub fn vertices(&self) -> &[usize] {
        match self {
            Cell::Tri(v) => v,
            Cell::Quad(v) => v,
        }
    }

    pub fn shape(&self) -> ElementShape {
        match self {
            Cell::Tri(_) => ElementShape::Triangle,
            Cell::Quad(_) => ElementShape::Quad,
        }
    }

    /// Local edge `k` as (vertex, next vertex) in counter-clockwise order.
    pub fn edge(&self, k: usize) -> (usize, usize) {
        let v = self.vertices();
        (v[k], v[(k + 1) % v.len()])
    }

    fn from_slice(v: &[usize]) -> Option<Cell> {
        match v.len() {
            3 => Some(Cell::Tri([v[0], v[1], v[2]])),
            4 => Some(Cell::Quad([v[0], v[1], v[2], v[3]])),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub side: Side,
}

/// Owning element of a boundary edge and the local edge index inside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeOwner {
    pub element: usize,
    pub local_edge: usize,
}

/// One component's geometry on the unit square. Immutable once built.
#[derive(Clone, Debug)]
pub struct Mesh2D {
    vertices: Vec<[f64; 2]>,
    cells: Vec<Cell>,
    boundary: Vec<BoundaryEdge>,
    owners: Vec<EdgeOwner>,
}

impl PartialEq for Mesh2D {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.cells == other.cells
            && self.boundary == other.boundary
    }
}

pub(crate) fn signed_area(vertices: &[[f64; 2]], cell: &[usize]) -> f64 {
    let n = cell.len();
    let mut twice = 0.0;
    for k in 0..n {
        let p = vertices[cell[k]];
        let q = vertices[cell[(k + 1) % n]];
        twice += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * twice
}

/// Reasons a candidate mesh can be rejected; `io` maps them to line numbers.
#[derive(Debug)]
pub(crate) enum MeshDefect {
    VertexOutOfRange { element: usize },
    NonCcw { element: usize },
    BoundaryOutOfRange { edge: usize },
    DanglingBoundary { edge: usize },
    OffSide { edge: usize },
}

impl Mesh2D {
    /// Builds a mesh, checking orientation and boundary consistency.
    pub fn new(
        vertices: Vec<[f64; 2]>,
        cells: Vec<Cell>,
        boundary: Vec<BoundaryEdge>,
    ) -> Result<Self> {
        Self::build(vertices, cells, boundary).map_err(|d| Error::InvalidArgument(format!("{d:?}")))
    }

    pub(crate) fn build(
        vertices: Vec<[f64; 2]>,
        cells: Vec<Cell>,
        boundary: Vec<BoundaryEdge>,
    ) -> std::result::Result<Self, MeshDefect> {
        let nv = vertices.len();
        let mut edge_use: HashMap<(usize, usize), (usize, EdgeOwner)> = HashMap::new();
        for (e, cell) in cells.iter().enumerate() {
            if cell.vertices().iter().any(|&v| v >= nv) {
                return Err(MeshDefect::VertexOutOfRange { element: e });
            }
            if signed_area(&vertices, cell.vertices()) <= 0.0 {
                return Err(MeshDefect::NonCcw { element: e });
            }
            for k in 0..cell.vertices().len() {
                let (a, b) = cell.edge(k);
                let key = (a.min(b), a.max(b));
                let entry = edge_use.entry(key).or_insert((
                    0,
                    EdgeOwner {
                        element: e,
                        local_edge: k,
                    },
                ));
                entry.0 += 1;
            }
        }
        let mut owners = Vec::with_capacity(boundary.len());
        for (i, be) in boundary.iter().enumerate() {
            if be.a >= nv || be.b >= nv {
                return Err(MeshDefect::BoundaryOutOfRange { edge: i });
            }
            let key = (be.a.min(be.b), be.a.max(be.b));
            match edge_use.get(&key) {
                Some(&(1, owner)) => owners.push(owner),
                _ => return Err(MeshDefect::DanglingBoundary { edge: i }),
            }
            if !(be.side.on_side(vertices[be.a]) && be.side.on_side(vertices[be.b])) {
                return Err(MeshDefect::OffSide { edge: i });
            }
        }
        Ok(Mesh2D {
            vertices,
            cells,
            boundary,
            owners,
        })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary
    }

    pub fn edge_owner(&self, boundary_edge: usize) -> EdgeOwner {
        self.owners[boundary_edge]
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// The single element shape of the mesh, or `None` for mixed meshes.
    pub fn uniform_shape(&self) -> Option<ElementShape> {
        let first = self.cells.first()?.shape();
        self.cells
            .iter()
            .all(|c| c.shape() == first)
            .then_some(first)
    }

    pub fn cell_area(&self, e: usize) -> f64 {
        signed_area(&self.vertices, self.cells[e].vertices())
    }

    pub fn area(&self) -> f64 {
        (0..self.cells.len()).map(|e| self.cell_area(e)).sum()
    }

    pub fn edge_length(&self, boundary_edge: usize) -> f64 {
        let be = self.boundary[boundary_edge];
        let (p, q) = (self.vertices[be.a], self.vertices[be.b]);
        ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt()
    }

    /// Area enclosed by the obstacle edges (shoelace over the hole polygon).
    pub fn obstacle_area(&self) -> f64 {
        // Hole edges are oriented clockwise (domain on the left), so the
        // shoelace sum is negative.
        -0.5 * self
            .boundary
            .iter()
            .filter(|b| b.side == Side::Obstacle)
            .map(|b| {
                let (p, q) = (self.vertices[b.a], self.vertices[b.b]);
                p[0] * q[1] - q[0] * p[1]
            })
            .sum::<f64>()
    }

    pub fn has_side(&self, side: Side) -> bool {
        self.boundary.iter().any(|b| b.side == side)
    }
}
