use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::io::Lines;
use crate::mesh::Side;
use crate::physics::BoundaryKind;

/// Adjacency direction of an interface pair `(m, n)`, `m < n`.
///
/// `Horizontal`: `n` is the right neighbour of `m`, they share `m`'s Right
/// side. `Vertical`: `n` sits on top of `m`, sharing `m`'s Top side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    Horizontal,
    Vertical,
}

impl Axis {
    pub fn code(self) -> char {
        match self {
            Axis::Horizontal => 'H',
            Axis::Vertical => 'V',
        }
    }

    /// (side of `m`, side of `n`) on the shared edge.
    pub fn sides(self) -> (Side, Side) {
        match self {
            Axis::Horizontal => (Side::Right, Side::Left),
            Axis::Vertical => (Side::Top, Side::Bottom),
        }
    }

    /// Unit normal pointing from `m` into `n`.
    pub fn normal(self) -> [f64; 2] {
        match self {
            Axis::Horizontal => [1.0, 0.0],
            Axis::Vertical => [0.0, 1.0],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interface {
    pub m: usize,
    pub n: usize,
    pub axis: Axis,
}

/// Components on an `nx` by `ny` grid of unit cells.
///
/// Cell `m = j * nx + i` covers `[i, i+1] x [j, j+1]` and holds one
/// reference component, identified by name.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    nx: usize,
    ny: usize,
    names: Vec<String>,
    cells: Vec<usize>,
    /// Outer-side conditions in [`Side::OUTER`] order; `None` defers to the
    /// problem's own defaults.
    pub bc: Option<[BoundaryKind; 4]>,
}

impl Layout {
    /// `cell_refs` in cell order `m = j * nx + i` (bottom row first).
    pub fn new<S: AsRef<str>>(nx: usize, ny: usize, cell_refs: &[S]) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument(format!("layout {nx}x{ny} is empty")));
        }
        if cell_refs.len() != nx * ny {
            return Err(Error::DimensionMismatch(format!(
                "{} reference names for a {nx}x{ny} layout",
                cell_refs.len()
            )));
        }
        let mut names: Vec<String> = Vec::new();
        let mut cells = Vec::with_capacity(nx * ny);
        for r in cell_refs {
            let r = r.as_ref();
            let id = match names.iter().position(|n| n == r) {
                Some(id) => id,
                None => {
                    names.push(r.to_string());
                    names.len() - 1
                }
            };
            cells.push(id);
        }
        Ok(Layout { nx, ny, names, cells, bc: None })
    }

    pub fn uniform(nx: usize, ny: usize, reference: &str) -> Result<Self> {
        Layout::new(nx, ny, &vec![reference; nx * ny])
    }

    pub fn with_bc(mut self, bc: [BoundaryKind; 4]) -> Self {
        self.bc = Some(bc);
        self
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn n_subdomains(&self) -> usize {
        self.cells.len()
    }

    /// Distinct reference names in first-appearance order.
    pub fn references(&self) -> &[String] {
        &self.names
    }

    pub fn reference(&self, m: usize) -> &str {
        &self.names[self.cells[m]]
    }

    pub fn origin(&self, m: usize) -> [f64; 2] {
        [(m % self.nx) as f64, (m / self.nx) as f64]
    }

    /// Outer sides of subdomain `m` that lie on the global boundary.
    pub fn global_sides(&self, m: usize) -> Vec<Side> {
        let (i, j) = (m % self.nx, m / self.nx);
        let mut out = Vec::new();
        if i == 0 {
            out.push(Side::Left);
        }
        if i + 1 == self.nx {
            out.push(Side::Right);
        }
        if j == 0 {
            out.push(Side::Bottom);
        }
        if j + 1 == self.ny {
            out.push(Side::Top);
        }
        out
    }
}

/// Grid-adjacent pairs, horizontal ones first within each row sweep.
pub fn find_interfaces(layout: &Layout) -> Vec<Interface> {
    let (nx, ny) = (layout.nx, layout.ny);
    let mut out = Vec::with_capacity(nx * (ny - 1) + ny * (nx - 1));
    for j in 0..ny {
        for i in 0..nx {
            let m = j * nx + i;
            if i + 1 < nx {
                out.push(Interface { m, n: m + 1, axis: Axis::Horizontal });
            }
            if j + 1 < ny {
                out.push(Interface { m, n: m + nx, axis: Axis::Vertical });
            }
        }
    }
    out
}

/// LAY1 text. Rows are written top row first so the file reads like the
/// picture.
pub fn write_layout(layout: &Layout) -> String {
    let mut s = format!("LAY1 {} {}\n", layout.nx, layout.ny);
    for j in (0..layout.ny).rev() {
        let row: Vec<&str> = (0..layout.nx).map(|i| layout.reference(j * layout.nx + i)).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    if let Some(bc) = layout.bc {
        for (side, kind) in Side::OUTER.iter().zip(bc) {
            let _ = writeln!(s, "bc {} {}", side.code(), kind.as_str());
        }
    }
    s
}

pub fn parse_layout(text: &str) -> Result<Layout> {
    let mut lines = Lines::new(text);
    let (ln, header) = lines.next_line("LAY1 header")?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 || h[0] != "LAY1" {
        return Err(Error::parse(ln, "expected `LAY1 <Nx> <Ny>`"));
    }
    let dim = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(ln, format!("bad size `{s}`")));
    let (nx, ny) = (dim(h[1])?, dim(h[2])?);
    let mut rows: Vec<Vec<String>> = Vec::with_capacity(ny);
    for _ in 0..ny {
        let (ln, row) = lines.next_line("layout row")?;
        let names: Vec<String> = row.split_whitespace().map(str::to_string).collect();
        if names.len() != nx {
            return Err(Error::parse(ln, format!("expected {nx} names, found {}", names.len())));
        }
        rows.push(names);
    }
    let refs: Vec<String> = rows.into_iter().rev().flatten().collect();
    let mut layout = Layout::new(nx, ny, &refs)?;
    let mut bc: Option<[BoundaryKind; 4]> = None;
    let mut seen = [false; 4];
    while !lines.is_done() {
        let (ln, line) = lines.next_line("bc line")?;
        let t: Vec<&str> = line.split_whitespace().collect();
        let parsed = match t.as_slice() {
            ["bc", side, kind] => Side::from_code(side)
                .filter(|s| s.is_outer())
                .zip(BoundaryKind::parse(kind)),
            _ => None,
        };
        let (side, kind) = parsed.ok_or_else(|| Error::parse(ln, format!("bad line `{line}`")))?;
        let k = Side::OUTER.iter().position(|&s| s == side).expect("outer side");
        if seen[k] {
            return Err(Error::Config(format!("side {} given twice, line {ln}", side.code())));
        }
        seen[k] = true;
        bc.get_or_insert([BoundaryKind::Dirichlet; 4])[k] = kind;
    }
    layout.bc = bc;
    Ok(layout)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interface_counts() {
        for (nx, ny, want) in [(1, 1, 0), (2, 2, 4), (3, 3, 12), (4, 2, 10)] {
            let l = Layout::uniform(nx, ny, "empty").unwrap();
            let f = find_interfaces(&l);
            assert_eq!(f.len(), want);
            assert_eq!(f.len(), nx * (ny - 1) + ny * (nx - 1));
            assert!(f.iter().all(|i| i.m < i.n));
        }
    }

    #[test]
    fn layout_roundtrip_reads_top_row_first() {
        let text = "LAY1 3 2\ncircle empty empty\nempty empty circle\nbc L dirichlet\nbc R neumann\n";
        let l = parse_layout(text).unwrap();
        assert_eq!(l.reference(0), "empty");
        assert_eq!(l.reference(2), "circle");
        assert_eq!(l.reference(3), "circle");
        assert_eq!(l.origin(4), [1.0, 1.0]);
        let bc = l.bc.unwrap();
        assert_eq!(bc[1], BoundaryKind::Neumann);
        assert_eq!(bc[2], BoundaryKind::Dirichlet);
        assert_eq!(parse_layout(&write_layout(&l)).unwrap(), l);
    }

    #[test]
    fn malformed_layouts() {
        assert!(matches!(parse_layout("LAY1 2 1\nempty\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_layout("LAY2 1 1\nx\n").is_err());
        assert!(parse_layout("LAY1 1 1\nx\nbc O dirichlet\n").is_err());
        assert!(matches!(
            parse_layout("LAY1 1 1\nx\nbc L dirichlet\nbc L neumann\n"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn global_sides_of_corner_and_interior() {
        let l = Layout::uniform(3, 3, "e").unwrap();
        assert_eq!(l.global_sides(0), vec![Side::Left, Side::Bottom]);
        assert!(l.global_sides(4).is_empty());
        assert_eq!(l.global_sides(8), vec![Side::Right, Side::Top]);
    }
}
