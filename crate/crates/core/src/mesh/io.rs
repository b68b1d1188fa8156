//! MESH1 text format.
//!
//! ```text
//! MESH1 <nv> <ne> <nb>
//! v <x1> <x2>            (nv lines)
//! e <k> <i0> .. <ik-1>   (ne lines, k in {3,4})
//! b <ia> <ib> <L|R|B|T|O> (nb lines)
//! ```

use std::fmt::Write as _;

use super::{BoundaryEdge, Cell, Mesh2D, MeshDefect, Side};
use crate::error::{Error, Result};

pub fn write_mesh(mesh: &Mesh2D) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "MESH1 {} {} {}",
        mesh.n_vertices(),
        mesh.n_cells(),
        mesh.boundary_edges().len()
    );
    for v in mesh.vertices() {
        let _ = writeln!(s, "v {:.16e} {:.16e}", v[0], v[1]);
    }
    for c in mesh.cells() {
        let vs = c.vertices();
        let _ = write!(s, "e {}", vs.len());
        for v in vs {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    for b in mesh.boundary_edges() {
        let _ = writeln!(s, "b {} {} {}", b.a, b.b, b.side.code());
    }
    s
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::parse(line, format!("malformed {what}")))
}

pub fn parse_mesh(text: &str) -> Result<Mesh2D> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "empty mesh file"))?;
    let mut tok = header.split_whitespace();
    if tok.next() != Some("MESH1") {
        return Err(Error::parse(hline, "malformed header, expected MESH1"));
    }
    let nv: usize = field(tok.next(), hline, "vertex count")?;
    let ne: usize = field(tok.next(), hline, "element count")?;
    let nb: usize = field(tok.next(), hline, "boundary edge count")?;

    let mut vertices = Vec::with_capacity(nv);
    let mut cells = Vec::with_capacity(ne);
    let mut boundary = Vec::with_capacity(nb);
    let mut cell_lines = Vec::with_capacity(ne);
    let mut bnd_lines = Vec::with_capacity(nb);

    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| Error::parse(hline, "too few vertex lines"))?;
        let mut t = l.split_whitespace();
        if t.next() != Some("v") {
            return Err(Error::parse(ln, "expected vertex line"));
        }
        vertices.push([field(t.next(), ln, "x1")?, field(t.next(), ln, "x2")?]);
    }
    for _ in 0..ne {
        let (ln, l) = lines.next().ok_or_else(|| Error::parse(hline, "too few element lines"))?;
        let mut t = l.split_whitespace();
        if t.next() != Some("e") {
            return Err(Error::parse(ln, "expected element line"));
        }
        let k: usize = field(t.next(), ln, "element vertex count")?;
        let idx = t
            .map(|s| s.parse::<usize>().map_err(|_| Error::parse(ln, "malformed vertex index")))
            .collect::<Result<Vec<_>>>()?;
        if idx.len() != k {
            return Err(Error::parse(ln, "element vertex count does not match"));
        }
        if idx.iter().any(|&i| i >= nv) {
            return Err(Error::parse(ln, "vertex index out of range"));
        }
        let cell = Cell::from_slice(&idx)
            .ok_or_else(|| Error::parse(ln, "elements must have 3 or 4 vertices"))?;
        cells.push(cell);
        cell_lines.push(ln);
    }
    for _ in 0..nb {
        let (ln, l) = lines.next().ok_or_else(|| Error::parse(hline, "too few boundary lines"))?;
        let mut t = l.split_whitespace();
        if t.next() != Some("b") {
            return Err(Error::parse(ln, "expected boundary line"));
        }
        let a: usize = field(t.next(), ln, "boundary vertex")?;
        let b: usize = field(t.next(), ln, "boundary vertex")?;
        let side = t
            .next()
            .and_then(Side::from_code)
            .ok_or_else(|| Error::parse(ln, "malformed boundary attribute"))?;
        if a >= nv || b >= nv {
            return Err(Error::parse(ln, "vertex index out of range"));
        }
        boundary.push(BoundaryEdge { a, b, side });
        bnd_lines.push(ln);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::parse(ln, "trailing content after mesh"));
    }

    Mesh2D::build(vertices, cells, boundary).map_err(|d| match d {
        MeshDefect::VertexOutOfRange { element } => {
            Error::parse(cell_lines[element], "vertex index out of range")
        }
        MeshDefect::NonCcw { element } => {
            Error::parse(cell_lines[element], "element is not counter-clockwise")
        }
        MeshDefect::BoundaryOutOfRange { edge } => {
            Error::parse(bnd_lines[edge], "vertex index out of range")
        }
        MeshDefect::DanglingBoundary { edge } => {
            Error::parse(bnd_lines[edge], "dangling boundary edge")
        }
        MeshDefect::OffSide { edge } => {
            Error::parse(bnd_lines[edge], "boundary edge does not lie on its side")
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{gen_circle_obstacle, gen_quad_grid, gen_tri_grid};

    #[test]
    fn round_trips_generated_meshes() {
        for m in [
            gen_quad_grid(1).unwrap(),
            gen_tri_grid(3).unwrap(),
            gen_circle_obstacle(0.25, 8, 3).unwrap(),
        ] {
            let text = write_mesh(&m);
            let back = parse_mesh(&text).unwrap();
            assert_eq!(back, m);
            assert_eq!(write_mesh(&back), text);
        }
        assert!(write_mesh(&gen_quad_grid(1).unwrap()).starts_with("MESH1 4 1 4\n"));
    }

    #[test]
    fn reports_out_of_range_index_with_line() {
        let text = "MESH1 4 1 0\nv 0 0\nv 1 0\nv 1 1\nv 0 1\ne 4 0 1 2 99\n";
        let err = parse_mesh(text).unwrap_err();
        assert_eq!(err.to_string(), "vertex index out of range, line 6");
    }

    #[test]
    fn reports_orientation_and_dangling_edges() {
        let cw = "MESH1 3 1 0\nv 0 0\nv 1 0\nv 0 1\ne 3 0 2 1\n";
        assert_eq!(
            parse_mesh(cw).unwrap_err().to_string(),
            "element is not counter-clockwise, line 5"
        );
        let dangling = "MESH1 4 1 1\nv 0 0\nv 1 0\nv 0 1\nv 1 1\ne 3 0 1 2\nb 1 3 R\n";
        assert_eq!(
            parse_mesh(dangling).unwrap_err().to_string(),
            "dangling boundary edge, line 7"
        );
        assert!(parse_mesh("MESH2 0 0 0\n").unwrap_err().to_string().contains("line 1"));
    }
}
