use super::{Mesh2D, Side};
use crate::error::{Error, Result};

/// One boundary edge seen as an interval of the side parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceSegment {
    pub t0: f64,
    pub t1: f64,
    /// Index into [`Mesh2D::boundary_edges`].
    pub edge: usize,
}

/// The boundary edges of one outer side, ordered along the side.
#[derive(Clone, Debug, PartialEq)]
pub struct SideTrace {
    pub side: Side,
    pub segments: Vec<TraceSegment>,
}

impl SideTrace {
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = Vec::with_capacity(self.segments.len() + 1);
        if let Some(first) = self.segments.first() {
            b.push(first.t0);
        }
        b.extend(self.segments.iter().map(|s| s.t1));
        b
    }
}

pub fn side_trace(mesh: &Mesh2D, side: Side) -> Result<SideTrace> {
    if !side.is_outer() {
        return Err(Error::InvalidArgument("obstacle edges have no side trace".into()));
    }
    let mut segments: Vec<TraceSegment> = mesh
        .boundary_edges()
        .iter()
        .enumerate()
        .filter(|(_, b)| b.side == side)
        .map(|(i, b)| {
            let ta = side.trace_param(mesh.vertices()[b.a]);
            let tb = side.trace_param(mesh.vertices()[b.b]);
            TraceSegment { t0: ta.min(tb), t1: ta.max(tb), edge: i }
        })
        .collect();
    if segments.is_empty() {
        return Err(Error::EmptySide(side));
    }
    segments.sort_by(|a, b| a.t0.total_cmp(&b.t0));
    let tol = 1e-12;
    let mut cursor = 0.0;
    for s in &segments {
        if (s.t0 - cursor).abs() > tol || s.t1 <= s.t0 {
            return Err(Error::InvalidArgument(format!(
                "side {side:?} edges do not partition [0,1] near t = {cursor}"
            )));
        }
        cursor = s.t1;
    }
    if (cursor - 1.0).abs() > tol {
        return Err(Error::InvalidArgument(format!(
            "side {side:?} edges stop at t = {cursor}"
        )));
    }
    Ok(SideTrace { side, segments })
}
