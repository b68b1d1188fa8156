use crate::error::{Error, Result};
use crate::fem::gauss_legendre;
use crate::mesh::{Mesh2D, SideTrace};

/// Gauss points per mortar sub-segment.
pub const FACE_POINTS: usize = 5;

/// One piece of the common refinement of two side traces.
#[derive(Clone, Debug, PartialEq)]
pub struct MortarSegment {
    pub t0: f64,
    pub t1: f64,
    /// Boundary edge of the `m` side containing `[t0, t1]`.
    pub edge_m: usize,
    pub edge_n: usize,
    /// Penalty length: the shorter of the two owning edges.
    pub dx: f64,
    /// Gauss points in the side parameter and their weights (summing to
    /// `t1 - t0`).
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

const MERGE_TOL: f64 = 1e-12;

/// Common refinement of two partitions of `[0, 1]`.
pub fn build_mortar(
    mesh_m: &Mesh2D,
    trace_m: &SideTrace,
    mesh_n: &Mesh2D,
    trace_n: &SideTrace,
    n_points: usize,
) -> Result<Vec<MortarSegment>> {
    if n_points == 0 {
        return Err(Error::InvalidArgument("mortar needs at least one Gauss point".into()));
    }
    let (gp, gw) = gauss_legendre(n_points);
    let (sm, sn) = (&trace_m.segments, &trace_n.segments);
    if sm.is_empty() || sn.is_empty() {
        return Err(Error::InvalidArgument("empty side trace".into()));
    }
    let (mut i, mut j) = (0, 0);
    let mut t = 0.0;
    let mut out = Vec::with_capacity(sm.len() + sn.len());
    while i < sm.len() && j < sn.len() {
        let (a, b) = (&sm[i], &sn[j]);
        let end = a.t1.min(b.t1);
        if end - t > MERGE_TOL {
            let len = end - t;
            out.push(MortarSegment {
                t0: t,
                t1: end,
                edge_m: a.edge,
                edge_n: b.edge,
                dx: mesh_m.edge_length(a.edge).min(mesh_n.edge_length(b.edge)),
                points: gp.iter().map(|p| t + len * p).collect(),
                weights: gw.iter().map(|w| len * w).collect(),
            });
        }
        t = end;
        if (a.t1 - end).abs() <= MERGE_TOL {
            i += 1;
        }
        if (b.t1 - end).abs() <= MERGE_TOL {
            j += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{gen_circle_obstacle, gen_quad_grid, gen_tri_grid, side_trace, Side};

    #[test]
    fn halves_against_thirds() {
        let (a, b) = (gen_quad_grid(2).unwrap(), gen_quad_grid(3).unwrap());
        let ta = side_trace(&a, Side::Right).unwrap();
        let tb = side_trace(&b, Side::Left).unwrap();
        let segs = build_mortar(&a, &ta, &b, &tb, FACE_POINTS).unwrap();
        let spans: Vec<(f64, f64)> = segs.iter().map(|s| (s.t0, s.t1)).collect();
        let want = [(0.0, 1.0 / 3.0), (1.0 / 3.0, 0.5), (0.5, 2.0 / 3.0), (2.0 / 3.0, 1.0)];
        for (got, w) in spans.iter().zip(want) {
            assert!((got.0 - w.0).abs() < 1e-15 && (got.1 - w.1).abs() < 1e-15);
        }
        assert_eq!(spans.len(), 4);
        assert!(segs.iter().all(|s| (s.dx - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn identical_traces_keep_the_partition() {
        let m = gen_tri_grid(4).unwrap();
        let t = side_trace(&m, Side::Top).unwrap();
        let q = gen_quad_grid(4).unwrap();
        let tq = side_trace(&q, Side::Bottom).unwrap();
        let segs = build_mortar(&m, &t, &q, &tq, 3).unwrap();
        assert_eq!(segs.len(), 4);
        for (s, ts) in segs.iter().zip(&t.segments) {
            assert_eq!((s.t0, s.t1, s.edge_m), (ts.t0, ts.t1, ts.edge));
        }
    }

    #[test]
    fn weights_sum_to_one() {
        let c = gen_circle_obstacle(0.25, 8, 3).unwrap();
        let q = gen_quad_grid(7).unwrap();
        for (sa, sb) in [(Side::Right, Side::Left), (Side::Top, Side::Bottom)] {
            let segs = build_mortar(
                &c,
                &side_trace(&c, sa).unwrap(),
                &q,
                &side_trace(&q, sb).unwrap(),
                FACE_POINTS,
            )
            .unwrap();
            let total: f64 = segs.iter().flat_map(|s| s.weights.iter()).sum();
            assert!((total - 1.0).abs() < 1e-14);
            assert!(segs.iter().all(|s| s.dx > 0.0 && s.t1 > s.t0));
        }
    }
}
