//! Symmetric interior-penalty interface and Nitsche boundary forms.
//!
//! On an interface the normal `n` points from `m` to `n`, the jump is
//! `[[u]] = u_m - u_n` and the average `{v} = (v_m + v_n) / 2`.

use super::component::ReferenceDomain;
use super::layout::Axis;
use super::mortar::{build_mortar, MortarSegment, FACE_POINTS};
use crate::error::{Error, Result};
use crate::fem::{gauss_legendre, FunctionSpace, PointValues};
use crate::linalg::{SparseMatrix, Triplets};
use crate::mesh::Side;

/// Mortar quadrature of one reference interface.
#[derive(Clone, Debug)]
pub struct InterfaceQuad {
    pub axis: Axis,
    pub segments: Vec<MortarSegment>,
}

impl InterfaceQuad {
    pub fn new(m: &ReferenceDomain, n: &ReferenceDomain, axis: Axis) -> Result<Self> {
        let (sm, sn) = axis.sides();
        let segments = build_mortar(m.mesh(), m.trace(sm), n.mesh(), n.trace(sn), FACE_POINTS)?;
        Ok(InterfaceQuad { axis, segments })
    }
}

/// Coupling blocks of one interface in local dof numbering: `mm` is
/// `N_m x N_m`, `mn` is `N_m x N_n`, and so on.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceBlocks {
    pub mm: SparseMatrix,
    pub mn: SparseMatrix,
    pub nm: SparseMatrix,
    pub nn: SparseMatrix,
}

impl InterfaceBlocks {
    pub fn get(&self, a: usize, b: usize) -> &SparseMatrix {
        match (a, b) {
            (0, 0) => &self.mm,
            (0, 1) => &self.mn,
            (1, 0) => &self.nm,
            _ => &self.nn,
        }
    }
}

/// Boundary data for one side.
pub enum BoundaryData<'a> {
    Dirichlet(&'a dyn Fn([f64; 2]) -> [f64; 2]),
    /// Traction `g_ne(x, n)`.
    Neumann(&'a dyn Fn([f64; 2], [f64; 2]) -> [f64; 2]),
}

/// One field on one side of a face: primary space plus optional pressure.
#[derive(Clone, Copy)]
struct View<'a> {
    u: &'a FunctionSpace,
    p: Option<&'a FunctionSpace>,
    nu: f64,
}

impl<'a> View<'a> {
    fn of(d: &'a ReferenceDomain, nu: f64) -> Self {
        View { u: d.primary(), p: d.pressure(), nu }
    }

    fn dofs(&self) -> usize {
        self.u.dof_count() + self.p.map_or(0, |p| p.dof_count())
    }

    fn values(&self, cell: usize, r: [f64; 2]) -> (PointValues, Option<PointValues>) {
        let u = self.u.point_values(&self.u.cell_map(cell), r, 0.0);
        let p = self.p.map(|p| p.point_values(&p.cell_map(cell), r, 0.0));
        (u, p)
    }

    /// Owning cell and reference point at side parameter `t` on `edge`.
    fn at_param(&self, side: Side, edge: usize, t: f64) -> (usize, [f64; 2]) {
        let mesh = self.u.mesh();
        let be = mesh.boundary_edges()[edge];
        let ta = side.trace_param(mesh.vertices()[be.a]);
        let tb = side.trace_param(mesh.vertices()[be.b]);
        self.u.boundary_point(edge, (t - ta) / (tb - ta))
    }
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn interface_blocks(
    vm: View<'_>,
    vn: View<'_>,
    iface: &InterfaceQuad,
    gamma: f64,
    with_penalty_only: bool,
) -> InterfaceBlocks {
    let views = [vm, vn];
    let dims = [vm.dofs(), vn.dofs()];
    let mut t: Vec<Triplets> = Vec::with_capacity(4);
    for a in 0..2 {
        for b in 0..2 {
            t.push(Triplets::new(dims[a], dims[b]));
        }
    }
    let (side_m, side_n) = iface.axis.sides();
    let sides = [side_m, side_n];
    let normal = iface.axis.normal();
    let sign = [1.0, -1.0];
    let nu = vm.nu;
    let nc = vm.u.components();
    for seg in &iface.segments {
        let pen = gamma / seg.dx;
        let edges = [seg.edge_m, seg.edge_n];
        for (&tq, &w) in seg.points.iter().zip(&seg.weights) {
            let mut nodes: [&[usize]; 2] = [&[], &[]];
            let mut pnodes: [&[usize]; 2] = [&[], &[]];
            let mut vals: [Option<(PointValues, Option<PointValues>)>; 2] = [None, None];
            for s in 0..2 {
                let (cell, r) = views[s].at_param(sides[s], edges[s], tq);
                nodes[s] = views[s].u.cell_nodes(cell);
                if let Some(p) = views[s].p {
                    pnodes[s] = p.cell_nodes(cell);
                }
                vals[s] = Some(views[s].values(cell, r));
            }
            let vals = [vals[0].unwrap(), vals[1].unwrap()];
            let dn = |s: usize, i: usize| dot(normal, vals[s].0.grad[i]);
            for a in 0..2 {
                for b in 0..2 {
                    let tr = &mut t[2 * a + b];
                    let (sa, sb) = (sign[a], sign[b]);
                    let (fa, fb) = (&vals[a].0, &vals[b].0);
                    for (i, &ni) in nodes[a].iter().enumerate() {
                        for (j, &nj) in nodes[b].iter().enumerate() {
                            let mut v = pen * sa * sb * fa.val[i] * fb.val[j];
                            if !with_penalty_only {
                                v -= 0.5 * nu * dn(a, i) * sb * fb.val[j];
                                v -= 0.5 * nu * sa * fa.val[i] * dn(b, j);
                            }
                            for c in 0..nc {
                                tr.push(nc * ni + c, nc * nj + c, w * v);
                            }
                        }
                    }
                }
            }
            if with_penalty_only {
                continue;
            }
            // <[[n.v]], {p}> and its transpose
            for a in 0..2 {
                for b in 0..2 {
                    let Some(pb) = vals[b].1 else { continue };
                    let off_b = views[b].u.dof_count();
                    let fa = &vals[a].0;
                    for (i, &ni) in nodes[a].iter().enumerate() {
                        for (j, &pj) in pnodes[b].iter().enumerate() {
                            for c in 0..nc {
                                let v = w * sign[a] * normal[c] * fa.val[i] * 0.5 * pb.val[j];
                                t[2 * a + b].push(nc * ni + c, off_b + pj, v);
                                t[2 * b + a].push(off_b + pj, nc * ni + c, v);
                            }
                        }
                    }
                }
            }
        }
    }
    let mut it = t.into_iter().map(|t| t.to_csr());
    InterfaceBlocks {
        mm: it.next().unwrap(),
        mn: it.next().unwrap(),
        nm: it.next().unwrap(),
        nn: it.next().unwrap(),
    }
}

/// `-<{n.grad v}, [[u]]> - <[[v]], {n.grad u}> + gamma/dx <[[v]], [[u]]>`.
pub fn assemble_interface_poisson(
    space_m: &FunctionSpace,
    space_n: &FunctionSpace,
    iface: &InterfaceQuad,
    gamma: f64,
) -> InterfaceBlocks {
    let v = |s| View { u: s, p: None, nu: 1.0 };
    interface_blocks(v(space_m), v(space_n), iface, gamma, false)
}

/// Only the penalty part `gamma/dx <[[v]], [[u]]>` (scalar or vector).
pub fn assemble_interface_penalty(
    space_m: &FunctionSpace,
    space_n: &FunctionSpace,
    iface: &InterfaceQuad,
    gamma: f64,
) -> InterfaceBlocks {
    let v = |s| View { u: s, p: None, nu: 1.0 };
    interface_blocks(v(space_m), v(space_n), iface, gamma, true)
}

/// Velocity part with viscosity `nu` plus `<[[n.v]], {p}>` and its
/// transpose, in the coupled (velocity, pressure) numbering.
pub fn assemble_interface_stokes(
    m: &ReferenceDomain,
    n: &ReferenceDomain,
    iface: &InterfaceQuad,
    gamma: f64,
    nu: f64,
) -> Result<InterfaceBlocks> {
    if m.pressure().is_none() || n.pressure().is_none() {
        return Err(Error::IncompatibleSpace("Stokes interface needs Taylor-Hood spaces".into()));
    }
    Ok(interface_blocks(View::of(m, nu), View::of(n, nu), iface, gamma, false))
}

/// Interface blocks for either physics.
pub fn assemble_interface(
    m: &ReferenceDomain,
    n: &ReferenceDomain,
    iface: &InterfaceQuad,
    gamma: f64,
    nu: f64,
) -> Result<InterfaceBlocks> {
    if m.physics() != n.physics() {
        return Err(Error::IncompatibleSpace("interface between different physics".into()));
    }
    let nu = if m.pressure().is_some() { nu } else { 1.0 };
    Ok(interface_blocks(View::of(m, nu), View::of(n, nu), iface, gamma, false))
}

/// Quadrature point on a boundary side: owning cell, reference point,
/// local physical point, weight, outward normal and penalty length.
#[derive(Clone, Copy, Debug)]
pub struct FacePoint {
    pub cell: usize,
    pub r: [f64; 2],
    pub x: [f64; 2],
    pub w: f64,
    pub normal: [f64; 2],
    pub dx: f64,
}

/// Gauss points on every boundary edge tagged `side`.
pub fn face_points(space: &FunctionSpace, side: Side) -> Vec<FacePoint> {
    let mesh = space.mesh();
    let (gp, gw) = gauss_legendre(FACE_POINTS);
    let mut out = Vec::new();
    for (e, be) in mesh.boundary_edges().iter().enumerate() {
        if be.side != side {
            continue;
        }
        let (a, b) = (mesh.vertices()[be.a], mesh.vertices()[be.b]);
        let len = mesh.edge_length(e);
        let normal = match side.outward_normal() {
            Some(n) => n,
            None => {
                // away from the owning cell
                let cell = &mesh.cells()[mesh.edge_owner(e).element];
                let vs = cell.vertices();
                let mut c = [0.0; 2];
                for &v in vs {
                    c[0] += mesh.vertices()[v][0] / vs.len() as f64;
                    c[1] += mesh.vertices()[v][1] / vs.len() as f64;
                }
                let mut n = [(b[1] - a[1]) / len, -(b[0] - a[0]) / len];
                if dot(n, [a[0] - c[0], a[1] - c[1]]) < 0.0 {
                    n = [-n[0], -n[1]];
                }
                n
            }
        };
        for (&s, &w) in gp.iter().zip(&gw) {
            let (cell, r) = space.boundary_point(e, s);
            let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            out.push(FacePoint { cell, r, x, w: w * len, normal, dx: len });
        }
    }
    out
}

fn boundary_matrix(v: View<'_>, side: Side, gamma: f64) -> SparseMatrix {
    let n = v.dofs();
    let nc = v.u.components();
    let mut t = Triplets::new(n, n);
    let off = v.u.dof_count();
    for fp in face_points(v.u, side) {
        let pen = gamma / fp.dx;
        let (fu, fpv) = v.values(fp.cell, fp.r);
        let nodes = v.u.cell_nodes(fp.cell);
        for (i, &ni) in nodes.iter().enumerate() {
            let dni = dot(fp.normal, fu.grad[i]);
            for (j, &nj) in nodes.iter().enumerate() {
                let dnj = dot(fp.normal, fu.grad[j]);
                let val = fp.w
                    * (pen * fu.val[i] * fu.val[j] - v.nu * dni * fu.val[j] - v.nu * fu.val[i] * dnj);
                for c in 0..nc {
                    t.push(nc * ni + c, nc * nj + c, val);
                }
            }
        }
        if let (Some(p), Some(pv)) = (v.p, fpv) {
            for (i, &ni) in nodes.iter().enumerate() {
                for (j, &pj) in p.cell_nodes(fp.cell).iter().enumerate() {
                    for c in 0..nc {
                        let val = fp.w * fp.normal[c] * fu.val[i] * pv.val[j];
                        t.push(nc * ni + c, off + pj, val);
                        t.push(off + pj, nc * ni + c, val);
                    }
                }
            }
        }
    }
    t.to_csr()
}

fn dirichlet_rhs(v: View<'_>, side: Side, gamma: f64, g: &dyn Fn([f64; 2]) -> [f64; 2]) -> Vec<f64> {
    let mut out = vec![0.0; v.dofs()];
    let nc = v.u.components();
    let off = v.u.dof_count();
    for fp in face_points(v.u, side) {
        let gx = g(fp.x);
        if gx == [0.0; 2] {
            continue;
        }
        let pen = gamma / fp.dx;
        let (fu, fpv) = v.values(fp.cell, fp.r);
        for (i, &ni) in v.u.cell_nodes(fp.cell).iter().enumerate() {
            let dni = dot(fp.normal, fu.grad[i]);
            for c in 0..nc {
                out[nc * ni + c] += fp.w * (pen * fu.val[i] - v.nu * dni) * gx[c];
            }
        }
        if let (Some(p), Some(pv)) = (v.p, fpv) {
            let gn = dot(fp.normal, gx);
            for (j, &pj) in p.cell_nodes(fp.cell).iter().enumerate() {
                out[off + pj] += fp.w * pv.val[j] * gn;
            }
        }
    }
    out
}

/// `sign * <v, g_ne>` on `side`.
fn neumann_rhs(
    v: View<'_>,
    side: Side,
    sign: f64,
    g: &dyn Fn([f64; 2], [f64; 2]) -> [f64; 2],
) -> Vec<f64> {
    let mut out = vec![0.0; v.dofs()];
    let nc = v.u.components();
    for fp in face_points(v.u, side) {
        let gx = g(fp.x, fp.normal);
        if gx == [0.0; 2] {
            continue;
        }
        let (fu, _) = v.values(fp.cell, fp.r);
        for (i, &ni) in v.u.cell_nodes(fp.cell).iter().enumerate() {
            for c in 0..nc {
                out[nc * ni + c] += sign * fp.w * fu.val[i] * gx[c];
            }
        }
    }
    out
}

/// Nitsche matrix `-<n.grad v, u> - <v, n.grad u> + gamma/dx <v, u>` and
/// rhs `gamma/dx <v, g> - <n.grad v, g>` on one side.
pub fn assemble_boundary_poisson(
    space: &FunctionSpace,
    side: Side,
    gamma: f64,
    g_di: &dyn Fn([f64; 2]) -> f64,
) -> (SparseMatrix, Vec<f64>) {
    let v = View { u: space, p: None, nu: 1.0 };
    let g = |x: [f64; 2]| [g_di(x), 0.0];
    (boundary_matrix(v, side, gamma), dirichlet_rhs(v, side, gamma, &g))
}

/// `<v, g_ne>` with `g_ne = n.grad u`.
pub fn assemble_neumann_poisson(
    space: &FunctionSpace,
    side: Side,
    g_ne: &dyn Fn([f64; 2], [f64; 2]) -> f64,
) -> Vec<f64> {
    let v = View { u: space, p: None, nu: 1.0 };
    let g = |x: [f64; 2], n: [f64; 2]| [g_ne(x, n), 0.0];
    neumann_rhs(v, side, 1.0, &g)
}

/// Stokes boundary terms. Dirichlet sides get the Nitsche velocity block,
/// `<n.v, p>` with its transpose, and rhs `gamma/dx <v, g> - nu <n.grad v, g>`
/// plus `<q, n.g>`. Neumann sides contribute `-<v, g_ne>` to the rhs only.
pub fn assemble_boundary_stokes(
    dom: &ReferenceDomain,
    side: Side,
    gamma: f64,
    nu: f64,
    data: BoundaryData<'_>,
) -> Result<(SparseMatrix, Vec<f64>)> {
    if dom.pressure().is_none() {
        return Err(Error::IncompatibleSpace("Stokes boundary on a scalar component".into()));
    }
    let v = View::of(dom, nu);
    Ok(match data {
        BoundaryData::Dirichlet(g) => (boundary_matrix(v, side, gamma), dirichlet_rhs(v, side, gamma, g)),
        BoundaryData::Neumann(g) => {
            let n = v.dofs();
            (SparseMatrix::zeros(n, n), neumann_rhs(v, side, -1.0, g))
        }
    })
}

/// Dirichlet matrix of a side for either physics.
pub fn boundary_operator(dom: &ReferenceDomain, side: Side, gamma: f64, nu: f64) -> SparseMatrix {
    let nu = if dom.pressure().is_some() { nu } else { 1.0 };
    boundary_matrix(View::of(dom, nu), side, gamma)
}

/// Boundary rhs of a side for either physics. Scalar data uses component 0.
/// The Neumann sign follows the physics: `+<v, n.grad u>` for Poisson,
/// `-<v, g_ne>` for the Stokes traction convention.
pub fn boundary_rhs(dom: &ReferenceDomain, side: Side, gamma: f64, nu: f64, data: BoundaryData<'_>) -> Vec<f64> {
    let stokes = dom.pressure().is_some();
    let v = View::of(dom, if stokes { nu } else { 1.0 });
    match data {
        BoundaryData::Dirichlet(g) => dirichlet_rhs(v, side, gamma, g),
        BoundaryData::Neumann(g) => neumann_rhs(v, side, if stokes { -1.0 } else { 1.0 }, g),
    }
}
