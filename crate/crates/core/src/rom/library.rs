use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::pod::PodBasis;
use crate::dgdd::{assemble_interface, boundary_operator, Axis, ComponentPool, InterfaceQuad, Physics};
use crate::error::{Error, Result};
use crate::linalg::io::{parse_dense, parse_dense_blocks, write_dense};
use crate::linalg::{DenseMatrix, SparseMatrix};
use crate::mesh::Side;

/// Projected operators of a component pool: everything a reduced layout
/// needs, independent of the layout.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedBlockLibrary {
    pub physics: Physics,
    pub gamma: f64,
    pub nu: f64,
    pub domain: BTreeMap<String, DenseMatrix>,
    /// `[mm, mn, nm, nn]` keyed by (left/bottom reference, right/top
    /// reference, axis).
    pub interface: BTreeMap<(String, String, Axis), [DenseMatrix; 4]>,
    /// Dirichlet blocks keyed by (reference, side), obstacles included.
    pub boundary: BTreeMap<(String, Side), DenseMatrix>,
    /// `Phi^T w` with `w` the pressure-mean functional (Stokes only).
    pub mean: BTreeMap<String, Vec<f64>>,
}

/// `Phi_a^T B Phi_b`.
pub fn project(phi_a: &DenseMatrix, b: &SparseMatrix, phi_b: &DenseMatrix) -> Result<DenseMatrix> {
    if b.nrows() != phi_a.rows() || b.ncols() != phi_b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "operator {}x{} against bases of length {} and {}",
            b.nrows(),
            b.ncols(),
            phi_a.rows(),
            phi_b.rows()
        )));
    }
    Ok(phi_a.tr_matmul(&b.mul_dense(phi_b)))
}

fn leading(m: &DenseMatrix, r: usize, c: usize) -> DenseMatrix {
    DenseMatrix::from_fn(r, c, |i, j| m[(i, j)])
}

const SIDES: [Side; 5] = [Side::Left, Side::Right, Side::Bottom, Side::Top, Side::Obstacle];

impl ReducedBlockLibrary {
    /// Projects every reference operator of `pool` that has a basis: one
    /// volume block, one interface quadruple per ordered reference pair and
    /// axis, one boundary block per side.
    pub fn project_operators(
        pool: &ComponentPool,
        bases: &BTreeMap<String, PodBasis>,
        gamma: f64,
        nu: f64,
    ) -> Result<Self> {
        let mut physics = None;
        let mut lib = ReducedBlockLibrary {
            physics: Physics::Poisson,
            gamma,
            nu,
            domain: BTreeMap::new(),
            interface: BTreeMap::new(),
            boundary: BTreeMap::new(),
            mean: BTreeMap::new(),
        };
        for (name, basis) in bases {
            let d = pool.get(name)?;
            if basis.dim() != d.dof_count() {
                return Err(Error::DimensionMismatch(format!(
                    "basis `{name}` has length {}, component has {} dofs",
                    basis.dim(),
                    d.dof_count()
                )));
            }
            if *physics.get_or_insert(d.physics()) != d.physics() {
                return Err(Error::IncompatibleSpace("bases of mixed physics".into()));
            }
            let phi = &basis.phi;
            lib.domain.insert(name.clone(), project(phi, &d.volume_operator(nu)?, phi)?);
            for side in SIDES {
                if d.mesh().has_side(side) {
                    let b = boundary_operator(d, side, gamma, nu);
                    lib.boundary.insert((name.clone(), side), project(phi, &b, phi)?);
                }
            }
            if d.physics() == Physics::Stokes {
                lib.mean.insert(name.clone(), basis.project(&d.pressure_weights()));
            }
        }
        for (a, ba) in bases {
            for (b, bb) in bases {
                let (da, db) = (pool.get(a)?, pool.get(b)?);
                for axis in [Axis::Horizontal, Axis::Vertical] {
                    let q = InterfaceQuad::new(da, db, axis)?;
                    let blocks = assemble_interface(da, db, &q, gamma, nu)?;
                    let p = [
                        project(&ba.phi, &blocks.mm, &ba.phi)?,
                        project(&ba.phi, &blocks.mn, &bb.phi)?,
                        project(&bb.phi, &blocks.nm, &ba.phi)?,
                        project(&bb.phi, &blocks.nn, &bb.phi)?,
                    ];
                    lib.interface.insert((a.clone(), b.clone(), axis), p);
                }
            }
        }
        lib.physics = physics.ok_or_else(|| Error::InvalidArgument("no bases to project".into()))?;
        Ok(lib)
    }

    pub fn rank(&self, reference: &str) -> Result<usize> {
        self.domain
            .get(reference)
            .map(DenseMatrix::rows)
            .ok_or_else(|| Error::MissingBlock(format!("dom_{reference}")))
    }

    pub fn interface_blocks(&self, a: &str, b: &str, axis: Axis) -> Result<&[DenseMatrix; 4]> {
        self.interface
            .get(&(a.to_string(), b.to_string(), axis))
            .ok_or_else(|| Error::MissingBlock(format!("ifc_{a}_{b}_{}", axis.code())))
    }

    pub fn boundary_block(&self, r: &str, side: Side) -> Result<&DenseMatrix> {
        self.boundary
            .get(&(r.to_string(), side))
            .ok_or_else(|| Error::MissingBlock(format!("bnd_{r}_{}", side.code())))
    }

    /// Library for the leading `ranks[r]` modes of each basis. Valid because
    /// truncated bases are leading columns of the full ones.
    pub fn truncated(&self, ranks: &BTreeMap<String, usize>) -> Result<Self> {
        let rank = |r: &str| -> Result<usize> {
            let full = self.rank(r)?;
            let k = *ranks.get(r).unwrap_or(&full);
            if k == 0 || k > full {
                return Err(Error::InvalidArgument(format!("rank {k} for `{r}` outside 1..={full}")));
            }
            Ok(k)
        };
        let mut out = self.clone();
        for (r, m) in out.domain.iter_mut() {
            let k = rank(r)?;
            *m = leading(m, k, k);
        }
        for ((r, _), m) in out.boundary.iter_mut() {
            let k = rank(r)?;
            *m = leading(m, k, k);
        }
        for ((a, b, _), q) in out.interface.iter_mut() {
            let (ka, kb) = (rank(a)?, rank(b)?);
            *q = [leading(&q[0], ka, ka), leading(&q[1], ka, kb), leading(&q[2], kb, ka), leading(&q[3], kb, kb)];
        }
        for (r, w) in out.mean.iter_mut() {
            w.truncate(rank(r)?);
        }
        Ok(out)
    }

    /// Bytes held by the dense blocks.
    pub fn memory_bytes(&self) -> usize {
        let m = |d: &DenseMatrix| d.rows() * d.cols() * 8;
        self.domain.values().map(m).sum::<usize>()
            + self.boundary.values().map(m).sum::<usize>()
            + self.interface.values().flat_map(|q| q.iter().map(m)).sum::<usize>()
    }

    /// Writes `dom_<r>.mat`, `ifc_<r>_<r'>_<H|V>.mat` (four MAT1 blocks),
    /// `bnd_<r>_<side>.mat`, `mean_<r>.mat` and `library.txt`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        for r in self.domain.keys() {
            if r.contains('_') || r.contains(char::is_whitespace) || r.is_empty() {
                return Err(Error::Config(format!("reference name `{r}` cannot be used in block file names")));
            }
        }
        fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
        let put = |name: String, body: String| -> Result<()> {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| Error::io(format!("writing {}", p.display()), e))
        };
        let mat = |m: &DenseMatrix| {
            let mut s = String::new();
            write_dense(m, &mut s);
            s
        };
        let physics = match self.physics {
            Physics::Poisson => "poisson",
            Physics::Stokes => "stokes",
        };
        put("library.txt".into(), format!("LIB1 {physics} {:.16e} {:.16e}\n", self.gamma, self.nu))?;
        for (r, m) in &self.domain {
            put(format!("dom_{r}.mat"), mat(m))?;
        }
        for ((a, b, axis), q) in &self.interface {
            put(format!("ifc_{a}_{b}_{}.mat", axis.code()), q.iter().map(mat).collect())?;
        }
        for ((r, side), m) in &self.boundary {
            put(format!("bnd_{r}_{}.mat", side.code()), mat(m))?;
        }
        for (r, w) in &self.mean {
            put(format!("mean_{r}.mat"), mat(&DenseMatrix::from_row_major(1, w.len(), w.clone())?))?;
        }
        Ok(())
    }

    pub fn read_dir(dir: &Path) -> Result<Self> {
        let get = |p: &Path| fs::read_to_string(p).map_err(|e| Error::io(format!("reading {}", p.display()), e));
        let meta = get(&dir.join("library.txt"))?;
        let t: Vec<&str> = meta.split_whitespace().collect();
        let bad = || Error::parse(1, "expected `LIB1 <physics> <gamma> <nu>` in library.txt");
        if t.len() != 4 || t[0] != "LIB1" {
            return Err(bad());
        }
        let physics = match t[1] {
            "poisson" => Physics::Poisson,
            "stokes" => Physics::Stokes,
            _ => return Err(bad()),
        };
        let gamma: f64 = t[2].parse().map_err(|_| bad())?;
        let nu: f64 = t[3].parse().map_err(|_| bad())?;
        let mut lib = ReducedBlockLibrary {
            physics,
            gamma,
            nu,
            domain: BTreeMap::new(),
            interface: BTreeMap::new(),
            boundary: BTreeMap::new(),
            mean: BTreeMap::new(),
        };
        let mut entries: Vec<_> = fs::read_dir(dir)
            .map_err(|e| Error::io(format!("listing {}", dir.display()), e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .collect();
        entries.sort();
        for p in entries {
            let Some(stem) = p.file_name().and_then(|s| s.to_str()).and_then(|s| s.strip_suffix(".mat")) else {
                continue;
            };
            let parts: Vec<&str> = stem.split('_').collect();
            let ctx = |e: Error| Error::Config(format!("{}: {e}", p.display()));
            match parts.as_slice() {
                ["dom", r] => {
                    lib.domain.insert(r.to_string(), parse_dense(&get(&p)?).map_err(ctx)?);
                }
                ["bnd", r, s] => {
                    let side = Side::from_code(s).ok_or_else(|| Error::Config(format!("bad side in {stem}")))?;
                    lib.boundary.insert((r.to_string(), side), parse_dense(&get(&p)?).map_err(ctx)?);
                }
                ["ifc", a, b, ax] => {
                    let axis = match *ax {
                        "H" => Axis::Horizontal,
                        "V" => Axis::Vertical,
                        _ => return Err(Error::Config(format!("bad axis in {stem}"))),
                    };
                    let blocks = parse_dense_blocks(&get(&p)?).map_err(ctx)?;
                    let q: [DenseMatrix; 4] = blocks
                        .try_into()
                        .map_err(|_| Error::Config(format!("{stem} must hold four blocks")))?;
                    lib.interface.insert((a.to_string(), b.to_string(), axis), q);
                }
                ["mean", r] => {
                    let m = parse_dense(&get(&p)?).map_err(ctx)?;
                    lib.mean.insert(r.to_string(), m.row(0).to_vec());
                }
                _ => {}
            }
        }
        Ok(lib)
    }
}
