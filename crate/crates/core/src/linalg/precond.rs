use super::SparseMatrix;

/// Symmetric positive definite approximation `M^{-1}` applied as `z = M^{-1} r`.
pub trait Preconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

pub struct Identity;

impl Preconditioner for Identity {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

pub struct Jacobi {
    inv_diag: Vec<f64>,
}

impl Jacobi {
    pub fn new(a: &SparseMatrix) -> Self {
        let inv_diag = a
            .diagonal()
            .into_iter()
            .map(|d| if d != 0.0 { 1.0 / d } else { 1.0 })
            .collect();
        Jacobi { inv_diag }
    }
}

impl Preconditioner for Jacobi {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        for ((zi, ri), di) in z.iter_mut().zip(r).zip(&self.inv_diag) {
            *zi = ri * di;
        }
    }
}

/// `sweeps` forward-backward Gauss-Seidel iterations on `A z = r` from zero.
pub struct SymmetricGaussSeidel {
    a: SparseMatrix,
    diag: Vec<f64>,
    sweeps: usize,
}

impl SymmetricGaussSeidel {
    pub fn new(a: SparseMatrix, sweeps: usize) -> Self {
        let diag = a
            .diagonal()
            .into_iter()
            .map(|d| if d != 0.0 { d } else { 1.0 })
            .collect();
        SymmetricGaussSeidel { a, diag, sweeps: sweeps.max(1) }
    }

    fn relax(&self, i: usize, r: &[f64], z: &mut [f64]) {
        let mut s = r[i];
        for (j, v) in self.a.row(i) {
            if j != i {
                s -= v * z[j];
            }
        }
        z[i] = s / self.diag[i];
    }
}

impl Preconditioner for SymmetricGaussSeidel {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.iter_mut().for_each(|v| *v = 0.0);
        let n = self.a.nrows();
        for _ in 0..self.sweeps {
            for i in 0..n {
                self.relax(i, r, z);
            }
            for i in (0..n).rev() {
                self.relax(i, r, z);
            }
        }
    }
}

/// Block-diagonal preconditioner over disjoint index sets; indices not in any
/// block pass through unchanged.
pub struct BlockDiagonal {
    blocks: Vec<(Vec<usize>, Box<dyn Preconditioner>)>,
}

impl BlockDiagonal {
    pub fn new() -> Self {
        BlockDiagonal { blocks: Vec::new() }
    }

    pub fn with_block(mut self, idx: Vec<usize>, p: Box<dyn Preconditioner>) -> Self {
        self.blocks.push((idx, p));
        self
    }

    /// Stokes preconditioner: SGS on the velocity block of `system` and on the
    /// pressure mass matrix.
    pub fn stokes(
        system: &SparseMatrix,
        velocity: Vec<usize>,
        pressure: Vec<usize>,
        pressure_mass: SparseMatrix,
        sweeps: usize,
    ) -> Self {
        let avv = system.principal_submatrix(&velocity);
        BlockDiagonal::new()
            .with_block(velocity, Box::new(SymmetricGaussSeidel::new(avv, sweeps)))
            .with_block(pressure, Box::new(SymmetricGaussSeidel::new(pressure_mass, sweeps)))
    }
}

impl Default for BlockDiagonal {
    fn default() -> Self {
        Self::new()
    }
}

impl Preconditioner for BlockDiagonal {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
        let mut rb = Vec::new();
        let mut zb = Vec::new();
        for (idx, p) in &self.blocks {
            rb.clear();
            rb.extend(idx.iter().map(|&i| r[i]));
            zb.resize(idx.len(), 0.0);
            p.apply(&rb, &mut zb);
            for (k, &i) in idx.iter().enumerate() {
                z[i] = zb[k];
            }
        }
    }
}
