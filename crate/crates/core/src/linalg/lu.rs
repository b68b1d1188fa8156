//! Left-looking sparse LU (Gilbert-Peierls) with threshold partial pivoting.

use super::{rcm_ordering, SparseMatrix};
use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

/// Pivot threshold: the diagonal candidate is kept if it is within this
/// factor of the largest entry in its column.
pub const PIVOT_TOLERANCE: f64 = 0.1;

/// Factors `P A Q = L U`. `L` is unit lower triangular, stored with the unit
/// diagonal first in each column; `U` stores its diagonal last.
#[derive(Clone, Debug)]
pub struct SparseLu {
    n: usize,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    up: Vec<usize>,
    ui: Vec<usize>,
    ux: Vec<f64>,
    pinv: Vec<usize>,
    q: Vec<usize>,
}

struct Csc {
    colptr: Vec<usize>,
    rowidx: Vec<usize>,
    vals: Vec<f64>,
}

fn to_csc(a: &SparseMatrix) -> Csc {
    let t = a.transpose();
    Csc {
        colptr: t.row_ptr().to_vec(),
        rowidx: t.col_idx().to_vec(),
        vals: t.values().to_vec(),
    }
}

impl SparseLu {
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        let q = rcm_ordering(a);
        Self::factor_with_order(a, q, PIVOT_TOLERANCE)
    }

    pub fn factor_with_order(a: &SparseMatrix, q: Vec<usize>, tol: f64) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || q.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let csc = to_csc(a);
        let anorm = a.max_abs();
        let small = f64::EPSILON * anorm * 16.0;

        let mut pinv = vec![NONE; n];
        let mut x = vec![0.0; n];
        let mut xi = vec![0usize; n];
        let mut marked = vec![false; n];
        let mut stack: Vec<usize> = vec![0; n];
        let mut pstack = vec![0usize; n];

        let guess = 4 * a.nnz() + n;
        let mut lp = vec![0usize; n + 1];
        let mut li: Vec<usize> = Vec::with_capacity(guess);
        let mut lx = Vec::with_capacity(guess);
        let mut up = vec![0usize; n + 1];
        let mut ui = Vec::with_capacity(guess);
        let mut ux = Vec::with_capacity(guess);

        for k in 0..n {
            lp[k] = li.len();
            up[k] = ui.len();
            let col = q[k];

            // nonzero pattern of L \ A(:,col), topologically ordered in xi[top..]
            let mut top = n;
            for p in csc.colptr[col]..csc.colptr[col + 1] {
                let j = csc.rowidx[p];
                if marked[j] {
                    continue;
                }
                let mut head = 0usize;
                stack[0] = j;
                loop {
                    let j = stack[head];
                    let jnew = pinv[j];
                    if !marked[j] {
                        marked[j] = true;
                        pstack[head] = if jnew == NONE { 0 } else { lp[jnew] + 1 };
                    }
                    let end = if jnew == NONE { 0 } else { lp[jnew + 1] };
                    let mut done = true;
                    let mut pp = pstack[head];
                    while pp < end {
                        let i = li[pp];
                        pp += 1;
                        if !marked[i] {
                            pstack[head] = pp;
                            head += 1;
                            stack[head] = i;
                            done = false;
                            break;
                        }
                    }
                    if done {
                        top -= 1;
                        xi[top] = j;
                        if head == 0 {
                            break;
                        }
                        head -= 1;
                    }
                }
            }

            for p in csc.colptr[col]..csc.colptr[col + 1] {
                x[csc.rowidx[p]] = csc.vals[p];
            }
            for &j in &xi[top..n] {
                let jj = pinv[j];
                if jj == NONE {
                    continue;
                }
                let xj = x[j];
                if xj == 0.0 {
                    continue;
                }
                for p in lp[jj] + 1..lp[jj + 1] {
                    x[li[p]] -= lx[p] * xj;
                }
            }

            let mut ipiv = NONE;
            let mut amax = -1.0;
            for &i in &xi[top..n] {
                if pinv[i] == NONE {
                    let t = x[i].abs();
                    if t > amax {
                        amax = t;
                        ipiv = i;
                    }
                } else {
                    ui.push(pinv[i]);
                    ux.push(x[i]);
                }
            }
            if ipiv == NONE || amax <= small {
                return Err(Error::SingularMatrix(k));
            }
            if pinv[col] == NONE && marked[col] && x[col].abs() >= amax * tol {
                ipiv = col;
            }
            let pivot = x[ipiv];
            ui.push(k);
            ux.push(pivot);
            pinv[ipiv] = k;
            li.push(ipiv);
            lx.push(1.0);
            for &i in &xi[top..n] {
                if pinv[i] == NONE {
                    li.push(i);
                    lx.push(x[i] / pivot);
                }
                x[i] = 0.0;
                marked[i] = false;
            }
        }
        lp[n] = li.len();
        up[n] = ui.len();
        for r in li.iter_mut() {
            *r = pinv[*r];
        }
        Ok(SparseLu { n, lp, li, lx, up, ui, ux, pinv, q })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of `L + U`.
    pub fn fill(&self) -> usize {
        self.li.len() + self.ui.len()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "rhs of length {} for a system of size {}",
                b.len(),
                self.n
            )));
        }
        let mut x = vec![0.0; self.n];
        for (i, &bi) in b.iter().enumerate() {
            x[self.pinv[i]] = bi;
        }
        for j in 0..self.n {
            let xj = x[j];
            if xj != 0.0 {
                for p in self.lp[j] + 1..self.lp[j + 1] {
                    x[self.li[p]] -= self.lx[p] * xj;
                }
            }
        }
        for j in (0..self.n).rev() {
            let d = self.up[j + 1] - 1;
            x[j] /= self.ux[d];
            let xj = x[j];
            if xj != 0.0 {
                for p in self.up[j]..d {
                    x[self.ui[p]] -= self.ux[p] * xj;
                }
            }
        }
        let mut out = vec![0.0; self.n];
        for (k, &c) in self.q.iter().enumerate() {
            out[c] = x[k];
        }
        Ok(out)
    }
}

/// One-shot factor and solve.
pub fn direct_solve(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    SparseLu::factor(a)?.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{DenseMatrix, Triplets};
    use proptest::prelude::*;

    fn from_dense(d: &DenseMatrix) -> SparseMatrix {
        let mut t = Triplets::new(d.rows(), d.cols());
        t.add_dense(0, 0, d);
        t.to_csr()
    }

    #[test]
    fn solves_a_system_needing_row_pivots() {
        // zero diagonal forces off-diagonal pivots
        let d = DenseMatrix::from_row_major(
            3,
            3,
            vec![0.0, 2.0, 1.0, 1.0, 0.0, 3.0, 4.0, 1.0, 0.0],
        )
        .unwrap();
        let a = from_dense(&d);
        let xe = [1.0, -2.0, 0.5];
        let b = a.mul_vec(&xe);
        let x = direct_solve(&a, &b).unwrap();
        for (u, v) in x.iter().zip(&xe) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn saddle_point_with_zero_block() {
        // [[2 0 1],[0 2 1],[1 1 0]]
        let d = DenseMatrix::from_row_major(
            3,
            3,
            vec![2.0, 0.0, 1.0, 0.0, 2.0, 1.0, 1.0, 1.0, 0.0],
        )
        .unwrap();
        let a = from_dense(&d);
        let x = direct_solve(&a, &[1.0, 1.0, 1.0]).unwrap();
        let r = a.mul_vec(&x);
        assert!(r.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn singular_matrix_is_reported() {
        let d = DenseMatrix::from_row_major(2, 2, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            direct_solve(&from_dense(&d), &[1.0, 2.0]),
            Err(Error::SingularMatrix(_))
        ));
        let empty_row = SparseMatrix::from_csr(2, 2, vec![0, 1, 1], vec![0], vec![1.0]).unwrap();
        assert!(matches!(direct_solve(&empty_row, &[1.0, 0.0]), Err(Error::SingularMatrix(_))));
    }

    proptest! {
        #[test]
        fn random_diagonally_dominant_systems(
            n in 2usize..30,
            seed in 0u64..1000,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut t = Triplets::new(n, n);
            for i in 0..n {
                t.push(i, i, 1.0 + rng.gen::<f64>());
                for _ in 0..3 {
                    let j = rng.gen_range(0..n);
                    t.push(i, j, rng.gen_range(-0.3..0.3));
                }
            }
            let a = t.to_csr();
            let xe: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b = a.mul_vec(&xe);
            let x = direct_solve(&a, &b).unwrap();
            let dense = a.to_dense().lu_solve(&b).unwrap();
            for i in 0..n {
                prop_assert!((x[i] - dense[i]).abs() < 1e-10);
            }
        }
    }
}
