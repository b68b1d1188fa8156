use super::{SparseMatrix, Triplets};
use crate::error::{Error, Result};

/// A square sparse system `K u = F`.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    constrained: bool,
}

impl LinearSystem {
    pub fn new(matrix: SparseMatrix, rhs: Vec<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || rhs.len() != matrix.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "system {}x{} with rhs of length {}",
                matrix.nrows(),
                matrix.ncols(),
                rhs.len()
            )));
        }
        Ok(LinearSystem { matrix, rhs, constrained: false })
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_constrained(&self) -> bool {
        self.constrained
    }

    /// Borders the system with one multiplier enforcing `w . u = 0`:
    /// `[[K, w], [w^T, 0]]`, rhs extended by zero.
    pub fn add_mean_zero_constraint(&mut self, w: &[f64]) -> Result<()> {
        if self.constrained {
            return Err(Error::Contract("mean-zero constraint already applied".into()));
        }
        let n = self.dim();
        if w.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "constraint of length {} for a system of size {n}",
                w.len()
            )));
        }
        let mut t = Triplets::with_capacity(n + 1, n + 1, self.matrix.nnz() + 2 * n);
        t.add_sparse(0, 0, &self.matrix);
        for (i, &wi) in w.iter().enumerate() {
            if wi != 0.0 {
                t.push(i, n, wi);
                t.push(n, i, wi);
            }
        }
        self.matrix = t.to_csr();
        self.rhs.push(0.0);
        self.constrained = true;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constraint_borders_once() {
        let mut s = LinearSystem::new(SparseMatrix::identity(3), vec![1.0, 2.0, 3.0]).unwrap();
        s.add_mean_zero_constraint(&[1.0, 1.0, 0.0]).unwrap();
        assert_eq!(s.dim(), 4);
        assert_eq!(s.matrix.get(3, 1), 1.0);
        assert_eq!(s.matrix.get(2, 3), 0.0);
        assert!(matches!(s.add_mean_zero_constraint(&[0.0; 4]), Err(Error::Contract(_))));
    }
}
