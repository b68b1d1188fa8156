use super::DenseMatrix;
use crate::error::{Error, Result};

/// Thin SVD `A = U diag(sigma) V^T` with `sigma` non-increasing.
#[derive(Clone, Debug)]
pub struct ThinSvd {
    /// `m x k`, orthonormal columns.
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    /// `n x k`, orthonormal columns.
    pub v: DenseMatrix,
}

/// `k = min(m, n)`. Columns of `U` are orthonormal to rounding even where
/// `sigma` vanishes.
pub fn thin_svd(a: &DenseMatrix) -> Result<ThinSvd> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::InvalidArgument("SVD of an empty matrix".into()));
    }
    if a.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("SVD input contains non-finite values".into()));
    }
    let svd = nalgebra::linalg::SVD::new(a.to_nalgebra(), true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma = order.iter().map(|&i| svd.singular_values[i]).collect();
    let uu = DenseMatrix::from_fn(a.rows(), k, |i, j| u[(i, order[j])]);
    let vv = DenseMatrix::from_fn(a.cols(), k, |i, j| vt[(order[j], i)]);
    Ok(ThinSvd { u: uu, sigma, v: vv })
}
