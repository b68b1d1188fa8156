use std::time::Instant;

use super::{Identity, Jacobi, Preconditioner, SparseMatrix, SymmetricGaussSeidel};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// `||b - A x|| / ||b||` at exit.
    pub relative_residual: f64,
    pub converged: bool,
    pub seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CgPreconditioner {
    #[default]
    None,
    Jacobi,
    SymmetricGaussSeidel,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn true_residual(a: &SparseMatrix, b: &[f64], x: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    norm(&b.iter().zip(&ax).map(|(u, v)| u - v).collect::<Vec<_>>())
}

/// Cheap symmetry probe over a deterministic sample of rows.
fn check_symmetric_sample(a: &SparseMatrix) -> Result<()> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch("Krylov solve needs a square matrix".into()));
    }
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let stride = (n / 64).max(1);
    for i in (0..n).step_by(stride) {
        for (j, v) in a.row(i) {
            if (v - a.get(j, i)).abs() > 1e-10 * scale {
                return Err(Error::Contract(format!(
                    "matrix is not symmetric: a[{i},{j}] = {v}, a[{j},{i}] = {}",
                    a.get(j, i)
                )));
            }
        }
    }
    Ok(())
}

/// Preconditioned conjugate gradients for symmetric positive definite `a`.
pub fn cg_solve(
    a: &SparseMatrix,
    b: &[f64],
    tol: f64,
    max_iter: usize,
    precond: CgPreconditioner,
) -> Result<(Vec<f64>, SolveReport)> {
    check_symmetric_sample(a)?;
    let p: Box<dyn Preconditioner> = match precond {
        CgPreconditioner::None => Box::new(Identity),
        CgPreconditioner::Jacobi => Box::new(Jacobi::new(a)),
        CgPreconditioner::SymmetricGaussSeidel => {
            Box::new(SymmetricGaussSeidel::new(a.clone(), 1))
        }
    };
    pcg(a, b, tol, max_iter, p.as_ref())
}

pub fn pcg(
    a: &SparseMatrix,
    b: &[f64],
    tol: f64,
    max_iter: usize,
    m: &dyn Preconditioner,
) -> Result<(Vec<f64>, SolveReport)> {
    let start = Instant::now();
    let n = a.nrows();
    if b.len() != n {
        return Err(Error::DimensionMismatch("rhs length".into()));
    }
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, SolveReport { iterations: 0, relative_residual: 0.0, converged: true, seconds: 0.0 }));
    }
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    m.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut iterations = 0;
    let mut rel = 1.0;
    while iterations < max_iter {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::Contract("matrix is not positive definite".into()));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        iterations += 1;
        rel = norm(&r) / bnorm;
        if rel <= tol {
            break;
        }
        m.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let true_rel = true_residual(a, b, &x) / bnorm;
    let report = SolveReport {
        iterations,
        relative_residual: true_rel,
        converged: rel <= tol,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok((x, report))
}

/// Preconditioned MINRES for symmetric (possibly indefinite) `a`; `m` must be
/// symmetric positive definite.
pub fn minres_solve(
    a: &SparseMatrix,
    b: &[f64],
    tol: f64,
    max_iter: usize,
    m: Option<&dyn Preconditioner>,
) -> Result<(Vec<f64>, SolveReport)> {
    check_symmetric_sample(a)?;
    let start = Instant::now();
    let m = m.unwrap_or(&Identity);
    let n = a.nrows();
    if b.len() != n {
        return Err(Error::DimensionMismatch("rhs length".into()));
    }
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, SolveReport { iterations: 0, relative_residual: 0.0, converged: true, seconds: 0.0 }));
    }

    // Lanczos vectors in the M-inner product
    let mut r1 = b.to_vec();
    let mut y = vec![0.0; n];
    m.apply(&r1, &mut y);
    let mut beta1 = dot(&r1, &y);
    if beta1 <= 0.0 {
        return Err(Error::Contract("preconditioner is not positive definite".into()));
    }
    beta1 = beta1.sqrt();
    let mut r2 = r1.clone();
    let mut oldb = 0.0;
    let mut beta = beta1;
    let mut dbar = 0.0;
    let mut epsln = 0.0;
    let mut phibar = beta1;
    let mut cs = -1.0;
    let mut sn = 0.0;
    let mut w = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut iterations = 0;
    let mut rel = 1.0;
    let mut ay = vec![0.0; n];

    while iterations < max_iter {
        iterations += 1;
        let s = 1.0 / beta;
        for i in 0..n {
            v[i] = s * y[i];
        }
        a.mul_vec_into(&v, &mut ay);
        if iterations >= 2 {
            let f = beta / oldb;
            for i in 0..n {
                ay[i] -= f * r1[i];
            }
        }
        let alfa = dot(&v, &ay);
        let f = alfa / beta;
        for i in 0..n {
            ay[i] -= f * r2[i];
        }
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&ay);
        m.apply(&r2, &mut y);
        oldb = beta;
        let bb = dot(&r2, &y);
        if bb < 0.0 {
            return Err(Error::Contract("preconditioner is not positive definite".into()));
        }
        beta = bb.sqrt();

        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = (gbar * gbar + beta * beta).sqrt().max(f64::MIN_POSITIVE);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        let denom = 1.0 / gamma;
        for i in 0..n {
            let w1 = w2[i];
            w2[i] = w[i];
            w[i] = (v[i] - oldeps * w1 - delta * w2[i]) * denom;
            x[i] += phi * w[i];
        }
        // phibar tracks the M^{-1}-norm of the residual; confirm with the
        // true 2-norm before stopping
        if phibar / beta1 <= tol || beta == 0.0 {
            rel = true_residual(a, b, &x) / bnorm;
            if rel <= tol || beta == 0.0 {
                break;
            }
        }
    }
    if iterations == max_iter {
        rel = true_residual(a, b, &x) / bnorm;
    }
    let report = SolveReport {
        iterations,
        relative_residual: rel,
        converged: rel <= tol,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok((x, report))
}
