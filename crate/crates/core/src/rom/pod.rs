use std::fmt::Write as _;

use super::snapshots::SnapshotSet;
use crate::error::{Error, Result};
use crate::linalg::io::{read_dense_from, write_dense, Lines};
use crate::linalg::{thin_svd, DenseMatrix};

/// How many POD modes to keep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Truncation {
    Rank(usize),
    /// Smallest `R` with `sum_{i<=R} sigma_i >= eta * sum_i sigma_i`.
    Energy(f64),
}

/// Orthonormal reduced basis of one reference component.
#[derive(Clone, Debug, PartialEq)]
pub struct PodBasis {
    pub reference: String,
    /// `N x R`.
    pub phi: DenseMatrix,
    /// All singular values of the snapshot matrix, non-increasing.
    pub sigma: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl PodBasis {
    pub fn dim(&self) -> usize {
        self.phi.rows()
    }

    pub fn rank(&self) -> usize {
        self.phi.cols()
    }

    /// Leading `r` modes.
    pub fn truncated(&self, r: usize) -> Result<PodBasis> {
        if r == 0 || r > self.rank() {
            return Err(Error::InvalidArgument(format!(
                "cannot truncate a rank-{} basis to {r}",
                self.rank()
            )));
        }
        Ok(PodBasis { phi: self.phi.leading_columns(r), ..self.clone() })
    }

    /// `N x N` identity basis; projection with it is a change of nothing.
    pub fn identity(reference: &str, n: usize) -> PodBasis {
        PodBasis {
            reference: reference.to_string(),
            phi: DenseMatrix::identity(n),
            sigma: vec![1.0; n],
            samples: 0,
            seed: 0,
        }
    }

    /// `Phi q`.
    pub fn lift(&self, q: &[f64]) -> Vec<f64> {
        self.phi.mul_vec(q)
    }

    /// `Phi^T u`.
    pub fn project(&self, u: &[f64]) -> Vec<f64> {
        self.phi.tr_mul_vec(u)
    }

    /// Fraction `sum_{i<=r} sigma_i / sum_i sigma_i`.
    pub fn energy(&self, r: usize) -> f64 {
        let total: f64 = self.sigma.iter().sum();
        self.sigma.iter().take(r).sum::<f64>() / total
    }
}

/// Number of singular values above the rounding floor of a `rows x cols`
/// matrix.
fn numerical_rank(sigma: &[f64], rows: usize, cols: usize) -> usize {
    let Some(&s0) = sigma.first() else { return 0 };
    let tol = rows.max(cols) as f64 * f64::EPSILON * s0;
    sigma.iter().take_while(|&&s| s > tol).count()
}

pub fn choose_rank(sigma: &[f64], rows: usize, cols: usize, t: Truncation) -> Result<usize> {
    let nr = numerical_rank(sigma, rows, cols);
    if nr == 0 {
        return Err(Error::InvalidArgument("snapshot matrix is zero".into()));
    }
    match t {
        Truncation::Rank(r) => {
            if r == 0 || r > rows.min(cols) {
                return Err(Error::InvalidArgument(format!(
                    "rank {r} outside 1..={}",
                    rows.min(cols)
                )));
            }
            Ok(r)
        }
        Truncation::Energy(eta) => {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Error::InvalidArgument(format!("energy fraction {eta} outside (0, 1]")));
            }
            let total: f64 = sigma[..nr].iter().sum();
            let target = eta * total * (1.0 - 1e-14);
            let mut acc = 0.0;
            for (i, s) in sigma[..nr].iter().enumerate() {
                acc += s;
                if acc >= target {
                    return Ok(i + 1);
                }
            }
            Ok(nr)
        }
    }
}

/// Thin SVD of the snapshot matrix, truncated. Euclidean inner product,
/// snapshots used as solved (no centring).
pub fn pod_train(set: &SnapshotSet, truncation: Truncation) -> Result<PodBasis> {
    if set.is_empty() {
        return Err(Error::InvalidArgument(format!("no snapshots for `{}`", set.reference)));
    }
    let q = set.matrix()?;
    let svd = thin_svd(&q)?;
    let r = choose_rank(&svd.sigma, q.rows(), q.cols(), truncation)?;
    Ok(PodBasis {
        reference: set.reference.clone(),
        phi: svd.u.leading_columns(r),
        sigma: svd.sigma,
        samples: set.len(),
        seed: set.seed,
    })
}

/// POD1 text: header, singular values CSV, then `Phi` as MAT1.
pub fn write_basis(b: &PodBasis) -> String {
    let mut s = format!("POD1 {} {} {} {} {}\n", b.reference, b.dim(), b.rank(), b.samples, b.seed);
    s.push_str("index,sigma\n");
    for (i, v) in b.sigma.iter().enumerate() {
        let _ = writeln!(s, "{},{v:.16e}", i + 1);
    }
    write_dense(&b.phi, &mut s);
    s
}

pub fn parse_basis(text: &str) -> Result<PodBasis> {
    let mut lines = Lines::new(text);
    let (hl, header) = lines.next_line("POD1 header")?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 6 || h[0] != "POD1" {
        return Err(Error::parse(hl, "expected `POD1 <ref> <N> <R> <S> <seed>`"));
    }
    let num = |s: &str| s.parse::<u64>().map_err(|_| Error::parse(hl, format!("bad number `{s}`")));
    let (n, r, samples, seed) = (num(h[2])? as usize, num(h[3])? as usize, num(h[4])? as usize, num(h[5])?);
    let (cl, csv) = lines.next_line("singular value header")?;
    if csv != "index,sigma" {
        return Err(Error::parse(cl, "expected `index,sigma`"));
    }
    let mut sigma = Vec::new();
    while let Some((ln, l)) = lines.peek_line() {
        if l.starts_with("MAT1") {
            break;
        }
        lines.next_line("singular value")?;
        let v = l
            .split_once(',')
            .and_then(|(i, v)| Some((i.parse::<usize>().ok()?, v.parse::<f64>().ok()?)))
            .filter(|(i, _)| *i == sigma.len() + 1)
            .ok_or_else(|| Error::parse(ln, "malformed singular value row"))?;
        sigma.push(v.1);
    }
    let phi = read_dense_from(&mut lines)?;
    if phi.rows() != n || phi.cols() != r {
        return Err(Error::parse(hl, format!("header says {n}x{r}, matrix is {}x{}", phi.rows(), phi.cols())));
    }
    if let Some((ln, _)) = lines.peek_line() {
        return Err(Error::parse(ln, "trailing content after basis"));
    }
    Ok(PodBasis { reference: h[1].to_string(), phi, sigma, samples, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_set(n: usize, s: usize, seed: u64) -> SnapshotSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut set = SnapshotSet::new("x", seed);
        for _ in 0..s {
            set.push((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        }
        set
    }

    #[test]
    fn orthonormal_and_eckart_young() {
        let set = random_set(60, 25, 1);
        let q = set.matrix().unwrap();
        for r in [1, 5, 12, 25] {
            let b = pod_train(&set, Truncation::Rank(r)).unwrap();
            let g = b.phi.tr_matmul(&b.phi);
            assert!(g.max_abs_diff(&DenseMatrix::identity(r)) < 1e-12);
            let rec = b.phi.matmul(&b.phi.tr_matmul(&q));
            let err = q.sub(&rec).frobenius_norm();
            let tail: f64 = b.sigma[r..].iter().map(|s| s * s).sum::<f64>().sqrt();
            assert!((err - tail).abs() < 1e-10 * (1.0 + tail));
        }
    }

    #[test]
    fn energy_criterion() {
        let mut set = SnapshotSet::new("one", 0);
        for _ in 0..4 {
            set.push(vec![1.0, 2.0, 3.0]).unwrap();
        }
        for eta in [0.1, 0.9, 1.0] {
            assert_eq!(pod_train(&set, Truncation::Energy(eta)).unwrap().rank(), 1);
        }
        let set = random_set(10, 6, 3);
        assert_eq!(pod_train(&set, Truncation::Energy(1.0)).unwrap().rank(), 6);
        let sigma = [4.0, 3.0, 2.0, 1.0];
        assert_eq!(choose_rank(&sigma, 4, 4, Truncation::Energy(0.7)).unwrap(), 2);
        assert_eq!(choose_rank(&sigma, 4, 4, Truncation::Energy(0.71)).unwrap(), 3);
        assert!(choose_rank(&sigma, 4, 4, Truncation::Rank(5)).is_err());
        assert!(pod_train(&SnapshotSet::new("e", 0), Truncation::Rank(1)).is_err());
    }

    #[test]
    fn basis_round_trip() {
        let b = pod_train(&random_set(7, 5, 9), Truncation::Rank(3)).unwrap();
        let text = write_basis(&b);
        assert!(text.starts_with("POD1 x 7 3 5 9\nindex,sigma\n1,"));
        assert_eq!(parse_basis(&text).unwrap(), b);
        let bad = text.replace("POD1 x 7 3", "POD1 x 7 4");
        assert!(matches!(parse_basis(&bad), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn lift_preserves_norm() {
        let b = pod_train(&random_set(20, 8, 4), Truncation::Rank(5)).unwrap();
        let q = [0.3, -1.0, 2.0, 0.5, -0.25];
        let n1: f64 = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        let n2: f64 = b.lift(&q).iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((n1 - n2).abs() < 1e-12);
        assert!(b.lift(&[0.0; 5]).iter().all(|&v| v == 0.0));
    }
}
