use crate::error::{Error, Result};
use crate::mesh::ElementShape;

/// Points in reference coordinates: unit triangle `(0,0),(1,0),(0,1)` or
/// unit square `[0,1]^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    /// Every polynomial of total degree (triangle) or per-variable degree
    /// (square) up to `order` is integrated exactly.
    pub order: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `n`-point Gauss-Legendre rule on `[0,1]`, exact to degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Newton on P_n from the Chebyshev-like initial guess
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        // map [-1,1] -> [0,1]
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = 0.5 * wi;
        w[n - 1 - i] = 0.5 * wi;
    }
    (x, w)
}

pub fn quad_rule(shape: ElementShape, order: usize) -> Result<QuadratureRule> {
    if !(1..=6).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    let (points, weights) = match shape {
        ElementShape::Quad => {
            let (x, w) = gauss_legendre((order + 2) / 2);
            let mut p = Vec::new();
            let mut ww = Vec::new();
            for j in 0..x.len() {
                for i in 0..x.len() {
                    p.push([x[i], x[j]]);
                    ww.push(w[i] * w[j]);
                }
            }
            (p, ww)
        }
        ElementShape::Triangle => match order {
            1 => (vec![[1.0 / 3.0, 1.0 / 3.0]], vec![0.5]),
            2 => (
                vec![[1.0 / 6.0, 1.0 / 6.0], [2.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 2.0 / 3.0]],
                vec![1.0 / 6.0; 3],
            ),
            _ => {
                // collapsed square: (x, y) = (u, v (1 - u)), jacobian 1 - u
                let (xu, wu) = gauss_legendre((order + 3) / 2);
                let (xv, wv) = gauss_legendre((order + 2) / 2);
                let mut p = Vec::new();
                let mut ww = Vec::new();
                for (u, a) in xu.iter().zip(&wu) {
                    for (v, b) in xv.iter().zip(&wv) {
                        p.push([*u, v * (1.0 - u)]);
                        ww.push(a * b * (1.0 - u));
                    }
                }
                (p, ww)
            }
        },
    };
    Ok(QuadratureRule { points, weights, order })
}
