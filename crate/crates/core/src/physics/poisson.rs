use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

/// `-lap u = f` with Dirichlet data `g` on every outer side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PoissonProblem {
    /// `f = sin 2pi(k.x + theta)`, `g = sin 2pi(kb.x + theta_b)`.
    Wave { k: [f64; 2], theta: f64, kb: [f64; 2], theta_b: f64 },
    /// Gaussian-enveloped wave along an Archimedean spiral about the centre
    /// of `[0, length]^2`; `g = 0`.
    Spiral { s: f64, k: f64, length: f64, width: f64 },
    /// Exact solution `u = a + b.x`, `f = 0`.
    Linear { a: f64, b: [f64; 2] },
}

/// Parameter ranges for the wave problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveRange {
    pub k_max: f64,
}

impl WaveRange {
    pub const TRAIN: WaveRange = WaveRange { k_max: 0.5 };
    pub const TEST: WaveRange = WaveRange { k_max: 0.7 };
}

/// Parameter ranges for the spiral problem: `s ~ U[0, s_max]`,
/// `k ~ U[0, k_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpiralRange {
    pub s_max: f64,
    pub k_max: f64,
    pub width: f64,
}

impl Default for SpiralRange {
    fn default() -> Self {
        SpiralRange { s_max: 0.7, k_max: 0.7, width: 2.0 }
    }
}

impl PoissonProblem {
    pub fn forcing(&self, x: [f64; 2]) -> f64 {
        match *self {
            PoissonProblem::Wave { k, theta, .. } => {
                (2.0 * PI * (k[0] * x[0] + k[1] * x[1] + theta)).sin()
            }
            PoissonProblem::Spiral { s, k, length, width } => {
                let (dx, dy) = (x[0] - 0.5 * length, x[1] - 0.5 * length);
                let r = dx.hypot(dy);
                let mut th = dy.atan2(dx);
                if th < 0.0 {
                    th += 2.0 * PI;
                }
                let d = (r - s * th * length / (4.0 * PI)).abs();
                (-d * d / (2.0 * width * width)).exp() * (2.0 * PI * k * d).cos()
            }
            PoissonProblem::Linear { .. } => 0.0,
        }
    }

    pub fn dirichlet(&self, x: [f64; 2]) -> f64 {
        match *self {
            PoissonProblem::Wave { kb, theta_b, .. } => {
                (2.0 * PI * (kb[0] * x[0] + kb[1] * x[1] + theta_b)).sin()
            }
            PoissonProblem::Spiral { .. } => 0.0,
            PoissonProblem::Linear { a, b } => a + b[0] * x[0] + b[1] * x[1],
        }
    }

    /// `n . grad u` data for Neumann sides.
    pub fn neumann(&self, _x: [f64; 2], n: [f64; 2]) -> f64 {
        match *self {
            PoissonProblem::Linear { b, .. } => b[0] * n[0] + b[1] * n[1],
            _ => 0.0,
        }
    }

    /// Exact solution where one is known in closed form.
    pub fn exact(&self, x: [f64; 2]) -> Option<f64> {
        match self {
            PoissonProblem::Linear { .. } => Some(self.dirichlet(x)),
            _ => None,
        }
    }

    /// `k, kb ~ U[-k_max, k_max]^2`, `theta, theta_b ~ U[0, 1]`.
    pub fn sample_wave(rng: &mut impl Rng, range: WaveRange) -> PoissonProblem {
        let km = range.k_max;
        let mut v = || rng.gen_range(-km..=km);
        let k = [v(), v()];
        let kb = [v(), v()];
        PoissonProblem::Wave { k, theta: rng.gen_range(0.0..=1.0), kb, theta_b: rng.gen_range(0.0..=1.0) }
    }

    pub fn sample_spiral(rng: &mut impl Rng, range: SpiralRange, length: f64) -> PoissonProblem {
        PoissonProblem::Spiral {
            s: rng.gen_range(0.0..=range.s_max),
            k: rng.gen_range(0.0..=range.k_max),
            length,
            width: range.width,
        }
    }
}

/// `(f(x), g_di(x))`.
pub fn poisson_fields(problem: &PoissonProblem, x: [f64; 2]) -> (f64, f64) {
    (problem.forcing(x), problem.dirichlet(x))
}

pub fn sample_poisson_params(rng: &mut impl Rng, range: WaveRange) -> PoissonProblem {
    PoissonProblem::sample_wave(rng, range)
}
