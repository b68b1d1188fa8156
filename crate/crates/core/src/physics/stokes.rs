use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::BoundaryKind;
use crate::mesh::Side;

pub const DEFAULT_VISCOSITY: f64 = 1.1;

/// `-nu lap u + grad p = f`, `div u = 0`.
///
/// Neumann data is the outward traction `g_ne = n.(-nu grad u + p I)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StokesProblem {
    pub nu: f64,
    pub flow: StokesFlow,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StokesFlow {
    /// Inflow `g_i + dg_i sin 2pi(k_i.x + theta_i)` on the upwind sides,
    /// free outflow elsewhere.
    FlowPastArray { g: [f64; 2], dg: [f64; 2], k1: [f64; 2], k2: [f64; 2], theta: [f64; 2] },
    /// Parabolic inlet on the left of a channel of height `n_c`, walls at
    /// the bottom and top, free outflow on the right.
    Channel { u_in: f64, n_c: f64 },
    /// Manufactured solution on the unit square, all Dirichlet.
    Mms,
    /// Exact `u = c + A x` (trace-free `A`), constant `p`, `f = 0`.
    Linear { a: [[f64; 2]; 2], c: [f64; 2], p: f64 },
}

/// Inflow sampling ranges: `g ~ U[-g_max, g_max]^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowRange {
    pub g_max: f64,
}

impl FlowRange {
    pub const TRAIN: FlowRange = FlowRange { g_max: 1.0 };
    pub const TEST: FlowRange = FlowRange { g_max: 1.5 };
}

pub fn mms_velocity(x: [f64; 2]) -> [f64; 2] {
    [x[0].cos() * x[1].sin(), -x[0].sin() * x[1].cos()]
}

pub fn mms_pressure(nu: f64, x: [f64; 2]) -> f64 {
    2.0 * nu * x[0].sin() * x[1].sin()
}

pub fn mms_forcing(nu: f64, x: [f64; 2]) -> [f64; 2] {
    [4.0 * nu * x[0].cos() * x[1].sin(), 0.0]
}

impl StokesProblem {
    pub fn new(flow: StokesFlow) -> Self {
        StokesProblem { nu: DEFAULT_VISCOSITY, flow }
    }

    pub fn forcing(&self, x: [f64; 2]) -> [f64; 2] {
        match self.flow {
            StokesFlow::Mms => mms_forcing(self.nu, x),
            _ => [0.0; 2],
        }
    }

    /// Velocity datum on a Dirichlet side. Obstacles are no-slip.
    pub fn dirichlet(&self, x: [f64; 2], side: Side) -> [f64; 2] {
        if side == Side::Obstacle {
            return [0.0; 2];
        }
        match self.flow {
            StokesFlow::FlowPastArray { g, dg, k1, k2, theta } => [
                g[0] + dg[0] * (2.0 * PI * (k1[0] * x[0] + k1[1] * x[1] + theta[0])).sin(),
                g[1] + dg[1] * (2.0 * PI * (k2[0] * x[0] + k2[1] * x[1] + theta[1])).sin(),
            ],
            StokesFlow::Channel { u_in, n_c } => match side {
                Side::Left => {
                    let s = x[1] / n_c - 0.5;
                    [u_in * (1.0 - 4.0 * s * s), 0.0]
                }
                _ => [0.0; 2],
            },
            StokesFlow::Mms => mms_velocity(x),
            StokesFlow::Linear { a, c, .. } => {
                [c[0] + a[0][0] * x[0] + a[0][1] * x[1], c[1] + a[1][0] * x[0] + a[1][1] * x[1]]
            }
        }
    }

    /// Traction datum `g_ne` on a Neumann side with outward normal `n`.
    pub fn neumann(&self, _x: [f64; 2], n: [f64; 2]) -> [f64; 2] {
        match self.flow {
            StokesFlow::Linear { a, p, .. } => {
                let an = [a[0][0] * n[0] + a[0][1] * n[1], a[1][0] * n[0] + a[1][1] * n[1]];
                [-self.nu * an[0] + p * n[0], -self.nu * an[1] + p * n[1]]
            }
            _ => [0.0; 2],
        }
    }

    /// Boundary kind of each outer side of the global domain, in
    /// [`Side::OUTER`] order.
    pub fn side_conditions(&self) -> [BoundaryKind; 4] {
        use BoundaryKind::{Dirichlet as D, Neumann as N};
        match self.flow {
            StokesFlow::FlowPastArray { g, .. } => assign_upwind_sides(g),
            StokesFlow::Channel { .. } => [D, N, D, D],
            StokesFlow::Mms | StokesFlow::Linear { .. } => [D; 4],
        }
    }

    pub fn exact(&self, x: [f64; 2]) -> Option<([f64; 2], f64)> {
        match self.flow {
            StokesFlow::Mms => Some((mms_velocity(x), mms_pressure(self.nu, x))),
            StokesFlow::Linear { p, .. } => Some((self.dirichlet(x, Side::Left), p)),
            _ => None,
        }
    }

    /// `dg ~ U[-0.1, 0.1]^2`, `k_i ~ U[-0.5, 0.5]^2`, `theta ~ U[0, 1]^2`.
    pub fn sample_flow_past_array(rng: &mut impl Rng, range: FlowRange, nu: f64) -> StokesProblem {
        let gm = range.g_max;
        let g = [rng.gen_range(-gm..=gm), rng.gen_range(-gm..=gm)];
        let dg = [rng.gen_range(-0.1..=0.1), rng.gen_range(-0.1..=0.1)];
        let mut k = || rng.gen_range(-0.5..=0.5);
        let k1 = [k(), k()];
        let k2 = [k(), k()];
        let theta = [rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0)];
        StokesProblem { nu, flow: StokesFlow::FlowPastArray { g, dg, k1, k2, theta } }
    }
}

/// Upwind sides are Dirichlet: Left iff `g1 >= 0` (else Right), Bottom iff
/// `g2 >= 0` (else Top). The other two sides are traction-free.
pub fn assign_upwind_sides(g: [f64; 2]) -> [BoundaryKind; 4] {
    use BoundaryKind::{Dirichlet as D, Neumann as N};
    let (l, r) = if g[0] >= 0.0 { (D, N) } else { (N, D) };
    let (b, t) = if g[1] >= 0.0 { (D, N) } else { (N, D) };
    [l, r, b, t]
}

pub fn stokes_fields(problem: &StokesProblem, x: [f64; 2], side: Option<Side>) -> [f64; 2] {
    match side {
        Some(s) => problem.dirichlet(x, s),
        None => problem.forcing(x),
    }
}

pub fn sample_stokes_params(rng: &mut impl Rng, range: FlowRange) -> StokesProblem {
    StokesProblem::sample_flow_past_array(rng, range, DEFAULT_VISCOSITY)
}

/// The manufactured problem with viscosity `nu`.
pub fn stokes_mms(nu: f64) -> StokesProblem {
    StokesProblem { nu, flow: StokesFlow::Mms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::BoundaryKind::{Dirichlet as D, Neumann as N};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn channel_inlet_and_walls() {
        let p = StokesProblem::new(StokesFlow::Channel { u_in: 1.0, n_c: 4.0 });
        assert_eq!(p.dirichlet([0.0, 2.0], Side::Left), [1.0, 0.0]);
        assert_eq!(p.dirichlet([0.0, 0.0], Side::Left), [0.0, 0.0]);
        assert_eq!(p.dirichlet([3.0, 0.0], Side::Bottom), [0.0, 0.0]);
        assert_eq!(p.dirichlet([0.3, 0.4], Side::Obstacle), [0.0, 0.0]);
        assert_eq!(p.side_conditions(), [D, N, D, D]);
    }

    #[test]
    fn unperturbed_inflow_is_constant() {
        let p = StokesProblem::new(StokesFlow::FlowPastArray {
            g: [0.3, -0.2],
            dg: [0.0; 2],
            k1: [0.4, 0.1],
            k2: [-0.3, 0.2],
            theta: [0.5, 0.7],
        });
        for x in [[0.0, 0.3], [2.0, 1.7], [1.1, 0.0]] {
            assert_eq!(p.dirichlet(x, Side::Left), [0.3, -0.2]);
        }
        assert_eq!(p.forcing([0.5, 0.5]), [0.0, 0.0]);
    }

    #[test]
    fn upwind_assignment() {
        assert_eq!(assign_upwind_sides([0.5, 0.4]), [D, N, D, N]);
        assert_eq!(assign_upwind_sides([0.5, -0.4]), [D, N, N, D]);
        assert_eq!(assign_upwind_sides([0.0, 0.4]), [D, N, D, N]);
        assert_eq!(assign_upwind_sides([-1.0, -1.0]), [N, D, N, D]);
    }

    #[test]
    fn mms_values_and_residual() {
        let nu = 1.1;
        let f = mms_forcing(nu, [0.0, 1.0]);
        assert!((f[0] - 3.702_472_33).abs() < 1e-8 && f[1] == 0.0);
        assert_eq!(mms_pressure(nu, [0.0, 0.37]), 0.0);

        // second derivatives of the velocity and gradient of the pressure,
        // differentiated by hand
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let x: [f64; 2] = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let (s1, c1, s2, c2) = (x[0].sin(), x[0].cos(), x[1].sin(), x[1].cos());
            let lap = [-2.0 * c1 * s2, 2.0 * s1 * c2];
            let gp = [2.0 * nu * c1 * s2, 2.0 * nu * s1 * c2];
            let f = mms_forcing(nu, x);
            for c in 0..2 {
                assert!((-nu * lap[c] + gp[c] - f[c]).abs() <= 1e-12);
            }
            let div = -s1 * s2 + s1 * s2;
            assert!(div.abs() <= 1e-14);
            let u = mms_velocity(x);
            assert!((u[0] - c1 * s2).abs() < 1e-15 && (u[1] + s1 * c2).abs() < 1e-15);
        }
    }

    #[test]
    fn flow_sampling_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut gmax: f64 = 0.0;
        for _ in 0..10_000 {
            let p = sample_stokes_params(&mut rng, FlowRange::TRAIN);
            let StokesFlow::FlowPastArray { g, dg, k1, k2, theta } = p.flow else {
                unreachable!()
            };
            assert!(dg[0].abs() <= 0.1 && dg[1].abs() <= 0.1);
            assert!(k1.iter().chain(&k2).all(|k| k.abs() <= 0.5));
            assert!(theta.iter().all(|t| (0.0..=1.0).contains(t)));
            gmax = gmax.max(g[0].abs()).max(g[1].abs());
        }
        assert!((0.95..=1.0).contains(&gmax));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let wide = (0..2000)
            .map(|_| sample_stokes_params(&mut rng, FlowRange::TEST))
            .filter_map(|p| match p.flow {
                StokesFlow::FlowPastArray { g, .. } => Some(g[0].abs().max(g[1].abs())),
                _ => None,
            })
            .fold(0.0, f64::max);
        assert!(wide > 1.0 && wide <= 1.5);
    }
}
