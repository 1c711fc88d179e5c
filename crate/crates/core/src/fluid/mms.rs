//! Manufactured solution for order verification of the discretized
//! Navier-Stokes-Poisson system: smooth Gaussian perturbations of the
//! reference state with separable time dependence, and the exact source
//! terms each equation needs for the manufactured fields to be a solution.

use super::{FluidField, Grid1D, SolverConfig, SourceTerms};
use crate::closures::ElectronClosure;

/// Gaussian bump amp * exp(-((x - center)/width)^2).
#[derive(Debug, Clone, Copy)]
struct Bump {
    amp: f64,
    center: f64,
    width: f64,
}

impl Bump {
    fn v(&self, x: f64) -> f64 {
        let s = (x - self.center) / self.width;
        self.amp * (-s * s).exp()
    }
    fn dx(&self, x: f64) -> f64 {
        let d = x - self.center;
        -2.0 * d / (self.width * self.width) * self.v(x)
    }
    fn dxx(&self, x: f64) -> f64 {
        let d = x - self.center;
        let w2 = self.width * self.width;
        (-2.0 / w2 + 4.0 * d * d / (w2 * w2)) * self.v(x)
    }
}

/// One field f(t, x) = base + bump(x) cos(omega t) and its derivatives.
#[derive(Debug, Clone, Copy)]
struct Component {
    base: f64,
    bump: Bump,
}

struct Eval {
    v: f64,
    t: f64,
    x: f64,
    xx: f64,
}

impl Component {
    fn eval(&self, t: f64, x: f64, omega: f64) -> Eval {
        let tt = (omega * t).cos();
        let dt = -omega * (omega * t).sin();
        Eval {
            v: self.base + self.bump.v(x) * tt,
            t: self.bump.v(x) * dt,
            x: self.bump.dx(x) * tt,
            xx: self.bump.dxx(x) * tt,
        }
    }
}

/// Manufactured fields and their exact sources for the full system.
pub struct ManufacturedSolution {
    rho: Component,
    u1: Component,
    u2: Component,
    u3: Component,
    theta: Component,
    phi: Component,
    omega: f64,
    cfg_epsilon: f64,
    lambda_sq: f64,
    transport: super::TransportLaw,
    closure: ElectronClosure,
}

impl ManufacturedSolution {
    pub fn new(cfg: &SolverConfig) -> Self {
        let mk = |amp, center, width| Component {
            base: 0.0,
            bump: Bump { amp, center, width },
        };
        ManufacturedSolution {
            rho: Component {
                base: 1.0,
                bump: Bump {
                    amp: 0.1,
                    center: 0.0,
                    width: 1.5,
                },
            },
            u1: mk(0.08, 0.4, 1.4),
            u2: mk(0.05, -0.3, 1.6),
            u3: mk(0.04, 0.7, 1.3),
            theta: Component {
                base: 1.5,
                bump: Bump {
                    amp: 0.1,
                    center: -0.5,
                    width: 1.5,
                },
            },
            phi: mk(0.06, 0.2, 1.7),
            omega: 1.3,
            cfg_epsilon: cfg.epsilon,
            lambda_sq: cfg.lambda_sq(),
            transport: cfg.transport,
            closure: cfg.closure,
        }
    }

    /// Sample the manufactured fields on a grid at time t.
    pub fn exact_field(&self, grid: Grid1D, t: f64) -> FluidField {
        let n = grid.nx;
        let mut f = FluidField {
            grid,
            t,
            rho: vec![0.0; n],
            u1: vec![0.0; n],
            u2: vec![0.0; n],
            u3: vec![0.0; n],
            theta: vec![0.0; n],
            phi: vec![0.0; n],
        };
        for i in 0..n {
            let x = grid.x(i);
            f.rho[i] = self.rho.eval(t, x, self.omega).v;
            f.u1[i] = self.u1.eval(t, x, self.omega).v;
            f.u2[i] = self.u2.eval(t, x, self.omega).v;
            f.u3[i] = self.u3.eval(t, x, self.omega).v;
            f.theta[i] = self.theta.eval(t, x, self.omega).v;
            f.phi[i] = self.phi.eval(t, x, self.omega).v;
        }
        f
    }
}

impl SourceTerms for ManufacturedSolution {
    fn fluid(&self, t: f64, x: f64) -> [f64; 5] {
        let om = self.omega;
        let rho = self.rho.eval(t, x, om);
        let u1 = self.u1.eval(t, x, om);
        let u2 = self.u2.eval(t, x, om);
        let u3 = self.u3.eval(t, x, om);
        let th = self.theta.eval(t, x, om);
        let phi = self.phi.eval(t, x, om);
        let eps = self.cfg_epsilon;
        let mu = self.transport.mu(th.v);
        let dmu = self.transport.dmu_dtheta(th.v) * th.x; // d/dx mu(theta)
        let kappa = self.transport.kappa(th.v);
        let dkappa = self.transport.dkappa_dtheta(th.v) * th.x;

        let press_x = 2.0 / 3.0 * (rho.x * th.v + rho.v * th.x);
        let s_mass = rho.t + rho.x * u1.v + rho.v * u1.x;
        let s_mom1 = rho.t * u1.v
            + rho.v * u1.t
            + rho.x * u1.v * u1.v
            + 2.0 * rho.v * u1.v * u1.x
            + press_x
            + rho.v * phi.x
            - 4.0 / 3.0 * eps * (dmu * u1.x + mu * u1.xx);
        let s_mom2 = rho.t * u2.v
            + rho.v * u2.t
            + rho.x * u1.v * u2.v
            + rho.v * (u1.x * u2.v + u1.v * u2.x)
            - eps * (dmu * u2.x + mu * u2.xx);
        let s_mom3 = rho.t * u3.v
            + rho.v * u3.t
            + rho.x * u1.v * u3.v
            + rho.v * (u1.x * u3.v + u1.v * u3.x)
            - eps * (dmu * u3.x + mu * u3.xx);

        let q = 0.5 * (u1.v * u1.v + u2.v * u2.v + u3.v * u3.v);
        let q_t = u1.v * u1.t + u2.v * u2.t + u3.v * u3.t;
        let q_x = u1.v * u1.x + u2.v * u2.x + u3.v * u3.x;
        let energy = rho.v * (th.v + q);
        let energy_t = rho.t * (th.v + q) + rho.v * (th.t + q_t);
        let energy_x = rho.x * (th.v + q) + rho.v * (th.x + q_x);
        let press = 2.0 / 3.0 * rho.v * th.v;
        let visc = eps * (dkappa * th.x + kappa * th.xx)
            + 4.0 / 3.0 * eps * (dmu * u1.v * u1.x + mu * (u1.x * u1.x + u1.v * u1.xx))
            + eps * (dmu * u2.v * u2.x + mu * (u2.x * u2.x + u2.v * u2.xx))
            + eps * (dmu * u3.v * u3.x + mu * (u3.x * u3.x + u3.v * u3.xx));
        let s_energy = energy_t
            + u1.x * (energy + press)
            + u1.v * (energy_x + press_x)
            + rho.v * u1.v * phi.x
            - visc;
        [s_mass, s_mom1, s_mom2, s_mom3, s_energy]
    }

    fn poisson(&self, t: f64, x: f64) -> f64 {
        let rho = self.rho.eval(t, x, self.omega);
        let phi = self.phi.eval(t, x, self.omega);
        -self.lambda_sq * phi.xx - rho.v + self.closure.rho_e(phi.v).unwrap_or(f64::NAN)
    }
}

/// L2 errors of the five conservative variables against the manufactured
/// solution after integrating to `t_end` with the manufactured sources.
pub fn mms_errors(cfg: &SolverConfig, t_end: f64) -> crate::error::Result<[f64; 5]> {
    let grid = cfg.grid()?;
    let mms = ManufacturedSolution::new(cfg);
    let ctx = super::StepContext::new(cfg)?;
    let mut field = mms.exact_field(grid, 0.0);
    // start from the discrete Poisson solution for the manufactured density
    super::solve_phi(&mut field, cfg, &ctx, Some(&mms))?;
    while field.t < t_end - 1e-12 {
        let dt = super::stable_dt(&field, cfg).min(t_end - field.t);
        super::step(&mut field, cfg, &ctx, dt, Some(&mms), None)?;
    }
    let exact = mms.exact_field(grid, field.t);
    let h = grid.h;
    let mut err = [0.0f64; 5];
    for i in 0..grid.nx {
        let ke = |f: &FluidField, i: usize| {
            0.5 * (f.u1[i] * f.u1[i] + f.u2[i] * f.u2[i] + f.u3[i] * f.u3[i])
        };
        let diffs = [
            field.rho[i] - exact.rho[i],
            field.rho[i] * field.u1[i] - exact.rho[i] * exact.u1[i],
            field.rho[i] * field.u2[i] - exact.rho[i] * exact.u2[i],
            field.rho[i] * field.u3[i] - exact.rho[i] * exact.u3[i],
            field.rho[i] * (field.theta[i] + ke(&field, i))
                - exact.rho[i] * (exact.theta[i] + ke(&exact, i)),
        ];
        for k in 0..5 {
            err[k] += diffs[k] * diffs[k] * h;
        }
    }
    Ok(err.map(f64::sqrt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::EulerState;
    use crate::fluid::TransportLaw;

    fn mms_cfg(nx: usize) -> SolverConfig {
        SolverConfig {
            epsilon: 0.05,
            a: 2.0 / 3.0,
            b: 2.0 / 3.0,
            k: 0.2,
            half_width: 10.0,
            nx,
            cfl: 0.4,
            t_end: 0.4,
            snapshot_interval: 0.2,
            transport: TransportLaw::Power {
                mu0: 1.0,
                kappa0: 1.0,
                s: 1.0,
            },
            closure: ElectronClosure::boltzmann(1.0).unwrap(),
            left: EulerState::new(1.0, 0.0, 1.5).unwrap(),
            rho_plus: 1.0,
            delta0: 2.0,
            force: true,
        }
    }

    #[test]
    fn manufactured_sources_vanish_for_flat_fields() {
        // at the far field the bumps are dead and the state is constant
        let cfg = mms_cfg(101);
        let mms = ManufacturedSolution::new(&cfg);
        let s = mms.fluid(0.3, 9.9);
        for v in s {
            assert!(v.abs() < 1e-12);
        }
        assert!(mms.poisson(0.3, 9.9).abs() < 1e-12);
    }

    #[test]
    fn mms_converges_at_second_order_two_levels() {
        let e1 = mms_errors(&mms_cfg(101), 0.2).unwrap();
        let e2 = mms_errors(&mms_cfg(201), 0.2).unwrap();
        for k in 0..5 {
            let order = (e1[k] / e2[k]).log2();
            assert!(
                (order - 2.0).abs() < 0.35,
                "equation {k}: order {order} ({} -> {})",
                e1[k],
                e2[k]
            );
        }
    }
}
