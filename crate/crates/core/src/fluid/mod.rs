//! 1D Navier-Stokes-Poisson solver: conservative second-order central
//! discretization of the fluid hierarchy with the microscopic remainder
//! terms dropped, coupled to the screened nonlinear Poisson equation with
//! Debye length eps^b, advanced by explicit RK4 with the Poisson equation
//! re-solved at every stage.

pub mod mms;
pub mod poisson;

use crate::closures::ElectronClosure;
use crate::error::{Error, Result};
use crate::euler::{r3_connect, EulerState};
use crate::harness::validate_s;
use crate::smoothwave::{delta_from_epsilon, SmoothWave};
use crate::RarefactionWave;
use std::io::Write as _;
use std::path::Path;

pub use poisson::poisson_solve;

/// Uniform spatial grid on [-L, L].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub half_width: f64,
    pub nx: usize,
    pub h: f64,
}

impl Grid1D {
    pub fn new(half_width: f64, nx: usize) -> Result<Self> {
        if !(half_width > 0.0) || nx < 16 {
            return Err(Error::Config(format!(
                "grid needs L > 0 and nx >= 16, got L = {half_width}, nx = {nx}"
            )));
        }
        Ok(Grid1D {
            half_width,
            nx,
            h: 2.0 * half_width / (nx - 1) as f64,
        })
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.h
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }
}

/// Transport coefficient laws; the kinetic Burnett integrals they stand in
/// for depend only on temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransportLaw {
    Constant { mu0: f64, kappa0: f64 },
    Power { mu0: f64, kappa0: f64, s: f64 },
}

impl Default for TransportLaw {
    fn default() -> Self {
        TransportLaw::Power {
            mu0: 1.0,
            kappa0: 1.0,
            s: 1.0,
        }
    }
}

impl TransportLaw {
    pub fn mu(&self, theta: f64) -> f64 {
        match *self {
            TransportLaw::Constant { mu0, .. } => mu0,
            TransportLaw::Power { mu0, s, .. } => mu0 * theta.powf(s),
        }
    }

    pub fn kappa(&self, theta: f64) -> f64 {
        match *self {
            TransportLaw::Constant { kappa0, .. } => kappa0,
            TransportLaw::Power { kappa0, s, .. } => kappa0 * theta.powf(s),
        }
    }

    pub fn dmu_dtheta(&self, theta: f64) -> f64 {
        match *self {
            TransportLaw::Constant { .. } => 0.0,
            TransportLaw::Power { mu0, s, .. } => mu0 * s * theta.powf(s - 1.0),
        }
    }

    pub fn dkappa_dtheta(&self, theta: f64) -> f64 {
        match *self {
            TransportLaw::Constant { .. } => 0.0,
            TransportLaw::Power { kappa0, s, .. } => kappa0 * s * theta.powf(s - 1.0),
        }
    }
}

/// Full solver configuration.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub half_width: f64,
    pub nx: usize,
    pub cfl: f64,
    pub t_end: f64,
    pub snapshot_interval: f64,
    pub transport: TransportLaw,
    pub closure: ElectronClosure,
    pub left: EulerState,
    pub rho_plus: f64,
    /// guard on the smoothing width; overridable in the config file
    pub delta0: f64,
    /// bypass the parameter-set and domain-width validation
    pub force: bool,
}

impl SolverConfig {
    /// Debye length squared lambda^2 = eps^{2b}.
    pub fn lambda_sq(&self) -> f64 {
        self.epsilon.powf(2.0 * self.b)
    }

    pub fn delta(&self) -> Result<f64> {
        delta_from_epsilon(self.epsilon, self.a, self.k)
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.half_width, self.nx)
    }

    pub fn build_wave(&self) -> Result<SmoothWave> {
        let wave = RarefactionWave::new(self.left, self.rho_plus, self.closure)?;
        SmoothWave::new(wave, self.delta()?)
    }

    /// Validate parameters; hard errors unless `force`, plus soft warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::Config(format!("cfl must lie in (0,1), got {}", self.cfl)));
        }
        if !(self.t_end > 0.0) || !(self.snapshot_interval > 0.0) {
            return Err(Error::Config("t_end and snapshot_interval must be positive".into()));
        }
        self.grid()?;
        let (ok, reason) = validate_s(self.a, self.b);
        if !ok && !self.force {
            return Err(Error::Config(format!(
                "(a, b) = ({}, {}) outside the admissible parameter set: {reason}",
                self.a, self.b
            )));
        }
        let delta = self.delta()?;
        if !(delta > 0.0 && delta < self.delta0) && !self.force {
            return Err(Error::Config(format!(
                "delta = {delta:.6} outside (0, delta0 = {}); raise delta0 or pass force",
                self.delta0
            )));
        }
        if self.epsilon >= self.k {
            warnings.push(format!(
                "epsilon = {} is not small against k = {}; the smallness regime assumes eps < k",
                self.epsilon, self.k
            ));
        }
        if self.epsilon.powf(2.0 * self.b - 1.0) > 0.5 {
            warnings.push(format!(
                "lambda^2 / eps = {:.3} is not small; the scaling regime wants 1/lambda^2 >> 1/eps",
                self.epsilon.powf(2.0 * self.b - 1.0)
            ));
        }
        // far-field Dirichlet data must stay exact: no characteristic may
        // reach the boundary before t_end
        let right = r3_connect(&self.left, self.rho_plus, &self.closure)?;
        let lam1 = crate::euler::lambda(1, &self.left, &self.closure)?;
        let lam3 = crate::euler::lambda(3, &right, &self.closure)?;
        let reach = lam1.abs().max(lam3.abs()) * self.t_end + 20.0 * delta + 1.0;
        if self.half_width < reach && !self.force {
            return Err(Error::Config(format!(
                "half-width L = {} too small: waves reach {reach:.1} by t_end",
                self.half_width
            )));
        }
        Ok(warnings)
    }
}

/// Dirichlet far-field data shared by every step.
#[derive(Debug, Clone, Copy)]
pub struct StepContext {
    pub left: EulerState,
    pub right: EulerState,
    pub phi_bc: (f64, f64),
}

impl StepContext {
    pub fn new(cfg: &SolverConfig) -> Result<Self> {
        let right = r3_connect(&cfg.left, cfg.rho_plus, &cfg.closure)?;
        Ok(StepContext {
            left: cfg.left,
            right,
            phi_bc: (
                cfg.closure.rho_e_inv(cfg.left.rho)?,
                cfg.closure.rho_e_inv(right.rho)?,
            ),
        })
    }
}

/// Discrete fields (rho, u, theta, phi) at one time.
#[derive(Debug, Clone)]
pub struct FluidField {
    pub grid: Grid1D,
    pub t: f64,
    pub rho: Vec<f64>,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub u3: Vec<f64>,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
}

impl FluidField {
    pub fn constant(grid: Grid1D, state: &EulerState, phi: f64) -> Self {
        let n = grid.nx;
        FluidField {
            grid,
            t: 0.0,
            rho: vec![state.rho; n],
            u1: vec![state.u1; n],
            u2: vec![0.0; n],
            u3: vec![0.0; n],
            theta: vec![state.theta; n],
            phi: vec![phi; n],
        }
    }

    fn check_positivity(&self) -> Result<()> {
        for i in 0..self.grid.nx {
            if !(self.rho[i] > 0.0) || !(self.theta[i] > 0.0) {
                return Err(Error::State(format!(
                    "positivity lost at x = {:.4}: rho = {:.3e}, theta = {:.3e} (t = {:.4})",
                    self.grid.x(i),
                    self.rho[i],
                    self.theta[i],
                    self.t
                )));
            }
        }
        Ok(())
    }
}

/// Conservative variables (rho, m1, m2, m3, E).
type Conserved = [Vec<f64>; 5];

fn prim_to_cons(f: &FluidField) -> Conserved {
    let n = f.grid.nx;
    let mut u: Conserved = std::array::from_fn(|_| vec![0.0; n]);
    for i in 0..n {
        let rho = f.rho[i];
        u[0][i] = rho;
        u[1][i] = rho * f.u1[i];
        u[2][i] = rho * f.u2[i];
        u[3][i] = rho * f.u3[i];
        let ke = 0.5 * (f.u1[i] * f.u1[i] + f.u2[i] * f.u2[i] + f.u3[i] * f.u3[i]);
        u[4][i] = rho * (f.theta[i] + ke);
    }
    u
}

fn cons_to_prim(u: &Conserved, field: &mut FluidField) -> Result<()> {
    let n = field.grid.nx;
    for i in 0..n {
        let rho = u[0][i];
        if !(rho > 0.0) {
            return Err(Error::State(format!(
                "nonpositive density {rho:.3e} at node {i} (t = {:.4})",
                field.t
            )));
        }
        let u1 = u[1][i] / rho;
        let u2 = u[2][i] / rho;
        let u3 = u[3][i] / rho;
        let theta = u[4][i] / rho - 0.5 * (u1 * u1 + u2 * u2 + u3 * u3);
        if !(theta > 0.0) {
            return Err(Error::State(format!(
                "nonpositive temperature {theta:.3e} at node {i} (t = {:.4})",
                field.t
            )));
        }
        field.rho[i] = rho;
        field.u1[i] = u1;
        field.u2[i] = u2;
        field.u3[i] = u3;
        field.theta[i] = theta;
    }
    Ok(())
}

/// Manufactured source hooks for order verification.
pub trait SourceTerms {
    /// Sources of the five conservation equations at (t, x).
    fn fluid(&self, t: f64, x: f64) -> [f64; 5];
    /// Source of the Poisson equation at (t, x).
    fn poisson(&self, t: f64, x: f64) -> f64;
}

/// Time derivative of the conserved variables plus the boundary-face fluxes
/// and interior source sums needed by the conservation audit.
pub struct RhsOutput {
    pub dudt: Conserved,
    /// total flux (advective minus viscous) at the first and last interior
    /// faces, per equation
    pub flux_lo: [f64; 5],
    pub flux_hi: [f64; 5],
    /// h-weighted interior sums of the non-conservative sources
    pub source_sums: [f64; 5],
}

/// Conservative second-order central RHS of the fluid hierarchy; `field.phi`
/// must already solve the Poisson equation for `field.rho`.
pub fn ns_poisson_rhs(
    field: &FluidField,
    cfg: &SolverConfig,
    sources: Option<&dyn SourceTerms>,
) -> Result<RhsOutput> {
    field.check_positivity()?;
    let n = field.grid.nx;
    let h = field.grid.h;
    let eps = cfg.epsilon;

    // node-centered advective fluxes
    let mut f_adv: Conserved = std::array::from_fn(|_| vec![0.0; n]);
    for i in 0..n {
        let rho = field.rho[i];
        let (u1, u2, u3) = (field.u1[i], field.u2[i], field.u3[i]);
        let press = 2.0 / 3.0 * rho * field.theta[i];
        let energy = rho * (field.theta[i] + 0.5 * (u1 * u1 + u2 * u2 + u3 * u3));
        f_adv[0][i] = rho * u1;
        f_adv[1][i] = rho * u1 * u1 + press;
        f_adv[2][i] = rho * u1 * u2;
        f_adv[3][i] = rho * u1 * u3;
        f_adv[4][i] = u1 * (energy + press);
    }

    // face-centered total fluxes: central average minus viscous part
    let mut face: Conserved = std::array::from_fn(|_| vec![0.0; n - 1]);
    for i in 0..n - 1 {
        let mu = 0.5 * (cfg.transport.mu(field.theta[i]) + cfg.transport.mu(field.theta[i + 1]));
        let kappa =
            0.5 * (cfg.transport.kappa(field.theta[i]) + cfg.transport.kappa(field.theta[i + 1]));
        let du1 = (field.u1[i + 1] - field.u1[i]) / h;
        let du2 = (field.u2[i + 1] - field.u2[i]) / h;
        let du3 = (field.u3[i + 1] - field.u3[i]) / h;
        let dth = (field.theta[i + 1] - field.theta[i]) / h;
        let u1m = 0.5 * (field.u1[i] + field.u1[i + 1]);
        let u2m = 0.5 * (field.u2[i] + field.u2[i + 1]);
        let u3m = 0.5 * (field.u3[i] + field.u3[i + 1]);
        for k in 0..5 {
            face[k][i] = 0.5 * (f_adv[k][i] + f_adv[k][i + 1]);
        }
        face[1][i] -= 4.0 / 3.0 * eps * mu * du1;
        face[2][i] -= eps * mu * du2;
        face[3][i] -= eps * mu * du3;
        face[4][i] -= eps
            * (kappa * dth + 4.0 / 3.0 * mu * u1m * du1 + mu * u2m * du2 + mu * u3m * du3);
    }

    let mut out = RhsOutput {
        dudt: std::array::from_fn(|_| vec![0.0; n]),
        flux_lo: [0.0; 5],
        flux_hi: [0.0; 5],
        source_sums: [0.0; 5],
    };
    for k in 0..5 {
        out.flux_lo[k] = face[k][0];
        out.flux_hi[k] = face[k][n - 2];
    }

    for i in 1..n - 1 {
        let phi_x = (field.phi[i + 1] - field.phi[i - 1]) / (2.0 * h);
        let s_mom = -field.rho[i] * phi_x;
        let s_energy = -field.rho[i] * field.u1[i] * phi_x;
        let mms = sources.map(|s| s.fluid(field.t, field.grid.x(i)));
        for k in 0..5 {
            let mut s = match k {
                1 => s_mom,
                4 => s_energy,
                _ => 0.0,
            };
            if let Some(m) = &mms {
                s += m[k];
            }
            out.dudt[k][i] = -(face[k][i] - face[k][i - 1]) / h + s;
            out.source_sums[k] += s * h;
        }
    }
    Ok(out)
}

/// Largest stable time step: advective CFL and the explicit viscous cap
/// h^2 rho_min / (2 eps max(mu, kappa)), both scaled by the configured cfl.
pub fn stable_dt(field: &FluidField, cfg: &SolverConfig) -> f64 {
    let mut speed: f64 = 1e-300;
    let mut rho_min = f64::INFINITY;
    let mut diff_max: f64 = 0.0;
    for i in 0..field.grid.nx {
        let c2 = 10.0 / 9.0 * field.theta[i]
            + cfg.closure.dp_phi_drho(field.rho[i]).unwrap_or(0.0);
        speed = speed.max(field.u1[i].abs() + c2.max(0.0).sqrt());
        rho_min = rho_min.min(field.rho[i]);
        diff_max = diff_max
            .max(4.0 / 3.0 * cfg.transport.mu(field.theta[i]))
            .max(cfg.transport.kappa(field.theta[i]));
    }
    let h = field.grid.h;
    let dt_adv = h / speed;
    let dt_visc = if cfg.epsilon * diff_max > 0.0 {
        h * h * rho_min / (2.0 * cfg.epsilon * diff_max)
    } else {
        f64::INFINITY
    };
    cfg.cfl * dt_adv.min(dt_visc)
}

/// Conservation audit accumulated across a run; the interior sums change
/// exactly by the time-integrated boundary fluxes and sources.
#[derive(Debug, Clone, Copy, Default)]
pub struct Audit {
    pub mass_initial: f64,
    pub mass_final: f64,
    pub mass_flux_integral: f64,
    pub momentum_initial: f64,
    pub momentum_final: f64,
    pub momentum_flux_integral: f64,
    pub momentum_source_integral: f64,
    pub energy_initial: f64,
    pub energy_final: f64,
    pub energy_flux_integral: f64,
    pub energy_source_integral: f64,
}

impl Audit {
    fn interior_sums(u: &Conserved, h: f64) -> (f64, f64, f64) {
        let n = u[0].len();
        let mass: f64 = u[0][1..n - 1].iter().sum::<f64>() * h;
        let mom: f64 = u[1][1..n - 1].iter().sum::<f64>() * h;
        let energy: f64 = u[4][1..n - 1].iter().sum::<f64>() * h;
        (mass, mom, energy)
    }

    /// Mass defect per unit time, relative to the initial mass.
    pub fn mass_defect_rate(&self, elapsed: f64) -> f64 {
        if elapsed <= 0.0 {
            return 0.0;
        }
        ((self.mass_final - self.mass_initial) + self.mass_flux_integral).abs()
            / (self.mass_initial.abs().max(1e-300) * elapsed)
    }

    /// Relative mismatch between the energy balance and the tracked
    /// electrostatic work integral.
    pub fn energy_work_mismatch(&self) -> f64 {
        let lhs = (self.energy_final - self.energy_initial) + self.energy_flux_integral;
        let rhs = self.energy_source_integral;
        (lhs - rhs).abs() / rhs.abs().max(1e-12)
    }

    pub fn momentum_defect(&self) -> f64 {
        let lhs = (self.momentum_final - self.momentum_initial) + self.momentum_flux_integral;
        (lhs - self.momentum_source_integral).abs()
            / self.momentum_source_integral.abs().max(1e-12)
    }
}

fn impose_far_field(field: &mut FluidField, ctx: &StepContext) {
    let n = field.grid.nx;
    field.rho[0] = ctx.left.rho;
    field.u1[0] = ctx.left.u1;
    field.u2[0] = 0.0;
    field.u3[0] = 0.0;
    field.theta[0] = ctx.left.theta;
    field.phi[0] = ctx.phi_bc.0;
    field.rho[n - 1] = ctx.right.rho;
    field.u1[n - 1] = ctx.right.u1;
    field.u2[n - 1] = 0.0;
    field.u3[n - 1] = 0.0;
    field.theta[n - 1] = ctx.right.theta;
    field.phi[n - 1] = ctx.phi_bc.1;
}

fn solve_phi(
    field: &mut FluidField,
    cfg: &SolverConfig,
    ctx: &StepContext,
    sources: Option<&dyn SourceTerms>,
) -> Result<()> {
    let src: Option<Vec<f64>> = sources.map(|s| {
        (0..field.grid.nx)
            .map(|i| s.poisson(field.t, field.grid.x(i)))
            .collect()
    });
    field.phi = poisson_solve(
        &field.rho,
        cfg.lambda_sq(),
        &cfg.closure,
        ctx.phi_bc,
        field.grid.h,
        src.as_deref(),
        Some(&field.phi),
    )?;
    Ok(())
}

/// One explicit RK4 step of size dt; the Poisson equation is re-solved at
/// every stage and the far-field Dirichlet data re-imposed.
pub fn step(
    field: &mut FluidField,
    cfg: &SolverConfig,
    ctx: &StepContext,
    dt: f64,
    sources: Option<&dyn SourceTerms>,
    audit: Option<&mut Audit>,
) -> Result<()> {
    let t0 = field.t;
    let u0 = prim_to_cons(field);
    let mut stage = field.clone();

    let k1 = ns_poisson_rhs(&stage, cfg, sources)?;

    let set_stage = |stage: &mut FluidField,
                     k: &RhsOutput,
                     c: f64|
     -> Result<()> {
        let mut u: Conserved = std::array::from_fn(|j| u0[j].clone());
        for j in 0..5 {
            for (ui, ki) in u[j].iter_mut().zip(&k.dudt[j]) {
                *ui += c * dt * ki;
            }
        }
        stage.t = t0 + c * dt;
        cons_to_prim(&u, stage)?;
        impose_far_field(stage, ctx);
        solve_phi(stage, cfg, ctx, sources)?;
        Ok(())
    };

    set_stage(&mut stage, &k1, 0.5)?;
    let k2 = ns_poisson_rhs(&stage, cfg, sources)?;
    set_stage(&mut stage, &k2, 0.5)?;
    let k3 = ns_poisson_rhs(&stage, cfg, sources)?;
    set_stage(&mut stage, &k3, 1.0)?;
    let k4 = ns_poisson_rhs(&stage, cfg, sources)?;

    let mut u: Conserved = u0.clone();
    for j in 0..5 {
        for i in 0..field.grid.nx {
            u[j][i] += dt / 6.0
                * (k1.dudt[j][i]
                    + 2.0 * k2.dudt[j][i]
                    + 2.0 * k3.dudt[j][i]
                    + k4.dudt[j][i]);
        }
    }
    field.t = t0 + dt;
    cons_to_prim(&u, field)?;
    impose_far_field(field, ctx);
    solve_phi(field, cfg, ctx, sources)?;

    if let Some(a) = audit {
        for (w, k) in [(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)] {
            let w = w * dt / 6.0;
            a.mass_flux_integral += w * (k.flux_hi[0] - k.flux_lo[0]);
            a.momentum_flux_integral += w * (k.flux_hi[1] - k.flux_lo[1]);
            a.energy_flux_integral += w * (k.flux_hi[4] - k.flux_lo[4]);
            a.momentum_source_integral += w * k.source_sums[1];
            a.energy_source_integral += w * k.source_sums[4];
        }
    }
    Ok(())
}

/// Sample the smooth wave at t = 0, then replace the quasineutral potential
/// by the discrete Poisson solution so the initial data is well prepared for
/// the discrete system.
pub fn initial_data_smooth_wave(cfg: &SolverConfig, sw: &SmoothWave) -> Result<FluidField> {
    let grid = cfg.grid()?;
    let ctx = StepContext::new(cfg)?;
    let n = grid.nx;
    let mut field = FluidField {
        grid,
        t: 0.0,
        rho: vec![0.0; n],
        u1: vec![0.0; n],
        u2: vec![0.0; n],
        u3: vec![0.0; n],
        theta: vec![0.0; n],
        phi: vec![0.0; n],
    };
    for i in 0..n {
        let p = sw.eval(0.0, grid.x(i));
        field.rho[i] = p.rho;
        field.u1[i] = p.u1;
        field.theta[i] = p.theta;
        field.phi[i] = p.phi;
    }
    impose_far_field(&mut field, &ctx);
    field.phi = poisson_solve(
        &field.rho,
        cfg.lambda_sq(),
        &cfg.closure,
        ctx.phi_bc,
        field.grid.h,
        None,
        Some(&field.phi),
    )?;
    Ok(field)
}

/// A completed run: snapshots at the configured cadence plus the audit.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<FluidField>,
    pub audit: Audit,
    pub steps: usize,
    pub wall_seconds: f64,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }
}

/// Integrate from well-prepared smooth-wave data to t_end, optionally
/// writing CSV frames and a manifest into `out_dir`. Deterministic for a
/// given config.
pub fn run(cfg: &SolverConfig, out_dir: Option<&Path>) -> Result<Trajectory> {
    let started = std::time::Instant::now();
    let warnings = cfg.validate()?;
    let sw = cfg.build_wave()?;
    let ctx = StepContext::new(cfg)?;
    let mut field = initial_data_smooth_wave(cfg, &sw)?;
    let mut audit = Audit::default();
    {
        let u = prim_to_cons(&field);
        let (m, p, e) = Audit::interior_sums(&u, field.grid.h);
        audit.mass_initial = m;
        audit.momentum_initial = p;
        audit.energy_initial = e;
    }

    let mut snapshots = vec![field.clone()];
    let mut steps = 0usize;
    let mut next_snapshot = cfg.snapshot_interval;
    while field.t < cfg.t_end - 1e-12 {
        let stop = next_snapshot.min(cfg.t_end);
        let dt = stable_dt(&field, cfg).min(stop - field.t);
        step(&mut field, cfg, &ctx, dt, None, Some(&mut audit))?;
        steps += 1;
        if field.t >= stop - 1e-12 {
            field.t = stop; // suppress roundoff drift in snapshot times
            snapshots.push(field.clone());
            if (stop - next_snapshot).abs() < 1e-12 {
                next_snapshot += cfg.snapshot_interval;
            }
        }
    }
    {
        let u = prim_to_cons(&field);
        let (m, p, e) = Audit::interior_sums(&u, field.grid.h);
        audit.mass_final = m;
        audit.momentum_final = p;
        audit.energy_final = e;
    }
    let traj = Trajectory {
        snapshots,
        audit,
        steps,
        wall_seconds: started.elapsed().as_secs_f64(),
        warnings,
    };
    if let Some(dir) = out_dir {
        write_run_artifacts(cfg, &traj, dir)?;
    }
    Ok(traj)
}

/// Write one CSV per snapshot (zero-padded frame index) and a key-value
/// manifest with the full effective configuration and audit sums.
pub fn write_run_artifacts(cfg: &SolverConfig, traj: &Trajectory, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (k, snap) in traj.snapshots.iter().enumerate() {
        let mut out = String::with_capacity(snap.grid.nx * 64);
        out.push_str("t,x,rho,u1,u2,u3,theta,phi\n");
        for i in 0..snap.grid.nx {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                snap.t,
                snap.grid.x(i),
                snap.rho[i],
                snap.u1[i],
                snap.u2[i],
                snap.u3[i],
                snap.theta[i],
                snap.phi[i]
            ));
        }
        std::fs::write(dir.join(format!("frame_{k:04}.csv")), out)?;
    }
    let mut mf = std::fs::File::create(dir.join("manifest.txt"))?;
    write_config_keys(&mut mf, cfg)?;
    writeln!(mf, "steps = {}", traj.steps)?;
    writeln!(mf, "snapshots = {}", traj.snapshots.len())?;
    writeln!(mf, "wall_seconds = {:.3}", traj.wall_seconds)?;
    writeln!(mf, "audit.mass_initial = {}", traj.audit.mass_initial)?;
    writeln!(mf, "audit.mass_final = {}", traj.audit.mass_final)?;
    writeln!(
        mf,
        "audit.mass_flux_integral = {}",
        traj.audit.mass_flux_integral
    )?;
    writeln!(
        mf,
        "audit.mass_defect_rate = {:.3e}",
        traj.audit
            .mass_defect_rate(traj.snapshots.last().map_or(1.0, |s| s.t))
    )?;
    writeln!(
        mf,
        "audit.energy_work_mismatch = {:.3e}",
        traj.audit.energy_work_mismatch()
    )?;
    writeln!(mf, "audit.momentum_defect = {:.3e}", traj.audit.momentum_defect())?;
    for w in &traj.warnings {
        writeln!(mf, "warning = {w}")?;
    }
    Ok(())
}

pub fn write_config_keys<W: std::io::Write>(out: &mut W, cfg: &SolverConfig) -> Result<()> {
    writeln!(out, "physics.epsilon = {}", cfg.epsilon)?;
    writeln!(out, "physics.a = {}", cfg.a)?;
    writeln!(out, "physics.b = {}", cfg.b)?;
    writeln!(out, "physics.k = {}", cfg.k)?;
    let kind = match cfg.closure.kind {
        crate::closures::ClosureKind::Boltzmann => "boltzmann",
        crate::closures::ClosureKind::GammaLaw => "gamma",
    };
    writeln!(out, "closure.kind = {kind}")?;
    writeln!(out, "closure.A_e = {}", cfg.closure.a_e)?;
    writeln!(out, "closure.gamma_e = {}", cfg.closure.gamma_e)?;
    writeln!(out, "wave.rho_left = {}", cfg.left.rho)?;
    writeln!(out, "wave.u1_left = {}", cfg.left.u1)?;
    writeln!(out, "wave.theta_left = {}", cfg.left.theta)?;
    writeln!(out, "wave.rho_plus = {}", cfg.rho_plus)?;
    writeln!(out, "grid.L = {}", cfg.half_width)?;
    writeln!(out, "grid.nx = {}", cfg.nx)?;
    writeln!(out, "time.cfl = {}", cfg.cfl)?;
    writeln!(out, "time.t_end = {}", cfg.t_end)?;
    writeln!(out, "time.snapshot_interval = {}", cfg.snapshot_interval)?;
    match cfg.transport {
        TransportLaw::Constant { mu0, kappa0 } => {
            writeln!(out, "transport.law = constant")?;
            writeln!(out, "transport.mu0 = {mu0}")?;
            writeln!(out, "transport.kappa0 = {kappa0}")?;
        }
        TransportLaw::Power { mu0, kappa0, s } => {
            writeln!(out, "transport.law = power")?;
            writeln!(out, "transport.mu0 = {mu0}")?;
            writeln!(out, "transport.kappa0 = {kappa0}")?;
            writeln!(out, "transport.exponent = {s}")?;
        }
    }
    writeln!(out, "guard.delta0 = {}", cfg.delta0)?;
    writeln!(out, "guard.force = {}", cfg.force)?;
    Ok(())
}

/// Scaling (tau, y) = (t, x) / eps^a between physical and scaled variables;
/// field values are unchanged, only coordinates and metadata transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleDirection {
    ToScaled,
    ToPhysical,
}

pub fn scale_coords(t: f64, x: f64, eps: f64, a: f64, dir: ScaleDirection) -> (f64, f64) {
    let f = eps.powf(a);
    match dir {
        ScaleDirection::ToScaled => (t / f, x / f),
        ScaleDirection::ToPhysical => (t * f, x * f),
    }
}

/// Effective coefficients of the scaled system.
#[derive(Debug, Clone, Copy)]
pub struct ScaleMeta {
    /// Knudsen number after scaling: eps^{1-a}
    pub knudsen: f64,
    /// Debye coefficient after scaling: eps^{2b-2a}
    pub debye_coeff: f64,
}

pub fn scale_meta(eps: f64, a: f64, b: f64) -> ScaleMeta {
    ScaleMeta {
        knudsen: eps.powf(1.0 - a),
        debye_coeff: eps.powf(2.0 * b - 2.0 * a),
    }
}

pub fn scale_field(field: &FluidField, eps: f64, a: f64, dir: ScaleDirection) -> FluidField {
    let f = eps.powf(a);
    let (t, half_width, h) = match dir {
        ScaleDirection::ToScaled => (field.t / f, field.grid.half_width / f, field.grid.h / f),
        ScaleDirection::ToPhysical => (field.t * f, field.grid.half_width * f, field.grid.h * f),
    };
    FluidField {
        grid: Grid1D {
            half_width,
            nx: field.grid.nx,
            h,
        },
        t,
        rho: field.rho.clone(),
        u1: field.u1.clone(),
        u2: field.u2.clone(),
        u3: field.u3.clone(),
        theta: field.theta.clone(),
        phi: field.phi.clone(),
    }
}
