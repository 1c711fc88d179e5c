//! Smooth approximate rarefaction wave generated by the Burgers equation
//! with tanh data of width delta.
//!
//! The Burgers profile is solved exactly by characteristics: for increasing
//! data the solution stays classical for all t >= 0, so the value at (t, x)
//! is the unique root of omega = g(x - omega t). Composing with the
//! 3-rarefaction curve (solve lambda3(rho) = omega, then the curve integral
//! and the isentrope) yields a smooth wave that satisfies the quasineutral
//! Euler system exactly and converges to the Lipschitz fan as delta -> 0.

use crate::error::{Error, Result};
use crate::euler::{isentropic_theta, RarefactionWave, WavePoint};
use crate::numerics::{bisect_newton, quad_gl15};

/// delta = (1/k) * eps^(3/5 - 2a/5), the smoothing width matched to the
/// Knudsen number.
pub fn delta_from_epsilon(eps: f64, a: f64, k: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Config(format!("epsilon must lie in (0,1), got {eps}")));
    }
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Config(format!("k must lie in (0,1), got {k}")));
    }
    Ok(eps.powf(0.6 - 0.4 * a) / k)
}

/// Value and first two x-derivatives of the Burgers solution at (t, x).
#[derive(Debug, Clone, Copy)]
pub struct BurgersDerivs {
    pub omega: f64,
    pub omega_t: f64,
    pub omega_x: f64,
    pub omega_xx: f64,
}

/// Wave quantities and their analytic derivatives at one point (t, x).
#[derive(Debug, Clone, Copy)]
pub struct SmoothWavePoint {
    pub rho: f64,
    pub u1: f64,
    pub theta: f64,
    pub phi: f64,
    pub rho_x: f64,
    pub u1_x: f64,
    pub theta_x: f64,
    pub phi_x: f64,
    pub rho_t: f64,
    pub u1_t: f64,
    pub theta_t: f64,
    pub phi_t: f64,
    pub rho_xx: f64,
    pub u1_xx: f64,
    pub theta_xx: f64,
    pub phi_xx: f64,
}

/// Discrete residual norms of the four evolution equations
/// (mass, normal momentum, transverse momentum, energy).
#[derive(Debug, Clone, Copy)]
pub struct ResidualNorms {
    pub l2: [f64; 4],
    pub linf: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivMode {
    /// All derivatives through the characteristic relation; residuals vanish
    /// to rounding.
    Analytic,
    /// Space derivatives by O(h^2) centered differences on the sample grid.
    FiniteDifference,
}

/// The delta-regularized 3-rarefaction wave.
#[derive(Debug, Clone)]
pub struct SmoothWave {
    pub wave: RarefactionWave,
    pub delta: f64,
    pub omega_minus: f64,
    pub omega_plus: f64,
}

impl SmoothWave {
    pub fn new(wave: RarefactionWave, delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::Config(format!("delta must be positive, got {delta}")));
        }
        let (omega_minus, omega_plus) = (wave.xi_lo, wave.xi_hi);
        Ok(SmoothWave {
            wave,
            delta,
            omega_minus,
            omega_plus,
        })
    }

    /// Initial Burgers profile (omega_+ + omega_-)/2 + (omega_+ - omega_-)/2 * tanh(x/delta).
    pub fn initial_profile(&self, x: f64) -> f64 {
        0.5 * (self.omega_plus + self.omega_minus)
            + 0.5 * (self.omega_plus - self.omega_minus) * (x / self.delta).tanh()
    }

    /// Profile with its first two derivatives.
    fn profile_derivs(&self, x: f64) -> (f64, f64, f64) {
        let half_jump = 0.5 * (self.omega_plus - self.omega_minus);
        let s = x / self.delta;
        let t = s.tanh();
        let sech2 = 1.0 - t * t;
        let g = 0.5 * (self.omega_plus + self.omega_minus) + half_jump * t;
        let g1 = half_jump * sech2 / self.delta;
        let g2 = -2.0 * half_jump * t * sech2 / (self.delta * self.delta);
        (g, g1, g2)
    }

    /// Solve omega = profile(x - omega t); unique because the profile is
    /// strictly increasing. Bracketed bisection plus Newton, tolerance 1e-13.
    pub fn burgers(&self, t: f64, x: f64) -> f64 {
        debug_assert!(t >= 0.0);
        let (lo, hi) = (self.omega_minus, self.omega_plus);
        if hi == lo {
            return lo;
        }
        if t == 0.0 {
            return self.initial_profile(x);
        }
        let scale = hi.abs().max(lo.abs()).max(1.0);
        let mut w = bisect_newton(
            |w| w - self.initial_profile(x - w * t),
            |w| 1.0 + t * self.profile_derivs(x - w * t).1,
            lo,
            hi,
            1e-13 * scale,
        )
        .expect("burgers root is bracketed by the far-field values");
        // Newton polish on the residual itself; the implicit-function
        // derivative 1 + t g' grows with t and amplifies the x-tolerance.
        for _ in 0..4 {
            let fw = w - self.initial_profile(x - w * t);
            if fw.abs() <= 1e-14 * scale {
                break;
            }
            let dw = 1.0 + t * self.profile_derivs(x - w * t).1;
            w = (w - fw / dw).clamp(lo, hi);
        }
        w
    }

    /// Implicit differentiation of the characteristic relation.
    pub fn burgers_derivs(&self, t: f64, x: f64) -> BurgersDerivs {
        let omega = self.burgers(t, x);
        let (_, g1, g2) = self.profile_derivs(x - omega * t);
        let denom = 1.0 + t * g1;
        let omega_x = g1 / denom;
        BurgersDerivs {
            omega,
            omega_t: -omega * omega_x,
            omega_x,
            omega_xx: g2 / (denom * denom * denom),
        }
    }

    /// Wave values at (t, x): invert lambda3 along the curve, then the curve
    /// integral, the isentrope and the quasineutral potential.
    pub fn eval(&self, t: f64, x: f64) -> WavePoint {
        if self.wave.is_zero_strength() {
            return self.wave.eval(self.wave.xi_lo - 1.0);
        }
        let omega = self.burgers(t, x);
        let rho = self
            .wave
            .curve()
            .rho_of_lambda3(omega)
            .expect("curve inversion");
        WavePoint {
            rho,
            u1: self.wave.curve().u1_of_rho(rho).expect("curve in range"),
            theta: isentropic_theta(rho, self.wave.s_star),
            phi: self.wave.closure.rho_e_inv(rho).expect("rho in closure range"),
        }
    }

    /// Values plus analytic first derivatives in x and t and second
    /// derivatives in x, all via the chain rule through the lambda3
    /// inversion. Third derivatives are left to finite differencing.
    pub fn eval_with_derivs(&self, t: f64, x: f64) -> SmoothWavePoint {
        let b = self.burgers_derivs(t, x);
        let curve = self.wave.curve();
        let closure = &self.wave.closure;
        if self.wave.is_zero_strength() {
            let p = self.eval(t, x);
            return SmoothWavePoint {
                rho: p.rho,
                u1: p.u1,
                theta: p.theta,
                phi: p.phi,
                rho_x: 0.0,
                u1_x: 0.0,
                theta_x: 0.0,
                phi_x: 0.0,
                rho_t: 0.0,
                u1_t: 0.0,
                theta_t: 0.0,
                phi_t: 0.0,
                rho_xx: 0.0,
                u1_xx: 0.0,
                theta_xx: 0.0,
                phi_xx: 0.0,
            };
        }
        let rho = curve.rho_of_lambda3(b.omega).expect("curve inversion");
        let u1 = curve.u1_of_rho(rho).expect("curve in range");
        let theta = isentropic_theta(rho, self.wave.s_star);
        let phi = closure.rho_e_inv(rho).expect("rho in closure range");

        // rho as a function of omega on the curve
        let lam1 = curve.dlambda3_drho(rho).expect("curve derivative");
        let lam2 = curve.d2lambda3_drho2(rho).expect("curve derivative");
        let drho_dw = 1.0 / lam1;
        let d2rho_dw2 = -lam2 / (lam1 * lam1 * lam1);
        let rho_x = drho_dw * b.omega_x;
        let rho_t = drho_dw * b.omega_t;
        let rho_xx = d2rho_dw2 * b.omega_x * b.omega_x + drho_dw * b.omega_xx;

        // u1, theta, phi as functions of rho
        let du1 = curve.du1_drho(rho).expect("curve derivative");
        let d2u1 = curve.d2u1_drho2(rho).expect("curve derivative");
        let ktheta = theta / rho * (2.0 / 3.0); // d theta / d rho = (2/3) theta / rho
        let d2theta = -ktheta / (3.0 * rho); // d^2 theta / d rho^2
        let re1 = closure.drho_e(phi).expect("phi in domain");
        let re2 = closure.d2rho_e(phi).expect("phi in domain");
        let dphi = 1.0 / re1;
        let d2phi = -re2 / (re1 * re1 * re1);

        SmoothWavePoint {
            rho,
            u1,
            theta,
            phi,
            rho_x,
            u1_x: du1 * rho_x,
            theta_x: ktheta * rho_x,
            phi_x: dphi * rho_x,
            rho_t,
            u1_t: du1 * rho_t,
            theta_t: ktheta * rho_t,
            phi_t: dphi * rho_t,
            rho_xx,
            u1_xx: d2u1 * rho_x * rho_x + du1 * rho_xx,
            theta_xx: d2theta * rho_x * rho_x + ktheta * rho_xx,
            phi_xx: d2phi * rho_x * rho_x + dphi * rho_xx,
        }
    }

    /// Discrete residuals of the quasineutral Euler system on a uniform
    /// grid of `n` points spanning [x_lo, x_hi] at time t.
    pub fn residual_norms(
        &self,
        t: f64,
        x_lo: f64,
        x_hi: f64,
        n: usize,
        mode: DerivMode,
    ) -> Result<ResidualNorms> {
        if n < 5 || !(x_hi > x_lo) || !(t > 0.0) {
            return Err(Error::Input(
                "residual grid needs n >= 5, x_hi > x_lo and t > 0".into(),
            ));
        }
        let h = (x_hi - x_lo) / (n - 1) as f64;
        let pts: Vec<SmoothWavePoint> = (0..n)
            .map(|i| self.eval_with_derivs(t, x_lo + i as f64 * h))
            .collect();

        // space derivatives of the flux combinations
        let (rho_x, u1_x, theta_x, phi_x): (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) = match mode {
            DerivMode::Analytic => (
                pts.iter().map(|p| p.rho_x).collect(),
                pts.iter().map(|p| p.u1_x).collect(),
                pts.iter().map(|p| p.theta_x).collect(),
                pts.iter().map(|p| p.phi_x).collect(),
            ),
            DerivMode::FiniteDifference => {
                let rho: Vec<f64> = pts.iter().map(|p| p.rho).collect();
                let u1: Vec<f64> = pts.iter().map(|p| p.u1).collect();
                let theta: Vec<f64> = pts.iter().map(|p| p.theta).collect();
                let phi: Vec<f64> = pts.iter().map(|p| p.phi).collect();
                (
                    crate::numerics::deriv1(&rho, h),
                    crate::numerics::deriv1(&u1, h),
                    crate::numerics::deriv1(&theta, h),
                    crate::numerics::deriv1(&phi, h),
                )
            }
        };

        let mut l2 = [0.0f64; 4];
        let mut linf = [0.0f64; 4];
        let mut sums = [0.0f64; 4];
        for i in 0..n {
            let p = &pts[i];
            let e_int = p.theta + 0.5 * p.u1 * p.u1;
            let press_x = 2.0 / 3.0 * (rho_x[i] * p.theta + p.rho * theta_x[i]);
            let r_mass = p.rho_t + rho_x[i] * p.u1 + p.rho * u1_x[i];
            let r_mom = p.rho_t * p.u1
                + p.rho * p.u1_t
                + rho_x[i] * p.u1 * p.u1
                + 2.0 * p.rho * p.u1 * u1_x[i]
                + press_x
                + p.rho * phi_x[i];
            let r_mom23 = 0.0;
            let e_t = p.rho_t * e_int + p.rho * (p.theta_t + p.u1 * p.u1_t);
            let e_x = rho_x[i] * e_int + p.rho * (theta_x[i] + p.u1 * u1_x[i]);
            let press = 2.0 / 3.0 * p.rho * p.theta;
            let r_energy = e_t
                + u1_x[i] * (p.rho * e_int + press)
                + p.u1 * (e_x + press_x)
                + p.rho * p.u1 * phi_x[i];
            for (k, r) in [r_mass, r_mom, r_mom23, r_energy].into_iter().enumerate() {
                let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                sums[k] += w * r * r * h;
                linf[k] = linf[k].max(r.abs());
            }
        }
        for k in 0..4 {
            l2[k] = sums[k].sqrt();
        }
        Ok(ResidualNorms { l2, linf })
    }

    /// L^p norm over x of |d/dx component| at time t, integrated exactly in
    /// the characteristic parameterization x = x0 + t g(x0). The tanh data
    /// is flat beyond ~40 delta, so the window [-45 delta, 45 delta] in x0
    /// captures the norm to rounding.
    pub fn dx_lp_norm(&self, t: f64, p: f64, component: WaveComponent) -> f64 {
        if self.wave.is_zero_strength() {
            return 0.0;
        }
        let a = 45.0 * self.delta;
        let panels = 180usize;
        let w = 2.0 * a / panels as f64;
        let value_at = |x0: f64| -> (f64, f64) {
            let (g, g1, _) = self.profile_derivs(x0);
            let denom = 1.0 + t * g1;
            let x = x0 + t * g;
            let pt = self.eval_with_derivs(t, x);
            let d = match component {
                WaveComponent::Rho => pt.rho_x,
                WaveComponent::U1 => pt.u1_x,
                WaveComponent::Theta => pt.theta_x,
                WaveComponent::Phi => pt.phi_x,
            };
            (d, denom)
        };
        if p.is_infinite() {
            let mut m: f64 = 0.0;
            let samples = 4000;
            for i in 0..=samples {
                let x0 = -a + 2.0 * a * i as f64 / samples as f64;
                m = m.max(value_at(x0).0.abs());
            }
            return m;
        }
        let mut acc = 0.0;
        for k in 0..panels {
            let lo = -a + k as f64 * w;
            acc += quad_gl15(
                &mut |x0| {
                    let (d, jac) = value_at(x0);
                    d.abs().powf(p) * jac
                },
                lo,
                lo + w,
            );
        }
        acc.powf(1.0 / p)
    }

    /// Sup over x of |d^2 u1 / dx^2| at time t, sampled in the
    /// characteristic parameterization.
    pub fn u1_xx_sup(&self, t: f64) -> f64 {
        if self.wave.is_zero_strength() {
            return 0.0;
        }
        let a = 45.0 * self.delta;
        let samples = 4000;
        let mut m: f64 = 0.0;
        for i in 0..=samples {
            let x0 = -a + 2.0 * a * i as f64 / samples as f64;
            let (g, _, _) = self.profile_derivs(x0);
            let x = x0 + t * g;
            m = m.max(self.eval_with_derivs(t, x).u1_xx.abs());
        }
        m
    }

    /// Sup over x of the gap to the exact self-similar fan at time t > 0.
    pub fn sup_gap_to_exact(&self, t: f64) -> f64 {
        assert!(t > 0.0);
        let lo = self.omega_minus * t - 60.0 * self.delta - 1.0;
        let hi = self.omega_plus * t + 60.0 * self.delta + 1.0;
        let n = 8000;
        let mut m: f64 = 0.0;
        for i in 0..=n {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            let s = self.eval(t, x);
            let e = self.wave.eval(x / t);
            let gap = (s.rho - e.rho)
                .abs()
                .max((s.u1 - e.u1).abs())
                .max((s.theta - e.theta).abs())
                .max((s.phi - e.phi).abs());
            m = m.max(gap);
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveComponent {
    Rho,
    U1,
    Theta,
    Phi,
}
