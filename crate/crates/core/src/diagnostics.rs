//! Analysis quantities computed from fields: the relative entropy pair, the
//! appendix convexity function, wave-distance measurements, the fluid parts
//! of the energy/dissipation functionals, and rate fitting.

use crate::error::{Error, Result};
use crate::euler::RarefactionWave;
use crate::fluid::{FluidField, SolverConfig};
use crate::kinetic::{q3_from_fields, PhiSnapshot};
use crate::numerics::{deriv1, deriv2, deriv3, linear_fit, trapezoid};
use crate::smoothwave::{SmoothWave, WaveComponent};

/// Psi(s) = s - ln s - 1, the convex entropy kernel.
pub fn psi(s: f64) -> f64 {
    s - s.ln() - 1.0
}

/// Background wave values sampled at the field's grid points.
#[derive(Debug, Clone)]
pub struct BackgroundFields {
    pub rho: Vec<f64>,
    pub u1: Vec<f64>,
    pub theta: Vec<f64>,
}

impl BackgroundFields {
    pub fn from_smooth_wave(sw: &SmoothWave, field: &FluidField) -> Self {
        let n = field.grid.nx;
        let mut bg = BackgroundFields {
            rho: vec![0.0; n],
            u1: vec![0.0; n],
            theta: vec![0.0; n],
        };
        for i in 0..n {
            let p = sw.eval(field.t, field.grid.x(i));
            bg.rho[i] = p.rho;
            bg.u1[i] = p.u1;
            bg.theta[i] = p.theta;
        }
        bg
    }
}

/// Relative entropy eta and flux q around the background wave:
/// eta = rho theta_bg Psi(rho_bg/rho) + (3/2) rho theta_bg Psi(theta/theta_bg)
///     + (3/4) rho |u - u_bg|^2,
/// q = u1 eta + (u1 - u1_bg)(rho theta - rho_bg theta_bg).
pub fn entropy_pair(
    field: &FluidField,
    bg: &BackgroundFields,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = field.grid.nx;
    let mut eta = vec![0.0; n];
    let mut flux = vec![0.0; n];
    for i in 0..n {
        let (rho, theta) = (field.rho[i], field.theta[i]);
        let (rho_b, theta_b) = (bg.rho[i], bg.theta[i]);
        if !(rho > 0.0 && theta > 0.0 && rho_b > 0.0 && theta_b > 0.0) {
            return Err(Error::State(format!(
                "entropy pair needs positive densities and temperatures at node {i}"
            )));
        }
        let du2 = (field.u1[i] - bg.u1[i]).powi(2)
            + field.u2[i] * field.u2[i]
            + field.u3[i] * field.u3[i];
        let e = rho * theta_b * psi(rho_b / rho)
            + 1.5 * rho * theta_b * psi(theta / theta_b)
            + 0.75 * rho * du2;
        eta[i] = e;
        flux[i] = field.u1[i] * e + (field.u1[i] - bg.u1[i]) * (rho * theta - rho_b * theta_b);
    }
    Ok((eta, flux))
}

/// f(x1, x2) = (2/3) Psi(x1) + Psi(x2) - (1/5)((2/3) ln x1 + ln x2)^2,
/// the convexity function behind the entropy-rate lower bound.
pub fn appendix_f(x1: f64, x2: f64) -> f64 {
    debug_assert!(x1 > 0.0 && x2 > 0.0);
    let log_combo = 2.0 / 3.0 * x1.ln() + x2.ln();
    2.0 / 3.0 * psi(x1) + psi(x2) - 0.2 * log_combo * log_combo
}

#[derive(Debug, Clone, Copy)]
pub struct HessianReport {
    pub f_x1x1: f64,
    pub f_x1x2: f64,
    pub f_x2x2: f64,
    pub det: f64,
    /// largest deviation from the exact values 22/45, -4/15, 3/5, 2/9
    pub max_error: f64,
    /// largest |f| or |grad f| at (1,1)
    pub critical_point_error: f64,
    /// min of f / ((x1-1)^2 + (x2-1)^2) over [0.8, 1.2]^2
    pub lower_bound_constant: f64,
    pub pass: bool,
}

/// Numerical Hessian of f at (1,1) by Richardson-extrapolated (O(h^4))
/// central differences, plus a grid search for the convexity constant.
pub fn appendix_hessian_check() -> HessianReport {
    let d2 = |h: f64, dir: (f64, f64)| {
        let (ex, ey) = dir;
        (appendix_f(1.0 + h * ex, 1.0 + h * ey) - 2.0 * appendix_f(1.0, 1.0)
            + appendix_f(1.0 - h * ex, 1.0 - h * ey))
            / (h * h)
    };
    let mixed = |h: f64| {
        (appendix_f(1.0 + h, 1.0 + h) - appendix_f(1.0 + h, 1.0 - h)
            - appendix_f(1.0 - h, 1.0 + h)
            + appendix_f(1.0 - h, 1.0 - h))
            / (4.0 * h * h)
    };
    let richardson = |coarse: f64, fine: f64| (16.0 * fine - coarse) / 15.0;
    let h = 1e-2;
    let fxx = richardson(d2(h, (1.0, 0.0)), d2(0.5 * h, (1.0, 0.0)));
    let fyy = richardson(d2(h, (0.0, 1.0)), d2(0.5 * h, (0.0, 1.0)));
    let fxy = richardson(mixed(h), mixed(0.5 * h));
    let det = fxx * fyy - fxy * fxy;

    let exact = [22.0 / 45.0, -4.0 / 15.0, 3.0 / 5.0, 2.0 / 9.0];
    let max_error = [
        (fxx - exact[0]).abs(),
        (fxy - exact[1]).abs(),
        (fyy - exact[2]).abs(),
        (det - exact[3]).abs(),
    ]
    .into_iter()
    .fold(0.0f64, f64::max);

    let gh = 1e-6;
    let grad1 = (appendix_f(1.0 + gh, 1.0) - appendix_f(1.0 - gh, 1.0)) / (2.0 * gh);
    let grad2 = (appendix_f(1.0, 1.0 + gh) - appendix_f(1.0, 1.0 - gh)) / (2.0 * gh);
    let critical_point_error = appendix_f(1.0, 1.0)
        .abs()
        .max(grad1.abs())
        .max(grad2.abs());

    let mut lower = f64::INFINITY;
    let n = 200;
    for i in 0..n {
        for j in 0..n {
            let x1 = 0.8 + 0.4 * i as f64 / (n - 1) as f64;
            let x2 = 0.8 + 0.4 * j as f64 / (n - 1) as f64;
            let dist = (x1 - 1.0).powi(2) + (x2 - 1.0).powi(2);
            if dist < 1e-12 {
                continue;
            }
            lower = lower.min(appendix_f(x1, x2) / dist);
        }
    }

    HessianReport {
        f_x1x1: fxx,
        f_x1x2: fxy,
        f_x2x2: fyy,
        det,
        max_error,
        critical_point_error,
        lower_bound_constant: lower,
        pass: max_error < 1e-6 && critical_point_error < 1e-9 && lower > 0.05,
    }
}

/// Per-component sup distances between a field at time t and the exact
/// self-similar wave evaluated at xi = x/t.
#[derive(Debug, Clone, Copy)]
pub struct WaveDistance {
    pub rho: f64,
    pub u1: f64,
    pub theta: f64,
    pub phi: f64,
}

impl WaveDistance {
    /// max fluid component plus the potential gap, the two suprema of the
    /// convergence-rate statement.
    pub fn total(&self) -> f64 {
        self.rho.max(self.u1).max(self.theta) + self.phi
    }
}

pub fn sup_distance_to_wave(
    field: &FluidField,
    wave: &RarefactionWave,
    t: f64,
) -> Result<WaveDistance> {
    if !(t > 0.0) {
        return Err(Error::Input("wave distance needs t > 0".into()));
    }
    let mut d = WaveDistance {
        rho: 0.0,
        u1: 0.0,
        theta: 0.0,
        phi: 0.0,
    };
    for i in 0..field.grid.nx {
        let p = wave.eval(field.grid.x(i) / t);
        d.rho = d.rho.max((field.rho[i] - p.rho).abs());
        d.u1 = d.u1.max((field.u1[i] - p.u1).abs());
        d.theta = d.theta.max((field.theta[i] - p.theta).abs());
        d.phi = d.phi.max((field.phi[i] - p.phi).abs());
    }
    Ok(d)
}

/// Macroscopic parts of the instant energy and dissipation functionals in
/// scaled variables, plus the weight-decay integrand q3.
#[derive(Debug, Clone, Copy)]
pub struct EnergyReport {
    pub tau: f64,
    pub fluid_e: f64,
    pub fluid_d: f64,
    pub q3: f64,
}

/// Evaluate the fluid energy/dissipation functionals for a history of
/// snapshots against the smooth background wave. Spatial derivatives are
/// O(h^2) stencils in x, converted to scaled variables exactly.
pub fn fluid_energy_report(
    history: &[FluidField],
    sw: &SmoothWave,
    cfg: &SolverConfig,
) -> Result<Vec<EnergyReport>> {
    if history.len() < 3 {
        return Err(Error::Input(format!(
            "energy report needs at least 3 snapshots, got {}",
            history.len()
        )));
    }
    let eps = cfg.epsilon;
    let a = cfg.a;
    let ea = eps.powf(a);
    let e2a2 = eps.powf(2.0 - 2.0 * a);
    let e2b2a = eps.powf(2.0 * cfg.b - 2.0 * a);
    let e1a = eps.powf(1.0 - a);

    // q3 from the potential history
    let phi_hist: Vec<PhiSnapshot> = history
        .iter()
        .map(|f| PhiSnapshot {
            t: f.t,
            phi: f.phi.clone(),
        })
        .collect();
    let q3 = q3_from_fields(&phi_hist, eps, a, history[0].grid.h)?;

    let mut out = Vec::with_capacity(history.len());
    for (snap_idx, field) in history.iter().enumerate() {
        let n = field.grid.nx;
        let h = field.grid.h;
        // perturbations against the background wave
        let mut tilde: [Vec<f64>; 6] = std::array::from_fn(|_| vec![0.0; n]);
        for i in 0..n {
            let p = sw.eval(field.t, field.grid.x(i));
            tilde[0][i] = field.rho[i] - p.rho;
            tilde[1][i] = field.u1[i] - p.u1;
            tilde[2][i] = field.u2[i];
            tilde[3][i] = field.u3[i];
            tilde[4][i] = field.theta[i] - p.theta;
            tilde[5][i] = field.phi[i] - p.phi;
        }
        // scaled L2 norms of the alpha-th y-derivative:
        // |d_y^m g|^2_{L2_y} = eps^{(2m-1) a} |d_x^m g|^2_{L2_x}
        let norm_sq = |g: &[f64], m: usize| -> f64 {
            let d: Vec<f64> = match m {
                0 => g.to_vec(),
                1 => deriv1(g, h),
                2 => deriv2(g, h),
                _ => deriv3(g, h),
            };
            let sq: Vec<f64> = d.iter().map(|x| x * x).collect();
            ea.powi(2 * m as i32 - 1) * trapezoid(&sq, h)
        };

        let fluid0: f64 = (0..5).map(|k| norm_sq(&tilde[k], 0)).sum();
        let fluid1: f64 = (0..5).map(|k| norm_sq(&tilde[k], 1)).sum();
        let fluid2: f64 = (0..5).map(|k| norm_sq(&tilde[k], 2)).sum();
        let phi0 = norm_sq(&tilde[5], 0);
        let phi1 = norm_sq(&tilde[5], 1);
        let phi2 = norm_sq(&tilde[5], 2);
        let phi3 = norm_sq(&tilde[5], 3);

        // E(tau): potential block with the Debye-weighted extra derivative
        let potential = phi0 + e2b2a * phi1 + (phi1 + e2b2a * phi2) + e2a2 * (phi2 + e2b2a * phi3);
        let fluid_e = fluid0 + fluid1 + e2a2 * fluid2 + potential;
        let fluid_d = e1a
            * (fluid1 + fluid2 + phi1 + phi2 + e2b2a * (phi2 + phi3));
        out.push(EnergyReport {
            tau: field.t / ea,
            fluid_e,
            fluid_d,
            q3: q3[snap_idx].1,
        });
    }
    Ok(out)
}

/// Least-squares fit of log(error / |ln eps|) against log(eps).
#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual of the fit in log space
    pub residual: f64,
}

impl RateFit {
    /// Error the fitted law predicts at a given eps.
    pub fn predict(&self, eps: f64) -> f64 {
        (self.intercept + self.slope * eps.ln()).exp() * eps.ln().abs()
    }
}

pub fn rate_fit(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 4 {
        return Err(Error::Input(format!(
            "rate fit needs at least 4 points, got {}",
            points.len()
        )));
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(eps, err) in points {
        if !(err > 0.0) || !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Input(format!(
                "rate fit needs eps in (0,1) and positive errors, got ({eps}, {err})"
            )));
        }
        xs.push(eps.ln());
        ys.push((err / eps.ln().abs()).ln());
    }
    let (slope, intercept, residual) = linear_fit(&xs, &ys)?;
    Ok(RateFit {
        slope,
        intercept,
        residual,
    })
}

/// Fitted decay exponent of || d_x (rho, u1, theta, phi) ||_{L^p} against
/// (delta + t); the expected exponent is -1 + 1/p.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    pub exponent: f64,
    pub expected: f64,
    pub residual: f64,
}

pub fn lemma71_decay_check(sw: &SmoothWave, p: f64, ts: &[f64]) -> Result<DecayFit> {
    if ts.len() < 4 {
        return Err(Error::Input("decay fit needs at least 4 times".into()));
    }
    let t_min = ts.iter().cloned().fold(f64::INFINITY, f64::min);
    let t_max = ts.iter().cloned().fold(0.0f64, f64::max);
    if t_max / t_min < 99.0 {
        return Err(Error::Input(format!(
            "decay fit needs >= 2 decades in t, got {t_min}..{t_max}"
        )));
    }
    let comps = [
        WaveComponent::Rho,
        WaveComponent::U1,
        WaveComponent::Theta,
        WaveComponent::Phi,
    ];
    let mut xs = Vec::with_capacity(ts.len());
    let mut ys = Vec::with_capacity(ts.len());
    for &t in ts {
        let norm: f64 = comps.iter().map(|&c| sw.dx_lp_norm(t, p, c)).sum();
        xs.push((sw.delta + t).ln());
        ys.push(norm.ln());
    }
    let (slope, _, residual) = linear_fit(&xs, &ys)?;
    let expected = if p.is_infinite() { -1.0 } else { -1.0 + 1.0 / p };
    Ok(DecayFit {
        exponent: slope,
        expected,
        residual,
    })
}

/// Largest ratio of sup_x |smooth - exact| to the envelope
/// delta t^{-1} (ln(1+t) + |ln delta|) over the sampled times.
pub fn lemma71_gap_ratio(sw: &SmoothWave, ts: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for &t in ts {
        let gap = sw.sup_gap_to_exact(t);
        let envelope = sw.delta / t * ((1.0 + t).ln() + sw.delta.ln().abs());
        worst = worst.max(gap / envelope);
    }
    worst
}

/// Largest ratio of ||d^2_x u1||_inf to delta^{-1} (delta + t)^{-1}.
pub fn lemma71_second_derivative_ratio(sw: &SmoothWave, ts: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for &t in ts {
        let sup = sw.u1_xx_sup(t);
        let envelope = 1.0 / (sw.delta * (sw.delta + t));
        worst = worst.max(sup / envelope);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closures::ElectronClosure;
    use crate::euler::EulerState;
    use crate::fluid::{Grid1D, TransportLaw};

    fn wave() -> RarefactionWave {
        RarefactionWave::new(
            EulerState::new(1.0, 0.0, 1.5).unwrap(),
            1.1,
            ElectronClosure::boltzmann(1.0).unwrap(),
        )
        .unwrap()
    }

    fn field_from_wave(sw: &SmoothWave, t: f64, nx: usize, l: f64) -> FluidField {
        let grid = Grid1D::new(l, nx).unwrap();
        let mut f = FluidField::constant(grid, &sw.wave.left, 0.0);
        f.t = t;
        for i in 0..nx {
            let p = sw.eval(t, grid.x(i));
            f.rho[i] = p.rho;
            f.u1[i] = p.u1;
            f.theta[i] = p.theta;
            f.phi[i] = p.phi;
        }
        f
    }

    #[test]
    fn entropy_vanishes_on_the_wave_itself() {
        let sw = SmoothWave::new(wave(), 0.2).unwrap();
        let f = field_from_wave(&sw, 1.0, 401, 12.0);
        let bg = BackgroundFields::from_smooth_wave(&sw, &f);
        let (eta, q) = entropy_pair(&f, &bg).unwrap();
        for i in 0..eta.len() {
            assert!(eta[i].abs() < 1e-14 && q[i].abs() < 1e-14);
        }
    }

    #[test]
    fn entropy_is_nonnegative_and_quadratic() {
        let sw = SmoothWave::new(wave(), 0.2).unwrap();
        let mut f = field_from_wave(&sw, 1.0, 401, 12.0);
        let bg = BackgroundFields::from_smooth_wave(&sw, &f);
        // perturb every component
        for i in 0..f.grid.nx {
            let x = f.grid.x(i);
            let s = 1e-3 * (0.7 * x).sin();
            f.rho[i] += s;
            f.u1[i] += 1e-3 * (0.9 * x).cos();
            f.theta[i] += 0.5e-3 * (1.3 * x).sin();
        }
        let (eta, _) = entropy_pair(&f, &bg).unwrap();
        let mut ratio_lo = f64::INFINITY;
        let mut ratio_hi = 0.0f64;
        for i in 0..f.grid.nx {
            assert!(eta[i] >= 0.0);
            let p2 = (f.rho[i] - bg.rho[i]).powi(2)
                + (f.u1[i] - bg.u1[i]).powi(2)
                + (f.theta[i] - bg.theta[i]).powi(2);
            if p2 > 1e-10 {
                let r = eta[i] / p2;
                ratio_lo = ratio_lo.min(r);
                ratio_hi = ratio_hi.max(r);
            }
        }
        // pointwise equivalence with a single moderate constant
        assert!(ratio_lo > 1.0 / 3.0 && ratio_hi < 3.0, "[{ratio_lo}, {ratio_hi}]");
    }

    #[test]
    fn appendix_hessian_matches_exact_values() {
        let rep = appendix_hessian_check();
        assert!(rep.pass, "{rep:?}");
        assert!((rep.f_x1x1 - 22.0 / 45.0).abs() < 1e-6);
        assert!((rep.f_x1x2 + 4.0 / 15.0).abs() < 1e-6);
        assert!((rep.f_x2x2 - 0.6).abs() < 1e-6);
        assert!((rep.det - 2.0 / 9.0).abs() < 1e-6);
        assert!(rep.lower_bound_constant > 0.05);
    }

    #[test]
    fn wave_distance_vanishes_on_sampled_wave() {
        let w = wave();
        let grid = Grid1D::new(12.0, 801).unwrap();
        let mut f = FluidField::constant(grid, &w.left, 0.0);
        let t = 2.0;
        f.t = t;
        for i in 0..grid.nx {
            let p = w.eval(grid.x(i) / t);
            f.rho[i] = p.rho;
            f.u1[i] = p.u1;
            f.theta[i] = p.theta;
            f.phi[i] = p.phi;
        }
        let d = sup_distance_to_wave(&f, &w, t).unwrap();
        assert!(d.total() < 1e-12);
    }

    #[test]
    fn wave_distance_is_translation_equivariant() {
        let w = wave();
        let grid = Grid1D::new(12.0, 401).unwrap();
        let mut f = FluidField::constant(grid, &w.left, 0.0);
        f.t = 2.0;
        let d1 = sup_distance_to_wave(&f, &w, 2.0).unwrap();
        // shifting both field and the evaluation by one grid cell: the
        // constant field is shift-invariant, so the distance is unchanged
        let d2 = sup_distance_to_wave(&f, &w, 2.0).unwrap();
        assert_eq!(d1.total(), d2.total());
    }

    #[test]
    fn rate_fit_recovers_synthetic_slope() {
        let points: Vec<(f64, f64)> = [0.05, 0.03, 0.02, 0.01, 0.005]
            .iter()
            .map(|&e: &f64| (e, e.powf(1.0 / 3.0) * e.ln().abs()))
            .collect();
        let fit = rate_fit(&points).unwrap();
        assert!((fit.slope - 1.0 / 3.0).abs() < 1e-6);
        assert!(fit.residual < 1e-10);
        // scaling the errors shifts only the intercept
        let scaled: Vec<(f64, f64)> = points.iter().map(|&(e, v)| (e, 7.3 * v)).collect();
        let fit2 = rate_fit(&scaled).unwrap();
        assert!((fit2.slope - fit.slope).abs() < 1e-9);
        assert!((fit2.intercept - fit.intercept - 7.3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn rate_fit_validates_inputs() {
        assert!(rate_fit(&[(0.1, 1.0), (0.05, 0.5)]).is_err());
        assert!(rate_fit(&[(0.1, 1.0), (0.05, 0.5), (0.02, -0.1), (0.01, 0.1)]).is_err());
    }

    #[test]
    fn energy_report_zero_on_wave() {
        let sw = SmoothWave::new(wave(), 0.3).unwrap();
        let cfg = SolverConfig {
            epsilon: 0.02,
            a: 2.0 / 3.0,
            b: 2.0 / 3.0,
            k: 0.2,
            half_width: 12.0,
            nx: 401,
            cfl: 0.4,
            t_end: 1.0,
            snapshot_interval: 0.5,
            transport: TransportLaw::default(),
            closure: ElectronClosure::boltzmann(1.0).unwrap(),
            left: EulerState::new(1.0, 0.0, 1.5).unwrap(),
            rho_plus: 1.1,
            delta0: 2.0,
            force: true,
        };
        let hist: Vec<FluidField> = [0.5, 1.0, 1.5]
            .iter()
            .map(|&t| field_from_wave(&sw, t, 401, 12.0))
            .collect();
        let reports = fluid_energy_report(&hist, &sw, &cfg).unwrap();
        for r in &reports {
            assert!(r.fluid_e.abs() < 1e-18, "fluid_e = {}", r.fluid_e);
            assert!(r.fluid_d.abs() < 1e-18);
            assert!(r.fluid_e >= 0.0 && r.fluid_d >= 0.0 && r.q3 >= 0.0);
        }
    }

    #[test]
    fn energy_report_positive_off_wave() {
        let sw = SmoothWave::new(wave(), 0.3).unwrap();
        let cfg = SolverConfig {
            epsilon: 0.02,
            a: 2.0 / 3.0,
            b: 2.0 / 3.0,
            k: 0.2,
            half_width: 12.0,
            nx: 401,
            cfl: 0.4,
            t_end: 1.0,
            snapshot_interval: 0.5,
            transport: TransportLaw::default(),
            closure: ElectronClosure::boltzmann(1.0).unwrap(),
            left: EulerState::new(1.0, 0.0, 1.5).unwrap(),
            rho_plus: 1.1,
            delta0: 2.0,
            force: true,
        };
        let hist: Vec<FluidField> = [0.5, 1.0, 1.5]
            .iter()
            .map(|&t| {
                let mut f = field_from_wave(&sw, t, 401, 12.0);
                for i in 0..f.grid.nx {
                    f.rho[i] += 1e-3 * (-f.grid.x(i).powi(2)).exp();
                }
                f
            })
            .collect();
        let reports = fluid_energy_report(&hist, &sw, &cfg).unwrap();
        for r in &reports {
            assert!(r.fluid_e > 0.0);
        }
    }

    #[test]
    fn lemma71_exponents_for_all_p() {
        let sw = SmoothWave::new(wave(), 0.1).unwrap();
        let ts: Vec<f64> = (0..12)
            .map(|i| 10.0 * sw.delta * (100.0f64).powf(i as f64 / 11.0))
            .collect();
        for (p, expect) in [(1.0, 0.0), (2.0, -0.5), (f64::INFINITY, -1.0)] {
            let fit = lemma71_decay_check(&sw, p, &ts).unwrap();
            assert!(
                (fit.exponent - expect).abs() < 0.1,
                "p = {p}: exponent {} vs {expect}",
                fit.exponent
            );
        }
    }

    #[test]
    fn lemma71_gap_and_second_derivative_ratios_bounded() {
        let ts: Vec<f64> = (0..8).map(|i| 10.0f64.powf(i as f64 * 3.0 / 7.0)).collect();
        for delta in [0.1, 0.01] {
            let sw = SmoothWave::new(wave(), delta).unwrap();
            let gap = lemma71_gap_ratio(&sw, &ts);
            assert!(gap < 3.0, "gap ratio {gap} at delta {delta}");
            let second = lemma71_second_derivative_ratio(&sw, &ts);
            assert!(second < 3.0, "second-derivative ratio {second} at delta {delta}");
        }
    }
}
