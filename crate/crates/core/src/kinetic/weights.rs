//! Velocity-time weight w(alpha, beta)(tau, v) = <v>^{2(l - |alpha| - |beta|)} e^{q(tau) <v>}
//! and the potential-driven decay q(tau) = q1 - q2 * int_0^tau q3(s) ds.

use crate::error::{Error, Result};
use crate::numerics::{deriv1, deriv2, deriv3, trapezoid};

/// Weight parameters for a fixed derivative order (alpha, beta) and the
/// current value q(tau).
#[derive(Debug, Clone, Copy)]
pub struct WeightSpec {
    pub l: f64,
    pub q1: f64,
    pub q2: f64,
    /// current q(tau); the paper regime keeps it in (0, q1]
    pub q_tau: f64,
    pub alpha: usize,
    pub beta: [usize; 3],
}

impl WeightSpec {
    pub fn new(
        l: f64,
        q1: f64,
        q2: f64,
        q_tau: f64,
        alpha: usize,
        beta: [usize; 3],
    ) -> Result<Self> {
        let spec = WeightSpec {
            l,
            q1,
            q2,
            q_tau,
            alpha,
            beta,
        };
        if !(q1 > 0.0 && q2 > 0.0) {
            return Err(Error::Config(format!("q1, q2 must be positive, got {q1}, {q2}")));
        }
        if !(0.0..=q1).contains(&q_tau) {
            return Err(Error::Config(format!(
                "q(tau) = {q_tau} outside [0, q1 = {q1}]"
            )));
        }
        if l < spec.order() as f64 {
            return Err(Error::Config(format!(
                "l = {l} below |alpha| + |beta| = {}",
                spec.order()
            )));
        }
        Ok(spec)
    }

    pub fn order(&self) -> usize {
        self.alpha + self.beta[0] + self.beta[1] + self.beta[2]
    }

    /// <v>^{2(l - |alpha| - |beta|)} e^{q(tau) <v>}, <v> = sqrt(1 + |v|^2).
    pub fn weight(&self, v: [f64; 3]) -> f64 {
        let bracket = (1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        bracket.powf(2.0 * (self.l - self.order() as f64)) * (self.q_tau * bracket).exp()
    }
}

/// Sampled q(tau) together with its positivity status.
#[derive(Debug, Clone)]
pub struct QOfTau {
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    /// q at the last sample; the admissible regime needs q_infinity > 0
    pub q_end: f64,
    /// first tau where q(tau) <= 0, if the budget q1 is exhausted
    pub first_nonpositive: Option<f64>,
}

impl QOfTau {
    pub fn stays_positive(&self) -> bool {
        self.first_nonpositive.is_none()
    }
}

/// q(tau) = q1 - q2 * cumulative trapezoid of q3; flags loss of positivity.
pub fn q_of_tau(q1: f64, q2: f64, taus: &[f64], q3: &[f64]) -> Result<QOfTau> {
    if taus.len() != q3.len() || taus.len() < 2 {
        return Err(Error::Input(format!(
            "q3 needs matching tau/value samples (>= 2), got {} and {}",
            taus.len(),
            q3.len()
        )));
    }
    if taus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Input("tau grid must be strictly increasing".into()));
    }
    let mut values = Vec::with_capacity(taus.len());
    let mut integral = 0.0;
    let mut first_nonpositive = None;
    values.push(q1);
    for i in 1..taus.len() {
        integral += 0.5 * (q3[i] + q3[i - 1]) * (taus[i] - taus[i - 1]);
        let q = q1 - q2 * integral;
        if q <= 0.0 && first_nonpositive.is_none() {
            first_nonpositive = Some(taus[i]);
        }
        values.push(q);
    }
    Ok(QOfTau {
        taus: taus.to_vec(),
        values: values.clone(),
        q_end: *values.last().unwrap(),
        first_nonpositive,
    })
}

/// One potential snapshot in physical variables.
#[derive(Debug, Clone)]
pub struct PhiSnapshot {
    pub t: f64,
    pub phi: Vec<f64>,
}

/// q3 built from already-scaled norms:
/// eps^{1-a} (|phi_tau|_inf^2 + |phi_y|_inf^2 + |phi_yy|_L2^2 + |phi_yyy|_L2^2).
pub fn q3_from_scaled_norms(
    phi_tau_sup_sq: f64,
    phi_y_sup_sq: f64,
    phi_yy_l2_sq: f64,
    phi_yyy_l2_sq: f64,
    eps: f64,
    a: f64,
) -> f64 {
    eps.powf(1.0 - a) * (phi_tau_sup_sq + phi_y_sup_sq + phi_yy_l2_sq + phi_yyy_l2_sq)
}

/// q3(tau) from a history of potential snapshots on a uniform x grid with
/// spacing `h`. Inputs are physical (t, x); the scaled-variable norms are
/// recovered through the exact factors of the map (tau, y) = (t, x)/eps^a.
pub fn q3_from_fields(
    history: &[PhiSnapshot],
    eps: f64,
    a: f64,
    h: f64,
) -> Result<Vec<(f64, f64)>> {
    if history.len() < 3 {
        return Err(Error::Input(format!(
            "q3 needs at least 3 snapshots for time differencing, got {}",
            history.len()
        )));
    }
    let nx = history[0].phi.len();
    if nx < 5 {
        return Err(Error::Input("q3 needs at least 5 spatial points".into()));
    }
    if history.iter().any(|s| s.phi.len() != nx) {
        return Err(Error::Input("snapshots differ in spatial size".into()));
    }
    if history.windows(2).any(|w| w[1].t <= w[0].t) {
        return Err(Error::Input("snapshot times must be strictly increasing".into()));
    }
    let ea = eps.powf(a);
    let mut out = Vec::with_capacity(history.len());
    for i in 0..history.len() {
        // non-uniform 3-point stencil for phi_t
        let (il, ic, ir) = if i == 0 {
            (0, 1, 2)
        } else if i == history.len() - 1 {
            (history.len() - 3, history.len() - 2, history.len() - 1)
        } else {
            (i - 1, i, i + 1)
        };
        let (t0, t1, t2) = (history[il].t, history[ic].t, history[ir].t);
        let t = history[i].t;
        // Lagrange derivative of the quadratic through the three snapshots
        let d0 = (2.0 * t - t1 - t2) / ((t0 - t1) * (t0 - t2));
        let d1 = (2.0 * t - t0 - t2) / ((t1 - t0) * (t1 - t2));
        let d2 = (2.0 * t - t0 - t1) / ((t2 - t0) * (t2 - t1));
        let mut phi_t_sup: f64 = 0.0;
        for k in 0..nx {
            let dt =
                d0 * history[il].phi[k] + d1 * history[ic].phi[k] + d2 * history[ir].phi[k];
            phi_t_sup = phi_t_sup.max(dt.abs());
        }
        let phi = &history[i].phi;
        let phi_x = deriv1(phi, h);
        let phi_xx = deriv2(phi, h);
        let phi_xxx = deriv3(phi, h);
        let phi_x_sup = phi_x.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let xx_sq: Vec<f64> = phi_xx.iter().map(|x| x * x).collect();
        let xxx_sq: Vec<f64> = phi_xxx.iter().map(|x| x * x).collect();
        let l2_xx = trapezoid(&xx_sq, h);
        let l2_xxx = trapezoid(&xxx_sq, h);
        // phi_tau = eps^a phi_t, phi_y = eps^a phi_x,
        // |phi_yy|_{L2_y}^2 = eps^{3a} |phi_xx|_{L2_x}^2,
        // |phi_yyy|_{L2_y}^2 = eps^{5a} |phi_xxx|_{L2_x}^2
        let q3 = q3_from_scaled_norms(
            (ea * phi_t_sup).powi(2),
            (ea * phi_x_sup).powi(2),
            ea.powi(3) * l2_xx,
            ea.powi(5) * l2_xxx,
            eps,
            a,
        );
        out.push((t / ea, q3));
    }
    Ok(out)
}
