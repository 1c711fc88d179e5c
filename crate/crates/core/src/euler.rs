//! Exact Riemann solver for the isentropic quasineutral Euler system:
//! eigenvalues, the 3-rarefaction curve and the self-similar fan.
//!
//! The gas constant is fixed at R = 2/3 so that the internal energy equals
//! the temperature. With entropy S = -(2/3) ln rho + ln(4 pi theta / 3) + 1
//! held at its common value S_*, the thermal pressure is
//! P = exp(S_* - 1)/(2 pi) * rho^(5/3) and the full sound speed also carries
//! the electron pressure dP^phi/drho of the closure.

use crate::closures::ElectronClosure;
use crate::error::{Error, Result};
use crate::numerics::{bisect_newton, quad_adaptive, HermiteCurve};

/// Gas constant R, fixed so that the internal energy is theta itself.
pub const GAS_CONSTANT: f64 = 2.0 / 3.0;

/// A constant fluid state with transverse velocities pinned to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerState {
    pub rho: f64,
    pub u1: f64,
    pub theta: f64,
}

impl EulerState {
    pub fn new(rho: f64, u1: f64, theta: f64) -> Result<Self> {
        if !(rho > 0.0) || !(theta > 0.0) || !rho.is_finite() || !theta.is_finite() {
            return Err(Error::State(format!(
                "Euler state needs rho > 0 and theta > 0, got rho = {rho}, theta = {theta}"
            )));
        }
        Ok(EulerState { rho, u1, theta })
    }

    /// Macroscopic entropy S = -(2/3) ln rho + ln(4 pi theta / 3) + 1.
    pub fn entropy(&self) -> f64 {
        -2.0 / 3.0 * self.rho.ln() + (4.0 * std::f64::consts::PI / 3.0 * self.theta).ln() + 1.0
    }
}

/// exp(S - 1) / (2 pi): P = K rho^(5/3) and theta = (3/2) K rho^(2/3).
pub fn pressure_coefficient(s_star: f64) -> f64 {
    (s_star - 1.0).exp() / (2.0 * std::f64::consts::PI)
}

/// Isentropic temperature theta(rho) = (3/2) K(S_*) rho^(2/3).
pub fn isentropic_theta(rho: f64, s_star: f64) -> f64 {
    1.5 * pressure_coefficient(s_star) * rho.powf(2.0 / 3.0)
}

/// Squared sound speed dP/drho + dP^phi/drho at entropy S_*.
pub fn sound_speed_sq(rho: f64, s_star: f64, closure: &ElectronClosure) -> Result<f64> {
    let thermal = 5.0 / 3.0 * pressure_coefficient(s_star) * rho.powf(2.0 / 3.0);
    Ok(thermal + closure.dp_phi_drho(rho)?)
}

/// d(c^2)/drho at fixed entropy.
fn sound_speed_sq_drho(rho: f64, s_star: f64, closure: &ElectronClosure) -> Result<f64> {
    Ok(10.0 / 9.0 * pressure_coefficient(s_star) * rho.powf(-1.0 / 3.0)
        + closure.d2p_phi_drho2(rho)?)
}

/// d^2(c^2)/drho^2 at fixed entropy.
fn sound_speed_sq_d2rho(rho: f64, s_star: f64, closure: &ElectronClosure) -> Result<f64> {
    Ok(-10.0 / 27.0 * pressure_coefficient(s_star) * rho.powf(-4.0 / 3.0)
        + closure.d3p_phi_drho3(rho)?)
}

/// Characteristic speed lambda_i of the 3x3 system; i in {1, 2, 3}.
pub fn lambda(i: usize, state: &EulerState, closure: &ElectronClosure) -> Result<f64> {
    let c = sound_speed_sq(state.rho, state.entropy(), closure)?.sqrt();
    match i {
        1 => Ok(state.u1 - c),
        2 => Ok(state.u1),
        3 => Ok(state.u1 + c),
        _ => Err(Error::Input(format!("eigenvalue index {i} not in 1..=3"))),
    }
}

/// Integrand sqrt(c^2(rho)) / rho of the 3-Riemann invariant.
fn curve_integrand(rho: f64, s_star: f64, closure: &ElectronClosure) -> Result<f64> {
    Ok(sound_speed_sq(rho, s_star, closure)?.sqrt() / rho)
}

/// Connect a right state to `left` through a 3-rarefaction with the given
/// downstream density. The velocity jump is the curve integral (adaptive
/// quadrature, abs tol 1e-10) and the temperature follows the isentrope.
pub fn r3_connect(
    left: &EulerState,
    rho_plus: f64,
    closure: &ElectronClosure,
) -> Result<EulerState> {
    if rho_plus < left.rho {
        return Err(Error::NotARarefaction(format!(
            "rho_plus = {rho_plus} < rho_minus = {}; a 3-rarefaction needs rho_plus >= rho_minus",
            left.rho
        )));
    }
    if rho_plus == left.rho {
        return Ok(*left);
    }
    let s_star = left.entropy();
    let mut failed = None;
    let du = quad_adaptive(
        &mut |r| match curve_integrand(r, s_star, closure) {
            Ok(v) => v,
            Err(e) => {
                failed = Some(e);
                0.0
            }
        },
        left.rho,
        rho_plus,
        1e-12,
    )?;
    if let Some(e) = failed {
        return Err(e);
    }
    EulerState::new(rho_plus, left.u1 + du, isentropic_theta(rho_plus, s_star))
}

/// Precomputed 3-rarefaction curve rho -> (u1, lambda3) with analytic node
/// derivatives; evaluation via cubic Hermite and a guarded direct-quadrature
/// fallback for queries off the node range.
#[derive(Debug, Clone)]
pub struct R3Curve {
    s_star: f64,
    closure: ElectronClosure,
    rho_lo: f64,
    rho_hi: f64,
    u1_lo: f64,
    u1_curve: Option<HermiteCurve>,
    lam3_nodes: Vec<f64>,
    rho_nodes: Vec<f64>,
}

impl R3Curve {
    fn build(left: &EulerState, rho_plus: f64, closure: ElectronClosure) -> Result<Self> {
        let s_star = left.entropy();
        let span = rho_plus - left.rho;
        if span == 0.0 {
            return Ok(R3Curve {
                s_star,
                closure,
                rho_lo: left.rho,
                rho_hi: rho_plus,
                u1_lo: left.u1,
                u1_curve: None,
                lam3_nodes: vec![],
                rho_nodes: vec![],
            });
        }
        let n = ((span * 2048.0) as usize).clamp(256, 4096);
        let mut rhos = Vec::with_capacity(n + 1);
        let mut u1s = Vec::with_capacity(n + 1);
        let mut du1s = Vec::with_capacity(n + 1);
        let mut lam3s = Vec::with_capacity(n + 1);
        let mut u1 = left.u1;
        for k in 0..=n {
            let rho = left.rho + span * k as f64 / n as f64;
            if k > 0 {
                let prev = rhos[k - 1];
                let mut failed = None;
                u1 += quad_adaptive(
                    &mut |r| match curve_integrand(r, s_star, &closure) {
                        Ok(v) => v,
                        Err(e) => {
                            failed = Some(e);
                            0.0
                        }
                    },
                    prev,
                    rho,
                    1e-14,
                )?;
                if let Some(e) = failed {
                    return Err(e);
                }
            }
            let c = sound_speed_sq(rho, s_star, &closure)?.sqrt();
            rhos.push(rho);
            u1s.push(u1);
            du1s.push(c / rho);
            lam3s.push(u1 + c);
        }
        Ok(R3Curve {
            s_star,
            closure,
            rho_lo: left.rho,
            rho_hi: rho_plus,
            u1_lo: left.u1,
            u1_curve: Some(HermiteCurve::new(rhos.clone(), u1s, du1s)),
            lam3_nodes: lam3s,
            rho_nodes: rhos,
        })
    }

    pub fn s_star(&self) -> f64 {
        self.s_star
    }

    /// Node spacing of the lookup; used to decide when to fall back to
    /// direct quadrature.
    fn spacing(&self) -> f64 {
        if self.rho_nodes.len() < 2 {
            0.0
        } else {
            self.rho_nodes[1] - self.rho_nodes[0]
        }
    }

    /// u1 along the curve; Hermite inside the node range, direct quadrature
    /// outside it (plus one node spacing of slack).
    pub fn u1_of_rho(&self, rho: f64) -> Result<f64> {
        match &self.u1_curve {
            None => Ok(self.u1_lo),
            Some(curve) => {
                if rho >= self.rho_lo - self.spacing() && rho <= self.rho_hi + self.spacing() {
                    if rho >= self.rho_lo && rho <= self.rho_hi {
                        return Ok(curve.eval(rho));
                    }
                }
                let mut failed = None;
                let du = quad_adaptive(
                    &mut |r| match curve_integrand(r, self.s_star, &self.closure) {
                        Ok(v) => v,
                        Err(e) => {
                            failed = Some(e);
                            0.0
                        }
                    },
                    self.rho_lo,
                    rho,
                    1e-12,
                )?;
                match failed {
                    Some(e) => Err(e),
                    None => Ok(self.u1_lo + du),
                }
            }
        }
    }

    pub fn lambda3_of_rho(&self, rho: f64) -> Result<f64> {
        Ok(self.u1_of_rho(rho)? + sound_speed_sq(rho, self.s_star, &self.closure)?.sqrt())
    }

    /// d lambda3 / d rho = c/rho + c'(rho) > 0 (genuine nonlinearity).
    pub fn dlambda3_drho(&self, rho: f64) -> Result<f64> {
        let c2 = sound_speed_sq(rho, self.s_star, &self.closure)?;
        let c = c2.sqrt();
        let dc = sound_speed_sq_drho(rho, self.s_star, &self.closure)? / (2.0 * c);
        Ok(c / rho + dc)
    }

    pub fn du1_drho(&self, rho: f64) -> Result<f64> {
        Ok(sound_speed_sq(rho, self.s_star, &self.closure)?.sqrt() / rho)
    }

    pub fn d2u1_drho2(&self, rho: f64) -> Result<f64> {
        let c2 = sound_speed_sq(rho, self.s_star, &self.closure)?;
        let c = c2.sqrt();
        let dc = sound_speed_sq_drho(rho, self.s_star, &self.closure)? / (2.0 * c);
        Ok(dc / rho - c / (rho * rho))
    }

    pub fn d2lambda3_drho2(&self, rho: f64) -> Result<f64> {
        let c2 = sound_speed_sq(rho, self.s_star, &self.closure)?;
        let c = c2.sqrt();
        let d1 = sound_speed_sq_drho(rho, self.s_star, &self.closure)?;
        let d2 = sound_speed_sq_d2rho(rho, self.s_star, &self.closure)?;
        let ddc = d2 / (2.0 * c) - d1 * d1 / (4.0 * c2 * c);
        Ok(self.d2u1_drho2(rho)? + ddc)
    }

    /// Solve lambda3(rho) = xi on the curve: bracketed bisection seeded from
    /// the node table, polished by Newton.
    pub fn rho_of_lambda3(&self, xi: f64) -> Result<f64> {
        if self.u1_curve.is_none() {
            return Ok(self.rho_lo);
        }
        let lam = &self.lam3_nodes;
        if xi <= lam[0] {
            return Ok(self.rho_lo);
        }
        if xi >= lam[lam.len() - 1] {
            return Ok(self.rho_hi);
        }
        let seg = match lam.binary_search_by(|v| v.partial_cmp(&xi).unwrap()) {
            Ok(i) => return Ok(self.rho_nodes[i]),
            Err(i) => i - 1,
        };
        let (lo, hi) = (self.rho_nodes[seg], self.rho_nodes[seg + 1]);
        bisect_newton(
            |rho| self.lambda3_of_rho(rho).unwrap_or(f64::NAN) - xi,
            |rho| self.dlambda3_drho(rho).unwrap_or(f64::NAN),
            lo,
            hi,
            1e-15 * self.rho_hi.max(1.0),
        )
    }
}

/// A point of the (rho, u1, theta, phi) wave profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePoint {
    pub rho: f64,
    pub u1: f64,
    pub theta: f64,
    pub phi: f64,
}

/// The self-similar 3-rarefaction wave connecting two constant states on a
/// common isentrope. Immutable after construction; evaluation is read-only.
#[derive(Debug, Clone)]
pub struct RarefactionWave {
    pub left: EulerState,
    pub right: EulerState,
    pub s_star: f64,
    pub closure: ElectronClosure,
    /// lambda3 at the left state: left edge of the fan in xi = x/t.
    pub xi_lo: f64,
    /// lambda3 at the right state: right edge of the fan.
    pub xi_hi: f64,
    curve: R3Curve,
}

impl RarefactionWave {
    pub fn new(left: EulerState, rho_plus: f64, closure: ElectronClosure) -> Result<Self> {
        // validates rho range before any quadrature touches it
        closure.rho_e_inv(left.rho)?;
        closure.rho_e_inv(rho_plus)?;
        let right = r3_connect(&left, rho_plus, &closure)?;
        let curve = R3Curve::build(&left, rho_plus, closure)?;
        let xi_lo = lambda(3, &left, &closure)?;
        let xi_hi = lambda(3, &right, &closure)?;
        Ok(RarefactionWave {
            left,
            right,
            s_star: left.entropy(),
            closure,
            xi_lo,
            xi_hi,
            curve,
        })
    }

    pub fn curve(&self) -> &R3Curve {
        &self.curve
    }

    fn point_from_state(&self, s: &EulerState) -> Result<WavePoint> {
        Ok(WavePoint {
            rho: s.rho,
            u1: s.u1,
            theta: s.theta,
            phi: self.closure.rho_e_inv(s.rho)?,
        })
    }

    fn point_from_rho(&self, rho: f64) -> Result<WavePoint> {
        Ok(WavePoint {
            rho,
            u1: self.curve.u1_of_rho(rho)?,
            theta: isentropic_theta(rho, self.s_star),
            phi: self.closure.rho_e_inv(rho)?,
        })
    }

    /// Evaluate the fan at similarity coordinate xi = x/t. Total on the
    /// reals: constant states outside [xi_lo, xi_hi].
    pub fn eval(&self, xi: f64) -> WavePoint {
        if xi <= self.xi_lo {
            return self.point_from_state(&self.left).expect("left state in range");
        }
        if xi >= self.xi_hi {
            return self
                .point_from_state(&self.right)
                .expect("right state in range");
        }
        let rho = self
            .curve
            .rho_of_lambda3(xi)
            .expect("monotone curve inversion");
        self.point_from_rho(rho).expect("curve density in range")
    }

    /// Wave strength |drho| + |du1| + |dtheta|.
    pub fn strength(&self) -> f64 {
        (self.right.rho - self.left.rho).abs()
            + (self.right.u1 - self.left.u1).abs()
            + (self.right.theta - self.left.theta).abs()
    }

    pub fn is_zero_strength(&self) -> bool {
        self.right.rho == self.left.rho
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boltz() -> ElectronClosure {
        ElectronClosure::boltzmann(1.0).unwrap()
    }

    fn left_ref() -> EulerState {
        EulerState::new(1.0, 0.0, 1.5).unwrap()
    }

    #[test]
    fn entropy_examples() {
        let s = left_ref().entropy();
        assert!((s - ((2.0 * std::f64::consts::PI).ln() + 1.0)).abs() < 1e-14);
        let e = std::f64::consts::E;
        let s = EulerState::new(e.powi(3), 0.0, 3.0 / (4.0 * std::f64::consts::PI) * e)
            .unwrap()
            .entropy();
        assert!(s.abs() < 1e-14);
    }

    #[test]
    fn entropy_is_invariant_under_isentropic_scaling() {
        let a = EulerState::new(1.3, 0.2, 1.1).unwrap();
        let b = EulerState::new(8.0 * 1.3, 0.2, 4.0 * 1.1).unwrap();
        assert!((a.entropy() - b.entropy()).abs() < 1e-13);
    }

    #[test]
    fn sound_speed_sq_reference_value() {
        // At (rho, theta) = (1, 3/2): S = ln(2 pi) + 1, thermal part 5/3,
        // Boltzmann electron part 1, total 8/3.
        let s_star = left_ref().entropy();
        let c2 = sound_speed_sq(1.0, s_star, &boltz()).unwrap();
        assert!((c2 - 8.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn sound_speed_sq_matches_pressure_finite_difference() {
        let closure = ElectronClosure::gamma_law(1.0, 2.0).unwrap();
        let s_star = left_ref().entropy();
        let total_p = |rho: f64| {
            pressure_coefficient(s_star) * rho.powf(5.0 / 3.0) + closure.p_phi(rho).unwrap()
        };
        for rho in [0.8, 1.0, 1.7] {
            let h = 1e-5;
            let fd = (total_p(rho + h) - total_p(rho - h)) / (2.0 * h);
            let c2 = sound_speed_sq(rho, s_star, &closure).unwrap();
            assert!((fd - c2).abs() < 1e-6 * c2);
        }
    }

    #[test]
    fn sound_speed_monotone_in_rho_for_boltzmann() {
        let s_star = left_ref().entropy();
        let mut prev = 0.0;
        for i in 0..50 {
            let rho = 0.5 + i as f64 * 0.05;
            let c2 = sound_speed_sq(rho, s_star, &boltz()).unwrap();
            assert!(c2 > prev);
            prev = c2;
        }
    }

    #[test]
    fn eigenvalues_are_ordered_and_symmetric() {
        let st = left_ref();
        let l1 = lambda(1, &st, &boltz()).unwrap();
        let l2 = lambda(2, &st, &boltz()).unwrap();
        let l3 = lambda(3, &st, &boltz()).unwrap();
        assert!(l1 < l2 && l2 < l3);
        assert!((l1 + l3).abs() < 1e-14); // static state: symmetric fan
        let c2 = sound_speed_sq(st.rho, st.entropy(), &boltz()).unwrap();
        assert!((l3 - l1 - 2.0 * c2.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn r3_connect_zero_strength_is_identity() {
        let right = r3_connect(&left_ref(), 1.0, &boltz()).unwrap();
        assert_eq!(right, left_ref());
    }

    #[test]
    fn r3_connect_rejects_compression() {
        assert!(matches!(
            r3_connect(&left_ref(), 0.9, &boltz()),
            Err(Error::NotARarefaction(_))
        ));
    }

    #[test]
    fn r3_connect_matches_midpoint_oracle() {
        // brute-force midpoint rule with 1e6 panels
        let left = left_ref();
        let closure = boltz();
        let s_star = left.entropy();
        let (a, b) = (1.0, 1.1);
        let n = 1_000_000usize;
        let h = (b - a) / n as f64;
        let mut oracle = 0.0;
        for i in 0..n {
            let r = a + (i as f64 + 0.5) * h;
            oracle += sound_speed_sq(r, s_star, &closure).unwrap().sqrt() / r * h;
        }
        let right = r3_connect(&left, b, &closure).unwrap();
        assert!((right.u1 - left.u1 - oracle).abs() < 1e-8);
        assert!(right.u1 > left.u1 && right.theta > left.theta);
        assert!((right.entropy() - s_star).abs() < 1e-10);
    }

    #[test]
    fn lambda3_strictly_increases_along_curve() {
        let wave = RarefactionWave::new(left_ref(), 1.1, boltz()).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=200 {
            let rho = 1.0 + 0.1 * i as f64 / 200.0;
            let lam = wave.curve().lambda3_of_rho(rho).unwrap();
            assert!(lam > prev);
            assert!(wave.curve().dlambda3_drho(rho).unwrap() > 0.0);
            prev = lam;
        }
    }

    #[test]
    fn wave_eval_outside_fan_returns_end_states() {
        let wave = RarefactionWave::new(left_ref(), 1.1, boltz()).unwrap();
        let p = wave.eval(wave.xi_lo - 5.0);
        assert_eq!((p.rho, p.u1, p.theta), (1.0, 0.0, 1.5));
        let p = wave.eval(wave.xi_hi + 3.0);
        assert_eq!(p.rho, 1.1);
    }

    #[test]
    fn zero_strength_wave_is_constant() {
        let wave = RarefactionWave::new(left_ref(), 1.0, boltz()).unwrap();
        for xi in [-10.0, 0.0, 1.6, 42.0] {
            let p = wave.eval(xi);
            assert_eq!((p.rho, p.u1, p.theta), (1.0, 0.0, 1.5));
        }
        assert_eq!(wave.strength(), 0.0);
    }

    #[test]
    fn defining_equation_residual_inside_fan() {
        let wave = RarefactionWave::new(left_ref(), 1.1, boltz()).unwrap();
        for i in 1..100 {
            let xi = wave.xi_lo + (wave.xi_hi - wave.xi_lo) * i as f64 / 100.0;
            let p = wave.eval(xi);
            let st = EulerState::new(p.rho, p.u1, p.theta).unwrap();
            let lam3 = lambda(3, &st, &boltz()).unwrap();
            assert!(
                (lam3 - xi).abs() < 1e-10,
                "lambda3 residual {} at xi = {xi}",
                lam3 - xi
            );
        }
    }

    #[test]
    fn riemann_invariants_constant_along_fan() {
        let wave = RarefactionWave::new(left_ref(), 1.1, boltz()).unwrap();
        let closure = boltz();
        let s_star = wave.s_star;
        for i in 0..1000 {
            let xi = wave.xi_lo + (wave.xi_hi - wave.xi_lo) * (i as f64 + 0.5) / 1000.0;
            let p = wave.eval(xi);
            let s = EulerState::new(p.rho, p.u1, p.theta).unwrap().entropy();
            assert!((s - s_star).abs() < 1e-8);
            // independent quadrature for the second invariant
            let integral = quad_adaptive(
                &mut |r| sound_speed_sq(r, s_star, &closure).unwrap().sqrt() / r,
                1.0,
                p.rho,
                1e-12,
            )
            .unwrap();
            assert!((p.u1 - integral).abs() < 1e-8);
        }
    }

    #[test]
    fn profile_components_nondecreasing_in_xi() {
        let wave = RarefactionWave::new(left_ref(), 1.1, boltz()).unwrap();
        let mut prev = wave.eval(wave.xi_lo - 1.0);
        for i in 0..300 {
            let xi = wave.xi_lo - 0.05 + (wave.xi_hi - wave.xi_lo + 0.1) * i as f64 / 299.0;
            let p = wave.eval(xi);
            assert!(p.rho >= prev.rho - 1e-13);
            assert!(p.u1 >= prev.u1 - 1e-13);
            assert!(p.theta >= prev.theta - 1e-13);
            assert!(p.phi >= prev.phi - 1e-13);
            prev = p;
        }
    }

    #[test]
    fn quasineutral_consistency_of_phi() {
        let closure = ElectronClosure::gamma_law(1.0, 2.0).unwrap();
        let wave = RarefactionWave::new(left_ref(), 1.08, closure).unwrap();
        for i in 0..100 {
            let xi = wave.xi_lo + (wave.xi_hi - wave.xi_lo) * i as f64 / 99.0;
            let p = wave.eval(xi);
            assert!((closure.rho_e(p.phi).unwrap() - p.rho).abs() < 1e-10 * p.rho);
        }
    }

    #[test]
    fn strength_examples() {
        let wave = RarefactionWave::new(left_ref(), 1.1, boltz()).unwrap();
        let expected =
            0.1 + (wave.right.u1 - 0.0) + (wave.right.theta - 1.5);
        assert!((wave.strength() - expected).abs() < 1e-14);
        // Galilean shift of both velocities leaves the strength unchanged
        let shifted_left = EulerState::new(1.0, 7.3, 1.5).unwrap();
        let shifted = RarefactionWave::new(shifted_left, 1.1, boltz()).unwrap();
        assert!((shifted.strength() - wave.strength()).abs() < 1e-12);
    }
}
