//! Electron density closures rho_e(phi) and the pressure they induce on the
//! ion density under quasineutrality.
//!
//! Two closures are supported: the classical Boltzmann relation
//! rho_e(phi) = exp(phi/A_e) and the gamma-law family
//! rho_e(phi) = (1 + (gamma-1)/gamma * phi/A_e)^(1/(gamma-1)), which tends to
//! the Boltzmann relation as gamma -> 1. Both are normalized to rho_e(0) = 1,
//! strictly increasing, and log-concave (rho * rho'' <= rho'^2), which is
//! exactly what makes the induced pressure P^phi increasing and convex.

use crate::error::{Error, Result};
use crate::numerics::quad_adaptive;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureKind {
    Boltzmann,
    GammaLaw,
}

/// An electron density closure together with its admissible potential
/// interval (phi_min, phi_max).
#[derive(Debug, Clone, Copy)]
pub struct ElectronClosure {
    pub kind: ClosureKind,
    pub a_e: f64,
    /// Adiabatic exponent; only meaningful for the gamma-law kind.
    pub gamma_e: f64,
    pub phi_min: f64,
    pub phi_max: f64,
}

impl ElectronClosure {
    pub fn boltzmann(a_e: f64) -> Result<Self> {
        if !(a_e > 0.0) || !a_e.is_finite() {
            return Err(Error::Config(format!("A_e must be positive, got {a_e}")));
        }
        Ok(ElectronClosure {
            kind: ClosureKind::Boltzmann,
            a_e,
            gamma_e: 1.0,
            phi_min: f64::NEG_INFINITY,
            phi_max: f64::INFINITY,
        })
    }

    /// Gamma-law closure with phi_min = -gamma_e A_e / (gamma_e - 1).
    /// gamma_e = 1 collapses to the Boltzmann relation.
    pub fn gamma_law(a_e: f64, gamma_e: f64) -> Result<Self> {
        if !(a_e > 0.0) || !a_e.is_finite() {
            return Err(Error::Config(format!("A_e must be positive, got {a_e}")));
        }
        if !(gamma_e >= 1.0) || !gamma_e.is_finite() {
            return Err(Error::Config(format!("gamma_e must be >= 1, got {gamma_e}")));
        }
        if gamma_e == 1.0 {
            return Self::boltzmann(a_e);
        }
        Ok(ElectronClosure {
            kind: ClosureKind::GammaLaw,
            a_e,
            gamma_e,
            phi_min: -gamma_e * a_e / (gamma_e - 1.0),
            phi_max: f64::INFINITY,
        })
    }

    pub fn phi_bounds(&self) -> (f64, f64) {
        (self.phi_min, self.phi_max)
    }

    /// Range (rho_m, rho_M) of rho_e; (0, inf) for both supported kinds.
    pub fn rho_range(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn check_phi(&self, phi: f64) -> Result<()> {
        if !(phi > self.phi_min && phi < self.phi_max) {
            return Err(Error::ClosureDomain(format!(
                "phi = {phi} outside admissible interval ({}, {})",
                self.phi_min, self.phi_max
            )));
        }
        Ok(())
    }

    fn check_rho(&self, rho: f64) -> Result<()> {
        let (lo, hi) = self.rho_range();
        if !(rho > lo && rho < hi) {
            return Err(Error::ClosureRange(format!(
                "rho = {rho} outside closure range ({lo}, {hi})"
            )));
        }
        Ok(())
    }

    /// 1 + (gamma-1)/gamma * phi/A_e, the base of the gamma-law power.
    fn gamma_base(&self, phi: f64) -> f64 {
        1.0 + (self.gamma_e - 1.0) / self.gamma_e * phi / self.a_e
    }

    /// Electron density rho_e(phi).
    pub fn rho_e(&self, phi: f64) -> Result<f64> {
        self.check_phi(phi)?;
        Ok(match self.kind {
            ClosureKind::Boltzmann => (phi / self.a_e).exp(),
            ClosureKind::GammaLaw => self.gamma_base(phi).powf(1.0 / (self.gamma_e - 1.0)),
        })
    }

    /// Analytic first derivative rho_e'(phi).
    pub fn drho_e(&self, phi: f64) -> Result<f64> {
        self.check_phi(phi)?;
        Ok(match self.kind {
            ClosureKind::Boltzmann => (phi / self.a_e).exp() / self.a_e,
            ClosureKind::GammaLaw => {
                let g = self.gamma_e;
                self.gamma_base(phi).powf((2.0 - g) / (g - 1.0)) / (g * self.a_e)
            }
        })
    }

    /// Analytic second derivative rho_e''(phi).
    pub fn d2rho_e(&self, phi: f64) -> Result<f64> {
        self.check_phi(phi)?;
        Ok(match self.kind {
            ClosureKind::Boltzmann => (phi / self.a_e).exp() / (self.a_e * self.a_e),
            ClosureKind::GammaLaw => {
                let g = self.gamma_e;
                let a = self.a_e;
                (2.0 - g) / (g * g * a * a)
                    * self.gamma_base(phi).powf((3.0 - 2.0 * g) / (g - 1.0))
            }
        })
    }

    /// Analytic third derivative rho_e'''(phi).
    pub fn d3rho_e(&self, phi: f64) -> Result<f64> {
        self.check_phi(phi)?;
        Ok(match self.kind {
            ClosureKind::Boltzmann => (phi / self.a_e).exp() / self.a_e.powi(3),
            ClosureKind::GammaLaw => {
                let g = self.gamma_e;
                let a = self.a_e;
                (2.0 - g) * (3.0 - 2.0 * g) / (g * g * g * a * a * a)
                    * self.gamma_base(phi).powf((4.0 - 3.0 * g) / (g - 1.0))
            }
        })
    }

    /// Inverse map phi = rho_e^{-1}(rho), in closed form for both kinds.
    pub fn rho_e_inv(&self, rho: f64) -> Result<f64> {
        self.check_rho(rho)?;
        Ok(match self.kind {
            ClosureKind::Boltzmann => self.a_e * rho.ln(),
            ClosureKind::GammaLaw => {
                let g = self.gamma_e;
                g * self.a_e * (rho.powf(g - 1.0) - 1.0) / (g - 1.0)
            }
        })
    }

    /// dP^phi/drho = rho_e(phi) / rho_e'(phi) evaluated at phi = rho_e^{-1}(rho);
    /// equals rho * d(rho_e^{-1})/drho.
    pub fn dp_phi_drho(&self, rho: f64) -> Result<f64> {
        let phi = self.rho_e_inv(rho)?;
        Ok(self.rho_e(phi)? / self.drho_e(phi)?)
    }

    /// d^2 P^phi/drho^2 = (rho_e'^2 - rho_e rho_e'') / rho_e'^3 at phi(rho);
    /// nonnegative exactly when the closure is log-concave.
    pub fn d2p_phi_drho2(&self, rho: f64) -> Result<f64> {
        let phi = self.rho_e_inv(rho)?;
        let r = self.rho_e(phi)?;
        let r1 = self.drho_e(phi)?;
        let r2 = self.d2rho_e(phi)?;
        Ok((r1 * r1 - r * r2) / (r1 * r1 * r1))
    }

    /// d^3 P^phi/drho^3, by one more phi-derivative and the chain rule.
    pub fn d3p_phi_drho3(&self, rho: f64) -> Result<f64> {
        let phi = self.rho_e_inv(rho)?;
        let r = self.rho_e(phi)?;
        let r1 = self.drho_e(phi)?;
        let r2 = self.d2rho_e(phi)?;
        let r3 = self.d3rho_e(phi)?;
        Ok(((r1 * r2 - r * r3) * r1 - 3.0 * r2 * (r1 * r1 - r * r2)) / r1.powi(5))
    }

    /// Potential-induced pressure P^phi(rho) = int_1^rho dP^phi/drho, so that
    /// P^phi(1) = 0. Adaptive quadrature with absolute tolerance 1e-10.
    pub fn p_phi(&self, rho: f64) -> Result<f64> {
        self.check_rho(rho)?;
        let mut failed = None;
        let val = quad_adaptive(
            &mut |r| match self.dp_phi_drho(r) {
                Ok(v) => v,
                Err(e) => {
                    failed = Some(e);
                    0.0
                }
            },
            1.0,
            rho,
            1e-10,
        )?;
        match failed {
            Some(e) => Err(e),
            None => Ok(val),
        }
    }

    /// Verify assumption (A) pointwise on a potential grid, plus the induced
    /// convexity of P^phi. Out-of-domain points are flagged, not fatal.
    pub fn check_assumption(&self, phi_grid: &[f64]) -> AssumptionReport {
        let a1 = match self.rho_e(0.0) {
            Ok(v) => (v - 1.0).abs() <= 1e-12,
            Err(_) => false,
        };
        let mut points = Vec::with_capacity(phi_grid.len());
        for &phi in phi_grid {
            if self.check_phi(phi).is_err() {
                points.push(PointCheck {
                    phi,
                    in_domain: false,
                    a2: false,
                    a3: false,
                    a3_gap: f64::NAN,
                    pphi_convex: false,
                });
                continue;
            }
            let r = self.rho_e(phi).unwrap();
            let r1 = self.drho_e(phi).unwrap();
            let r2 = self.d2rho_e(phi).unwrap();
            let a3_gap = r * r2 - r1 * r1;
            let d2p = self.d2p_phi_drho2(r).unwrap();
            points.push(PointCheck {
                phi,
                in_domain: true,
                a2: r > 0.0 && r1 > 0.0,
                a3: a3_gap <= 1e-12 * (r1 * r1).max(1.0),
                a3_gap,
                pphi_convex: d2p >= -1e-10,
            });
        }
        AssumptionReport { a1, points }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PointCheck {
    pub phi: f64,
    pub in_domain: bool,
    /// rho_e > 0 and rho_e' > 0
    pub a2: bool,
    /// rho_e * rho_e'' <= rho_e'^2
    pub a3: bool,
    /// rho_e * rho_e'' - rho_e'^2 (zero for the Boltzmann relation)
    pub a3_gap: f64,
    /// d^2 P^phi / drho^2 >= 0 at the induced density
    pub pphi_convex: bool,
}

#[derive(Debug, Clone)]
pub struct AssumptionReport {
    pub a1: bool,
    pub points: Vec<PointCheck>,
}

impl AssumptionReport {
    /// True when A1 holds and every in-domain point passes A2, A3 and the
    /// convexity of the induced pressure.
    pub fn all_pass(&self) -> bool {
        self.a1
            && self
                .points
                .iter()
                .filter(|p| p.in_domain)
                .all(|p| p.a2 && p.a3 && p.pphi_convex)
    }

    pub fn out_of_domain(&self) -> usize {
        self.points.iter().filter(|p| !p.in_domain).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_e_is_normalized_at_zero() {
        for c in [
            ElectronClosure::boltzmann(1.0).unwrap(),
            ElectronClosure::boltzmann(3.0).unwrap(),
            ElectronClosure::gamma_law(1.0, 2.0).unwrap(),
            ElectronClosure::gamma_law(0.5, 1.4).unwrap(),
        ] {
            assert_eq!(c.rho_e(0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn boltzmann_rho_e_matches_exponential() {
        let c = ElectronClosure::boltzmann(1.0).unwrap();
        assert!((c.rho_e(2f64.ln()).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_law_value_cross_checked_by_electron_momentum_ode() {
        // d(A rho^gamma)/dx = rho dphi/dx gives drho/dphi = rho^(2-gamma)/(A gamma);
        // integrating from (phi, rho) = (0, 1) to phi = 1 must land on the
        // closed form (1 + phi/2)^1 = 1.5 for gamma = 2, A = 1.
        let (gamma, a) = (2.0, 1.0);
        let mut rho: f64 = 1.0;
        let n = 20000;
        let h = 1.0 / n as f64;
        let f = |r: f64| r.powf(2.0 - gamma) / (a * gamma);
        for _ in 0..n {
            let k1 = f(rho);
            let k2 = f(rho + 0.5 * h * k1);
            let k3 = f(rho + 0.5 * h * k2);
            let k4 = f(rho + h * k3);
            rho += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        assert!((rho - 1.5).abs() < 1e-10);
        let c = ElectronClosure::gamma_law(a, gamma).unwrap();
        assert!((c.rho_e(1.0).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn out_of_domain_phi_is_rejected() {
        let c = ElectronClosure::gamma_law(1.0, 2.0).unwrap();
        // phi_m = -2 for gamma = 2, A_e = 1
        assert!((c.phi_min - (-2.0)).abs() < 1e-15);
        assert!(matches!(c.rho_e(-2.5), Err(Error::ClosureDomain(_))));
        assert!(c.rho_e(-1.999).is_ok());
    }

    #[test]
    fn rho_e_inv_examples() {
        let c = ElectronClosure::boltzmann(1.0).unwrap();
        assert_eq!(c.rho_e_inv(1.0).unwrap(), 0.0);
        let c = ElectronClosure::boltzmann(2.0).unwrap();
        assert!((c.rho_e_inv(std::f64::consts::E).unwrap() - 2.0).abs() < 1e-14);
        let c = ElectronClosure::gamma_law(1.0, 2.0).unwrap();
        assert!((c.rho_e_inv(1.5).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn round_trip_on_log_spaced_grid() {
        for c in [
            ElectronClosure::boltzmann(0.7).unwrap(),
            ElectronClosure::gamma_law(1.3, 1.7).unwrap(),
        ] {
            for i in 0..60 {
                let rho = 10f64.powf(-2.0 + 4.0 * i as f64 / 59.0);
                let back = c.rho_e(c.rho_e_inv(rho).unwrap()).unwrap();
                assert!(
                    (back - rho).abs() <= 1e-12 * rho,
                    "round trip failed at rho = {rho}: {back}"
                );
            }
        }
    }

    #[test]
    fn dp_phi_drho_is_a_e_for_boltzmann() {
        let c = ElectronClosure::boltzmann(3.0).unwrap();
        for rho in [0.3, 1.0, 2.5, 17.0] {
            assert!((c.dp_phi_drho(rho).unwrap() - 3.0).abs() <= 1e-12 * 3.0);
        }
    }

    #[test]
    fn dp_phi_drho_matches_finite_difference_of_p_phi() {
        let c = ElectronClosure::gamma_law(1.0, 2.0).unwrap();
        let rho = 1.5;
        let h = 1e-5;
        let fd = (c.p_phi(rho + h).unwrap() - c.p_phi(rho - h).unwrap()) / (2.0 * h);
        let d = c.dp_phi_drho(rho).unwrap();
        assert!(d > 0.0);
        assert!((fd - d).abs() <= 1e-6 * d.abs());
    }

    #[test]
    fn p_phi_examples_and_midpoint_oracle() {
        let c = ElectronClosure::boltzmann(1.0).unwrap();
        assert_eq!(c.p_phi(1.0).unwrap(), 0.0);
        let c = ElectronClosure::boltzmann(2.0).unwrap();
        assert!((c.p_phi(3.0).unwrap() - 4.0).abs() < 1e-9);
        // brute-force midpoint rule with 1e6 panels as an independent oracle
        let c = ElectronClosure::gamma_law(1.0, 2.0).unwrap();
        let n = 1_000_000usize;
        let h = 1.0 / n as f64;
        let mut oracle = 0.0;
        for i in 0..n {
            oracle += c.dp_phi_drho(1.0 + (i as f64 + 0.5) * h).unwrap() * h;
        }
        assert!((c.p_phi(2.0).unwrap() - oracle).abs() < 1e-8);
    }

    #[test]
    fn higher_pressure_derivatives_match_gamma_closed_form() {
        // For the gamma law, dP^phi/drho = gamma A rho^(gamma-1).
        let (a, g) = (1.3f64, 1.8f64);
        let c = ElectronClosure::gamma_law(a, g).unwrap();
        for rho in [0.6f64, 1.0, 2.2] {
            let d1 = g * a * rho.powf(g - 1.0);
            let d2 = g * (g - 1.0) * a * rho.powf(g - 2.0);
            let d3 = g * (g - 1.0) * (g - 2.0) * a * rho.powf(g - 3.0);
            assert!((c.dp_phi_drho(rho).unwrap() - d1).abs() < 1e-12 * d1.abs());
            assert!((c.d2p_phi_drho2(rho).unwrap() - d2).abs() < 1e-11 * d2.abs().max(1.0));
            assert!((c.d3p_phi_drho3(rho).unwrap() - d3).abs() < 1e-10 * d3.abs().max(1.0));
        }
    }

    #[test]
    fn assumption_report_boltzmann_holds_with_equality() {
        let c = ElectronClosure::boltzmann(1.0).unwrap();
        let grid: Vec<f64> = (0..1000).map(|i| -5.0 + 10.0 * i as f64 / 999.0).collect();
        let rep = c.check_assumption(&grid);
        assert!(rep.all_pass());
        for p in &rep.points {
            assert!(p.a3_gap.abs() <= 1e-10, "A3 gap {} at phi {}", p.a3_gap, p.phi);
        }
    }

    #[test]
    fn assumption_report_gamma_law_passes() {
        let c = ElectronClosure::gamma_law(1.0, 2.0).unwrap();
        let grid: Vec<f64> = (0..500).map(|i| -1.9 + 11.9 * i as f64 / 499.0).collect();
        let rep = c.check_assumption(&grid);
        assert!(rep.all_pass());
        assert_eq!(rep.out_of_domain(), 0);
    }

    #[test]
    fn out_of_domain_points_are_flagged_not_fatal() {
        let c = ElectronClosure::gamma_law(1.0, 2.0).unwrap();
        let rep = c.check_assumption(&[-3.0, 0.0, 1.0]);
        assert_eq!(rep.out_of_domain(), 1);
        assert!(rep.all_pass());
    }

    #[test]
    fn gamma_law_tends_to_boltzmann() {
        let b = ElectronClosure::boltzmann(1.0).unwrap();
        let grid: Vec<f64> = (0..200).map(|i| -1.0 + 2.0 * i as f64 / 199.0).collect();
        let sup_gap = |gamma: f64| {
            let c = ElectronClosure::gamma_law(1.0, gamma).unwrap();
            grid.iter()
                .map(|&phi| (c.rho_e(phi).unwrap() - b.rho_e(phi).unwrap()).abs())
                .fold(0.0, f64::max)
        };
        let gaps: Vec<f64> = [1.1, 1.01, 1.001, 1.0001].iter().map(|&g| sup_gap(g)).collect();
        for w in gaps.windows(2) {
            assert!(w[1] < w[0], "gap not monotone: {gaps:?}");
        }
        assert!(gaps[3] < 1e-3);
    }
}
