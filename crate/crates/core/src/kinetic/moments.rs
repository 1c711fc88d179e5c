//! Local Maxwellians, fluid moments, the orthonormal macroscopic basis and
//! the projections P0 / P1, plus the Burnett functions.

use super::grid::VelocityGrid;
use crate::error::{Error, Result};
use crate::euler::GAS_CONSTANT;

/// Fluid state with a full velocity vector; rho > 0, theta > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroState {
    pub rho: f64,
    pub u: [f64; 3],
    pub theta: f64,
}

impl MacroState {
    pub fn new(rho: f64, u: [f64; 3], theta: f64) -> Result<Self> {
        if !(rho > 0.0) || !(theta > 0.0) {
            return Err(Error::State(format!(
                "macro state needs rho > 0 and theta > 0, got rho = {rho}, theta = {theta}"
            )));
        }
        Ok(MacroState { rho, u, theta })
    }

    /// Temperature window 1 < theta < 3 assumed by the a priori regime;
    /// a warning condition, not a hard error.
    pub fn in_paper_regime(&self) -> bool {
        self.theta > 1.0 && self.theta < 3.0
    }
}

/// Local Maxwellian M_[rho,u,theta](v) with R = 2/3.
pub fn maxwellian(ms: &MacroState, v: [f64; 3]) -> f64 {
    let two_r_theta = 2.0 * GAS_CONSTANT * ms.theta;
    let dv2 = (v[0] - ms.u[0]).powi(2) + (v[1] - ms.u[1]).powi(2) + (v[2] - ms.u[2]).powi(2);
    ms.rho * (std::f64::consts::PI * two_r_theta).powf(-1.5) * (-dv2 / two_r_theta).exp()
}

pub fn maxwellian_field(grid: &VelocityGrid, ms: &MacroState) -> Vec<f64> {
    grid.field(|v| maxwellian(ms, v))
}

/// The five collision-invariant moments of a gridded distribution together
/// with the recovered fluid state (internal energy E = theta).
#[derive(Debug, Clone, Copy)]
pub struct Moments {
    pub rho: f64,
    pub momentum: [f64; 3],
    pub energy: f64,
    pub state: MacroState,
}

/// Quadrature moments of F >= 0. Fails when the boundary-shell mass exceeds
/// 1e-8 of the total (the tail is not contained in the box) or the recovered
/// density/temperature are nonpositive.
pub fn moments(grid: &VelocityGrid, f: &[f64]) -> Result<Moments> {
    let rho = grid.integrate(f);
    if !(rho > 0.0) {
        return Err(Error::DegenerateMoments(format!("recovered rho = {rho}")));
    }
    let tail = grid.boundary_mass(f);
    if tail > 1e-8 * rho.abs() {
        return Err(Error::DegenerateMoments(format!(
            "tail mass {tail:.3e} exceeds 1e-8 of total {rho:.3e}; enlarge the velocity box"
        )));
    }
    let mut mom = [0.0; 3];
    let mut energy = 0.0;
    for idx in 0..grid.len() {
        let v = grid.node(idx);
        let w = f[idx] * grid.quad_weight(idx);
        mom[0] += v[0] * w;
        mom[1] += v[1] * w;
        mom[2] += v[2] * w;
        energy += 0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) * w;
    }
    let u = [mom[0] / rho, mom[1] / rho, mom[2] / rho];
    let theta = energy / rho - 0.5 * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    if !(theta > 0.0) {
        return Err(Error::DegenerateMoments(format!("recovered theta = {theta}")));
    }
    Ok(Moments {
        rho,
        momentum: mom,
        energy,
        state: MacroState { rho, u, theta },
    })
}

/// The orthonormal basis chi_0..chi_4 of the macroscopic kernel space and
/// the same functions divided by M (pure polynomials, used for the inner
/// products so no Gaussian division happens numerically).
pub struct ChiBasis {
    pub chi: [Vec<f64>; 5],
    pub chi_over_m: [Vec<f64>; 5],
}

pub fn chi_basis(grid: &VelocityGrid, ms: &MacroState) -> ChiBasis {
    let m = maxwellian_field(grid, ms);
    let r_theta = GAS_CONSTANT * ms.theta;
    let sqrt_rho = ms.rho.sqrt();
    let mut chi: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; grid.len()]);
    let mut chi_over_m: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; grid.len()]);
    for idx in 0..grid.len() {
        let v = grid.node(idx);
        let dv = [v[0] - ms.u[0], v[1] - ms.u[1], v[2] - ms.u[2]];
        let dv2 = dv[0] * dv[0] + dv[1] * dv[1] + dv[2] * dv[2];
        let p0 = 1.0 / sqrt_rho;
        let p4 = (dv2 / r_theta - 3.0) / (6.0 * ms.rho).sqrt();
        let polys = [
            p0,
            dv[0] / (r_theta * ms.rho).sqrt(),
            dv[1] / (r_theta * ms.rho).sqrt(),
            dv[2] / (r_theta * ms.rho).sqrt(),
            p4,
        ];
        for (k, p) in polys.into_iter().enumerate() {
            chi_over_m[k][idx] = p;
            chi[k][idx] = p * m[idx];
        }
    }
    ChiBasis { chi, chi_over_m }
}

/// Gram matrix <chi_i, chi_j / M>; the identity up to quadrature error.
pub fn gram_matrix(grid: &VelocityGrid, ms: &MacroState) -> [[f64; 5]; 5] {
    let basis = chi_basis(grid, ms);
    let mut g = [[0.0; 5]; 5];
    for i in 0..5 {
        for j in i..5 {
            let val = grid.inner(&basis.chi[i], &basis.chi_over_m[j]);
            g[i][j] = val;
            g[j][i] = val;
        }
    }
    g
}

/// Macroscopic projection P0 h = sum_i <h, chi_i / M> chi_i.
pub fn project_p0(grid: &VelocityGrid, h: &[f64], ms: &MacroState) -> Vec<f64> {
    let basis = chi_basis(grid, ms);
    let mut out = vec![0.0; grid.len()];
    for i in 0..5 {
        let coeff = grid.inner(h, &basis.chi_over_m[i]);
        for (o, c) in out.iter_mut().zip(&basis.chi[i]) {
            *o += coeff * c;
        }
    }
    out
}

/// Microscopic projection P1 h = h - P0 h.
pub fn project_p1(grid: &VelocityGrid, h: &[f64], ms: &MacroState) -> Vec<f64> {
    let p0 = project_p0(grid, h, ms);
    h.iter().zip(p0).map(|(a, b)| a - b).collect()
}

/// Which Burnett function to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Burnett {
    /// A_hat_j(w) = (|w|^2 - 5)/2 * w_j
    A { j: usize },
    /// B_hat_ij(w) = w_i w_j - delta_ij |w|^2 / 3
    B { i: usize, j: usize },
}

/// Burnett function evaluated at the peculiar velocity w = (v - u)/sqrt(R theta).
pub fn burnett_hat(kind: Burnett, ms: &MacroState, v: [f64; 3]) -> f64 {
    let scale = (GAS_CONSTANT * ms.theta).sqrt();
    let w = [
        (v[0] - ms.u[0]) / scale,
        (v[1] - ms.u[1]) / scale,
        (v[2] - ms.u[2]) / scale,
    ];
    let w2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
    match kind {
        Burnett::A { j } => 0.5 * (w2 - 5.0) * w[j],
        Burnett::B { i, j } => w[i] * w[j] - if i == j { w2 / 3.0 } else { 0.0 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> VelocityGrid {
        VelocityGrid::new(8.0, 64).unwrap()
    }

    fn reference_state() -> MacroState {
        MacroState::new(1.0, [0.0; 3], 1.5).unwrap()
    }

    #[test]
    fn maxwellian_reference_peak() {
        // (1, 0, 3/2) with R = 2/3 is the global Maxwellian (2 pi)^{-3/2} e^{-|v|^2/2}
        let ms = reference_state();
        let expect = (2.0 * std::f64::consts::PI).powf(-1.5);
        assert!((maxwellian(&ms, [0.0; 3]) - expect).abs() < 1e-15);
        assert!(
            (maxwellian(&ms, [1.0, 2.0, 0.5])
                - expect * (-0.5f64 * (1.0 + 4.0 + 0.25)).exp())
            .abs()
                < 1e-16
        );
    }

    #[test]
    fn maxwellian_moments_roundtrip() {
        let g = grid();
        let ms = MacroState::new(1.2, [0.1, 0.0, -0.05], 1.4).unwrap();
        let f = maxwellian_field(&g, &ms);
        let mom = moments(&g, &f).unwrap();
        assert!((mom.rho - ms.rho).abs() < 1e-8);
        for k in 0..3 {
            assert!((mom.state.u[k] - ms.u[k]).abs() < 1e-6);
        }
        assert!((mom.state.theta - ms.theta).abs() < 1e-6);
        // psi_4 moment equals rho (theta + |u|^2 / 2)
        let u2 = ms.u.iter().map(|x| x * x).sum::<f64>();
        assert!((mom.energy - ms.rho * (ms.theta + 0.5 * u2)).abs() < 1e-7);
    }

    #[test]
    fn moments_are_additive_over_mixtures() {
        let g = grid();
        let a = MacroState::new(0.7, [0.2, 0.0, 0.0], 1.2).unwrap();
        let b = MacroState::new(0.5, [-0.1, 0.1, 0.0], 1.8).unwrap();
        let fa = maxwellian_field(&g, &a);
        let fb = maxwellian_field(&g, &b);
        let sum: Vec<f64> = fa.iter().zip(&fb).map(|(x, y)| x + y).collect();
        let ma = moments(&g, &fa).unwrap();
        let mb = moments(&g, &fb).unwrap();
        let ms = moments(&g, &sum).unwrap();
        assert!((ms.rho - ma.rho - mb.rho).abs() < 1e-10);
        for k in 0..3 {
            assert!((ms.momentum[k] - ma.momentum[k] - mb.momentum[k]).abs() < 1e-10);
        }
        assert!((ms.energy - ma.energy - mb.energy).abs() < 1e-9);
    }

    #[test]
    fn truncated_tail_raises_degenerate_moments() {
        let g = VelocityGrid::new(4.0, 32).unwrap();
        let hot = MacroState::new(1.0, [0.0; 3], 3.0).unwrap();
        let f = maxwellian_field(&g, &hot);
        assert!(matches!(
            moments(&g, &f),
            Err(Error::DegenerateMoments(_))
        ));
    }

    #[test]
    fn gram_matrix_is_identity_reference_state() {
        let g = grid();
        let gram = gram_matrix(&g, &reference_state());
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (gram[i][j] - expect).abs() < 1e-8,
                    "gram[{i}][{j}] = {}",
                    gram[i][j]
                );
            }
        }
    }

    #[test]
    fn gram_matrix_is_identity_shifted_state() {
        let g = grid();
        let ms = MacroState::new(1.2, [0.1, 0.0, 0.0], 1.4).unwrap();
        let gram = gram_matrix(&g, &ms);
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((gram[i][j] - expect).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn chi0_inner_product_with_mass_invariant() {
        let g = grid();
        let ms = MacroState::new(1.44, [0.0, 0.05, 0.0], 1.3).unwrap();
        let basis = chi_basis(&g, &ms);
        let ones = vec![1.0; g.len()];
        // <chi_0, psi_0> = integral of M / sqrt(rho) = sqrt(rho)
        let val = g.inner(&basis.chi[0], &ones);
        assert!((val - ms.rho.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn p0_fixes_the_maxwellian() {
        let g = grid();
        let ms = MacroState::new(1.1, [0.05, 0.0, 0.0], 1.6).unwrap();
        let m = maxwellian_field(&g, &ms);
        let p0m = project_p0(&g, &m, &ms);
        let err = m
            .iter()
            .zip(&p0m)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-7, "P0 M deviates from M by {err}");
    }

    /// Deterministic family of smooth decaying test functions.
    fn test_function(g: &VelocityGrid, seed: usize) -> Vec<f64> {
        let c = 0.1 + 0.13 * seed as f64;
        g.field(|v| {
            let v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            (1.0 + c * v[0] + 0.3 * v[1] * v[2] + 0.05 * v2 * (seed as f64).sin())
                * (-0.4 * v2).exp()
        })
    }

    #[test]
    fn projection_algebra_on_test_functions() {
        let g = grid();
        let ms = MacroState::new(1.0, [0.1, -0.05, 0.0], 1.45).unwrap();
        for seed in 0..4 {
            let h = test_function(&g, seed);
            let p0 = project_p0(&g, &h, &ms);
            let p00 = project_p0(&g, &p0, &ms);
            let p1 = project_p1(&g, &h, &ms);
            let p01 = project_p0(&g, &p1, &ms);
            let sup = |a: &[f64], b: &[f64]| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max)
            };
            assert!(sup(&p00, &p0) < 1e-7, "P0 not idempotent");
            let zero = vec![0.0; g.len()];
            assert!(sup(&p01, &zero) < 1e-7, "P0 P1 != 0");
        }
    }

    #[test]
    fn microscopic_part_has_zero_invariants() {
        let g = grid();
        let ms = MacroState::new(1.0, [0.0, 0.0, 0.1], 1.5).unwrap();
        let h = test_function(&g, 2);
        let p1 = project_p1(&g, &h, &ms);
        for psi in 0..5 {
            let val = match psi {
                0 => g.integrate(&p1),
                1..=3 => {
                    let w = g.field(|v| v[psi - 1]);
                    g.inner(&p1, &w)
                }
                _ => {
                    let w = g.field(|v| 0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]));
                    g.inner(&p1, &w)
                }
            };
            assert!(val.abs() < 1e-7, "<P1 h, psi_{psi}> = {val}");
        }
    }

    #[test]
    fn burnett_hat_root_and_trace() {
        let ms = reference_state();
        // R theta = 1 at the reference state, so w = v
        let v = [5f64.sqrt(), 0.0, 0.0];
        assert!(burnett_hat(Burnett::A { j: 0 }, &ms, v).abs() < 1e-14);
        for v in [[0.3, -1.2, 2.0], [1.0, 1.0, 1.0]] {
            let trace: f64 = (0..3)
                .map(|i| burnett_hat(Burnett::B { i, j: i }, &ms, v))
                .sum();
            assert!(trace.abs() < 1e-14);
        }
    }

    #[test]
    fn burnett_a_is_microscopic() {
        let g = grid();
        let ms = MacroState::new(1.1, [0.12, 0.0, 0.0], 1.4).unwrap();
        let m = maxwellian_field(&g, &ms);
        let a1m: Vec<f64> = (0..g.len())
            .map(|idx| burnett_hat(Burnett::A { j: 0 }, &ms, g.node(idx)) * m[idx])
            .collect();
        for psi in 0..5 {
            let val = match psi {
                0 => g.integrate(&a1m),
                1..=3 => {
                    let w = g.field(|v| v[psi - 1]);
                    g.inner(&a1m, &w)
                }
                _ => {
                    let w = g.field(|v| 0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]));
                    g.inner(&a1m, &w)
                }
            };
            assert!(val.abs() < 1e-7, "<A_1 M, psi_{psi}> = {val}");
        }
    }
}
