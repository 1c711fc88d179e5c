//! Screened nonlinear Poisson solve -lambda^2 phi'' = rho - rho_e(phi) with
//! Dirichlet far-field data, by damped Newton on the second-order
//! discretization with a tridiagonal Jacobian. When Newton stalls the Debye
//! length is continued down a halving ladder from 10x its target value.

use crate::closures::ElectronClosure;
use crate::error::{Error, Result};
use crate::numerics::solve_tridiagonal;

/// Residual F(phi) = -lambda^2 D2 phi - (rho - rho_e(phi)) - source on the
/// interior nodes; boundary entries are zero (Dirichlet).
fn residual(
    phi: &[f64],
    rho: &[f64],
    lambda_sq: f64,
    closure: &ElectronClosure,
    source: Option<&[f64]>,
    h: f64,
    out: &mut [f64],
) -> Result<f64> {
    let n = phi.len();
    let h2 = h * h;
    let mut sup = 0.0f64;
    out[0] = 0.0;
    out[n - 1] = 0.0;
    for i in 1..n - 1 {
        let lap = (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / h2;
        let s = source.map_or(0.0, |s| s[i]);
        let f = -lambda_sq * lap - rho[i] + closure.rho_e(phi[i])? - s;
        out[i] = f;
        sup = sup.max(f.abs());
    }
    Ok(sup)
}

fn in_domain(phi: &[f64], closure: &ElectronClosure) -> bool {
    let (lo, hi) = closure.phi_bounds();
    phi.iter().all(|&p| p > lo && p < hi)
}

/// Newton iteration at a fixed Debye length; errors on stall.
#[allow(clippy::too_many_arguments)]
fn newton(
    phi: &mut Vec<f64>,
    rho: &[f64],
    lambda_sq: f64,
    closure: &ElectronClosure,
    source: Option<&[f64]>,
    h: f64,
    tol: f64,
    max_iter: usize,
) -> Result<()> {
    let n = phi.len();
    let h2 = h * h;
    let mut f = vec![0.0; n];
    let mut res = residual(phi, rho, lambda_sq, closure, source, h, &mut f)?;
    for _ in 0..max_iter {
        if res <= tol {
            return Ok(());
        }
        // interior Jacobian: -lambda^2 D2 + diag(rho_e'(phi))
        let m = n - 2;
        let mut diag = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        let lower = vec![-lambda_sq / h2; m];
        let upper = vec![-lambda_sq / h2; m];
        for i in 0..m {
            diag[i] = 2.0 * lambda_sq / h2 + closure.drho_e(phi[i + 1])?;
            rhs[i] = -f[i + 1];
        }
        solve_tridiagonal(&lower, &mut diag, &upper, &mut rhs)?;
        // damped update: halve the step until the residual drops and the
        // iterate stays inside the closure domain
        let mut t = 1.0;
        let mut accepted = false;
        let mut trial = phi.clone();
        for _ in 0..30 {
            for i in 0..m {
                trial[i + 1] = phi[i + 1] + t * rhs[i];
            }
            if in_domain(&trial, closure) {
                let new_res = residual(&trial, rho, lambda_sq, closure, source, h, &mut f)?;
                if new_res < res * (1.0 - 0.25 * t) || new_res <= tol {
                    phi.clone_from(&trial);
                    res = new_res;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::Numerical(format!(
                "Newton stalled at residual {res:.3e} (tol {tol:.3e})"
            )));
        }
    }
    if res <= tol {
        Ok(())
    } else {
        Err(Error::Numerical(format!(
            "Newton did not converge: residual {res:.3e} > tol {tol:.3e}"
        )))
    }
}

/// Solve the screened Poisson problem. `phi_bc` is the Dirichlet data,
/// consistent with rho = rho_e(phi) at the far fields. With `lambda_sq = 0`
/// the equation degenerates to the quasineutral relation and is solved
/// algebraically. An optional manufactured `source` is added to the residual
/// and an optional `guess` replaces the quasineutral initial iterate.
pub fn poisson_solve(
    rho: &[f64],
    lambda_sq: f64,
    closure: &ElectronClosure,
    phi_bc: (f64, f64),
    h: f64,
    source: Option<&[f64]>,
    guess: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let n = rho.len();
    if n < 3 {
        return Err(Error::Input("Poisson solve needs at least 3 nodes".into()));
    }
    if let Some(s) = source {
        if s.len() != n {
            return Err(Error::Input("Poisson source length mismatch".into()));
        }
    }
    if lambda_sq == 0.0 {
        let mut phi = Vec::with_capacity(n);
        for (i, &r) in rho.iter().enumerate() {
            let s = source.map_or(0.0, |s| s[i]);
            phi.push(closure.rho_e_inv(r + s)?);
        }
        phi[0] = phi_bc.0;
        phi[n - 1] = phi_bc.1;
        return Ok(phi);
    }

    let scale = 1.0 + rho.iter().fold(0.0f64, |m, &r| m.max(r.abs()));
    let tol = 1e-10 * scale;
    let mut phi = match guess {
        Some(g) if g.len() == n => g.to_vec(),
        _ => {
            let mut p = Vec::with_capacity(n);
            for &r in rho {
                p.push(closure.rho_e_inv(r)?);
            }
            p
        }
    };
    phi[0] = phi_bc.0;
    phi[n - 1] = phi_bc.1;

    match newton(&mut phi, rho, lambda_sq, closure, source, h, tol, 60) {
        Ok(()) => Ok(phi),
        Err(_) => {
            // continuation: walk lambda^2 down from 100x the target
            // (10x the length), halving, reusing each converged iterate
            let mut phi = Vec::with_capacity(n);
            for &r in rho {
                phi.push(closure.rho_e_inv(r)?);
            }
            phi[0] = phi_bc.0;
            phi[n - 1] = phi_bc.1;
            let mut ladder = 100.0 * lambda_sq;
            loop {
                let target = ladder.max(lambda_sq);
                newton(
                    &mut phi, rho, target, closure, source, h, tol, 60,
                )
                .map_err(|e| {
                    Error::Numerical(format!(
                        "continuation exhausted at lambda^2 = {target:.3e}: {e}"
                    ))
                })?;
                if target == lambda_sq {
                    return Ok(phi);
                }
                ladder *= 0.5;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boltz() -> ElectronClosure {
        ElectronClosure::boltzmann(1.0).unwrap()
    }

    fn grid(n: usize, l: f64) -> (Vec<f64>, f64) {
        let h = 2.0 * l / (n - 1) as f64;
        ((0..n).map(|i| -l + i as f64 * h).collect(), h)
    }

    #[test]
    fn uniform_density_gives_zero_potential() {
        let (xs, h) = grid(201, 10.0);
        let rho = vec![1.0; xs.len()];
        let phi = poisson_solve(&rho, 0.01, &boltz(), (0.0, 0.0), h, None, None).unwrap();
        for p in phi {
            assert!(p.abs() < 1e-12);
        }
    }

    /// Dense Gaussian elimination on the full matrix: an independent linear
    /// oracle for the screened equation -lambda^2 phi'' + phi = rho - 1.
    fn dense_linear_oracle(rho: &[f64], lambda_sq: f64, h: f64) -> Vec<f64> {
        let n = rho.len();
        let m = n - 2;
        let mut a = vec![vec![0.0f64; m]; m];
        let mut b = vec![0.0f64; m];
        let c = lambda_sq / (h * h);
        for i in 0..m {
            a[i][i] = 2.0 * c + 1.0;
            if i > 0 {
                a[i][i - 1] = -c;
            }
            if i + 1 < m {
                a[i][i + 1] = -c;
            }
            b[i] = rho[i + 1] - 1.0;
        }
        // partial-pivot elimination
        for col in 0..m {
            let mut piv = col;
            for r in col + 1..m {
                if a[r][col].abs() > a[piv][col].abs() {
                    piv = r;
                }
            }
            a.swap(col, piv);
            b.swap(col, piv);
            for r in col + 1..m {
                let f = a[r][col] / a[col][col];
                for k in col..m {
                    a[r][k] -= f * a[col][k];
                }
                b[r] -= f * b[col];
            }
        }
        for col in (0..m).rev() {
            let mut s = b[col];
            for k in col + 1..m {
                s -= a[col][k] * b[k];
            }
            b[col] = s / a[col][col];
        }
        let mut phi = vec![0.0; n];
        phi[1..(m + 1)].copy_from_slice(&b[..m]);
        phi
    }

    #[test]
    fn small_bump_matches_dense_linear_oracle() {
        let (xs, h) = grid(401, 10.0);
        let rho: Vec<f64> = xs
            .iter()
            .map(|&x| 1.0 + 1e-4 * (-x * x).exp())
            .collect();
        let lambda_sq = 0.04;
        let phi = poisson_solve(&rho, lambda_sq, &boltz(), (0.0, 0.0), h, None, None).unwrap();
        let oracle = dense_linear_oracle(&rho, lambda_sq, h);
        let sup_phi = oracle.iter().fold(0.0f64, |m, &p| m.max(p.abs()));
        let gap = phi
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        // difference carries only the quadratic nonlinearity and Newton tol
        assert!(
            gap <= 1e-6 * (1.0 + sup_phi),
            "nonlinear vs linear-oracle gap {gap:.3e}"
        );
    }

    #[test]
    fn quasineutral_limit_gap_decreases() {
        let (xs, h) = grid(801, 10.0);
        let closure = boltz();
        let rho: Vec<f64> = xs
            .iter()
            .map(|&x| 1.0 + 0.1 * (-x * x / 2.0).exp())
            .collect();
        let mut prev = f64::INFINITY;
        for lambda in [1e-1, 1e-2, 1e-3, 1e-4] {
            let phi = poisson_solve(
                &rho,
                lambda * lambda,
                &closure,
                (0.0, 0.0),
                h,
                None,
                None,
            )
            .unwrap();
            // interior sup-gap to the quasineutral potential
            let lo = xs.len() / 10;
            let hi = xs.len() - lo;
            let gap = (lo..hi)
                .map(|i| (phi[i] - closure.rho_e_inv(rho[i]).unwrap()).abs())
                .fold(0.0, f64::max);
            assert!(gap < prev, "gap {gap:.3e} did not decrease at lambda {lambda}");
            prev = gap;
        }
        assert!(prev < 1e-7);
    }

    #[test]
    fn large_amplitude_engages_damping_or_continuation() {
        let (xs, h) = grid(401, 8.0);
        let closure = boltz();
        let rho: Vec<f64> = xs
            .iter()
            .map(|&x| 1.0 + 5.0 * (-(x * x) / 0.5).exp())
            .collect();
        let phi = poisson_solve(&rho, 1.0, &closure, (0.0, 0.0), h, None, None).unwrap();
        // verify the residual directly
        let mut f = vec![0.0; xs.len()];
        let res = residual(&phi, &rho, 1.0, &closure, None, h, &mut f).unwrap();
        assert!(res <= 1e-10 * 7.0);
    }

    #[test]
    fn gamma_law_bc_consistency() {
        let closure = ElectronClosure::gamma_law(1.0, 2.0).unwrap();
        let (xs, h) = grid(301, 10.0);
        // smooth transition between two far-field densities
        let rho: Vec<f64> = xs.iter().map(|&x| 1.05 + 0.05 * (x / 2.0).tanh()).collect();
        let bc = (
            closure.rho_e_inv(rho[0]).unwrap(),
            closure.rho_e_inv(rho[xs.len() - 1]).unwrap(),
        );
        let phi = poisson_solve(&rho, 0.01, &closure, bc, h, None, None).unwrap();
        assert_eq!(phi[0], bc.0);
        assert_eq!(phi[xs.len() - 1], bc.1);
        // solution should sit near the quasineutral potential
        for i in 0..xs.len() {
            let qn = closure.rho_e_inv(rho[i]).unwrap();
            assert!((phi[i] - qn).abs() < 0.05);
        }
    }
}
