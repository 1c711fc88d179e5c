//! Sweep orchestration: parameter-set validation, the epsilon sweep that
//! measures convergence toward the exact rarefaction wave, and report
//! persistence. Runs are isolated tasks; outputs are merged in the fixed
//! epsilon order so parallel execution stays byte-deterministic.

use crate::diagnostics::{rate_fit, sup_distance_to_wave, RateFit};
use crate::error::{Error, Result};
use crate::fluid::{run, SolverConfig};
use rayon::prelude::*;
use std::io::Write as _;
use std::path::Path;

/// Admissibility of the scaling exponents:
/// 2/3 <= a <= 1 when 2/3 <= b <= 1, and 4 - 5b <= a <= 1 when 3/5 <= b < 2/3.
pub fn validate_s(a: f64, b: f64) -> (bool, String) {
    if !(0.6..=1.0).contains(&b) {
        return (false, format!("b = {b} outside [3/5, 1]"));
    }
    if b >= 2.0 / 3.0 {
        if (2.0 / 3.0..=1.0).contains(&a) {
            (true, String::new())
        } else {
            (false, format!("a = {a} outside [2/3, 1] for b = {b} >= 2/3"))
        }
    } else if a >= 4.0 - 5.0 * b && a <= 1.0 {
        (true, String::new())
    } else {
        (
            false,
            format!("a = {a} outside [4 - 5b = {}, 1] for b = {b} < 2/3", 4.0 - 5.0 * b),
        )
    }
}

/// A sweep over decreasing Knudsen numbers at fixed (a, b, k).
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub epsilons: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub k: f64,
    /// initial-layer cutoff: errors are measured for t >= ell only
    pub ell: f64,
    pub base: SolverConfig,
    pub parallelism: usize,
}

impl SweepPlan {
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        if self.epsilons.is_empty() {
            return Err(Error::Config("sweep needs at least one epsilon".into()));
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("epsilon list must be strictly decreasing".into()));
        }
        if !(self.ell > 0.0) {
            return Err(Error::Config(format!(
                "initial-layer cutoff ell must be positive, got {}",
                self.ell
            )));
        }
        if self.ell >= self.base.t_end {
            return Err(Error::Config(format!(
                "ell = {} must lie below t_end = {}",
                self.ell, self.base.t_end
            )));
        }
        let (ok, reason) = validate_s(self.a, self.b);
        if !ok && !self.base.force {
            return Err(Error::Config(format!("(a, b) outside the parameter set: {reason}")));
        }
        for &eps in &self.epsilons {
            if eps >= self.k {
                warnings.push(format!(
                    "epsilon = {eps} is not small against k = {}; the rate regime assumes eps < k",
                    self.k
                ));
            }
        }
        if self.parallelism == 0 {
            return Err(Error::Config("parallelism must be at least 1".into()));
        }
        Ok(warnings)
    }

    fn config_for(&self, eps: f64) -> SolverConfig {
        let mut cfg = self.base.clone();
        cfg.epsilon = eps;
        cfg.a = self.a;
        cfg.b = self.b;
        cfg.k = self.k;
        cfg
    }
}

/// One sweep entry.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub epsilon: f64,
    pub delta: f64,
    /// sup over t in [ell, t_end] of the wave distance (max fluid component
    /// plus the potential component)
    pub error: f64,
    pub ok: bool,
    pub detail: String,
    /// per-snapshot distances (t, rho, u1, theta, phi, total) for t >= ell
    pub distances: Vec<[f64; 6]>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub fit: Option<RateFit>,
    pub target_slope: f64,
    pub warnings: Vec<String>,
    pub wall_seconds: f64,
}

fn run_one(plan: &SweepPlan, eps: f64) -> SweepRow {
    let cfg = plan.config_for(eps);
    let delta = cfg.delta().unwrap_or(f64::NAN);
    let attempt = (|| -> Result<(f64, Vec<[f64; 6]>)> {
        let exact = crate::euler::RarefactionWave::new(cfg.left, cfg.rho_plus, cfg.closure)?;
        let traj = run(&cfg, None)?;
        let mut worst: f64 = 0.0;
        let mut distances = Vec::new();
        for snap in &traj.snapshots {
            if snap.t < plan.ell - 1e-12 || snap.t == 0.0 {
                continue;
            }
            let d = sup_distance_to_wave(snap, &exact, snap.t)?;
            worst = worst.max(d.total());
            distances.push([snap.t, d.rho, d.u1, d.theta, d.phi, d.total()]);
        }
        if distances.is_empty() {
            return Err(Error::Config(
                "no snapshots at or after the cutoff ell; lower ell or extend t_end".into(),
            ));
        }
        Ok((worst, distances))
    })();
    match attempt {
        Ok((error, distances)) => SweepRow {
            epsilon: eps,
            delta,
            error,
            ok: true,
            detail: String::new(),
            distances,
        },
        Err(e) => SweepRow {
            epsilon: eps,
            delta,
            error: f64::NAN,
            ok: false,
            detail: e.to_string(),
            distances: Vec::new(),
        },
    }
}

/// Execute the sweep, optionally writing eps_table.csv, fit.csv, manifest.txt
/// and one subdirectory per run into `out_dir`.
pub fn sweep(plan: &SweepPlan, out_dir: Option<&Path>) -> Result<SweepReport> {
    let started = std::time::Instant::now();
    let mut warnings = plan.validate()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.parallelism)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let rows: Vec<SweepRow> =
        pool.install(|| plan.epsilons.par_iter().map(|&eps| run_one(plan, eps)).collect());

    let survivors: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.ok && r.error > 0.0)
        .map(|r| (r.epsilon, r.error))
        .collect();
    for r in rows.iter().filter(|r| !r.ok) {
        warnings.push(format!("run at eps = {} failed: {}", r.epsilon, r.detail));
    }
    let fit = if survivors.len() >= 4 {
        Some(rate_fit(&survivors)?)
    } else {
        if rows.len() > 1 {
            warnings.push(format!(
                "only {} successful runs; rate fit needs at least 4, skipped",
                survivors.len()
            ));
        } else {
            warnings.push("single-epsilon plan: rate fit skipped".into());
        }
        None
    };
    let report = SweepReport {
        rows,
        fit,
        target_slope: 0.6 - 0.4 * plan.a,
        warnings,
        wall_seconds: started.elapsed().as_secs_f64(),
    };
    if let Some(dir) = out_dir {
        write_sweep_artifacts(plan, &report, dir)?;
    }
    Ok(report)
}

fn write_sweep_artifacts(plan: &SweepPlan, report: &SweepReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut table = String::from("epsilon,delta,error,fitted,status\n");
    for r in &report.rows {
        let fitted = report
            .fit
            .map(|f| f.predict(r.epsilon).to_string())
            .unwrap_or_default();
        let status = if r.ok { "ok" } else { "failed" };
        table.push_str(&format!(
            "{},{},{},{fitted},{status}\n",
            r.epsilon, r.delta, r.error
        ));
    }
    std::fs::write(dir.join("eps_table.csv"), table)?;

    let mut fit_csv = String::from("slope,intercept,residual,target_slope\n");
    if let Some(f) = report.fit {
        fit_csv.push_str(&format!(
            "{},{},{},{}\n",
            f.slope, f.intercept, f.residual, report.target_slope
        ));
    } else {
        fit_csv.push_str(&format!(",,,{}\n", report.target_slope));
    }
    std::fs::write(dir.join("fit.csv"), fit_csv)?;

    for (idx, r) in report.rows.iter().enumerate() {
        let sub = dir.join(format!("run_{idx:03}"));
        std::fs::create_dir_all(&sub)?;
        let mut dist = String::from("t,err_rho,err_u1,err_theta,err_phi,total\n");
        for row in &r.distances {
            dist.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row[0], row[1], row[2], row[3], row[4], row[5]
            ));
        }
        std::fs::write(sub.join("distance.csv"), dist)?;
        let cfg = plan.config_for(r.epsilon);
        let mut mf = std::fs::File::create(sub.join("manifest.txt"))?;
        crate::fluid::write_config_keys(&mut mf, &cfg)?;
        writeln!(mf, "status = {}", if r.ok { "ok" } else { "failed" })?;
        if !r.detail.is_empty() {
            writeln!(mf, "detail = {}", r.detail)?;
        }
    }

    let mut mf = std::fs::File::create(dir.join("manifest.txt"))?;
    writeln!(mf, "sweep.epsilons = {:?}", plan.epsilons)?;
    writeln!(mf, "sweep.a = {}", plan.a)?;
    writeln!(mf, "sweep.b = {}", plan.b)?;
    writeln!(mf, "sweep.k = {}", plan.k)?;
    writeln!(mf, "sweep.ell = {}", plan.ell)?;
    writeln!(mf, "sweep.parallelism = {}", plan.parallelism)?;
    writeln!(mf, "sweep.target_slope = {}", report.target_slope)?;
    crate::fluid::write_config_keys(&mut mf, &plan.base)?;
    writeln!(mf, "wall_seconds = {:.3}", report.wall_seconds)?;
    for w in &report.warnings {
        writeln!(mf, "warning = {w}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closures::ElectronClosure;
    use crate::euler::EulerState;
    use crate::fluid::TransportLaw;

    #[test]
    fn parameter_set_examples() {
        assert!(validate_s(2.0 / 3.0, 2.0 / 3.0).0);
        assert!(validate_s(0.9, 0.62).0); // 4 - 5*0.62 = 0.9 exactly
        assert!(!validate_s(0.5, 1.0).0);
        assert!(!validate_s(0.89, 0.62).0);
        assert!(validate_s(1.0, 0.6).0);
        assert!(!validate_s(0.99, 0.6).0);
        assert!(!validate_s(0.7, 0.5).0);
    }

    fn tiny_plan() -> SweepPlan {
        SweepPlan {
            epsilons: vec![0.09, 0.07],
            a: 2.0 / 3.0,
            b: 2.0 / 3.0,
            k: 0.2,
            ell: 0.5,
            base: SolverConfig {
                epsilon: 0.09,
                a: 2.0 / 3.0,
                b: 2.0 / 3.0,
                k: 0.2,
                half_width: 8.0,
                nx: 201,
                cfl: 0.4,
                t_end: 1.0,
                snapshot_interval: 0.5,
                transport: TransportLaw::default(),
                closure: ElectronClosure::boltzmann(1.0).unwrap(),
                left: EulerState::new(1.0, 0.0, 1.5).unwrap(),
                rho_plus: 1.05,
                delta0: 3.0,
                force: true,
            },
            parallelism: 1,
        }
    }

    #[test]
    fn small_sweep_runs_and_skips_fit() {
        let report = sweep(&tiny_plan(), None).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert!(report.rows.iter().all(|r| r.ok), "{:?}", report.rows);
        assert!(report.fit.is_none());
        assert!(report
            .warnings
            .iter()
            .any(|w| w.contains("rate fit") || w.contains("successful runs")));
        assert!((report.target_slope - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn plan_validation_failures() {
        let mut p = tiny_plan();
        p.epsilons = vec![0.05, 0.07];
        assert!(p.validate().is_err());
        let mut p = tiny_plan();
        p.ell = 0.0;
        assert!(p.validate().is_err());
        let mut p = tiny_plan();
        p.base.force = false;
        p.a = 0.5;
        assert!(p.validate().is_err());
        let mut p = tiny_plan();
        p.epsilons = vec![0.3, 0.25];
        let warnings = p.validate().unwrap();
        assert!(warnings.iter().any(|w| w.contains("not small against k")));
    }
}
