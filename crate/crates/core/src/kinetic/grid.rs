//! Uniform tensor-product velocity grid on [-V, V]^3 with trapezoid
//! quadrature. A uniform grid keeps the error behavior of the non-Gaussian
//! weights (powers of <v>, exp(q<v>)) predictable and makes the collision
//! frequency cacheable per node.

use crate::error::{Error, Result};

/// Reference global Maxwellian mu = (2 pi)^{-3/2} exp(-|v|^2 / 2).
pub fn reference_maxwellian(v: [f64; 3]) -> f64 {
    let v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    (2.0 * std::f64::consts::PI).powf(-1.5) * (-0.5 * v2).exp()
}

#[derive(Debug, Clone)]
pub struct VelocityGrid {
    pub v_max: f64,
    /// nodes per axis
    pub n: usize,
    pub h: f64,
    axis: Vec<f64>,
    w1: Vec<f64>,
}

impl VelocityGrid {
    pub fn new(v_max: f64, n: usize) -> Result<Self> {
        if !(v_max > 0.0) {
            return Err(Error::Config(format!("v_max must be positive, got {v_max}")));
        }
        if n < 16 {
            return Err(Error::Config(format!("need at least 16 nodes per axis, got {n}")));
        }
        let h = 2.0 * v_max / (n - 1) as f64;
        let axis: Vec<f64> = (0..n).map(|i| -v_max + i as f64 * h).collect();
        let mut w1 = vec![h; n];
        w1[0] = 0.5 * h;
        w1[n - 1] = 0.5 * h;
        let grid = VelocityGrid { v_max, n, h, axis, w1 };
        if v_max >= 8.0 && n >= 64 {
            let mass = grid.integrate_fn(reference_maxwellian);
            if (mass - 1.0).abs() > 1e-8 {
                return Err(Error::Numerical(format!(
                    "grid fails the Maxwellian mass check: integral = {mass}"
                )));
            }
        }
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn node(&self, idx: usize) -> [f64; 3] {
        let n = self.n;
        let k = idx % n;
        let j = (idx / n) % n;
        let i = idx / (n * n);
        [self.axis[i], self.axis[j], self.axis[k]]
    }

    #[inline]
    pub fn quad_weight(&self, idx: usize) -> f64 {
        let n = self.n;
        let k = idx % n;
        let j = (idx / n) % n;
        let i = idx / (n * n);
        self.w1[i] * self.w1[j] * self.w1[k]
    }

    /// Sample a function of velocity on every node.
    pub fn field<F: Fn([f64; 3]) -> f64>(&self, f: F) -> Vec<f64> {
        (0..self.len()).map(|idx| f(self.node(idx))).collect()
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.len());
        let mut acc = 0.0;
        for (idx, &v) in f.iter().enumerate() {
            acc += v * self.quad_weight(idx);
        }
        acc
    }

    pub fn integrate_fn<F: Fn([f64; 3]) -> f64>(&self, f: F) -> f64 {
        (0..self.len())
            .map(|idx| f(self.node(idx)) * self.quad_weight(idx))
            .sum()
    }

    /// Integral of the product f * g.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.len());
        debug_assert_eq!(g.len(), self.len());
        let mut acc = 0.0;
        for idx in 0..self.len() {
            acc += f[idx] * g[idx] * self.quad_weight(idx);
        }
        acc
    }

    /// Quadrature mass sitting on the outermost node shell; used to detect
    /// distributions that do not decay inside the box.
    pub fn boundary_mass(&self, f: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for idx in 0..self.len() {
            let k = idx % n;
            let j = (idx / n) % n;
            let i = idx / (n * n);
            if i == 0 || i == n - 1 || j == 0 || j == n - 1 || k == 0 || k == n - 1 {
                acc += f[idx].abs() * self.quad_weight(idx);
            }
        }
        acc
    }

    /// Velocity gradient by centered differences, one-sided O(h^2) closures
    /// at the box boundary.
    pub fn gradient(&self, f: &[f64]) -> [Vec<f64>; 3] {
        debug_assert_eq!(f.len(), self.len());
        let n = self.n;
        let h = self.h;
        let strides = [n * n, n, 1usize];
        let mut out = [vec![0.0; f.len()], vec![0.0; f.len()], vec![0.0; f.len()]];
        for idx in 0..f.len() {
            let pos = [idx / (n * n), (idx / n) % n, idx % n];
            for axis in 0..3 {
                let s = strides[axis];
                let p = pos[axis];
                out[axis][idx] = if p == 0 {
                    (-3.0 * f[idx] + 4.0 * f[idx + s] - f[idx + 2 * s]) / (2.0 * h)
                } else if p == n - 1 {
                    (3.0 * f[idx] - 4.0 * f[idx - s] + f[idx - 2 * s]) / (2.0 * h)
                } else {
                    (f[idx + s] - f[idx - s]) / (2.0 * h)
                };
            }
        }
        out
    }
}
