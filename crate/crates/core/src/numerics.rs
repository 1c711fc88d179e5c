//! Shared numerical kernels: Gauss-Legendre quadrature, bracketed root
//! finding, monotone cubic Hermite lookup, tridiagonal solves, finite
//! differences and least-squares fits.

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre polynomial. Deterministic to the last bit for a given `n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn gl15() -> &'static (Vec<f64>, Vec<f64>) {
    use std::sync::OnceLock;
    static GL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    GL.get_or_init(|| gauss_legendre(15))
}

/// Fixed 15-point Gauss-Legendre rule on [a, b].
pub fn quad_gl15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gl15();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Adaptive Gauss-Legendre quadrature with absolute tolerance `tol`.
/// Bisects panels until the whole/half discrepancy falls under the local
/// tolerance share; errors out when the recursion depth is exhausted.
pub fn quad_adaptive<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    fn recurse<F: FnMut(f64) -> f64>(
        f: &mut F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let mid = 0.5 * (a + b);
        let left = quad_gl15(f, a, mid);
        let right = quad_gl15(f, mid, b);
        let err = (left + right - whole).abs();
        // the second guard stops recursion once the discrepancy is roundoff
        if err <= tol || err <= 1e-15 * (left.abs() + right.abs()) || (b - a).abs() < 1e-300 {
            return Ok(left + right);
        }
        if depth == 0 {
            return Err(Error::Numerical(format!(
                "adaptive quadrature failed on [{a}, {b}] (last error {err:.3e}, tol {tol:.3e})"
            )));
        }
        Ok(recurse(f, a, mid, left, 0.5 * tol, depth - 1)?
            + recurse(f, mid, b, right, 0.5 * tol, depth - 1)?)
    }
    let whole = quad_gl15(f, a, b);
    recurse(f, a, b, whole, tol, 48)
}

/// Bracketed root finder: bisection seeded, switching to Newton once the
/// Newton step stays inside the bracket. `f` must change sign on [lo, hi].
pub fn bisect_newton<F, D>(mut f: F, mut df: D, lo: f64, hi: f64, tol_x: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Numerical(format!(
            "root not bracketed on [{lo}, {hi}]: f = {flo:.3e}, {fhi:.3e}"
        )));
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        if hi - lo <= tol_x {
            return Ok(0.5 * (lo + hi));
        }
        let d = df(x);
        let newton = x - fx / d;
        x = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Ok(x)
}

/// Thomas algorithm for a tridiagonal system; `diag` is consumed as scratch.
/// Bands: `lower[i]` couples row i to i-1 (lower[0] unused), `upper[i]` to
/// i+1 (last entry unused).
pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &mut [f64],
    upper: &[f64],
    rhs: &mut [f64],
) -> Result<()> {
    let n = diag.len();
    for i in 1..n {
        if diag[i - 1] == 0.0 {
            return Err(Error::Numerical("singular tridiagonal system".into()));
        }
        let m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    if diag[n - 1] == 0.0 {
        return Err(Error::Numerical("singular tridiagonal system".into()));
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
    Ok(())
}

/// Monotone cubic Hermite interpolant with analytic node derivatives.
/// Supports forward evaluation, derivative evaluation and inversion
/// (the data must be strictly increasing in both x and y).
#[derive(Debug, Clone)]
pub struct HermiteCurve {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub dys: Vec<f64>,
}

impl HermiteCurve {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, dys: Vec<f64>) -> Self {
        debug_assert!(xs.len() >= 2 && xs.len() == ys.len() && xs.len() == dys.len());
        debug_assert!(xs.windows(2).all(|w| w[1] > w[0]));
        HermiteCurve { xs, ys, dys }
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.clamp(1, self.xs.len() - 1) - 1,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let s = (x - self.xs[i]) / h;
        let (y0, y1, d0, d1) = (self.ys[i], self.ys[i + 1], self.dys[i], self.dys[i + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * h * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * h * d1
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let s = (x - self.xs[i]) / h;
        let (y0, y1, d0, d1) = (self.ys[i], self.ys[i + 1], self.dys[i], self.dys[i + 1]);
        let s2 = s * s;
        (6.0 * s2 - 6.0 * s) * (y0 - y1) / h
            + (3.0 * s2 - 4.0 * s + 1.0) * d0
            + (3.0 * s2 - 2.0 * s) * d1
    }

    /// Invert y(x) = target on an increasing curve.
    pub fn invert(&self, target: f64) -> Result<f64> {
        let n = self.xs.len();
        if target <= self.ys[0] {
            return Ok(self.xs[0]);
        }
        if target >= self.ys[n - 1] {
            return Ok(self.xs[n - 1]);
        }
        let i = match self
            .ys
            .binary_search_by(|v| v.partial_cmp(&target).unwrap())
        {
            Ok(i) => return Ok(self.xs[i]),
            Err(i) => i - 1,
        };
        let (lo, hi) = (self.xs[i], self.xs[i + 1]);
        bisect_newton(
            |x| self.eval(x) - target,
            |x| self.deriv(x),
            lo,
            hi,
            1e-15 * (hi - lo).max(1e-30),
        )
    }
}

/// Least-squares straight line through (xs, ys); returns slope, intercept
/// and the RMS residual in y.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return Err(Error::Input(format!("linear fit needs >= 2 points, got {n}")));
    }
    let nf = n as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let denom = nf * sxx - sx * sx;
    if denom == 0.0 {
        return Err(Error::Input("degenerate abscissae in linear fit".into()));
    }
    let slope = (nf * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / nf;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    Ok((slope, intercept, (rss / nf).sqrt()))
}

/// First derivative of uniformly sampled data, O(h^2): centered in the
/// interior, one-sided 3-point at the ends.
pub fn deriv1(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 3);
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    d
}

/// Second derivative of uniformly sampled data, O(h^2).
pub fn deriv2(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 4);
    let mut d = vec![0.0; n];
    let h2 = h * h;
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    }
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    d
}

/// Third derivative with the centered 5-point stencil, O(h^2); one-sided
/// 5-point stencils close the ends.
pub fn deriv3(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5);
    let mut d = vec![0.0; n];
    let h3 = h * h * h;
    for i in 2..n - 2 {
        d[i] = (-0.5 * f[i - 2] + f[i - 1] - f[i + 1] + 0.5 * f[i + 2]) / h3;
    }
    // O(h) one-sided closures; only used on decaying tails.
    d[0] = (-f[0] + 3.0 * f[1] - 3.0 * f[2] + f[3]) / h3;
    d[1] = d[0];
    d[n - 1] = (f[n - 1] - 3.0 * f[n - 2] + 3.0 * f[n - 3] - f[n - 4]) / h3;
    d[n - 2] = d[n - 1];
    d
}

/// Trapezoid rule over uniformly sampled data.
pub fn trapezoid(f: &[f64], h: f64) -> f64 {
    if f.len() < 2 {
        return 0.0;
    }
    let inner: f64 = f[1..f.len() - 1].iter().sum();
    h * (0.5 * (f[0] + f[f.len() - 1]) + inner)
}
