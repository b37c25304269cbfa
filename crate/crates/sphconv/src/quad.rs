//! Quadrature primitives: Gauss-Legendre panels, the periodic trapezoid
//! rule, a doubling convergence driver and a small cubic-spline
//! interpolant used to cache expensive radial profiles.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;

use crate::error::{Result, SphError};

/// Node counts, truncation radii and tolerances for every integral and
/// series in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Nodes on the rotation circle.
    pub n_theta: usize,
    /// Radial nodes.
    pub n_t: usize,
    /// Radial truncation.
    pub t_max: f64,
    /// Nodes for the unipotent direction.
    pub n_u: usize,
    /// Truncation of the unipotent direction.
    pub u_max: f64,
    /// Relative tolerance for convergence checks.
    pub tol: f64,
}

impl QuadratureSpec {
    pub fn new(
        n_theta: usize,
        n_t: usize,
        t_max: f64,
        n_u: usize,
        u_max: f64,
        tol: f64,
    ) -> Result<Self> {
        if n_theta < 8 || n_t < 8 || n_u < 8 {
            return Err(SphError::InvalidSpec(format!(
                "node counts must be >= 8 (got {n_theta}, {n_t}, {n_u})"
            )));
        }
        if !(t_max > 0.0) || !(u_max > 0.0) {
            return Err(SphError::InvalidSpec(format!(
                "truncation radii must be positive (got t_max={t_max}, u_max={u_max})"
            )));
        }
        if !(tol > 0.0) {
            return Err(SphError::InvalidSpec(format!("tol must be positive (got {tol})")));
        }
        Ok(Self { n_theta, n_t, t_max, n_u, u_max, tol })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            n_theta: 256,
            n_t: 160,
            t_max: 4.0,
            n_u: 160,
            u_max: 40.0,
            tol: 1e-8,
        }
    }
}

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

static GL_CACHE: Lazy<Mutex<HashMap<usize, Arc<GaussLegendre>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

impl GaussLegendre {
    /// Shared rule of degree `n`; node tables are computed once and reused.
    pub fn shared(n: usize) -> Arc<GaussLegendre> {
        let mut cache = GL_CACHE.lock().unwrap();
        cache
            .entry(n)
            .or_insert_with(|| Arc::new(GaussLegendre::compute(n)))
            .clone()
    }

    fn compute(n: usize) -> GaussLegendre {
        assert!(n >= 2, "Gauss-Legendre rule needs at least 2 nodes");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrate `f` over [a, b] with the affinely mapped rule.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Mapped nodes and weights on [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let xs = self.nodes.iter().map(|x| mid + half * x).collect();
        let ws = self.weights.iter().map(|w| w * half).collect();
        (xs, ws)
    }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Nodes of the periodic trapezoid rule on [0, period).
pub fn trapezoid_nodes(n: usize, period: f64) -> impl Iterator<Item = f64> {
    let h = period / n as f64;
    (0..n).map(move |j| j as f64 * h)
}

/// Average of `f` over one period, i.e. (1/period) * integral.
pub fn periodic_average<F: Fn(f64) -> f64>(n: usize, period: f64, f: F) -> f64 {
    let mut acc = 0.0;
    for x in trapezoid_nodes(n, period) {
        acc += f(x);
    }
    acc / n as f64
}

/// Doubles the node count until two successive evaluations agree to `tol`
/// relative (at most four doublings); errors otherwise.
pub fn converged<F: Fn(usize) -> f64>(eval: F, n0: usize, tol: f64) -> Result<f64> {
    let mut n = n0;
    let mut coarse = eval(n);
    let mut delta = f64::INFINITY;
    for _ in 0..4 {
        let fine = eval(2 * n);
        delta = (fine - coarse).abs();
        if delta <= tol * (1.0 + fine.abs()) {
            return Ok(fine);
        }
        n *= 2;
        coarse = fine;
    }
    Err(SphError::NonConvergence { nodes: n, delta, tol })
}

/// Complex-valued variant of [`converged`].
pub fn converged_c<F: Fn(usize) -> num_complex::Complex64>(
    eval: F,
    n0: usize,
    tol: f64,
) -> Result<num_complex::Complex64> {
    let mut n = n0;
    let mut coarse = eval(n);
    let mut delta = f64::INFINITY;
    for _ in 0..4 {
        let fine = eval(2 * n);
        delta = (fine - coarse).norm();
        if delta <= tol * (1.0 + fine.norm()) {
            return Ok(fine);
        }
        n *= 2;
        coarse = fine;
    }
    Err(SphError::NonConvergence { nodes: n, delta, tol })
}

/// Composite Gauss-Legendre rule: the node budget is split into panels of
/// (up to) 32 nodes, so steep but smooth integrands converge under the
/// doubling driver by panel subdivision.
pub fn composite_gl<F: Fn(f64) -> f64>(a: f64, b: f64, n_total: usize, f: F) -> f64 {
    let panels = (n_total / 32).max(1);
    let gl = GaussLegendre::shared(32.min(n_total.max(8)));
    let width = (b - a) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        acc += gl.integrate(a + p as f64 * width, a + (p + 1) as f64 * width, &f);
    }
    acc
}

/// Complex-valued composite Gauss-Legendre rule.
pub fn composite_gl_c<F: Fn(f64) -> num_complex::Complex64>(
    a: f64,
    b: f64,
    n_total: usize,
    f: F,
) -> num_complex::Complex64 {
    let panels = (n_total / 32).max(1);
    let gl = GaussLegendre::shared(32.min(n_total.max(8)));
    let width = (b - a) / panels as f64;
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let half = 0.5 * width;
        let mid = lo + half;
        for (x, w) in gl.nodes.iter().zip(&gl.weights) {
            acc += *w * f(mid + half * x);
        }
    }
    acc * (0.5 * width)
}

/// Trapezoid integral of sampled values over an arbitrary sorted grid.
pub fn trapezoid_sampled(grid: &[f64], values: &[f64]) -> f64 {
    assert_eq!(grid.len(), values.len());
    let mut acc = 0.0;
    for i in 1..grid.len() {
        acc += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
    }
    acc
}

/// Cubic spline on a uniform grid with a clamped (zero-slope) left end and
/// a natural right end; the boundary choice matches even radial profiles.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    m: Vec<f64>, // second derivatives at the knots
}

impl CubicSpline {
    pub fn fit_uniform(x0: f64, h: f64, y: Vec<f64>) -> CubicSpline {
        let n = y.len();
        assert!(n >= 4, "spline needs at least 4 knots");
        // Solve the tridiagonal system for second derivatives:
        // clamped left end (y' = 0), natural right end (y'' = 0).
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        b[0] = 2.0 * h;
        c[0] = h;
        d[0] = 6.0 * ((y[1] - y[0]) / h); // minus 6*y'(x0) = 0
        for i in 1..n - 1 {
            a[i] = h;
            b[i] = 4.0 * h;
            c[i] = h;
            d[i] = 6.0 * ((y[i + 1] - y[i]) / h - (y[i] - y[i - 1]) / h);
        }
        b[n - 1] = 1.0;
        d[n - 1] = 0.0;
        // Thomas algorithm.
        let mut m = vec![0.0; n];
        for i in 1..n {
            let w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        m[n - 1] = d[n - 1] / b[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (d[i] - c[i] * m[i + 1]) / b[i];
        }
        CubicSpline { x0, h, y, m }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        let mut s = (x - self.x0) / self.h;
        if s < 0.0 {
            s = 0.0;
        }
        let mut i = s.floor() as usize;
        if i >= n - 1 {
            i = n - 2;
        }
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let a = y0;
        let b = (y1 - y0) / self.h - self.h * (2.0 * m0 + m1) / 6.0;
        let c = m0 / 2.0;
        let d = (m1 - m0) / (6.0 * self.h);
        let t = x - self.x0 - i as f64 * self.h;
        a + b * t + c * t * t + d * t * t * t
    }
}
