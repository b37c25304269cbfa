//! Spherical Fourier transform, Abel transform, weighted transforms, the
//! wave-packet inversion and Plancherel identities.
//!
//! All transforms are defined against the polar Haar normalisation (radial
//! density sinh 2t, normalised rotation measure). Identities that cross
//! between polar and Iwasawa coordinates carry the measured constant
//! `kappa_h`; the inversion carries the round-trip constant `kappa_p`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bochner::SpectralMeasure;
use crate::calibration::Calibration;
use crate::error::{Result, SphError};
use crate::profile::RadialFunction;
use crate::quad::{composite_gl, composite_gl_c, converged, converged_c, trapezoid_sampled, QuadratureSpec};
use crate::spherical::{c_density_batch, phi_batch_real, phi_fast};

/// A Weyl-even spectral function sampled on a nonnegative real grid;
/// values at -lambda are implied by evenness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralFunction {
    grid: Vec<f64>,
    values: Vec<Complex64>,
}

impl SpectralFunction {
    pub fn new(grid: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(SphError::InvalidSpec(format!(
                "grid and value lengths differ ({} vs {})",
                grid.len(),
                values.len()
            )));
        }
        if grid.is_empty() || grid[0] < 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SphError::InvalidSpec(
                "spectral grid must be ascending and nonnegative".into(),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// CSV rows `lambda_re,lambda_im,value_re,value_im` at 17 significant
    /// digits, header included.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda_re,lambda_im,value_re,value_im\n");
        for (l, v) in self.grid.iter().zip(&self.values) {
            out.push_str(&format!("{l:.16e},0,{:.16e},{:.16e}\n", v.re, v.im));
        }
        out
    }
}

/// Default spectral grid: 2048 nodes on [0, 40], symmetrised by evenness.
pub fn default_spectral_grid() -> Vec<f64> {
    let n = 2048;
    (0..n).map(|i| 40.0 * i as f64 / (n - 1) as f64).collect()
}

/// Spherical Fourier transform at one parameter:
/// integral of f(t) phi_{-lambda}(t) sinh(2t) dt over [0, support].
pub fn spherical_transform(
    f: &RadialFunction,
    lambda: Complex64,
    q: &QuadratureSpec,
) -> Result<Complex64> {
    let upper = f.support_radius();
    converged_c(
        |n| {
            composite_gl_c(0.0, upper, n, |t| {
                f.eval(t) * phi_fast(-lambda, t, q) * (2.0 * t).sinh()
            })
        },
        q.n_t,
        q.tol,
    )
}

/// Transform values at arbitrary real nodes (any order, repeats allowed);
/// evenness folds each node to |lambda|.
pub fn transform_values_signed(
    f: &RadialFunction,
    nodes: &[f64],
    q: &QuadratureSpec,
) -> Result<Vec<Complex64>> {
    let folded: Vec<f64> = nodes.iter().map(|l| l.abs()).collect();
    let upper = f.support_radius();
    let sweep = |n: usize| -> Vec<Complex64> {
        let panels = (n / 32).max(1);
        let gl = crate::quad::GaussLegendre::shared(32);
        let width = upper / panels as f64;
        let mut acc = vec![Complex64::new(0.0, 0.0); folded.len()];
        for p in 0..panels {
            let (xs, ws) = gl.mapped(p as f64 * width, (p + 1) as f64 * width);
            for (t, w) in xs.iter().zip(&ws) {
                let row = phi_batch_real(&folded, *t, q);
                let scale = f.eval(*t) * (2.0 * t).sinh() * w;
                for (a, r) in acc.iter_mut().zip(&row) {
                    *a += scale * r;
                }
            }
        }
        acc
    };
    let coarse = sweep(q.n_t);
    let fine = sweep(2 * q.n_t);
    let sup: f64 = fine.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let delta: f64 = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if delta > q.tol * (1.0 + sup) {
        return Err(SphError::NonConvergence { nodes: q.n_t, delta, tol: q.tol });
    }
    Ok(fine)
}

/// The transform swept over a nonnegative real grid, sharing the radius
/// tables across the sweep; the doubling check is applied in sup-norm.
pub fn transform_on_grid(
    f: &RadialFunction,
    grid: &[f64],
    q: &QuadratureSpec,
) -> Result<SpectralFunction> {
    let values = transform_values_signed(f, grid, q)?;
    SpectralFunction::new(grid.to_vec(), values)
}

/// Abel transform A(f)(t) = e^t * integral of f(radius(a(t) n(u))) du.
///
/// The integrand vanishes once the polar radius exceeds the support, which
/// bounds the window; a `u_max` that cuts into the support is reported as
/// a truncation error.
pub fn abel_transform(f: &RadialFunction, t: f64, q: &QuadratureSpec) -> Result<f64> {
    let support = f.support_radius();
    if t.abs() >= support {
        return Ok(0.0);
    }
    let cosh_cap = (2.0 * support).cosh();
    let u_star = (-t).exp() * (2.0 * (cosh_cap - (2.0 * t).cosh())).sqrt();
    if u_star > q.u_max {
        let tail = f.eval(crate::group::polar_radius_an(t, q.u_max)).norm();
        if tail > 1e-12 {
            return Err(SphError::Truncated { value: tail });
        }
    }
    let window = u_star.min(q.u_max);
    let val = converged(
        |n| composite_gl(0.0, window, n, |u| f.eval(crate::group::polar_radius_an(t, u)).re),
        q.n_u,
        q.tol,
    )?;
    Ok(2.0 * val * t.exp())
}

/// One-dimensional Fourier integral of the Abel transform against the
/// calibrated A-measure dt / kappa_h, so that it matches
/// `spherical_transform` pointwise and collapses to the polar Haar
/// integral at lambda = -i.
pub fn fourier_of_abel(
    f: &RadialFunction,
    lambda: Complex64,
    q: &QuadratureSpec,
    cal: &Calibration,
) -> Result<Complex64> {
    let support = f.support_radius();
    // A(f) is even, so the two half-axes combine into cos(lambda t).
    let abel = |t: f64| abel_transform(f, t, q).unwrap_or(0.0);
    let val = converged_c(
        |n| composite_gl_c(0.0, support, n, |t| abel(t) * (lambda * t).cos()),
        q.n_t,
        q.tol,
    )?;
    Ok(2.0 * val / cal.kappa_h)
}

/// The weight beta_mu(t) = integral of e^{i nu t} d mu(nu): density part by
/// trapezoid, atoms literally (real nu oscillates, nu = i s on the strip
/// segment contributes e^{-s t}).
pub fn beta_weight(mu: &SpectralMeasure, t: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    if !mu.grid().is_empty() {
        let vals: Vec<Complex64> = mu
            .grid()
            .iter()
            .zip(mu.density())
            .map(|(&l, &d)| Complex64::new(0.0, l * t).exp() * d)
            .collect();
        let re: Vec<f64> = vals.iter().map(|v| v.re).collect();
        let im: Vec<f64> = vals.iter().map(|v| v.im).collect();
        acc += Complex64::new(
            trapezoid_sampled(mu.grid(), &re),
            trapezoid_sampled(mu.grid(), &im),
        );
    }
    for atom in mu.atoms() {
        acc += atom.weight * (Complex64::new(0.0, 1.0) * atom.location * t).exp();
    }
    acc
}

/// The calculus value f{phi_lambda}(e) = integral of fhat d mu.
pub fn calculus_at_identity(
    f: &RadialFunction,
    mu: &SpectralMeasure,
    q: &QuadratureSpec,
) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    if !mu.grid().is_empty() {
        let fhat = transform_values_signed(f, mu.grid(), q)?;
        let weighted: Vec<Complex64> =
            fhat.iter().zip(mu.density()).map(|(v, &d)| v * d).collect();
        let re: Vec<f64> = weighted.iter().map(|v| v.re).collect();
        let im: Vec<f64> = weighted.iter().map(|v| v.im).collect();
        acc += Complex64::new(
            trapezoid_sampled(mu.grid(), &re),
            trapezoid_sampled(mu.grid(), &im),
        );
    }
    for atom in mu.atoms() {
        acc += atom.weight * spherical_transform(f, atom.location, q)?;
    }
    Ok(acc)
}

/// The Abel side of the weighted-transform identity: (1/kappa_h) times the
/// integral of A(f)(t) beta_mu(t) dt over the support; equals
/// `calculus_at_identity` for every admissible measure.
pub fn abel_beta_pairing(
    f: &RadialFunction,
    mu: &SpectralMeasure,
    q: &QuadratureSpec,
    cal: &Calibration,
) -> Result<Complex64> {
    let support = f.support_radius();
    let abel = |t: f64| abel_transform(f, t, q).unwrap_or(0.0);
    let val = converged_c(
        |n| composite_gl_c(-support, support, n, |t| abel(t) * beta_weight(mu, t)),
        q.n_t,
        q.tol,
    )?;
    Ok(val / cal.kappa_h)
}

/// Plancherel density |c(lambda)|^{-2} tabulated on a spectral grid.
#[derive(Debug, Clone)]
pub struct PlancherelTable {
    grid: Vec<f64>,
    density: Vec<f64>,
}

impl PlancherelTable {
    pub fn new(grid: Vec<f64>, radii: (f64, f64), q: &QuadratureSpec) -> Self {
        let density = c_density_batch(&grid, radii, q);
        Self { grid, density }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }
}

/// Raw inversion integral over the tabulated spectrum: the integral of
/// b(lambda) phi_lambda(t) |c(lambda)|^{-2} on the half-line, which is
/// |w|^{-1} = 1/2 times the symmetric integral.
pub fn wave_packet_raw(
    b: &SpectralFunction,
    table: &PlancherelTable,
    t: f64,
    q: &QuadratureSpec,
) -> Result<Complex64> {
    if b.grid() != table.grid() {
        return Err(SphError::InvalidSpec(
            "spectral function and Plancherel table use different grids".into(),
        ));
    }
    let n = b.grid().len();
    let tail = b.values()[n - 1].norm() * table.density[n - 1];
    if tail > 1e-10 {
        return Err(SphError::Truncated { value: tail });
    }
    let row = phi_batch_real(b.grid(), t, q);
    let vals: Vec<Complex64> = (0..n)
        .map(|i| b.values()[i] * row[i] * table.density[i])
        .collect();
    let re: Vec<f64> = vals.iter().map(|v| v.re).collect();
    let im: Vec<f64> = vals.iter().map(|v| v.im).collect();
    Ok(Complex64::new(
        trapezoid_sampled(b.grid(), &re),
        trapezoid_sampled(b.grid(), &im),
    ))
}

/// Normalised wave packet: the raw inversion divided by the calibrated
/// round-trip constant, so the packet of `spherical_transform(f)`
/// reconstructs f.
pub fn wave_packet(
    b: &SpectralFunction,
    table: &PlancherelTable,
    cal: &Calibration,
    t: f64,
    q: &QuadratureSpec,
) -> Result<Complex64> {
    Ok(wave_packet_raw(b, table, t, q)? / cal.kappa_p)
}

/// Squared L2 norm against the polar Haar measure.
pub fn l2_norm_sq(f: &RadialFunction, q: &QuadratureSpec) -> Result<f64> {
    let upper = f.support_radius();
    converged(
        |n| composite_gl(0.0, upper, n, |t| f.eval(t).norm_sqr() * (2.0 * t).sinh()),
        q.n_t,
        q.tol,
    )
}

/// Relative Plancherel residual
/// | ||f||^2 - (1/kappa_p)(1/2) integral over R of |fhat|^2 |c|^{-2} | / ||f||^2.
pub fn plancherel_residual(
    f: &RadialFunction,
    table: &PlancherelTable,
    cal: &Calibration,
    q: &QuadratureSpec,
) -> Result<f64> {
    let lhs = l2_norm_sq(f, q)?;
    if lhs == 0.0 {
        return Ok(0.0);
    }
    let fhat = transform_on_grid(f, table.grid(), q)?;
    let integrand: Vec<f64> = fhat
        .values()
        .iter()
        .zip(table.density())
        .map(|(v, d)| v.norm_sqr() * d)
        .collect();
    // (1/2) * symmetric integral = half-line integral by evenness
    let rhs = trapezoid_sampled(table.grid(), &integrand) / cal.kappa_p;
    Ok((lhs - rhs).abs() / lhs)
}

/// Measures the round-trip constant for one profile: the raw wave packet
/// of fhat is a constant multiple of f, recovered by least squares over
/// sample radii.
pub fn measure_kappa_p(
    f: &RadialFunction,
    table: &PlancherelTable,
    q: &QuadratureSpec,
) -> Result<f64> {
    let fhat = transform_on_grid(f, table.grid(), q)?;
    let samples = 24usize;
    let upper = 0.9 * f.support_radius();
    let ts: Vec<f64> = (0..samples)
        .map(|i| upper * (i as f64 + 0.5) / samples as f64)
        .collect();
    let pairs: Vec<(f64, f64)> = ts
        .par_iter()
        .map(|&t| {
            let wp = wave_packet_raw(&fhat, table, t, q).map(|v| v.re).unwrap_or(f64::NAN);
            (wp, f.eval(t).re)
        })
        .collect();
    let mut num = 0.0;
    let mut den = 0.0;
    for (wp, fv) in pairs {
        if !wp.is_finite() {
            return Err(SphError::Calibration("wave packet sample failed".into()));
        }
        num += wp * fv;
        den += fv * fv;
    }
    if den == 0.0 {
        return Err(SphError::Calibration("profile vanishes on sample grid".into()));
    }
    Ok(num / den)
}
