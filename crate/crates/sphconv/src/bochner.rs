//! Spectral measures on the positive-definite spectrum and the Bochner
//! functionals they represent.
//!
//! A measure consists of a sampled nonnegative density on the tempered
//! (real) axis, finitely many atoms, and a polynomial-growth certificate.
//! Atoms live on the spherical unitary dual: the real axis (either sign;
//! the two Weyl signs parametrise the same spherical function) or the
//! segment `i*[0,1]`; anything else is rejected at construction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Result, SphError};
use crate::profile::RadialFunction;
use crate::quad::{trapezoid_sampled, QuadratureSpec};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Atom {
    pub location: Complex64,
    pub weight: f64,
}

/// Certificate that the measure integrates 1/(1+|lambda|^degree) below
/// `bound`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GrowthCertificate {
    pub degree: u32,
    pub bound: f64,
}

impl Default for GrowthCertificate {
    fn default() -> Self {
        GrowthCertificate { degree: 0, bound: 1e6 }
    }
}

#[derive(Debug, Clone)]
pub struct SpectralMeasure {
    grid: Vec<f64>,
    density: Vec<f64>,
    atoms: Vec<Atom>,
    growth: GrowthCertificate,
}

fn atom_admissible(loc: Complex64) -> bool {
    let on_real_axis = loc.im.abs() < 1e-12;
    let on_segment = loc.re.abs() < 1e-12 && (0.0..=1.0 + 1e-12).contains(&loc.im);
    on_real_axis || on_segment
}

impl SpectralMeasure {
    pub fn new(
        grid: Vec<f64>,
        density: Vec<f64>,
        atoms: Vec<Atom>,
        growth: GrowthCertificate,
    ) -> Result<Self> {
        if grid.len() != density.len() {
            return Err(SphError::InvalidMeasure(format!(
                "grid/density lengths differ ({} vs {})",
                grid.len(),
                density.len()
            )));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SphError::InvalidMeasure("grid must be strictly ascending".into()));
        }
        if density.iter().any(|&d| d < -1e-14 || !d.is_finite()) {
            return Err(SphError::InvalidMeasure("density must be nonnegative".into()));
        }
        for a in &atoms {
            if a.weight < 0.0 || !a.weight.is_finite() {
                return Err(SphError::InvalidMeasure(format!(
                    "atom weight {} must be nonnegative",
                    a.weight
                )));
            }
            if !atom_admissible(a.location) {
                return Err(SphError::AtomOffSpectrum { location: a.location });
            }
        }
        Ok(Self { grid, density, atoms, growth })
    }

    pub fn purely_atomic(atoms: Vec<Atom>) -> Result<Self> {
        Self::new(vec![], vec![], atoms, GrowthCertificate::default())
    }

    pub fn from_density(
        grid: Vec<f64>,
        density: Vec<f64>,
        growth: GrowthCertificate,
    ) -> Result<Self> {
        Self::new(grid, density, vec![], growth)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn growth(&self) -> GrowthCertificate {
        self.growth
    }

    /// Scales all weights and the density by a nonnegative factor.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(
            self.grid.clone(),
            self.density.iter().map(|d| d * s).collect(),
            self.atoms
                .iter()
                .map(|a| Atom { location: a.location, weight: a.weight * s })
                .collect(),
            self.growth,
        )
    }

    pub fn describe(&self) -> String {
        format!("measure({} density nodes, {} atoms)", self.grid.len(), self.atoms.len())
    }

    /// Support containment in the strip of index p: every atom with
    /// positive weight must satisfy |Im location| <= 2/p - 1. The density
    /// lives on the real axis and passes for every p in [1, 2].
    pub fn support_check(&self, p: f64) -> bool {
        assert!((1.0..=2.0).contains(&p), "p must lie in [1, 2]");
        let eps = 2.0 / p - 1.0;
        self.atoms
            .iter()
            .filter(|a| a.weight > 0.0)
            .all(|a| a.location.im.abs() <= eps + 1e-12)
    }

    /// Evaluates the growth integral of 1/(1+|lambda|^degree) against the
    /// measure and compares with the certificate bound.
    pub fn growth_check(&self) -> (bool, f64) {
        let deg = self.growth.degree as i32;
        let mut value = 0.0;
        if !self.grid.is_empty() {
            let vals: Vec<f64> = self
                .grid
                .iter()
                .zip(&self.density)
                .map(|(&l, &d)| d / (1.0 + l.abs().powi(deg)))
                .collect();
            value += trapezoid_sampled(&self.grid, &vals);
        }
        for a in &self.atoms {
            value += a.weight / (1.0 + a.location.norm().powi(deg));
        }
        (value <= self.growth.bound, value)
    }

    /// JSON schema: density as [lambda, value] pairs, atoms as
    /// [im_location, weight] pairs when every atom sits on the imaginary
    /// segment (the file format), [re, im, weight] triples otherwise.
    pub fn to_json(&self) -> serde_json::Value {
        let density: Vec<[f64; 2]> =
            self.grid.iter().zip(&self.density).map(|(&l, &d)| [l, d]).collect();
        let all_imaginary = self.atoms.iter().all(|a| a.location.re.abs() < 1e-12);
        let atoms: Vec<serde_json::Value> = if all_imaginary {
            self.atoms.iter().map(|a| json!([a.location.im, a.weight])).collect()
        } else {
            self.atoms
                .iter()
                .map(|a| json!([a.location.re, a.location.im, a.weight]))
                .collect()
        };
        json!({
            "density": density,
            "atoms": atoms,
            "growth": { "degree": self.growth.degree, "bound": self.growth.bound },
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = |m: &str| SphError::InvalidMeasure(m.to_string());
        let density = v
            .get("density")
            .and_then(|d| d.as_array())
            .ok_or_else(|| bad("missing density array"))?;
        let mut grid = Vec::new();
        let mut dens = Vec::new();
        for pair in density {
            let p = pair.as_array().ok_or_else(|| bad("density entries must be pairs"))?;
            if p.len() != 2 {
                return Err(bad("density entries must be [lambda, value]"));
            }
            grid.push(p[0].as_f64().ok_or_else(|| bad("non-numeric lambda"))?);
            dens.push(p[1].as_f64().ok_or_else(|| bad("non-numeric density value"))?);
        }
        let mut atoms = Vec::new();
        if let Some(arr) = v.get("atoms").and_then(|a| a.as_array()) {
            for entry in arr {
                let e = entry.as_array().ok_or_else(|| bad("atom entries must be arrays"))?;
                let nums: Vec<f64> = e.iter().filter_map(|x| x.as_f64()).collect();
                match nums.len() {
                    2 => atoms.push(Atom {
                        location: Complex64::new(0.0, nums[0]),
                        weight: nums[1],
                    }),
                    3 => atoms.push(Atom {
                        location: Complex64::new(nums[0], nums[1]),
                        weight: nums[2],
                    }),
                    _ => return Err(bad("atom entries must be [im, w] or [re, im, w]")),
                }
            }
        }
        let growth = match v.get("growth") {
            Some(g) => GrowthCertificate {
                degree: g.get("degree").and_then(|x| x.as_u64()).unwrap_or(0) as u32,
                bound: g.get("bound").and_then(|x| x.as_f64()).unwrap_or(1e6),
            },
            None => GrowthCertificate::default(),
        };
        Self::new(grid, dens, atoms, growth)
    }
}

/// The functional `T[f]` = integral of fhat d mu represented by a measure.
#[derive(Debug, Clone)]
pub struct BochnerFunctional {
    pub measure: SpectralMeasure,
}

impl BochnerFunctional {
    pub fn new(measure: SpectralMeasure) -> Self {
        Self { measure }
    }

    /// `T[f]`: density integral of fhat plus the atom sum.
    pub fn evaluate(&self, f: &RadialFunction, q: &QuadratureSpec) -> Result<Complex64> {
        crate::transforms::calculus_at_identity(f, &self.measure, q)
    }

    /// Computes T[f * f*] along two pipelines and returns
    /// max(|direct - spectral|, max(0, -Re direct)); both must be small
    /// for a positive measure.
    pub fn positive_definiteness_residual(
        &self,
        f: &RadialFunction,
        q: &QuadratureSpec,
    ) -> Result<f64> {
        // direct: convolve f with its involution, then apply T
        let g = crate::convolution::convolve_to_profile(f, &f.involution(), 192, q)?;
        let direct = self.evaluate(&g, q)?;
        // spectral: integrate |fhat|^2 against the measure
        let spectral = self.quadratic_form(f, q)?;
        Ok((direct - spectral).norm().max((-direct.re).max(0.0)))
    }

    /// integral of |fhat|^2 d mu.
    pub fn quadratic_form(&self, f: &RadialFunction, q: &QuadratureSpec) -> Result<Complex64> {
        let mu = &self.measure;
        let mut acc = Complex64::new(0.0, 0.0);
        if !mu.grid.is_empty() {
            let folded: Vec<f64> = mu.grid.iter().map(|l| l.abs()).collect();
            let fhat = crate::transforms::transform_values_signed(f, &folded, q)?;
            let vals: Vec<f64> = fhat
                .iter()
                .zip(&mu.density)
                .map(|(v, &d)| v.norm_sqr() * d)
                .collect();
            acc += Complex64::new(trapezoid_sampled(&mu.grid, &vals), 0.0);
        }
        for a in &mu.atoms {
            let v = crate::transforms::spherical_transform(f, a.location, q)?;
            acc += a.weight * v.norm_sqr();
        }
        Ok(acc)
    }
}

/// The three reference measures used by the identity suites: a symmetric
/// atomic pair, a Gaussian density, and a uniform density on [-2, 2].
pub fn test_measures() -> Vec<SpectralMeasure> {
    let pair = SpectralMeasure::purely_atomic(vec![
        Atom { location: Complex64::new(1.1, 0.0), weight: 0.5 },
        Atom { location: Complex64::new(-1.1, 0.0), weight: 0.5 },
    ])
    .unwrap();

    let grid: Vec<f64> = (0..=800).map(|i| -6.0 + 0.015 * i as f64).collect();
    let density: Vec<f64> = grid.iter().map(|l| (-0.5 * l * l).exp()).collect();
    let gauss =
        SpectralMeasure::new(grid, density, vec![], GrowthCertificate { degree: 0, bound: 5.0 })
            .unwrap();

    let grid: Vec<f64> = (0..=400).map(|i| -2.0 + 0.01 * i as f64).collect();
    let density = vec![1.0; grid.len()];
    let uniform =
        SpectralMeasure::new(grid, density, vec![], GrowthCertificate { degree: 0, bound: 5.0 })
            .unwrap();

    vec![pair, gauss, uniform]
}

/// Random measure for the positivity suites: a smooth Gaussian-like
/// density plus up to two admissible atoms.
pub fn random_measure(rng: &mut impl rand::Rng) -> SpectralMeasure {
    let half_width: f64 = rng.gen_range(1.0..3.0);
    let sigma: f64 = rng.gen_range(0.4..1.5);
    let amp: f64 = rng.gen_range(0.5..1.5);
    let n = 320;
    let grid: Vec<f64> = (0..=n)
        .map(|i| -half_width + 2.0 * half_width * i as f64 / n as f64)
        .collect();
    let density: Vec<f64> = grid.iter().map(|l| amp * (-0.5 * (l / sigma).powi(2)).exp()).collect();
    let mut atoms = Vec::new();
    if rng.gen_bool(0.5) {
        atoms.push(Atom {
            location: Complex64::new(0.0, rng.gen_range(0.0..1.0)),
            weight: rng.gen_range(0.0..1.0),
        });
    }
    if rng.gen_bool(0.5) {
        atoms.push(Atom {
            location: Complex64::new(rng.gen_range(0.0..2.0), 0.0),
            weight: rng.gen_range(0.0..1.0),
        });
    }
    SpectralMeasure::new(grid, density, atoms, GrowthCertificate { degree: 0, bound: 50.0 })
        .expect("random measure construction")
}
