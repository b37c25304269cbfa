//! Frozen numerical constants that tie the coordinate systems together.
//!
//! Nothing in the measure conventions pins the polar/Iwasawa Haar ratio or
//! the Plancherel constant a priori, so both are measured once on a family
//! of reference profiles and frozen into a calibration artifact. The series
//! recursion's index convention is arbitrated the same way, against the
//! quadrature value at (lambda, t) = (2, 2).

use std::path::Path;

use num_complex::Complex64;
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SphError};
use crate::group::{haar_integral_iwasawa, haar_integral_polar};
use crate::profile::RadialFunction;
use crate::quad::QuadratureSpec;
use crate::spherical::{hc_series_phi_in, phi, SeriesConvention, C_FIT_RADII};
use crate::transforms::{default_spectral_grid, measure_kappa_p, PlancherelTable};

/// The frozen constants consumed by the transform and verification stacks.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct Calibration {
    /// Ratio of the Iwasawa-coordinate Haar integral to the polar one.
    #[serde(rename = "kappa_H")]
    pub kappa_h: f64,
    /// Round-trip constant of the raw wave packet against the measured
    /// Plancherel density.
    #[serde(rename = "kappa_P")]
    pub kappa_p: f64,
    /// Index convention selected for the series recursion.
    pub series_convention: SeriesConvention,
    /// Radii of the two-point c-function fit.
    pub c_fit_radii: (f64, f64),
}

/// Everything a calibration run measures, including the per-profile values
/// backing the spread checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub calibration: Calibration,
    pub kappa_h_values: Vec<f64>,
    pub kappa_p_values: Vec<f64>,
    /// (max - min) / mean over the profile family.
    pub kappa_h_spread: f64,
    pub kappa_p_spread: f64,
    /// Relative error of each recursion convention at the arbitration
    /// point, (doubled step, single step).
    pub convention_errors: (f64, f64),
}

static REFERENCE: Lazy<Calibration> = Lazy::new(|| {
    serde_json::from_str(include_str!("../tests/fixtures/calibration.json"))
        .expect("bundled calibration fixture parses")
});

impl Calibration {
    /// The checked-in calibration artifact; regenerate with the CLI
    /// `calibrate` command.
    pub fn reference() -> &'static Calibration {
        &REFERENCE
    }

    pub fn from_json_str(s: &str) -> Result<Calibration> {
        serde_json::from_str(s).map_err(|e| SphError::Calibration(format!("parse error: {e}")))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("calibration serialises")
    }

    pub fn load(path: &Path) -> Result<Calibration> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            SphError::Calibration(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_json_str(&text)
    }

    /// Measures all constants from scratch on the reference profile family.
    pub fn compute(q: &QuadratureSpec) -> Result<CalibrationReport> {
        let family = RadialFunction::reference_family();

        let mut kappa_h_values = Vec::new();
        for f in &family {
            let polar = haar_integral_polar(f, q)?;
            let iwasawa = haar_integral_iwasawa(f, q)?;
            kappa_h_values.push(iwasawa / polar);
        }
        let kappa_h = mean(&kappa_h_values);
        let kappa_h_spread = spread(&kappa_h_values);

        // series convention arbitration at (lambda, t) = (2, 2)
        let probe_lambda = Complex64::new(2.0, 0.0);
        let probe_t = 2.0;
        let oracle = phi(probe_lambda, probe_t, q)?;
        let err = |conv| -> Result<f64> {
            let s = hc_series_phi_in(probe_lambda, probe_t, 40, conv, q)?;
            Ok((s.value - oracle).norm() / oracle.norm())
        };
        let err_doubled = err(SeriesConvention::RootStepDoubled)?;
        let err_single = err(SeriesConvention::RootStepSingle)?;
        let series_convention = if err_doubled <= err_single {
            SeriesConvention::RootStepDoubled
        } else {
            SeriesConvention::RootStepSingle
        };
        if err_doubled.min(err_single) > 1e-6 {
            return Err(SphError::Calibration(format!(
                "neither recursion convention matches quadrature at the \
                 arbitration point (errors {err_doubled:.2e}, {err_single:.2e})"
            )));
        }

        // Plancherel round-trip constant over the spectrally compatible
        // Gaussian family
        let table = PlancherelTable::new(default_spectral_grid(), C_FIT_RADII, q);
        let mut kappa_p_values = Vec::new();
        for f in RadialFunction::plancherel_family() {
            kappa_p_values.push(measure_kappa_p(&f, &table, q)?);
        }
        let kappa_p = mean(&kappa_p_values);
        let kappa_p_spread = spread(&kappa_p_values);

        Ok(CalibrationReport {
            calibration: Calibration {
                kappa_h,
                kappa_p,
                series_convention,
                c_fit_radii: C_FIT_RADII,
            },
            kappa_h_values,
            kappa_p_values,
            kappa_h_spread,
            kappa_p_spread,
            convention_errors: (err_doubled, err_single),
        })
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn spread(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::MIN, f64::max);
    let min = xs.iter().cloned().fold(f64::MAX, f64::min);
    (max - min) / mean(xs).abs()
}
