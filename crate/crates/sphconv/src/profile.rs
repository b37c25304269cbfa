//! Compactly supported radial test functions.
//!
//! A [`RadialFunction`] models a smooth bi-invariant function through its
//! radial profile t -> f(t), t >= 0; profiles are even by construction and
//! vanish identically beyond the support radius.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

/// Named construction families; `Custom` covers everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileFamily {
    Bump,
    GaussianTruncated,
    Custom,
}

#[derive(Clone)]
pub struct RadialFunction {
    eval: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    support: f64,
    family: ProfileFamily,
    label: String,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction")
            .field("family", &self.family)
            .field("label", &self.label)
            .field("support", &self.support)
            .finish()
    }
}

/// C-infinity step: 0 at y <= 0, 1 at y >= 1, strictly monotone between.
fn smooth_step(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else if y >= 1.0 {
        1.0
    } else {
        let b = (-1.0 / y).exp();
        let b1 = (-1.0 / (1.0 - y)).exp();
        b / (b + b1)
    }
}

/// Smooth cutoff used for truncations: 1 on [0, 0.8], 0 beyond 1,
/// monotone in between.
pub fn smooth_cutoff(x: f64) -> f64 {
    let x = x.abs();
    if x <= 0.8 {
        1.0
    } else if x >= 1.0 {
        0.0
    } else {
        smooth_step((1.0 - x) / 0.2)
    }
}

impl RadialFunction {
    pub fn from_fn<F>(label: impl Into<String>, support: f64, f: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        assert!(support > 0.0, "support radius must be positive");
        Self {
            eval: Arc::new(f),
            support,
            family: ProfileFamily::Custom,
            label: label.into(),
        }
    }

    /// Standard bump: exp(1 - 1/(1 - (t/T)^2)) inside |t| < T, zero outside.
    pub fn bump(support: f64) -> Self {
        let t0 = support;
        let mut f = Self::from_fn(format!("bump(T={support})"), support, move |t| {
            let x = t / t0;
            if x.abs() >= 1.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new((1.0 - 1.0 / (1.0 - x * x)).exp(), 0.0)
            }
        });
        f.family = ProfileFamily::Bump;
        f
    }

    /// Gaussian exp(-t^2 / (2 sigma^2)) with a smooth cutoff ending at T.
    pub fn gaussian_truncated(sigma: f64, support: f64) -> Self {
        let mut f = Self::from_fn(
            format!("gaussian(sigma={sigma},T={support})"),
            support,
            move |t| Complex64::new((-0.5 * (t / sigma).powi(2)).exp() * smooth_cutoff(t / support), 0.0),
        );
        f.family = ProfileFamily::GaussianTruncated;
        f
    }

    /// Plateau equal to 1 on [0, T - eps], smoothly falling to 0 at T.
    pub fn plateau(support: f64, eps: f64) -> Self {
        Self::from_fn(format!("plateau(T={support},eps={eps})"), support, move |t| {
            let t = t.abs();
            if t >= support {
                Complex64::new(0.0, 0.0)
            } else if t <= support - eps {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(smooth_step((support - t) / eps), 0.0)
            }
        })
    }

    /// (1 - (t/T)^2)^4 inside the support, zero outside.
    pub fn poly_bump(support: f64) -> Self {
        Self::from_fn(format!("poly4(T={support})"), support, move |t| {
            let x = t / support;
            if x.abs() >= 1.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new((1.0 - x * x).powi(4), 0.0)
            }
        })
    }

    pub fn zero(support: f64) -> Self {
        Self::from_fn("zero", support, |_| Complex64::new(0.0, 0.0))
    }

    /// Pointwise scaling by a complex constant.
    pub fn scaled(&self, c: Complex64) -> Self {
        let base = self.clone();
        Self {
            eval: Arc::new(move |t| c * (base.eval)(t.abs())),
            support: self.support,
            family: ProfileFamily::Custom,
            label: format!("{}*{}", c, self.label),
        }
    }

    /// Pointwise sum f + c*g (support = max of the two).
    pub fn linear_combination(&self, other: &RadialFunction, c: Complex64) -> Self {
        let f = self.clone();
        let g = other.clone();
        Self {
            eval: Arc::new(move |t| (f.eval)(t.abs()) + c * (g.eval)(t.abs())),
            support: self.support.max(other.support),
            family: ProfileFamily::Custom,
            label: format!("{}+{}*{}", self.label, c, other.label),
        }
    }

    /// The involution f*(x) = conj(f(x^{-1})); radial profiles keep their
    /// radius under inversion, so this is the pointwise conjugate.
    pub fn involution(&self) -> Self {
        let base = self.clone();
        Self {
            eval: Arc::new(move |t| (base.eval)(t.abs()).conj()),
            support: self.support,
            family: ProfileFamily::Custom,
            label: format!("{}^*", self.label),
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let t = t.abs();
        if t >= self.support {
            Complex64::new(0.0, 0.0)
        } else {
            (self.eval)(t)
        }
    }

    pub fn support_radius(&self) -> f64 {
        self.support
    }

    pub fn family(&self) -> ProfileFamily {
        self.family
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Samples (t, f(t)) on a uniform grid over [0, T]; used by the CLI
    /// serialisers.
    pub fn sample(&self, n: usize) -> Vec<(f64, Complex64)> {
        let h = self.support / (n - 1) as f64;
        (0..n).map(|i| (i as f64 * h, self.eval(i as f64 * h))).collect()
    }

    /// CSV rows `t,value_re,value_im` at 17 significant digits.
    pub fn to_csv(&self, n: usize) -> String {
        let mut out = String::from("t,value_re,value_im\n");
        for (t, v) in self.sample(n) {
            out.push_str(&format!("{t:.16e},{:.16e},{:.16e}\n", v.re, v.im));
        }
        out
    }

    /// The five-profile family used for calibration and stability checks.
    pub fn reference_family() -> Vec<RadialFunction> {
        vec![
            RadialFunction::bump(1.0),
            RadialFunction::bump(1.5),
            RadialFunction::gaussian_truncated(0.5, 1.8),
            RadialFunction::poly_bump(1.2),
            RadialFunction::plateau(1.0, 0.35),
        ]
    }

    /// Profiles for the spectral round-trip suites: truncated Gaussians
    /// with support ~ 9 sigma, whose transforms fall below the
    /// grid-truncation guard within the default spectral window. (Bump
    /// profiles decay like exp(-c sqrt(lambda)) and need a far larger
    /// window.)
    pub fn plancherel_family() -> Vec<RadialFunction> {
        vec![
            RadialFunction::gaussian_truncated(0.22, 2.0),
            RadialFunction::gaussian_truncated(0.25, 2.25),
            RadialFunction::gaussian_truncated(0.3, 2.7),
            RadialFunction::gaussian_truncated(0.35, 3.15),
            RadialFunction::gaussian_truncated(0.4, 3.6),
        ]
    }
}
