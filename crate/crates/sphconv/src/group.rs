//! Structure theory of SL(2,R): group arithmetic, the Iwasawa and polar
//! decompositions, the Iwasawa projection H(.), and Haar-measure
//! quadrature in both coordinate systems.
//!
//! Conventions used throughout the crate:
//!
//! * rotations `k(theta) = [[cos, -sin], [sin, cos]]`,
//! * diagonal one-parameter subgroup `a(t) = diag(e^t, e^-t)`,
//! * upper unipotents `n(u) = [[1, u], [0, 1]]`,
//! * the Haar measure is normalised with `dk` a probability measure and
//!   radial density `sinh(2t)` in polar coordinates; the Iwasawa
//!   normalisation `e^{2t} dk dt du` differs from it by the fixed constant
//!   measured by [`crate::calibration::Calibration::kappa_h`].

use std::f64::consts::TAU;

use crate::error::{Result, SphError};
use crate::profile::RadialFunction;
use crate::quad::{composite_gl, converged, QuadratureSpec};

const DET_TOL: f64 = 1e-12;

/// A real unimodular 2x2 matrix, stored row-major as (a b / c d).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Coordinates of the factorisation g = k(theta) a(t) n(u).
#[derive(Debug, Clone, Copy)]
pub struct IwasawaCoords {
    /// Rotation angle in [0, 2*pi).
    pub theta: f64,
    /// A-coordinate.
    pub t: f64,
    /// N-coordinate.
    pub u: f64,
}

/// Coordinates of the factorisation g = k(theta1) a(t) k(theta2), t >= 0.
#[derive(Debug, Clone, Copy)]
pub struct PolarCoords {
    pub theta1: f64,
    /// Radial coordinate, the log of the largest singular value.
    pub t: f64,
    pub theta2: f64,
}

fn wrap_angle(theta: f64) -> f64 {
    let mut x = theta % TAU;
    if x < 0.0 {
        x += TAU;
    }
    x
}

impl GroupElement {
    /// Builds an element, checking the determinant invariant.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if (det - 1.0).abs() > DET_TOL {
            return Err(SphError::InvalidDeterminant { det });
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        Self { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }

    /// Rotation k(theta).
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { a: c, b: -s, c: s, d: c }
    }

    /// Diagonal element a(t) = diag(e^t, e^-t).
    pub fn diagonal(t: f64) -> Self {
        Self { a: t.exp(), b: 0.0, c: 0.0, d: (-t).exp() }
    }

    /// Upper unipotent n(u).
    pub fn unipotent(u: f64) -> Self {
        Self { a: 1.0, b: u, c: 0.0, d: 1.0 }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn transpose(&self) -> Self {
        Self { a: self.a, b: self.c, c: self.b, d: self.d }
    }

    /// Largest entrywise deviation from `other`.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
            .max((self.d - other.d).abs())
    }
}

/// Matrix product g * h.
pub fn multiply(g: &GroupElement, h: &GroupElement) -> GroupElement {
    GroupElement {
        a: g.a * h.a + g.b * h.c,
        b: g.a * h.b + g.b * h.d,
        c: g.c * h.a + g.d * h.c,
        d: g.c * h.b + g.d * h.d,
    }
}

/// Inverse; for det = 1 this is the adjugate (d, -b / -c, a).
pub fn inverse(g: &GroupElement) -> GroupElement {
    GroupElement { a: g.d, b: -g.b, c: -g.c, d: g.a }
}

/// Iwasawa decomposition g = k(theta) a(t) n(u).
///
/// The rotation is chosen so that k(-theta) maps the first column of g to
/// a positive multiple of e1, giving t = log sqrt(a^2 + c^2).
pub fn iwasawa(g: &GroupElement) -> IwasawaCoords {
    let r2 = g.a * g.a + g.c * g.c;
    let theta = wrap_angle(g.c.atan2(g.a));
    let t = 0.5 * r2.ln();
    let u = (g.a * g.b + g.c * g.d) / r2;
    IwasawaCoords { theta, t, u }
}

/// The Iwasawa projection H(g), the A-coordinate of `iwasawa`.
pub fn iwasawa_projection(g: &GroupElement) -> f64 {
    0.5 * (g.a * g.a + g.c * g.c).ln()
}

/// Polar decomposition g = k(theta1) a(t) k(theta2) with t >= 0.
///
/// t = log of the largest singular value; det = 1 forces t >= 0.
pub fn polar(g: &GroupElement) -> PolarCoords {
    // g^T g = k(theta2)^{-1} a(2t) k(theta2); diagonalise the symmetric
    // positive matrix explicitly.
    let s11 = g.a * g.a + g.c * g.c;
    let s12 = g.a * g.b + g.c * g.d;
    let s22 = g.b * g.b + g.d * g.d;
    let trace = s11 + s22;
    // Eigenvalues exp(2t), exp(-2t) with product 1: trace = 2 cosh(2t).
    let t = 0.5 * (0.5 * trace + (0.25 * trace * trace - 1.0).max(0.0).sqrt()).ln();
    let t = t.max(0.0);

    if (trace - 2.0).abs() < 1e-15 || t < 1e-12 {
        // g is (numerically) a rotation: a(t) = e, theta2 = 0.
        let theta1 = wrap_angle(g.c.atan2(g.a));
        return PolarCoords { theta1, t: 0.0, theta2: 0.0 };
    }

    // Unit eigenvector of g^T g for the large eigenvalue, at angle chi;
    // k(theta2) must rotate it onto e1, so theta2 = -chi.
    let chi = 0.5 * (2.0 * s12).atan2(s11 - s22);
    let theta2 = wrap_angle(-chi);
    // k(theta1) = g k(theta2)^{-1} a(-t)
    let k1 = multiply(
        &multiply(g, &GroupElement::rotation(-theta2)),
        &GroupElement::diagonal(-t),
    );
    let theta1 = wrap_angle(k1.c.atan2(k1.a));
    PolarCoords { theta1, t, theta2 }
}

/// Polar radius of `g`; shorthand for `polar(g).t`.
pub fn polar_radius(g: &GroupElement) -> f64 {
    let trace = g.a * g.a + g.b * g.b + g.c * g.c + g.d * g.d;
    0.5 * (0.5 * trace + (0.25 * trace * trace - 1.0).max(0.0).sqrt()).ln().max(0.0)
}

/// Polar radius of a(t1) k(theta) a(t2), evaluated without forming the
/// product: cosh(2r) = cos^2(theta) cosh(2(t1+t2)) + sin^2(theta) cosh(2(t1-t2)).
pub fn polar_radius_akak(t1: f64, theta: f64, t2: f64) -> f64 {
    let c2 = theta.cos().powi(2);
    let s2 = 1.0 - c2;
    let w = c2 * (2.0 * (t1 + t2)).cosh() + s2 * (2.0 * (t1 - t2)).cosh();
    0.5 * acosh_stable(w)
}

/// Polar radius of a(t) n(u): cosh(2r) = cosh(2t) + e^{2t} u^2 / 2.
pub fn polar_radius_an(t: f64, u: f64) -> f64 {
    let w = (2.0 * t).cosh() + 0.5 * (2.0 * t).exp() * u * u;
    0.5 * acosh_stable(w)
}

fn acosh_stable(w: f64) -> f64 {
    if w <= 1.0 {
        0.0
    } else {
        w.acosh()
    }
}

impl IwasawaCoords {
    /// Reassemble k(theta) a(t) n(u).
    pub fn assemble(&self) -> GroupElement {
        multiply(
            &GroupElement::rotation(self.theta),
            &multiply(
                &GroupElement::diagonal(self.t),
                &GroupElement::unipotent(self.u),
            ),
        )
    }
}

impl PolarCoords {
    /// Reassemble k(theta1) a(t) k(theta2).
    pub fn assemble(&self) -> GroupElement {
        multiply(
            &GroupElement::rotation(self.theta1),
            &multiply(
                &GroupElement::diagonal(self.t),
                &GroupElement::rotation(self.theta2),
            ),
        )
    }
}

/// Haar integral of a radial function in polar coordinates:
/// integral of f(t) sinh(2t) dt over [0, t_max], density constant 1.
pub fn haar_integral_polar(f: &RadialFunction, q: &QuadratureSpec) -> Result<f64> {
    let upper = f.support_radius();
    converged(
        |n| composite_gl(0.0, upper, n, |t| f.eval(t).re * (2.0 * t).sinh()),
        q.n_t,
        q.tol,
    )
}

/// Same integral for |f| (the L1 norm in the polar normalisation).
pub fn haar_l1_norm(f: &RadialFunction, q: &QuadratureSpec) -> Result<f64> {
    let upper = f.support_radius();
    converged(
        |n| composite_gl(0.0, upper, n, |t| f.eval(t).norm() * (2.0 * t).sinh()),
        q.n_t,
        q.tol,
    )
}

/// Haar integral in Iwasawa coordinates: double integral of
/// f(radius(a(t) n(u))) e^{2t} du dt over the truncated window.
///
/// The ratio to `haar_integral_polar` is a fixed constant independent of
/// the integrand.
pub fn haar_integral_iwasawa(f: &RadialFunction, q: &QuadratureSpec) -> Result<f64> {
    let cap = f.support_radius();
    let cosh_cap = (2.0 * cap).cosh();
    converged(
        |n| {
            composite_gl(-cap, cap, n, |t| {
                // radius(a(t) n(u)) <= cap bounds the u window
                let width2 = 2.0 * (cosh_cap - (2.0 * t).cosh());
                if width2 <= 0.0 {
                    return 0.0;
                }
                let u_star = ((-t).exp() * width2.sqrt()).min(q.u_max);
                let inner = composite_gl(0.0, u_star, n, |u| f.eval(polar_radius_an(t, u)).re);
                2.0 * inner * (2.0 * t).exp()
            })
        },
        q.n_t,
        q.tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;

    fn random_element(rng: &mut impl Rng) -> GroupElement {
        // random product of k, a, n factors with parameters in [-2, 2]
        let mut g = GroupElement::identity();
        for _ in 0..3 {
            let p: f64 = rng.gen_range(-2.0..2.0);
            let f = match rng.gen_range(0..3) {
                0 => GroupElement::rotation(p),
                1 => GroupElement::diagonal(p),
                _ => GroupElement::unipotent(p),
            };
            g = multiply(&g, &f);
        }
        g
    }

    #[test]
    fn construction_enforces_determinant() {
        assert!(GroupElement::new(1.0, 0.5, 0.0, 1.0).is_ok());
        assert!(matches!(
            GroupElement::new(1.0, 0.0, 0.0, 1.1),
            Err(SphError::InvalidDeterminant { .. })
        ));
    }

    #[test]
    fn multiply_identity_and_one_parameter_subgroups() {
        let g = GroupElement::new(2.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(multiply(&GroupElement::identity(), &g), g);

        let a3 = multiply(&GroupElement::diagonal(1.0), &GroupElement::diagonal(2.0));
        assert_abs_diff_eq!(a3.a, 3.0f64.exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(a3.d, (-3.0f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(a3.b, 0.0, epsilon = 1e-15);

        let n3 = multiply(&GroupElement::unipotent(1.0), &GroupElement::unipotent(2.0));
        assert_abs_diff_eq!(n3.b, 3.0, epsilon = 1e-15);
    }

    #[test]
    fn inverse_cases() {
        let e = GroupElement::identity();
        assert_eq!(inverse(&e), e);
        assert_eq!(inverse(&GroupElement::diagonal(0.7)), GroupElement::diagonal(-0.7));
        let k = GroupElement::rotation(0.3);
        assert!(inverse(&k).distance(&GroupElement::rotation(-0.3)) < 1e-15);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let g = random_element(&mut rng);
            assert!(multiply(&g, &inverse(&g)).distance(&e) < 1e-12);
        }
    }

    #[test]
    fn iwasawa_base_cases() {
        let c = iwasawa(&GroupElement::identity());
        assert_abs_diff_eq!(c.theta, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.t, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.u, 0.0, epsilon = 1e-15);

        let c = iwasawa(&GroupElement::diagonal(1.0));
        assert_abs_diff_eq!(c.theta, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.t, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.u, 0.0, epsilon = 1e-15);

        // first column of n(1) is (1, 0)
        let c = iwasawa(&GroupElement::unipotent(1.0));
        assert_abs_diff_eq!(c.theta, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.t, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.u, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn iwasawa_round_trip_on_random_elements() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let g = random_element(&mut rng);
            let c = iwasawa(&g);
            assert!(c.assemble().distance(&g) < 1e-10, "round trip failed for {g:?}");
        }
    }

    #[test]
    fn projection_cases() {
        // H(n(1)) = 0, H(k) = 0
        assert_abs_diff_eq!(iwasawa_projection(&GroupElement::unipotent(1.0)), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(iwasawa_projection(&GroupElement::rotation(1.1)), 0.0, epsilon = 1e-14);

        // H(a(t) k(theta)) = 0.5 log(e^{2t} cos^2 + e^{-2t} sin^2),
        // checked against the generic decomposition
        for &(t, theta) in &[(0.5, 0.3), (1.0, 2.0), (-0.7, 4.0)] {
            let g = multiply(&GroupElement::diagonal(t), &GroupElement::rotation(theta));
            let expect = 0.5
                * ((2.0 * t).exp() * theta.cos().powi(2) + (-2.0 * t).exp() * theta.sin().powi(2))
                    .ln();
            assert_abs_diff_eq!(iwasawa_projection(&g), expect, epsilon = 1e-13);
            assert_abs_diff_eq!(iwasawa(&g).t, expect, epsilon = 1e-13);
        }
    }

    #[test]
    fn projection_additivity_on_an() {
        for &(s, u) in &[(0.0, 0.0), (1.2, -3.0), (-0.4, 0.9), (2.0, 2.0)] {
            let g = multiply(&GroupElement::diagonal(s), &GroupElement::unipotent(u));
            assert_abs_diff_eq!(iwasawa_projection(&g), s, epsilon = 1e-13);
        }
    }

    #[test]
    fn polar_base_cases() {
        assert_abs_diff_eq!(polar(&GroupElement::rotation(0.8)).t, 0.0, epsilon = 1e-12);

        // eigenvalues of n(1)^T n(1) are (3 +- sqrt(5))/2; oracle below is
        // the closed-form symmetric 2x2 eigenvalue solver
        let g = GroupElement::unipotent(1.0);
        let (s11, s12, s22) = (1.0f64, 1.0f64, 2.0f64);
        let mean = 0.5 * (s11 + s22);
        let disc = (0.25 * (s11 - s22) * (s11 - s22) + s12 * s12).sqrt();
        let oracle = 0.5 * (mean + disc).ln();
        assert_abs_diff_eq!(polar(&g).t, oracle, epsilon = 1e-14);
        assert_abs_diff_eq!(polar(&g).t, ((1.0 + 5.0f64.sqrt()) / 2.0).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(polar(&g).t, 0.4812118250596034, epsilon = 1e-13);

        // Weyl reflection of the diagonal
        assert_abs_diff_eq!(polar(&GroupElement::diagonal(-2.0)).t, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn polar_round_trip_and_symmetry() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..1000 {
            let g = random_element(&mut rng);
            let p = polar(&g);
            assert!(p.t >= 0.0);
            assert!(p.assemble().distance(&g) < 1e-10, "round trip failed for {g:?}");
            let t = p.t;
            assert_abs_diff_eq!(polar(&inverse(&g)).t, t, epsilon = 1e-10);
            assert_abs_diff_eq!(polar(&g.transpose()).t, t, epsilon = 1e-10);
        }
    }

    #[test]
    fn polar_radius_closed_forms_match_decomposition() {
        for &(t1, theta, t2) in &[(0.4, 0.9, 1.3), (1.0, 2.2, -0.5), (0.0, 0.1, 0.0)] {
            let g = multiply(
                &multiply(&GroupElement::diagonal(t1), &GroupElement::rotation(theta)),
                &GroupElement::diagonal(t2),
            );
            assert_abs_diff_eq!(polar_radius_akak(t1, theta, t2), polar(&g).t, epsilon = 1e-12);
        }
        for &(t, u) in &[(0.3, 1.0), (1.5, -2.0), (0.0, 0.7)] {
            let g = multiply(&GroupElement::diagonal(t), &GroupElement::unipotent(u));
            assert_abs_diff_eq!(polar_radius_an(t, u), polar(&g).t, epsilon = 1e-12);
        }
    }

    #[test]
    fn haar_polar_on_truncated_plateau() {
        // f = 1 on [0,1] with a smooth shoulder; as the shoulder sharpens the
        // value approaches the antiderivative (cosh 2 - 1)/2.
        let q = QuadratureSpec::default();
        let exact = ((2.0f64).cosh() - 1.0) / 2.0;
        let mut errs = Vec::new();
        for &eps in &[0.2, 0.1, 0.05] {
            let f = RadialFunction::plateau(1.0, eps);
            let v = haar_integral_polar(&f, &q).unwrap();
            errs.push((v - exact).abs());
        }
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "errors not shrinking: {errs:?}");
        // the remaining deficit is the shoulder mass, ~ eps * sinh(2) / 2
        assert!(errs[2] < 0.1, "errs: {errs:?}");

        let zero = RadialFunction::zero(1.0);
        assert_abs_diff_eq!(haar_integral_polar(&zero, &q).unwrap(), 0.0, epsilon = 1e-15);
    }
}
