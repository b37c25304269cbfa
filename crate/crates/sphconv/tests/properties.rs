//! Property-based invariants over randomly generated group elements,
//! profiles and spectral parameters.

use num_complex::Complex64;
use proptest::prelude::*;
use sphconv::group::{inverse, iwasawa, multiply, polar, GroupElement};
use sphconv::profile::RadialFunction;
use sphconv::spherical::{phi, phi_fast};
use sphconv::transforms::spherical_transform;
use sphconv::QuadratureSpec;

fn element_strategy() -> impl Strategy<Value = GroupElement> {
    // random product of three one-parameter factors, parameters in [-2, 2]
    proptest::collection::vec((0u8..3, -2.0f64..2.0), 3).prop_map(|factors| {
        let mut g = GroupElement::identity();
        for (kind, p) in factors {
            let f = match kind {
                0 => GroupElement::rotation(p),
                1 => GroupElement::diagonal(p),
                _ => GroupElement::unipotent(p),
            };
            g = multiply(&g, &f);
        }
        g
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn products_stay_unimodular(g in element_strategy(), h in element_strategy()) {
        let p = multiply(&g, &h);
        prop_assert!((p.det() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn decompositions_round_trip(g in element_strategy()) {
        prop_assert!(iwasawa(&g).assemble().distance(&g) < 1e-10);
        let p = polar(&g);
        prop_assert!(p.t >= 0.0);
        prop_assert!(p.assemble().distance(&g) < 1e-10);
    }

    #[test]
    fn polar_radius_is_inversion_invariant(g in element_strategy()) {
        let a = polar(&g).t;
        let b = polar(&inverse(&g)).t;
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn inverse_is_involutive(g in element_strategy()) {
        let gg = inverse(&inverse(&g));
        prop_assert!(gg.distance(&g) < 1e-12);
    }
}

proptest! {
    // spherical-function evaluations are costly; keep the case count low
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn phi_weyl_even_and_normalised(
        re in -3.0f64..3.0,
        im in -0.9f64..0.9,
        t in 0.05f64..2.5,
    ) {
        let q = QuadratureSpec::default();
        let l = Complex64::new(re, im);
        prop_assert!((phi(l, 0.0, &q).unwrap() - 1.0).norm() < 1e-11);
        let a = phi(l, t, &q).unwrap();
        let b = phi(-l, t, &q).unwrap();
        prop_assert!((a - b).norm() < 1e-10);
        // the two quadrature routes agree
        prop_assert!((a - phi_fast(l, t, &q)).norm() < 1e-10);
    }

    #[test]
    fn transform_is_weyl_even(l in 0.1f64..6.0, scale in 0.5f64..1.5) {
        let q = QuadratureSpec::default();
        let f = RadialFunction::bump(scale);
        let a = spherical_transform(&f, Complex64::new(l, 0.0), &q).unwrap();
        let b = spherical_transform(&f, Complex64::new(-l, 0.0), &q).unwrap();
        prop_assert!((a - b).norm() < 1e-10);
        prop_assert!(a.im.abs() < 1e-10);
    }
}
