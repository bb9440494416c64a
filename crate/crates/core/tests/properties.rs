//! Randomised invariants of the radial analysis, coefficients and probes.

use proptest::prelude::*;

use faddeev_core::coefficients::{h_stable, h_tilde, inverse_i, phi_stable, CoefficientId, I};
use faddeev_core::hyperbolic::check_admissible;
use faddeev_core::radial_spectral::{chi, low_pass, lp_norm, Dim, DyadicPartition, RadialProfile, SpectralGrid};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_sums_to_one(k_min in -8i32..0, span in 1i32..12, t in 0.0f64..1.0) {
        let part = DyadicPartition::new(k_min, k_min + span).unwrap();
        let s = part.lambda_min() * (part.lambda_max() / part.lambda_min()).powf(t);
        let sum: f64 = part.bands().iter().map(|&l| part.weight(l, s)).sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
        prop_assert!((part.total(s) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_is_a_bump(s in 0.0f64..10.0) {
        let c = chi(s);
        prop_assert!((0.0..=1.0).contains(&c));
        if !(0.5..2.0).contains(&s) {
            prop_assert_eq!(c, 0.0);
        }
        prop_assert!((0.0..=1.0).contains(&low_pass(1.0, s)));
    }

    #[test]
    fn inverse_i_inverts(z in 0.0f64..20.0) {
        prop_assert!((inverse_i(I(z)) - z).abs() < 1e-9 * (1.0 + z));
    }

    #[test]
    fn coefficients_are_even_and_bounded(u in -50.0f64..50.0) {
        for id in CoefficientId::ALL {
            let a = h_tilde(id, u);
            prop_assert!(a.is_finite());
            // h̃₁ is odd, the rest even
            let sign = if id == CoefficientId::H1 { -1.0 } else { 1.0 };
            prop_assert!((h_tilde(id, -u) - sign * a).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn stable_forms_are_finite(v in -1e3f64..1e3, r in 1e-8f64..10.0) {
        let u = r * v;
        prop_assert!(phi_stable(v, u) >= 1.0);
        for id in CoefficientId::ALL {
            prop_assert!(h_stable(id, v, u).is_finite());
        }
    }

    #[test]
    fn admissible_pairs_satisfy_the_gap(q in 2.0f64..50.0, r in 2.0f64..50.0) {
        let ok = check_admissible(q, r).is_ok();
        prop_assert_eq!(ok, 2.0 / q + 3.0 / r <= 1.5 + 1e-12 || 1.0 / q + 3.0 / r < 1.5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn hankel_is_linear_and_invertible(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        w1 in 0.5f64..2.0,
        w2 in 0.5f64..2.0,
        c in 0.0f64..4.0,
    ) {
        let sg = SpectralGrid::shared(Dim::R4, 30.0, 256).unwrap();
        let f = RadialProfile::from_fn(sg.space.clone(), |r| (-r * r / (w1 * w1)).exp());
        let g = RadialProfile::from_fn(sg.space.clone(), |r| (-(r - c) * (r - c) / (w2 * w2)).exp());
        let combo = f.scaled(a).add(&g.scaled(b)).unwrap();
        let lhs = sg.forward(&combo).unwrap();
        let rhs = sg.forward(&f).unwrap().scaled(a).add(&sg.forward(&g).unwrap().scaled(b)).unwrap();
        let scale = 1.0 + lhs.max_abs();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-10 * scale);
        let back = sg.inverse(&lhs).unwrap();
        prop_assert!(back.sub(&combo).unwrap().max_abs() < 1e-9 * (1.0 + combo.max_abs()));
        let ratio = lp_norm(&lhs, 2.0) / (2.0 * std::f64::consts::PI).powi(2);
        prop_assert!((ratio - lp_norm(&combo, 2.0)).abs() < 1e-9 * (1.0 + ratio));
    }
}
