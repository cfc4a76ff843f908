//! Property tests for the exact-algebra layer and the measure.

use num_complex::Complex;
use proptest::prelude::*;
use varband::{APPoly, BandwidthProfile};

type P = APPoly<f64>;

fn term_strategy() -> impl Strategy<Value = (f64, Complex<f64>)> {
    (
        -30.0f64..30.0,
        -2.0f64..2.0,
        -2.0f64..2.0,
    )
        .prop_map(|(freq, re, im)| (freq, Complex::new(re, im)))
}

fn poly_strategy() -> impl Strategy<Value = Vec<(f64, Complex<f64>)>> {
    prop::collection::vec(term_strategy(), 1..6)
}

fn profile_strategy() -> impl Strategy<Value = BandwidthProfile<f64>> {
    (
        prop::collection::vec(0.2f64..10.0, 1..6),
        prop::collection::vec(0.1f64..10.0, 6),
    )
        .prop_map(|(gaps, levels)| {
            let mut knots = Vec::with_capacity(gaps.len());
            let mut t = -8.0;
            for g in gaps {
                t += g;
                knots.push(t);
            }
            let levels = levels[..knots.len() + 1].to_vec();
            BandwidthProfile::new(knots, levels).expect("valid by construction")
        })
}

proptest! {
    #[test]
    fn product_evaluates_pointwise(fa in poly_strategy(), fb in poly_strategy(), u in -50.0f64..50.0) {
        let f = P::from_terms(fa);
        let g = P::from_terms(fb);
        let lhs = f.mul(&g).eval(u);
        let rhs = f.eval(u) * g.eval(u);
        let scale = 1.0
            + f.max_coeff() * g.max_coeff() * (f.num_terms() * g.num_terms()) as f64;
        prop_assert!((lhs - rhs).norm() <= 1e-11 * scale);
    }

    #[test]
    fn modulus_squared_is_real_and_nonnegative(fa in poly_strategy(), u in -50.0f64..50.0) {
        let f = P::from_terms(fa);
        let m = f.modulus_squared();
        let v = m.eval(u);
        let scale = (f.max_coeff() * f.max_coeff()).max(1.0) * f.num_terms().pow(2) as f64;
        prop_assert!(v.re >= -1e-12 * scale);
        prop_assert!(v.im.abs() <= 1e-12 * scale);
    }

    #[test]
    fn term_order_is_irrelevant(mut fa in poly_strategy(), u in -50.0f64..50.0) {
        let f = P::from_terms(fa.clone());
        fa.reverse();
        let g = P::from_terms(fa);
        prop_assert!((f.eval(u) - g.eval(u)).norm() <= 1e-12 * (1.0 + f.max_coeff()));
    }

    #[test]
    fn conjugation_is_involutive(fa in poly_strategy(), u in -50.0f64..50.0) {
        let f = P::from_terms(fa);
        let back = f.conj().conj();
        prop_assert!((f.eval(u) - back.eval(u)).norm() <= 1e-13 * (1.0 + f.max_coeff()));
        // conj evaluates to the complex conjugate on the real line
        prop_assert!((f.conj().eval(u) - f.eval(u).conj()).norm() <= 1e-12 * (1.0 + f.max_coeff()));
    }

    #[test]
    fn mu_is_additive_and_bounded(profile in profile_strategy(),
                                  a in -20.0f64..20.0,
                                  s in 0.0f64..10.0,
                                  t in 0.0f64..10.0) {
        let b = a + s;
        let c = b + t;
        let whole = profile.mu(a, c);
        let split = profile.mu(a, b) + profile.mu(b, c);
        prop_assert!((whole - split).abs() <= 1e-14 * whole.max(1.0));
        let (qmin, qmax) = profile.q_range();
        prop_assert!(whole >= qmin * (c - a) - 1e-12);
        prop_assert!(whole <= qmax * (c - a) + 1e-12);
    }

    #[test]
    fn step_lookup_matches_linear_scan(profile in profile_strategy(), x in -30.0f64..30.0) {
        // evaluating levels[interval_index(x)] reproduces the half-open
        // convention: knots belong to the interval on their left
        let k = profile.interval_index(x);
        let mut expect = 0;
        for (i, &t) in profile.knots().iter().enumerate() {
            if x > t {
                expect = i + 1;
            }
        }
        prop_assert_eq!(k, expect);
        prop_assert_eq!(profile.level_at(x), profile.levels()[expect]);
    }

    #[test]
    fn advance_mu_round_trips(profile in profile_strategy(),
                              a in -20.0f64..20.0,
                              delta in 0.0f64..30.0) {
        let b = profile.advance_mu(a, delta);
        prop_assert!((profile.mu(a, b) - delta).abs() <= 1e-10 * (1.0 + delta));
    }
}
