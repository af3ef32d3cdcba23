//! Property tests over randomly generated states, observables and angles.

use std::f64::consts::PI;

use hv2q_core::frame::{reconstruction_residual, CanonicalFrame};
use hv2q_core::general::{cap_correlation, cap_fraction, cap_intersection, correlation_bounds, solve_ahat};
use hv2q_core::linalg::{Vec3, C64};
use hv2q_core::minimal::{circle_correlation, minimal_correlation, minimal_theta_hat};
use hv2q_core::oracle::{joint_probabilities, qm_averages};
use hv2q_core::report::fmt17;
use hv2q_core::states::{LocalObservable, TwoQubitState};
use proptest::prelude::*;

fn arb_state() -> impl Strategy<Value = TwoQubitState> {
    prop::array::uniform8(-1.0..1.0f64)
        .prop_filter("nonzero", |a| a.iter().map(|x| x * x).sum::<f64>() > 1e-6)
        .prop_map(|a| {
            TwoQubitState::from_amplitudes([0, 1, 2, 3].map(|i| C64::new(a[2 * i], a[2 * i + 1]))).unwrap()
        })
}

fn arb_observable() -> impl Strategy<Value = LocalObservable> {
    (-2.0..2.0f64, 0.01..2.0f64, prop::array::uniform3(-1.0..1.0f64))
        .prop_filter("nonzero axis", |(_, _, v)| Vec3(*v).norm() > 1e-3)
        .prop_map(|(a1, a2, v)| LocalObservable::canonicalize(a1, a2, Vec3(v)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fmt17_round_trips(bits in any::<u64>()) {
        let v = f64::from_bits(bits);
        prop_assume!(v.is_finite());
        prop_assert_eq!(fmt17(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
    }

    #[test]
    fn cap_overlap_is_bounded_symmetric_and_monotone(
        g1 in 0.0..PI, g2 in 0.0..PI, xi in 0.0..PI, chi in 0.0..PI,
    ) {
        let (lo, hi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
        let i_lo = cap_intersection(lo, xi, chi).unwrap();
        let i_hi = cap_intersection(hi, xi, chi).unwrap();
        let cap = cap_fraction(xi).min(cap_fraction(chi));
        prop_assert!(i_lo >= -1e-13 && i_lo <= cap + 1e-13);
        prop_assert!(i_hi <= i_lo + 1e-12);
        prop_assert!((cap_intersection(lo, chi, xi).unwrap() - i_lo).abs() <= 1e-12);
        // inclusion–exclusion: the union never exceeds the sphere
        prop_assert!(cap_fraction(xi) + cap_fraction(chi) - i_lo <= 1.0 + 1e-12);
    }

    #[test]
    fn cap_correlation_stays_within_bounds(gamma in 0.0..PI, xi in 0.0..PI, chi in 0.0..PI) {
        let e = cap_correlation(gamma, xi, chi).unwrap();
        let (lo, hi) = correlation_bounds(xi.cos(), chi.cos());
        prop_assert!(e >= lo - 1e-10 && e <= hi + 1e-10, "{} not in [{}, {}]", e, lo, hi);
    }

    #[test]
    fn frame_reconstructs_every_state(psi in arb_state()) {
        let f = CanonicalFrame::new(&psi).unwrap();
        prop_assert!(f.residual <= 1e-10);
        prop_assert!(reconstruction_residual(&psi, &(f.n_op * f.u)) <= 1e-10);
        prop_assert!((0.0..=PI / 4.0 + 1e-15).contains(&f.phi));
        prop_assert!((f.sin_2phi.powi(2) + f.cos_2phi.powi(2) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sphere_model_matches_born_rule(psi in arb_state(), x in arb_observable(), y in arb_observable()) {
        let f = CanonicalFrame::new(&psi).unwrap();
        let p = solve_ahat(&f, &x, &y).unwrap();
        prop_assert!(p.target >= p.bounds.0 - 1e-12 && p.target <= p.bounds.1 + 1e-12);
        let (sf, sg, sfg) = p.sign_moments().unwrap();
        let q = qm_averages(&psi, &x, &y).unwrap().direct;
        let (a1, a2, b1, b2) = (x.alpha1(), x.alpha2(), y.alpha1(), y.alpha2());
        prop_assert!((a1 + a2 * sf - q.x).abs() <= 1e-8);
        prop_assert!((b1 + b2 * sg - q.y).abs() <= 1e-8);
        let xy = a1 * b1 + a1 * b2 * sg + a2 * b1 * sf + a2 * b2 * sfg;
        prop_assert!((xy - q.xy).abs() <= 1e-8);
        let born = joint_probabilities(&psi, &x, &y).unwrap();
        prop_assert!((born.total() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn circle_model_stays_in_its_regime(psi in arb_state(), x in arb_observable(), y in arb_observable()) {
        let f = CanonicalFrame::new(&psi).unwrap();
        let p = minimal_theta_hat(&f, &x, &y).unwrap();
        prop_assert!(p.theta_hat <= p.xi + p.chi + 1e-12);
        let closed = minimal_correlation(p.xi, p.chi, p.theta_hat);
        prop_assert!((closed - circle_correlation(p.xi, p.chi, p.theta_hat)).abs() <= 1e-12);
        prop_assert!((closed - p.target).abs() <= 1e-9);
    }
}
