//! Minimal model: one real hidden parameter, an angle on the unit circle.
//!
//! ξ = π(1 + sin2φ a′·n′)/2 and χ = π(1 + sin2φ b·n′)/2 make the arc
//! fractions reproduce the marginals. b sits at angle 0 and â at angle θ̂, with
//! θ̂ = π(1 − r·b)/2, which gives ⟨FG⟩ = (2/π) min{ξ + χ, θ̂} − 1 = −r·b.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::CanonicalFrame;
use crate::general::{model_angles, r_vector};
use crate::hidden::CircleLambda;
use crate::linalg::UnitVec3;
pub use crate::hidden::sample_circle;
use crate::states::LocalObservable;
use crate::tolerances::TOL;

/// Arc half-widths of the minimal model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimalAngles {
    pub xi: f64,
    pub chi: f64,
}

pub fn minimal_angles(
    frame: &CanonicalFrame,
    x: &LocalObservable,
    y: &LocalObservable,
) -> MinimalAngles {
    let s = frame.sin_2phi;
    let an = frame.rotate(&x.axis()).dot(&frame.n_prime);
    let bn = y.axis().dot(&frame.n_prime);
    MinimalAngles {
        xi: (0.5 * PI * (1.0 + s * an)).clamp(0.0, PI),
        chi: (0.5 * PI * (1.0 + s * bn)).clamp(0.0, PI),
    }
}

/// Parameters of the minimal model for one (ψ, X, Y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimalParams {
    pub xi: f64,
    pub chi: f64,
    /// Circle position of â; b is at 0.
    pub theta_hat: f64,
    /// Target ⟨FG⟩ = −r·b.
    pub target: f64,
    /// ξ + χ − θ̂, nonnegative in the operative regime.
    pub regime_slack: f64,
}

impl MinimalParams {
    /// Analytic ⟨F⟩, ⟨G⟩, ⟨FG⟩.
    pub fn sign_moments(&self) -> (f64, f64, f64) {
        (
            2.0 * self.xi / PI - 1.0,
            1.0 - 2.0 * self.chi / PI,
            minimal_correlation(self.xi, self.chi, self.theta_hat),
        )
    }
}

/// θ̂ = (π/2)(1 − r·b), checked against θ̂ ≤ ξ + χ.
pub fn minimal_theta_hat(
    frame: &CanonicalFrame,
    x: &LocalObservable,
    y: &LocalObservable,
) -> Result<MinimalParams> {
    let ang = minimal_angles(frame, x, y);
    let rb = r_vector(frame, x).dot(&y.axis().get());
    let theta_hat = (0.5 * PI * (1.0 - rb)).clamp(0.0, PI);
    let regime_slack = ang.xi + ang.chi - theta_hat;
    if regime_slack < -TOL.bound_slack {
        return Err(Error::InvariantViolation(format!(
            "theta_hat {theta_hat} exceeds xi + chi = {}",
            ang.xi + ang.chi
        )));
    }
    Ok(MinimalParams {
        xi: ang.xi,
        chi: ang.chi,
        theta_hat,
        target: -rb,
        regime_slack,
    })
}

/// (2/π) min{ξ + χ, θ̂} − 1
pub fn minimal_correlation(xi: f64, chi: f64, theta_hat: f64) -> f64 {
    2.0 / PI * (xi + chi).min(theta_hat) - 1.0
}

/// Length of the intersection of the arcs [−p, p] and [d − q, d + q] on the circle.
pub fn arc_overlap(p: f64, q: f64, d: f64) -> f64 {
    let mut total = 0.0;
    for k in [-1.0, 0.0, 1.0] {
        let lo = (-p).max(d - q + k * TAU);
        let hi = p.min(d + q + k * TAU);
        total += (hi - lo).max(0.0);
    }
    total
}

/// ⟨FG⟩ on the circle from the arc overlap, valid for every (ξ, χ, θ̂).
pub fn circle_correlation(xi: f64, chi: f64, theta_hat: f64) -> f64 {
    let i = arc_overlap(xi, chi, theta_hat) / TAU;
    2.0 * xi / PI + 2.0 * chi / PI - 4.0 * i - 1.0
}

/// Joint table of (F, G) from the arc measures, indexed like [`crate::oracle::JointTable`].
pub fn circle_table(xi: f64, chi: f64, theta_hat: f64) -> [[f64; 2]; 2] {
    let a = xi / PI;
    let b = chi / PI;
    let i = arc_overlap(xi, chi, theta_hat) / TAU;
    [[a - i, i], [1.0 - a - b + i, b - i]]
}

/// Angular distance in [0, π].
pub fn circle_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Response signs on the circle: F = +1 within ξ of â, G = −1 within χ of b.
pub fn minimal_signs(params: &MinimalParams, lambda: &CircleLambda) -> (i8, i8) {
    let f = if circle_distance(lambda.angle, params.theta_hat) <= params.xi { 1 } else { -1 };
    let g = if circle_distance(lambda.angle, 0.0) > params.chi { 1 } else { -1 };
    (f, g)
}

/// Outcome values (X, Y) for one λ on the circle.
pub fn assign_minimal(
    params: &MinimalParams,
    x: &LocalObservable,
    y: &LocalObservable,
    lambda: &CircleLambda,
) -> (f64, f64) {
    let (f, g) = minimal_signs(params, lambda);
    (x.value(f), y.value(g))
}

/// One partner setting in a locality probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefectEntry {
    pub b: UnitVec3,
    /// |⟨FG⟩ − ⟨F⟩⟨G⟩| with the sphere-model marginals.
    pub defect: f64,
    /// cos2φ |a′·b − (1 − cos2φ)(a′·n′)(n′·b)|, the same quantity expanded.
    pub defect_closed_form: f64,
}

/// Whether a product-form (local) response could reproduce the correlations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalityReport {
    pub phi: f64,
    pub entries: Vec<DefectEntry>,
    pub sup_defect: f64,
    /// Supremum over all unit b: cos2φ √(1 − sin²2φ (a′·n′)²).
    pub sup_defect_all_b: f64,
    pub local: bool,
    pub verdict: String,
}

/// Factorization defect D(a, b) = |(−r·b) − (−cos ξ)(cos χ)| for each partner.
pub fn locality_probe(
    frame: &CanonicalFrame,
    x: &LocalObservable,
    ys: &[LocalObservable],
) -> Result<LocalityReport> {
    let c2 = frame.cos_2phi;
    let a_p = frame.rotate(&x.axis());
    let an = a_p.dot(&frame.n_prime);
    let r = r_vector(frame, x);
    let mut entries = Vec::with_capacity(ys.len());
    for y in ys {
        let b = y.axis();
        let ang = model_angles(frame, x, y)?;
        let defect = (-r.dot(&b.get()) + ang.cos_xi * ang.cos_chi).abs();
        let bn = b.dot(&frame.n_prime);
        let defect_closed_form = c2 * (a_p.dot(&b) - (1.0 - c2) * an * bn).abs();
        entries.push(DefectEntry {
            b,
            defect,
            defect_closed_form,
        });
    }
    let sup_defect = entries.iter().map(|e| e.defect).fold(0.0, f64::max);
    let s2 = frame.sin_2phi;
    let sup_defect_all_b = c2 * (1.0 - s2 * s2 * an * an).max(0.0).sqrt();
    let local = sup_defect <= TOL.spectral;
    let verdict = if local {
        "factorizable: a local response reproduces every sampled correlation"
    } else {
        "not factorizable: the response to X must depend on the remote setting"
    };
    Ok(LocalityReport {
        phi: frame.phi,
        entries,
        sup_defect,
        sup_defect_all_b,
        local,
        verdict: verdict.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hidden::McPlan;
    use crate::linalg::{Ket, Vec3};
    use crate::oracle::qm_averages_with;
    use crate::states::{
        random_axis_with, random_observable_with, random_state_with, singlet, TwoQubitState,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn singlet_angles_and_theta_hat() {
        let f = CanonicalFrame::new(&singlet()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let x = LocalObservable::spin(random_axis_with(&mut rng));
            let y = LocalObservable::spin(random_axis_with(&mut rng));
            let p = minimal_theta_hat(&f, &x, &y).unwrap();
            assert!((p.xi - PI / 2.0).abs() < 1e-12 && (p.chi - PI / 2.0).abs() < 1e-12);
            let ab = x.axis().dot(&y.axis());
            assert!((p.theta_hat - PI * (1.0 - ab) / 2.0).abs() < 1e-12);
            assert!((minimal_correlation(p.xi, p.chi, p.theta_hat) + ab).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenstate_limit_and_zero_theta() {
        let psi = TwoQubitState::schmidt_form(1.0).unwrap();
        let f = CanonicalFrame::new(&psi).unwrap();
        let x = LocalObservable::spin(f.n);
        assert!((minimal_angles(&f, &x, &x).xi - PI).abs() < 1e-12);
        assert_eq!(minimal_correlation(0.3, 0.4, 0.0), -1.0);
    }

    #[test]
    fn arc_overlap_covers_all_configurations() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        // brute-force check on a fine grid of the circle
        for _ in 0..200 {
            let p = rng.random_range(0.0..=PI);
            let q = rng.random_range(0.0..=PI);
            let d = rng.random_range(0.0..=PI);
            let m = 100_000;
            let inside = (0..m)
                .filter(|k| {
                    let t = TAU * (f64::from(*k) + 0.5) / f64::from(m);
                    circle_distance(t, 0.0) <= p && circle_distance(t, d) <= q
                })
                .count();
            let grid = TAU * inside as f64 / f64::from(m);
            assert!((grid - arc_overlap(p, q, d)).abs() < 4.0 * TAU / f64::from(m));
        }
    }

    #[test]
    fn closed_form_matches_arc_integration_in_the_operative_regime() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100_000 {
            let psi = random_state_with(&mut rng);
            let x = random_observable_with(&mut rng);
            let y = random_observable_with(&mut rng);
            let f = CanonicalFrame::new(&psi).unwrap();
            let p = minimal_theta_hat(&f, &x, &y).unwrap();
            assert!(p.regime_slack >= -1e-12);
            let e = minimal_correlation(p.xi, p.chi, p.theta_hat);
            assert!((e - circle_correlation(p.xi, p.chi, p.theta_hat)).abs() < 1e-12);
            assert!((e - p.target).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_moments_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let psi = random_state_with(&mut rng);
            let x = random_observable_with(&mut rng);
            let y = random_observable_with(&mut rng);
            let f = CanonicalFrame::new(&psi).unwrap();
            let q = qm_averages_with(&psi, &f, &x, &y).unwrap().direct;
            let p = minimal_theta_hat(&f, &x, &y).unwrap();
            let (mf, mg, mfg) = p.sign_moments();
            let (a1, a2, b1, b2) = (x.alpha1(), x.alpha2(), y.alpha1(), y.alpha2());
            assert!((a1 + a2 * mf - q.x).abs() < 1e-10);
            assert!((b1 + b2 * mg - q.y).abs() < 1e-10);
            let xy = a1 * b1 + a1 * b2 * mg + a2 * b1 * mf + a2 * b2 * mfg;
            assert!((xy - q.xy).abs() < 1e-10);
        }
    }

    #[test]
    fn circle_monte_carlo_matches_correlation() {
        let (xi, chi, th) = (1.1, 2.3, 1.9);
        let params = MinimalParams {
            xi,
            chi,
            theta_hat: th,
            target: 0.0,
            regime_slack: xi + chi - th,
        };
        let n = 1_000_000u64;
        let s = McPlan::new(n, 5)
            .run(
                |rng, m| {
                    let mut acc = 0i64;
                    for _ in 0..m {
                        let (f, g) = minimal_signs(&params, &sample_circle(rng));
                        acc += i64::from(f * g);
                    }
                    acc
                },
                |a, b| a + b,
            )
            .unwrap();
        let e = minimal_correlation(xi, chi, th);
        let sigma = ((1.0 - e * e) / n as f64).sqrt();
        assert!((s as f64 / n as f64 - e).abs() < 4.0 * sigma);
    }

    #[test]
    fn full_arc_fixes_the_value() {
        let p = MinimalParams {
            xi: PI,
            chi: 0.5,
            theta_hat: 1.0,
            target: 0.0,
            regime_slack: 0.0,
        };
        let x = LocalObservable::canonicalize(0.3, 0.7, Vec3::X).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10_000 {
            let (xv, _) = assign_minimal(&p, &x, &x, &sample_circle(&mut rng));
            assert_eq!(xv, 1.0);
        }
    }

    fn partners(rng: &mut ChaCha8Rng, k: usize) -> Vec<LocalObservable> {
        (0..k).map(|_| LocalObservable::spin(random_axis_with(rng))).collect()
    }

    #[test]
    fn product_states_have_no_defect() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let l = random_state_with(&mut rng).ket().0;
            let left = Ket([l[0], l[1]]).normalized().unwrap();
            let right = Ket([l[2], l[3]]).normalized().unwrap();
            let psi = TwoQubitState::product(&left, &right).unwrap();
            let f = CanonicalFrame::new(&psi).unwrap();
            let x = LocalObservable::spin(random_axis_with(&mut rng));
            let rep = locality_probe(&f, &x, &partners(&mut rng, 20)).unwrap();
            assert!(rep.local && rep.sup_defect < 1e-10 && rep.sup_defect_all_b < 1e-6);
        }
    }

    #[test]
    fn singlet_equal_axes_have_unit_defect() {
        let f = CanonicalFrame::new(&singlet()).unwrap();
        let x = LocalObservable::spin(UnitVec3::Y);
        let rep = locality_probe(&f, &x, &[x]).unwrap();
        assert!((rep.sup_defect - 1.0).abs() < 1e-12);
        assert!(!rep.local);
    }

    #[test]
    fn defect_is_the_quantum_spin_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..500 {
            let psi = random_state_with(&mut rng);
            let f = CanonicalFrame::new(&psi).unwrap();
            let x = LocalObservable::spin(random_axis_with(&mut rng));
            let y = LocalObservable::spin(random_axis_with(&mut rng));
            let q = qm_averages_with(&psi, &f, &x, &y).unwrap().direct;
            let rep = locality_probe(&f, &x, &[y]).unwrap();
            let e = rep.entries[0];
            assert!((e.defect - (q.xy - q.x * q.y).abs()).abs() < 1e-10);
            assert!((e.defect - e.defect_closed_form).abs() < 1e-12);
            assert!(e.defect <= rep.sup_defect_all_b + 1e-12);
        }
    }

    #[test]
    fn sup_defect_decreases_with_phi() {
        let x = LocalObservable::spin(UnitVec3::normalize(Vec3::new(1.0, 0.5, 0.3)).unwrap());
        let mut prev = f64::INFINITY;
        for k in 0..=20 {
            let phi = PI / 4.0 * f64::from(k) / 20.0;
            let mu1 = 0.5 * (1.0 + (2.0 * phi).sin());
            let f = CanonicalFrame::new(&TwoQubitState::schmidt_form(mu1).unwrap()).unwrap();
            let rep = locality_probe(&f, &x, &[]).unwrap();
            assert!(rep.sup_defect_all_b < prev);
            prev = rep.sup_defect_all_b;
        }
        assert!(prev < 1e-6);
    }
}
