//! Hidden-variable model for an arbitrary pure state and factorized observables.
//!
//! Values are X = α₁ + α₂ F and Y = β₁ + β₂ G, with F = +1 on the cap of
//! half-angle ξ around â and G = −1 on the cap of half-angle χ around b.
//! The angles fix the marginals (⟨F⟩ = −cos ξ, ⟨G⟩ = cos χ) and the angle γ
//! between â and b is solved for so that ⟨FG⟩ = −r·b.

pub mod cap;
mod solve;

pub use cap::{cap_correlation, cap_fraction, cap_intersection};
pub use solve::{assign_values, solve_ahat, solve_gamma, GammaSolution, ModelParams};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::CanonicalFrame;
use crate::linalg::{UnitVec3, Vec3};
use crate::states::LocalObservable;
use crate::tolerances::TOL;

/// arccos that tolerates rounding just outside [−1, 1] and rejects anything further.
pub fn acos_checked(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > 1.0 + TOL.acos_clamp {
        return Err(Error::AcosDomain(x));
    }
    Ok(x.clamp(-1.0, 1.0).acos())
}

/// Response angles of the sphere model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResponseAngles {
    pub xi: f64,
    pub chi: f64,
    pub cos_xi: f64,
    pub cos_chi: f64,
}

/// cos ξ = −sin2φ a′·n′ and cos χ = −sin2φ b·n′.
///
/// cos ξ is also formed from the unrotated pair a·n; the rotation preserves
/// the dot product, so the two must agree.
pub fn model_angles(
    frame: &CanonicalFrame,
    x: &LocalObservable,
    y: &LocalObservable,
) -> Result<ResponseAngles> {
    let a = x.axis();
    let a_p = frame.rotate(&a);
    let cos_xi = -frame.sin_2phi * a_p.dot(&frame.n_prime);
    let cos_xi_lab = -frame.sin_2phi * a.dot(&frame.n);
    if (cos_xi - cos_xi_lab).abs() > TOL.structural {
        return Err(Error::InvariantViolation(format!(
            "a'·n' and a·n disagree: {cos_xi} vs {cos_xi_lab}"
        )));
    }
    let cos_chi = -frame.sin_2phi * y.axis().dot(&frame.n_prime);
    Ok(ResponseAngles {
        xi: acos_checked(cos_xi)?,
        chi: acos_checked(cos_chi)?,
        cos_xi,
        cos_chi,
    })
}

/// r = cos2φ a′ + 2 (a′·n′) sin²φ n′, so that the target correlation is −r·b.
pub fn r_vector(frame: &CanonicalFrame, x: &LocalObservable) -> Vec3 {
    let a_p = frame.rotate(&x.axis()).get();
    let n_p = frame.n_prime.get();
    let s = frame.phi.sin();
    a_p.scale(frame.cos_2phi) + n_p.scale(2.0 * a_p.dot(&n_p) * s * s)
}

/// Range of ⟨FG⟩ over γ: (|cos ξ − cos χ| − 1, 1 − |cos ξ + cos χ|),
/// attained at â = b and â = −b.
pub fn correlation_bounds(cos_xi: f64, cos_chi: f64) -> (f64, f64) {
    ((cos_xi - cos_chi).abs() - 1.0, 1.0 - (cos_xi + cos_chi).abs())
}

/// Angles between a and n (τ), b and n′ (σ), a′ and b (ω).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripleAngles {
    pub tau: f64,
    pub sigma: f64,
    pub omega: f64,
}

impl TripleAngles {
    pub fn from_vectors(a: &UnitVec3, n: &UnitVec3, b: &UnitVec3, n_p: &UnitVec3, a_p: &UnitVec3) -> Self {
        TripleAngles {
            tau: a.angle_to(n),
            sigma: b.angle_to(n_p),
            omega: a_p.angle_to(b),
        }
    }

    pub fn of(frame: &CanonicalFrame, x: &LocalObservable, y: &LocalObservable) -> Self {
        let a = x.axis();
        Self::from_vectors(&a, &frame.n, &y.axis(), &frame.n_prime, &frame.rotate(&a))
    }
}

/// Slack sinτ sinσ − |cos ω − cos τ cos σ|, nonnegative for any genuine triple.
pub fn angle_inequality(t: &TripleAngles) -> (bool, f64) {
    let slack = t.tau.sin() * t.sigma.sin() - (t.omega.cos() - t.tau.cos() * t.sigma.cos()).abs();
    (slack >= -TOL.structural, slack)
}
