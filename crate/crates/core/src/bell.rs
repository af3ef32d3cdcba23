//! Bell's deterministic model for the singlet.
//!
//! Single measurements: A = sign(a·λ), B = −sign(b·λ). Joint measurements
//! replace a by â, the vector at angle θ̂ = π(1 − a·b)/2 from b, which makes
//! ⟨AB⟩ = 2θ̂/π − 1 = −a·b.

use std::f64::consts::PI;

pub use crate::hidden::sample_sphere;
use crate::hidden::SphereLambda;
use crate::linalg::UnitVec3;

/// sign with sign(0) = +1.
pub fn sign(x: f64) -> i8 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

/// θ̂ and â. â lies in span{a, b} on a's side of b; for a ∥ ±b it is ±b.
pub fn bell_theta_hat(a: &UnitVec3, b: &UnitVec3) -> (f64, UnitVec3) {
    let c = a.dot(b).clamp(-1.0, 1.0);
    let theta_hat = 0.5 * PI * (1.0 - c);
    (theta_hat, b.rotate_toward(&a.get(), theta_hat))
}

/// Values when each party measures alone.
pub fn bell_assign_single(a: &UnitVec3, b: &UnitVec3, lambda: &SphereLambda) -> (i8, i8) {
    let l = lambda.vec();
    (sign(a.get().dot(&l)), -sign(b.get().dot(&l)))
}

/// Values in a joint measurement, with a replaced by â.
pub fn bell_assign_joint(a: &UnitVec3, b: &UnitVec3, lambda: &SphereLambda) -> (i8, i8) {
    let (_, a_hat) = bell_theta_hat(a, b);
    bell_assign_single(&a_hat, b, lambda)
}

/// Analytic ⟨AB⟩ in a joint measurement: 2θ̂/π − 1.
pub fn bell_correlation(a: &UnitVec3, b: &UnitVec3) -> f64 {
    2.0 * bell_theta_hat(a, b).0 / PI - 1.0
}
