use std::f64::consts::PI;

use serde::Serialize;

use super::{cap_correlation, correlation_bounds, model_angles, r_vector};
use crate::error::{Error, Result};
use crate::frame::CanonicalFrame;
use crate::hidden::SphereLambda;
use crate::linalg::{UnitVec3, Vec3};
use crate::states::LocalObservable;
use crate::tolerances::TOL;

const SCAN_POINTS: u32 = 1024;

/// Everything the sphere model needs to assign values for one (ψ, X, Y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub xi: f64,
    pub chi: f64,
    pub cos_xi: f64,
    pub cos_chi: f64,
    /// a′ = Ra, the axis X is read along once the frame is applied.
    pub a_prime: UnitVec3,
    pub b: UnitVec3,
    pub r: Vec3,
    /// Target ⟨FG⟩ = −r·b.
    pub target: f64,
    pub a_hat: UnitVec3,
    /// Angle between â and b.
    pub gamma: f64,
    /// (E_min, E_max)
    pub bounds: (f64, f64),
    /// |E(γ) − target| at the returned γ.
    pub residual: f64,
    pub iterations: u32,
}

impl ModelParams {
    /// Analytic ⟨F⟩, ⟨G⟩, ⟨FG⟩.
    pub fn sign_moments(&self) -> Result<(f64, f64, f64)> {
        Ok((-self.cos_xi, self.cos_chi, cap_correlation(self.gamma, self.xi, self.chi)?))
    }
}

/// Outcome of the γ search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaSolution {
    pub gamma: f64,
    pub residual: f64,
    pub iterations: u32,
    pub scanned: bool,
}

fn bisect(target: f64, xi: f64, chi: f64, mut lo: f64, mut hi: f64) -> Result<(f64, u32)> {
    let mut it = 0;
    while hi - lo > TOL.bisection_width && it < TOL.bisection_max_iter {
        let mid = 0.5 * (lo + hi);
        if cap_correlation(mid, xi, chi)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        it += 1;
    }
    Ok((0.5 * (lo + hi), it))
}

/// γ ∈ [0, π] with E(γ) = target, by bisection on the nondecreasing E.
///
/// If the bisection result misses the target (which would mean E is not
/// monotone), a 1024-point scan brackets the root and bisection is rerun
/// inside the bracket.
pub fn solve_gamma(target: f64, xi: f64, chi: f64) -> Result<GammaSolution> {
    let e0 = cap_correlation(0.0, xi, chi)?;
    let e1 = cap_correlation(PI, xi, chi)?;
    if target < e0 - TOL.bound_slack || target > e1 + TOL.bound_slack {
        return Err(Error::InvariantViolation(format!(
            "target correlation {target} outside [{e0}, {e1}]"
        )));
    }
    let t = target.clamp(e0, e1);
    if t <= e0 {
        return Ok(GammaSolution { gamma: 0.0, residual: (e0 - target).abs(), iterations: 0, scanned: false });
    }
    if t >= e1 {
        return Ok(GammaSolution { gamma: PI, residual: (e1 - target).abs(), iterations: 0, scanned: false });
    }
    let (gamma, iterations) = bisect(t, xi, chi, 0.0, PI)?;
    let residual = (cap_correlation(gamma, xi, chi)? - target).abs();
    if residual <= TOL.root_residual {
        return Ok(GammaSolution { gamma, residual, iterations, scanned: false });
    }

    let mut prev = (0.0, e0);
    for k in 1..=SCAN_POINTS {
        let g = PI * f64::from(k) / f64::from(SCAN_POINTS);
        let e = cap_correlation(g, xi, chi)?;
        if (prev.1 - t) * (e - t) <= 0.0 {
            let (gamma, it) = bisect(t, xi, chi, prev.0, g)?;
            let residual = (cap_correlation(gamma, xi, chi)? - target).abs();
            return Ok(GammaSolution { gamma, residual, iterations: iterations + it, scanned: true });
        }
        prev = (g, e);
    }
    Err(Error::Numerical(format!("no root of E(γ) = {target} found")))
}

/// Solves for â given the state frame and the two observables.
///
/// â is placed at angle γ from b in the plane of b and a′, on a′'s side; if
/// a′ is parallel to b a fixed orthogonal direction is used.
pub fn solve_ahat(
    frame: &CanonicalFrame,
    x: &LocalObservable,
    y: &LocalObservable,
) -> Result<ModelParams> {
    let ang = model_angles(frame, x, y)?;
    let r = r_vector(frame, x);
    let b = y.axis();
    let target = -r.dot(&b.get());
    let bounds = correlation_bounds(ang.cos_xi, ang.cos_chi);
    if target < bounds.0 - TOL.bound_slack || target > bounds.1 + TOL.bound_slack {
        return Err(Error::InvariantViolation(format!(
            "target correlation {target} outside bounds {bounds:?}"
        )));
    }
    let sol = solve_gamma(target, ang.xi, ang.chi)?;
    if sol.residual > TOL.root_residual {
        return Err(Error::Numerical(format!(
            "root residual {} above tolerance",
            sol.residual
        )));
    }
    let a_prime = frame.rotate(&x.axis());
    Ok(ModelParams {
        xi: ang.xi,
        chi: ang.chi,
        cos_xi: ang.cos_xi,
        cos_chi: ang.cos_chi,
        a_prime,
        b,
        r,
        target,
        a_hat: b.rotate_toward(&a_prime.get(), sol.gamma),
        gamma: sol.gamma,
        bounds,
        residual: sol.residual,
        iterations: sol.iterations,
    })
}

/// F = +1 iff â·λ ≥ cos ξ; G = +1 iff b·λ < cos χ. Returns (X value, Y value, F, G).
pub fn assign_values(
    params: &ModelParams,
    x: &LocalObservable,
    y: &LocalObservable,
    lambda: &SphereLambda,
) -> (f64, f64, i8, i8) {
    let l = lambda.vec();
    let f = if params.a_hat.get().dot(&l) >= params.cos_xi { 1 } else { -1 };
    let g = if params.b.get().dot(&l) < params.cos_chi { 1 } else { -1 };
    (x.value(f), y.value(g), f, g)
}
