//! Overlap of two spherical caps and the correlation E(γ) built from it.
//!
//! Cap F has half-angle ξ around â, cap G has half-angle χ around b, and γ
//! is the angle between the axes. With b along z, the ring at polar angle θ
//! meets cap F on an azimuthal arc of width 2 arccos q(θ), where
//! q = (cos ξ − cos γ cos θ)/(sin γ sin θ). The arc is partial only between
//! the breakpoints |γ − ξ|, γ + ξ and 2π − γ − ξ, so full and empty rings are
//! integrated exactly and partial rings by tanh-sinh.

use std::f64::consts::{PI, TAU};

use crate::error::Result;
use crate::quadrature::tanh_sinh_bounded;
use crate::tolerances::TOL;

/// Normalized area (1 − cos ξ)/2 of a cap of half-angle ξ.
pub fn cap_fraction(xi: f64) -> f64 {
    0.5 * (1.0 - xi.cos())
}

/// Azimuthal width of the part of the ring at polar angle θ (measured from b)
/// that lies inside the cap of half-angle ξ around an axis at angle γ from b.
fn ring_width(theta: f64, gamma: f64, cos_xi: f64) -> f64 {
    let (sg, cg) = gamma.sin_cos();
    let (st, ct) = theta.sin_cos();
    let den = sg * st;
    let num = cos_xi - cg * ct;
    if den <= 0.0 {
        return if num <= 0.0 { TAU } else { 0.0 };
    }
    let q = num / den;
    if q >= 1.0 {
        0.0
    } else if q <= -1.0 {
        TAU
    } else {
        2.0 * q.acos()
    }
}

/// Normalized area of the intersection of the two caps.
pub fn cap_intersection(gamma: f64, xi: f64, chi: f64) -> Result<f64> {
    let (a, b) = (cap_fraction(xi), cap_fraction(chi));
    if xi <= 0.0 || chi <= 0.0 {
        return Ok(0.0);
    }
    if xi >= PI {
        return Ok(b);
    }
    if chi >= PI {
        return Ok(a);
    }
    if gamma <= 0.0 {
        return Ok(a.min(b));
    }
    if gamma >= PI {
        return Ok((a + b - 1.0).max(0.0));
    }
    let cos_xi = xi.cos();
    let mut cuts = vec![0.0, chi];
    for c in [(gamma - xi).abs(), gamma + xi, TAU - gamma - xi] {
        if c > 0.0 && c < chi {
            cuts.push(c);
        }
    }
    cuts.sort_by(f64::total_cmp);

    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let width = ring_width(0.5 * (lo + hi), gamma, cos_xi);
        total += if width == 0.0 {
            0.0
        } else if width == TAU {
            TAU * (lo.cos() - hi.cos())
        } else {
            tanh_sinh_bounded(
                |t| ring_width(t, gamma, cos_xi) * t.sin(),
                lo,
                hi,
                TOL.quadrature,
            )?
        };
    }
    Ok(total / (4.0 * PI))
}

/// E(γ) = ⟨FG⟩ = 2A + 2B − 4I(γ) − 1 with F = +1 on cap F and G = −1 on cap G.
pub fn cap_correlation(gamma: f64, xi: f64, chi: f64) -> Result<f64> {
    let i = cap_intersection(gamma, xi, chi)?;
    Ok(2.0 * cap_fraction(xi) + 2.0 * cap_fraction(chi) - 4.0 * i - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hidden::{sample_sphere, McPlan};
    use crate::linalg::{UnitVec3, Vec3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Lens area of two caps from spherical trigonometry (Gauss–Bonnet on the
    /// lune bounded by the two circles), normalized by 4π.
    fn lens_closed_form(d: f64, r1: f64, r2: f64) -> f64 {
        let a1 = 2.0 * PI * (1.0 - r1.cos());
        let a2 = 2.0 * PI * (1.0 - r2.cos());
        let area = if d <= (r1 - r2).abs() {
            a1.min(a2)
        } else if d >= r1 + r2 {
            0.0
        } else if d >= TAU - r1 - r2 {
            a1 + a2 - 4.0 * PI
        } else {
            let c = |x: f64| x.clamp(-1.0, 1.0).acos();
            let (s1, c1) = r1.sin_cos();
            let (s2, c2) = r2.sin_cos();
            let (sd, cd) = d.sin_cos();
            2.0 * (PI
                - c((cd - c1 * c2) / (s1 * s2))
                - c((c2 - cd * c1) / (sd * s1)) * c1
                - c((c1 - cd * c2) / (sd * s2)) * c2)
        };
        area / (4.0 * PI)
    }

    #[test]
    fn hemispheres_give_linear_correlation() {
        let h = PI / 2.0;
        for k in 0..=100 {
            let g = PI * f64::from(k) / 100.0;
            let e = cap_correlation(g, h, h).unwrap();
            assert!((e - (2.0 * g / PI - 1.0)).abs() < 1e-12, "γ = {g}: {e}");
        }
    }

    #[test]
    fn hemisphere_overlap_agrees_with_monte_carlo() {
        let g = 1.1;
        let n = 1_000_000u64;
        let b = UnitVec3::Z;
        let a_hat = b.rotate_toward(&Vec3::X, g);
        let hits = McPlan::new(n, 77)
            .run(
                |rng, m| {
                    let mut c = 0u64;
                    for _ in 0..m {
                        let l = sample_sphere(rng).vec();
                        if l.dot(&a_hat.get()) >= 0.0 && l.dot(&b.get()) >= 0.0 {
                            c += 1;
                        }
                    }
                    c
                },
                |x, y| x + y,
            )
            .unwrap();
        let p = (PI - g) / TAU;
        let frac = hits as f64 / n as f64;
        assert!((frac - p).abs() < 4.0 * (p * (1.0 - p) / n as f64).sqrt());
        assert!((cap_intersection(g, PI / 2.0, PI / 2.0).unwrap() - p).abs() < 1e-12);
    }

    #[test]
    fn matches_closed_form_lens_area() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5000 {
            let xi = rng.random_range(0.0..PI);
            let chi = rng.random_range(0.0..PI);
            let g = rng.random_range(0.0..PI);
            let q = cap_intersection(g, xi, chi).unwrap();
            let c = lens_closed_form(g, xi, chi);
            assert!((q - c).abs() < 1e-11, "γ={g} ξ={xi} χ={chi}: {q} vs {c}");
        }
    }

    #[test]
    fn endpoints_match_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..2000 {
            let xi = rng.random_range(0.0..=PI);
            let chi = rng.random_range(0.0..=PI);
            let (cx, cc) = (xi.cos(), chi.cos());
            // approach the endpoints through the generic path too
            for g in [0.0, 1e-9] {
                let e = cap_correlation(g, xi, chi).unwrap();
                assert!((e - ((cx - cc).abs() - 1.0)).abs() < 1e-8);
            }
            for g in [PI, PI - 1e-9] {
                let e = cap_correlation(g, xi, chi).unwrap();
                assert!((e - (1.0 - (cx + cc).abs())).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn correlation_is_monotone_in_gamma() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let xi = rng.random_range(0.0..=PI);
            let chi = rng.random_range(0.0..=PI);
            let mut prev = cap_correlation(0.0, xi, chi).unwrap();
            for k in 1..=256 {
                let e = cap_correlation(PI * f64::from(k) / 256.0, xi, chi).unwrap();
                assert!(e >= prev - 1e-12, "ξ={xi} χ={chi} k={k}");
                prev = e;
            }
        }
    }

    #[test]
    fn random_caps_agree_with_monte_carlo() {
        let (xi, chi, g): (f64, f64, f64) = (0.9, 2.1, 1.7);
        let n = 1_000_000u64;
        let b = UnitVec3::Z;
        let a_hat = b.rotate_toward(&Vec3::Y, g);
        let (cx, cc) = (xi.cos(), chi.cos());
        let s = McPlan::new(n, 78)
            .run(
                |rng, m| {
                    let mut acc = 0i64;
                    for _ in 0..m {
                        let l = sample_sphere(rng).vec();
                        let f: i64 = if a_hat.get().dot(&l) >= cx { 1 } else { -1 };
                        let gg: i64 = if b.get().dot(&l) < cc { 1 } else { -1 };
                        acc += f * gg;
                    }
                    acc
                },
                |x, y| x + y,
            )
            .unwrap();
        let e = cap_correlation(g, xi, chi).unwrap();
        let sigma = ((1.0 - e * e) / n as f64).sqrt();
        assert!((s as f64 / n as f64 - e).abs() < 4.0 * sigma);
    }
}
