//! The models are contextual: the value they give X depends on what is
//! measured alongside it.
//!
//! Two demonstrations: the λ-measure on which X's value in a joint measurement
//! differs from its value when measured alone, and the Peres square, nine
//! two-qubit observables whose row and column products rule out any
//! context-free ±1 assignment.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::Result;
use crate::frame::CanonicalFrame;
use crate::general::{assign_values, cap_fraction, cap_intersection, solve_ahat, ModelParams};
use crate::hidden::{sample_sphere, McPlan};
use crate::linalg::{paulis, tensor_product, CMat2, CMat4, UnitVec3, C64};
use crate::states::{singlet, LocalObservable, TwoQubitState};

/// Disagreement between joint-context and single-context values of X for one
/// choice of the single-context cap axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Disagreement {
    pub single_axis: UnitVec3,
    /// Angle between â and the single-context axis.
    pub angle: f64,
    /// angle/π, the measure for hemispherical caps.
    pub angle_over_pi: f64,
    /// Measure of the symmetric difference of the two caps of half-angle ξ.
    pub analytic: f64,
    pub mc: f64,
    pub mc_stderr: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ViolationReport {
    pub params: ModelParams,
    /// Single-context axis a′ = Ra (the frame-rotated axis that carries ⟨X⟩).
    pub rotated_axis: Disagreement,
    /// Single-context axis a, the laboratory axis of X.
    pub lab_axis: Disagreement,
    pub samples: u64,
    pub seed: u64,
}

/// Normalized measure of the symmetric difference of two caps with the same
/// half-angle ξ whose axes are `delta` apart.
pub fn cap_symmetric_difference(delta: f64, xi: f64) -> Result<f64> {
    Ok(2.0 * (cap_fraction(xi) - cap_intersection(delta, xi, xi)?))
}

/// Where (X ⊗ I)(λ)·(I ⊗ Y)(λ) differs from (X ⊗ Y)(λ) in the sphere model.
///
/// In a joint measurement F uses the cap around â; alone, X is read from a cap
/// of the same half-angle around a single-context axis. Both candidate axes are
/// reported.
pub fn product_rule_violation(
    psi: &TwoQubitState,
    x: &LocalObservable,
    y: &LocalObservable,
    n_samples: u64,
    seed: u64,
) -> Result<ViolationReport> {
    let frame = CanonicalFrame::new(psi)?;
    let p = solve_ahat(&frame, x, y)?;
    let axes = [p.a_prime, x.axis()];
    let plan = McPlan::new(n_samples, seed);
    let counts = plan
        .run(
            |rng, n| {
                let mut c = [0u64; 2];
                for _ in 0..n {
                    let l = sample_sphere(rng);
                    let (_, _, f, _) = assign_values(&p, x, y, &l);
                    for (k, ax) in axes.iter().enumerate() {
                        let fs = if ax.get().dot(&l.vec()) >= p.cos_xi { 1 } else { -1 };
                        if fs != f {
                            c[k] += 1;
                        }
                    }
                }
                c
            },
            |a, b| [a[0] + b[0], a[1] + b[1]],
        )
        .unwrap_or([0, 0]);
    let n = n_samples.max(1) as f64;
    let mut out = Vec::with_capacity(2);
    for (k, ax) in axes.iter().enumerate() {
        let angle = p.a_hat.angle_to(ax);
        let analytic = cap_symmetric_difference(angle, p.xi)?;
        let mc = counts[k] as f64 / n;
        let mc_stderr = (analytic * (1.0 - analytic) / n).sqrt();
        out.push(Disagreement {
            single_axis: *ax,
            angle,
            angle_over_pi: angle / PI,
            analytic,
            mc,
            mc_stderr,
            pass: (mc - analytic).abs() <= 4.0 * mc_stderr.max(1e-12),
        });
    }
    Ok(ViolationReport {
        params: p,
        rotated_axis: out[0],
        lab_axis: out[1],
        samples: n_samples,
        seed,
    })
}

/// Single-qubit factor of a Peres-square entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Factor {
    I,
    X,
    Y,
    Z,
}

impl Factor {
    pub fn matrix(self) -> CMat2 {
        let s = paulis();
        match self {
            Factor::I => CMat2::identity(),
            Factor::X => s[0],
            Factor::Y => s[1],
            Factor::Z => s[2],
        }
    }

    pub fn observable(self) -> LocalObservable {
        match self {
            Factor::I => LocalObservable::identity(),
            Factor::X => LocalObservable::spin(UnitVec3::X),
            Factor::Y => LocalObservable::spin(UnitVec3::Y),
            Factor::Z => LocalObservable::spin(UnitVec3::Z),
        }
    }
}

/// The 3×3 array, row by row.
pub const PERES: [[(Factor, Factor); 3]; 3] = {
    use Factor::*;
    [
        [(X, I), (I, X), (X, X)],
        [(I, Y), (Y, I), (Y, Y)],
        [(X, Y), (Y, X), (Z, Z)],
    ]
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareEntry {
    pub label: String,
    pub first: Factor,
    pub second: Factor,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareReport {
    pub entries: Vec<SquareEntry>,
    /// ±1 for each row product (+1 means the product is +I).
    pub row_signs: [i8; 3],
    pub column_signs: [i8; 3],
    /// Largest |product − (±I)| entry over all six products.
    pub product_residual: f64,
    /// Context-free ±1 assignments satisfying all six constraints (out of 512).
    pub consistent_assignments: u32,
    pub model_samples: u64,
    pub model_seed: u64,
    /// Fraction of λ at which the model's per-entry values break each row identity.
    pub row_violation: [f64; 3],
    pub column_violation: [f64; 3],
    /// Fraction of λ breaking at least one of the six identities.
    pub any_violation: f64,
}

fn label(f: Factor) -> &'static str {
    match f {
        Factor::I => "I",
        Factor::X => "sx",
        Factor::Y => "sy",
        Factor::Z => "sz",
    }
}

fn product_sign(ms: [CMat4; 3]) -> (i8, f64) {
    let p = ms[0] * ms[1] * ms[2];
    let id = CMat4::identity();
    let plus = p.max_abs_diff(&id);
    let minus = p.max_abs_diff(&id.scale(C64::new(-1.0, 0.0)));
    if plus <= minus {
        (1, plus)
    } else {
        (-1, minus)
    }
}

/// Matrix products of rows and columns, and the number of ±1 assignments to
/// the nine entries that reproduce those signs.
pub fn peres_signs() -> ([i8; 3], [i8; 3], f64, u32) {
    let m = PERES.map(|row| row.map(|(a, b)| tensor_product(&a.matrix(), &b.matrix())));
    let mut residual: f64 = 0.0;
    let mut rows = [0i8; 3];
    let mut cols = [0i8; 3];
    for i in 0..3 {
        let (s, r) = product_sign(m[i]);
        rows[i] = s;
        residual = residual.max(r);
        let (s, r) = product_sign([m[0][i], m[1][i], m[2][i]]);
        cols[i] = s;
        residual = residual.max(r);
    }
    let consistent = (0u32..512)
        .filter(|bits| {
            let v = |i: usize, j: usize| if bits >> (3 * i + j) & 1 == 1 { -1i8 } else { 1 };
            (0..3).all(|i| v(i, 0) * v(i, 1) * v(i, 2) == rows[i])
                && (0..3).all(|j| v(0, j) * v(1, j) * v(2, j) == cols[j])
        })
        .count() as u32;
    (rows, cols, residual, consistent)
}

/// Peres square on the singlet with 1000 model draws.
pub fn peres_square() -> Result<SquareReport> {
    peres_square_with(&singlet(), 1000, 0)
}

/// Peres square, with the sphere model assigning each entry X ⊗ Y the value
/// x·y it gives in the joint measurement of (X, Y).
pub fn peres_square_with(psi: &TwoQubitState, samples: u64, seed: u64) -> Result<SquareReport> {
    let (row_signs, column_signs, product_residual, consistent_assignments) = peres_signs();
    let frame = CanonicalFrame::new(psi)?;
    let mut params = Vec::with_capacity(9);
    for row in PERES {
        for (a, b) in row {
            let (x, y) = (a.observable(), b.observable());
            params.push((solve_ahat(&frame, &x, &y)?, x, y));
        }
    }
    let counts = McPlan::new(samples, seed)
        .run(
            |rng, n| {
                let mut c = [0u64; 7];
                for _ in 0..n {
                    let l = sample_sphere(rng);
                    let mut v = [0i8; 9];
                    for (k, (p, x, y)) in params.iter().enumerate() {
                        let (xv, yv, _, _) = assign_values(p, x, y, &l);
                        v[k] = (xv * yv).signum() as i8;
                    }
                    let mut any = false;
                    for i in 0..3 {
                        if v[3 * i] * v[3 * i + 1] * v[3 * i + 2] != row_signs[i] {
                            c[i] += 1;
                            any = true;
                        }
                        if v[i] * v[3 + i] * v[6 + i] != column_signs[i] {
                            c[3 + i] += 1;
                            any = true;
                        }
                    }
                    if any {
                        c[6] += 1;
                    }
                }
                c
            },
            |mut a, b| {
                for k in 0..7 {
                    a[k] += b[k];
                }
                a
            },
        )
        .unwrap_or([0; 7]);
    let n = samples.max(1) as f64;
    let frac = |k: usize| counts[k] as f64 / n;
    let entries = PERES
        .iter()
        .flatten()
        .map(|&(a, b)| SquareEntry {
            label: format!("{}*{}", label(a), label(b)),
            first: a,
            second: b,
        })
        .collect();
    Ok(SquareReport {
        entries,
        row_signs,
        column_signs,
        product_residual,
        consistent_assignments,
        model_samples: samples,
        model_seed: seed,
        row_violation: [frac(0), frac(1), frac(2)],
        column_violation: [frac(3), frac(4), frac(5)],
        any_violation: frac(6),
    })
}
