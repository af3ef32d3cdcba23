//! Exact quantum expectation values for X ⊗ Y on a pure two-qubit state.
//!
//! Two independent routes are kept side by side: the direct 4×4 expectation
//! and the tilde route through the canonical frame, where
//! ⟨X ⊗ Y⟩ = α̃₁β₁ − α̃₂β₂ ã·b with X̃ = N′X′N′.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::CanonicalFrame;
use crate::linalg::{
    expectation, pauli_components, tensor_product, CMat2, UnitVec3, Vec3, C64,
};
use crate::states::{joint_matrix, LocalObservable, TwoQubitState};
use crate::tolerances::TOL;

/// X̃ = α̃₁ I + α̃₂ σ·ã, the observable X transported onto the singlet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TildeObservable {
    pub alpha1_t: f64,
    pub alpha2_t: f64,
    pub a_t: UnitVec3,
}

impl TildeObservable {
    /// α̃₂ ã as a plain vector.
    pub fn vector(&self) -> Vec3 {
        self.a_t.get().scale(self.alpha2_t)
    }

    fn from_parts(alpha1_t: f64, v: Vec3) -> Self {
        let norm = v.norm();
        if norm < TOL.structural {
            return TildeObservable {
                alpha1_t,
                alpha2_t: 0.0,
                a_t: UnitVec3::Z,
            };
        }
        TildeObservable {
            alpha1_t,
            alpha2_t: norm,
            a_t: UnitVec3::normalize(v).unwrap_or(UnitVec3::Z),
        }
    }
}

/// Closed form:
/// α̃₁ = α₁ + α₂ sin2φ a′·n′,
/// α̃₂ã = α₂ cos2φ a′ + (α₁ sin2φ + 2α₂ sin²φ a′·n′) n′.
pub fn tilde_transform(x: &LocalObservable, frame: &CanonicalFrame) -> TildeObservable {
    let a_p = frame.rotate(&x.axis()).get();
    let n_p = frame.n_prime.get();
    let an = a_p.dot(&n_p);
    let (a1, a2) = (x.alpha1(), x.alpha2());
    let s = frame.phi.sin();
    let alpha1_t = a1 + a2 * frame.sin_2phi * an;
    let v = a_p.scale(a2 * frame.cos_2phi) + n_p.scale(a1 * frame.sin_2phi + 2.0 * a2 * s * s * an);
    TildeObservable::from_parts(alpha1_t, v)
}

/// The same transform by matrix products: N′ X′ N′ with X′ = U†XU and N′ = U†NU.
pub fn tilde_transform_matrix(x: &LocalObservable, frame: &CanonicalFrame) -> TildeObservable {
    let u = frame.u;
    let x_p: CMat2 = u.adjoint() * x.matrix() * u;
    let n_p = frame.n_op_prime();
    let (c0, c) = pauli_components(&(n_p * x_p * n_p));
    TildeObservable::from_parts(c0, c)
}

/// ⟨X⟩, ⟨Y⟩, ⟨X ⊗ Y⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub x: f64,
    pub y: f64,
    pub xy: f64,
}

impl Moments {
    pub fn max_abs_diff(&self, o: &Moments) -> f64 {
        (self.x - o.x)
            .abs()
            .max((self.y - o.y).abs())
            .max((self.xy - o.xy).abs())
    }
}

/// Oracle moments by both routes and their largest disagreement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QmAverages {
    pub direct: Moments,
    pub tilde: Moments,
    pub discrepancy: f64,
}

/// Moments via ⟨ψ|·|ψ⟩ on the 4×4 operators.
pub fn direct_moments(
    psi: &TwoQubitState,
    x: &LocalObservable,
    y: &LocalObservable,
) -> Result<Moments> {
    let id = CMat2::identity();
    let k = psi.ket();
    Ok(Moments {
        x: expectation(k, &tensor_product(&x.matrix(), &id))?,
        y: expectation(k, &tensor_product(&id, &y.matrix()))?,
        xy: expectation(k, &joint_matrix(x, y))?,
    })
}

/// Moments via the frame: ⟨X⟩ = α̃₁, ⟨Y⟩ = β₁ − β₂ sin2φ b·n′,
/// ⟨X ⊗ Y⟩ = α̃₁β₁ − α̃₂β₂ ã·b.
pub fn tilde_moments(frame: &CanonicalFrame, x: &LocalObservable, y: &LocalObservable) -> Moments {
    let t = tilde_transform(x, frame);
    let b = y.axis().get();
    let (b1, b2) = (y.alpha1(), y.alpha2());
    Moments {
        x: t.alpha1_t,
        y: b1 - b2 * frame.sin_2phi * b.dot(&frame.n_prime.get()),
        xy: t.alpha1_t * b1 - b2 * t.vector().dot(&b),
    }
}

/// Both routes; fails if they disagree beyond the route-agreement tolerance.
pub fn qm_averages_with(
    psi: &TwoQubitState,
    frame: &CanonicalFrame,
    x: &LocalObservable,
    y: &LocalObservable,
) -> Result<QmAverages> {
    let direct = direct_moments(psi, x, y)?;
    let tilde = tilde_moments(frame, x, y);
    let discrepancy = direct.max_abs_diff(&tilde);
    if discrepancy.is_nan() || discrepancy > TOL.route_agreement {
        return Err(Error::OracleInconsistency { discrepancy });
    }
    Ok(QmAverages {
        direct,
        tilde,
        discrepancy,
    })
}

pub fn qm_averages(
    psi: &TwoQubitState,
    x: &LocalObservable,
    y: &LocalObservable,
) -> Result<QmAverages> {
    let frame = CanonicalFrame::new(psi)?;
    qm_averages_with(psi, &frame, x, y)
}

/// Joint outcome probabilities indexed `[i][j]`, 0 for the upper eigenvalue
/// (α₁ + α₂, sign +1) and 1 for the lower one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointTable(pub [[f64; 2]; 2]);

impl JointTable {
    pub fn total(&self) -> f64 {
        self.0.iter().flatten().sum()
    }

    /// Moments of the outcome values α₁ ± α₂, β₁ ± β₂ under this table.
    pub fn moments(&self, x: &LocalObservable, y: &LocalObservable) -> Moments {
        let signs = [1i8, -1];
        let mut m = Moments {
            x: 0.0,
            y: 0.0,
            xy: 0.0,
        };
        for (i, &si) in signs.iter().enumerate() {
            for (j, &sj) in signs.iter().enumerate() {
                let p = self.0[i][j];
                let (xv, yv) = (x.value(si), y.value(sj));
                m.x += p * xv;
                m.y += p * yv;
                m.xy += p * xv * yv;
            }
        }
        m
    }

    /// Table of two ±1 variables with ⟨F⟩, ⟨G⟩, ⟨FG⟩ given.
    pub fn from_sign_moments(f: f64, g: f64, fg: f64) -> Self {
        let p = |s: f64, t: f64| 0.25 * (1.0 + s * f + t * g + s * t * fg);
        JointTable([[p(1.0, 1.0), p(1.0, -1.0)], [p(-1.0, 1.0), p(-1.0, -1.0)]])
    }

    pub fn max_abs_diff(&self, o: &JointTable) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - o.0[i][j]).abs());
            }
        }
        d
    }
}

/// Born rule on the product of sign projectors.
pub fn joint_probabilities(
    psi: &TwoQubitState,
    x: &LocalObservable,
    y: &LocalObservable,
) -> Result<JointTable> {
    let px = x.sign_projectors();
    let py = y.sign_projectors();
    let mut t = [[0.0; 2]; 2];
    for (i, p) in px.iter().enumerate() {
        for (j, q) in py.iter().enumerate() {
            t[i][j] = expectation(psi.ket(), &tensor_product(p, q))?;
        }
    }
    Ok(JointTable(t))
}

/// Bloch vector of the first party's reduced density matrix.
pub fn reduced_bloch_first(psi: &TwoQubitState) -> Vec3 {
    let c = psi.coefficients();
    // ρ₁ = C C†
    let rho = c * c.adjoint();
    let (_, v) = pauli_components(&rho.scale(C64::new(2.0, 0.0)));
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Ket2;
    use crate::states::{random_observable_with, random_state_with, singlet};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spin(v: Vec3) -> LocalObservable {
        LocalObservable::spin(UnitVec3::normalize(v).unwrap())
    }

    #[test]
    fn singlet_spin_moments() {
        let a = Vec3::new(0.3, -0.4, 0.5);
        let b = Vec3::new(-1.0, 0.2, 0.1);
        let (x, y) = (spin(a), spin(b));
        let q = qm_averages(&singlet(), &x, &y).unwrap();
        let ab = x.axis().dot(&y.axis());
        for m in [q.direct, q.tilde] {
            assert!(m.x.abs() < 1e-14 && m.y.abs() < 1e-14);
            assert!((m.xy + ab).abs() < 1e-14);
        }
    }

    #[test]
    fn singlet_general_observables() {
        let x = LocalObservable::canonicalize(0.7, 1.3, Vec3::new(1.0, 1.0, 0.0)).unwrap();
        let y = LocalObservable::canonicalize(-0.2, 0.5, Vec3::new(0.0, 1.0, -1.0)).unwrap();
        let q = qm_averages(&singlet(), &x, &y).unwrap();
        let expect = 0.7 * -0.2 - 1.3 * 0.5 * x.axis().dot(&y.axis());
        assert!((q.direct.xy - expect).abs() < 1e-14);
        assert!((q.tilde.xy - expect).abs() < 1e-14);
    }

    #[test]
    fn phi_plus_sigma_x_is_perfectly_correlated() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = TwoQubitState::from_amplitudes([
            C64::new(h, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(h, 0.0),
        ])
        .unwrap();
        let x = spin(Vec3::X);
        let q = qm_averages(&psi, &x, &x).unwrap();
        assert!((q.direct.xy - 1.0).abs() < 1e-14);
        assert!((q.tilde.xy - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tilde_closed_form_matches_matrix_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..1000 {
            let psi = random_state_with(&mut rng);
            let x = random_observable_with(&mut rng);
            let f = CanonicalFrame::new(&psi).unwrap();
            let a = tilde_transform(&x, &f);
            let b = tilde_transform_matrix(&x, &f);
            assert!((a.alpha1_t - b.alpha1_t).abs() < 1e-12);
            assert!(a.vector().max_abs_diff(&b.vector()) < 1e-12);
        }
    }

    #[test]
    fn tilde_limits() {
        let x = LocalObservable::canonicalize(0.4, 0.9, Vec3::new(0.0, 1.0, 1.0)).unwrap();
        let f = CanonicalFrame::new(&singlet()).unwrap();
        let t = tilde_transform(&x, &f);
        assert!((t.alpha1_t - 0.4).abs() < 1e-15);
        let a_p = f.rotate(&x.axis()).get().scale(0.9);
        assert!(t.vector().max_abs_diff(&a_p) < 1e-15);

        let psi = TwoQubitState::schmidt_form(0.8).unwrap();
        let f = CanonicalFrame::new(&psi).unwrap();
        let id = LocalObservable::canonicalize(1.5, 0.0, Vec3::Z).unwrap();
        let t = tilde_transform(&id, &f);
        assert!((t.alpha1_t - 1.5).abs() < 1e-15);
        let expect = f.n_prime.get().scale(1.5 * f.sin_2phi);
        assert!(t.vector().max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn random_routes_agree_and_identity_partner_recovers_marginal() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..1000 {
            let psi = random_state_with(&mut rng);
            let x = random_observable_with(&mut rng);
            let y = random_observable_with(&mut rng);
            let q = qm_averages(&psi, &x, &y).unwrap();
            assert!(q.discrepancy < 1e-10, "{}", q.discrepancy);
            let qi = qm_averages(&psi, &x, &LocalObservable::identity()).unwrap();
            assert!((qi.direct.xy - q.direct.x).abs() < 1e-12);
        }
    }

    #[test]
    fn joint_table_examples() {
        let z = spin(Vec3::Z);
        let t = joint_probabilities(&singlet(), &z, &z).unwrap();
        assert!(t.max_abs_diff(&JointTable([[0.0, 0.5], [0.5, 0.0]])) < 1e-15);

        let up = Ket2::basis(0);
        let psi = TwoQubitState::product(&up, &up).unwrap();
        let t = joint_probabilities(&psi, &z, &z).unwrap();
        assert!(t.max_abs_diff(&JointTable([[1.0, 0.0], [0.0, 0.0]])) < 1e-15);
    }

    #[test]
    fn joint_table_reproduces_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..500 {
            let psi = random_state_with(&mut rng);
            let x = random_observable_with(&mut rng);
            let y = random_observable_with(&mut rng);
            let t = joint_probabilities(&psi, &x, &y).unwrap();
            assert!(t.0.iter().flatten().all(|&p| p >= -1e-12));
            assert!((t.total() - 1.0).abs() < 1e-10);
            let q = qm_averages(&psi, &x, &y).unwrap();
            assert!(t.moments(&x, &y).max_abs_diff(&q.direct) < 1e-10);
        }
    }

    #[test]
    fn sign_moment_table_inverts() {
        let t = JointTable::from_sign_moments(0.2, -0.3, 0.1);
        let s = spin(Vec3::Z);
        let m = t.moments(&s, &s);
        assert!((m.x - 0.2).abs() < 1e-15 && (m.y + 0.3).abs() < 1e-15);
        assert!((m.xy - 0.1).abs() < 1e-15);
    }

    #[test]
    fn reduced_bloch_length_tracks_entanglement() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..100 {
            let psi = random_state_with(&mut rng);
            let f = CanonicalFrame::new(&psi).unwrap();
            let v = reduced_bloch_first(&psi);
            // ρ₁ has eigenvalues μ₁, μ₂ along ±n
            assert!(v.max_abs_diff(&f.n.get().scale(f.sin_2phi)) < 1e-12);
        }
    }
}
