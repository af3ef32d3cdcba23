//! Schmidt decomposition and the canonical frame |ψ⟩ = N U ⊗ I |φ₋⟩.
//!
//! `N = cos φ I + sin φ σ·n` carries the entanglement (φ = 0 maximally
//! entangled, φ = π/4 separable) and `U` is a local unitary. The rotation
//! `R` is the SO(3) image of `U` under conjugation, `U†(σ·v)U = σ·(Rv)`,
//! and maps lab-frame axes a, n to a′, n′.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    bloch_vector, paulis, sigma_dot, sigma_y, svd_2x2, tensor_product, CMat, CMat2, Ket, Ket2,
    Mat3, UnitVec3, C64,
};
use crate::states::{singlet, TwoQubitState};
use crate::tolerances::TOL;

/// √μ₁ |a₁ b₁⟩ + √μ₂ |a₂ b₂⟩ with μ₁ ≥ μ₂.
#[derive(Debug, Clone, Copy)]
pub struct SchmidtData {
    pub mu1: f64,
    pub mu2: f64,
    /// Schmidt coefficients √μ₁ ≥ √μ₂.
    pub coefficients: [f64; 2],
    pub a_basis: [Ket2; 2],
    pub b_basis: [Ket2; 2],
}

impl SchmidtData {
    /// μ₁ − μ₂ = 2μ₁ − 1, formed from the coefficients without cancellation.
    pub fn imbalance(&self) -> f64 {
        let [s1, s2] = self.coefficients;
        (s1 - s2) * (s1 + s2)
    }

    pub fn reconstruct(&self) -> Ket<4> {
        let mut out = Ket::<4>::zeros();
        for k in 0..2 {
            let term = crate::linalg::ket_tensor(&self.a_basis[k], &self.b_basis[k])
                .scale(C64::new(self.coefficients[k], 0.0));
            out = out.add(&term);
        }
        out
    }
}

/// Schmidt decomposition through the SVD of the coefficient matrix C[i][j] = ⟨ij|ψ⟩.
///
/// With C = Σ sₖ uₖ vₖ†, the state is Σ sₖ uₖ ⊗ conj(vₖ). A vanishing second
/// coefficient leaves |a₂⟩, |b₂⟩ as the deterministic orthogonal complements.
pub fn schmidt_decompose(psi: &TwoQubitState) -> SchmidtData {
    let svd = svd_2x2(&psi.coefficients());
    let [s1, s2] = svd.s;
    // rescale so that μ₁ + μ₂ = 1 exactly
    let norm = s1.hypot(s2);
    let (s1, s2) = (s1 / norm, s2 / norm);
    SchmidtData {
        mu1: s1 * s1,
        mu2: s2 * s2,
        coefficients: [s1, s2],
        a_basis: [svd.u.column(0), svd.u.column(1)],
        b_basis: [svd.v.column(0).conj(), svd.v.column(1).conj()],
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CanonicalFrame {
    pub schmidt: SchmidtData,
    /// Entanglement angle in [0, π/4].
    pub phi: f64,
    pub sin_2phi: f64,
    pub cos_2phi: f64,
    /// Bloch vector of |a₁⟩.
    pub n: UnitVec3,
    pub u: CMat2,
    pub n_op: CMat2,
    pub rotation: Mat3,
    pub n_prime: UnitVec3,
    /// ‖ψ − e^{iθ} N U ⊗ I |φ₋⟩‖ after removing the best global phase.
    pub residual: f64,
}

impl CanonicalFrame {
    pub fn new(psi: &TwoQubitState) -> Result<Self> {
        build_frame(&schmidt_decompose(psi), psi)
    }

    /// Rv: maps a lab axis to its primed counterpart (a → a′, n → n′).
    pub fn rotate(&self, v: &UnitVec3) -> UnitVec3 {
        UnitVec3::normalize(self.rotation.apply(&v.get())).expect("rotation preserves norm")
    }

    /// N′ = U† N U
    pub fn n_op_prime(&self) -> CMat2 {
        self.u.adjoint() * self.n_op * self.u
    }

    pub fn summary(&self) -> FrameSummary {
        FrameSummary {
            mu1: self.schmidt.mu1,
            mu2: self.schmidt.mu2,
            phi: self.phi,
            sin_2phi: self.sin_2phi,
            n: self.n.get().0,
            n_prime: self.n_prime.get().0,
            rotation: self.rotation.0,
            u: self.u.0.map(|row| row.map(|c| [c.re, c.im])),
            residual: self.residual,
        }
    }
}

/// Serializable view of a frame for reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameSummary {
    pub mu1: f64,
    pub mu2: f64,
    pub phi: f64,
    pub sin_2phi: f64,
    pub n: [f64; 3],
    pub n_prime: [f64; 3],
    pub rotation: [[f64; 3]; 3],
    pub u: [[[f64; 2]; 2]; 2],
    pub residual: f64,
}

/// The SO(3) matrix R with U†σ_j U = Σᵢ R_ij σᵢ.
pub fn rotation_of(u: &CMat2) -> Mat3 {
    let s = paulis();
    let mut r = [[0.0; 3]; 3];
    for (i, row) in r.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = 0.5 * (s[i] * u.adjoint() * s[j] * *u).trace().re;
        }
    }
    Mat3(r)
}

/// Builds the frame from Schmidt data and checks it against `psi`.
///
/// U⁽¹⁾ sends |0⟩, |1⟩ to |a₁⟩, −|a₂⟩ and U⁽²⁾ sends them to |b₂⟩, |b₁⟩, so
/// (U⁽¹⁾ ⊗ U⁽²⁾)|φ₋⟩ = (|a₁b₁⟩ + |a₂b₂⟩)/√2. On the singlet a second-party
/// operator moves to the first party as I ⊗ Γ |φ₋⟩ = σ_y Γᵀ σ_y ⊗ I |φ₋⟩,
/// hence U = U⁽¹⁾ σ_y U⁽²⁾ᵀ σ_y.
pub fn build_frame(sd: &SchmidtData, psi: &TwoQubitState) -> Result<CanonicalFrame> {
    // sin2φ = μ₁ − μ₂ and cos2φ = 2√(μ₁μ₂), both free of cancellation
    let sin_2phi = sd.imbalance().clamp(0.0, 1.0);
    let cos_2phi = (2.0 * sd.coefficients[0] * sd.coefficients[1]).clamp(0.0, 1.0);
    let phi = 0.5 * sin_2phi.atan2(cos_2phi);
    let n = UnitVec3::normalize(bloch_vector(&sd.a_basis[0]))?;
    let (sp, cp) = phi.sin_cos();
    let n_op = CMat2::identity().scale(C64::new(cp, 0.0)) + sigma_dot(&n.get()).scale(C64::new(sp, 0.0));

    let [a1, a2] = sd.a_basis;
    let [b1, b2] = sd.b_basis;
    let u1 = CMat2::from_columns([a1, a2.scale(C64::new(-1.0, 0.0))]);
    let u2 = CMat2::from_columns([b2, b1]);
    let sy = sigma_y();
    let u = u1 * sy * u2.transpose() * sy;

    let rotation = rotation_of(&u);
    let n_prime = UnitVec3::normalize(rotation.apply(&n.get()))?;

    let residual = reconstruction_residual(psi, &(n_op * u));
    if residual > TOL.spectral || !residual.is_finite() {
        return Err(Error::FrameConstruction {
            residual,
            tolerance: TOL.spectral,
        });
    }
    Ok(CanonicalFrame {
        schmidt: *sd,
        phi,
        sin_2phi,
        cos_2phi,
        n,
        u,
        n_op,
        rotation,
        n_prime,
        residual,
    })
}

/// ‖ψ − e^{iθ}(M ⊗ I)|φ₋⟩‖ with θ taken from the largest amplitude of ψ.
pub fn reconstruction_residual(psi: &TwoQubitState, m: &CMat2) -> f64 {
    let recon = tensor_product(m, &CMat::identity()).apply(singlet().ket());
    let target = psi.ket();
    let k = (0..4)
        .max_by(|&i, &j| target.0[i].norm().total_cmp(&target.0[j].norm()))
        .unwrap_or(0);
    let phase = crate::linalg::relative_phase(target.0[k], recon.0[k]);
    target.sub(&recon.scale(phase)).norm()
}
