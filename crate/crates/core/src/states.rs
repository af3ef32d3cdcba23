//! Two-qubit pure states and local dichotomic observables.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hidden::sample_sphere;
use crate::linalg::{
    pauli_from_vector, tensor_product, CMat2, CMat4, Ket, Ket4, UnitVec3, Vec3, C64, ZERO,
};
use crate::tolerances::TOL;

/// Observable α₁ I + α₂ σ·a with α₂ ≥ 0 and a a unit vector.
///
/// Its spectrum is {α₁ − α₂, α₁ + α₂}. Identity-like observables (α₂ = 0)
/// carry the axis +z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawObservable", into = "RawObservable")]
pub struct LocalObservable {
    alpha1: f64,
    alpha2: f64,
    axis: UnitVec3,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawObservable {
    alpha1: f64,
    alpha2: f64,
    axis: [f64; 3],
}

impl TryFrom<RawObservable> for LocalObservable {
    type Error = Error;
    fn try_from(r: RawObservable) -> Result<Self> {
        LocalObservable::canonicalize(r.alpha1, r.alpha2, Vec3(r.axis))
    }
}

impl From<LocalObservable> for RawObservable {
    fn from(o: LocalObservable) -> Self {
        RawObservable {
            alpha1: o.alpha1,
            alpha2: o.alpha2,
            axis: o.axis.get().0,
        }
    }
}

impl LocalObservable {
    /// Brings (α₁, α₂, axis) to canonical form: a negative α₂ flips the sign of
    /// both α₂ and the axis, the axis is normalized, and α₂ = 0 resets the axis to +z.
    pub fn canonicalize(alpha1: f64, alpha2: f64, axis: Vec3) -> Result<Self> {
        if !alpha1.is_finite() || !alpha2.is_finite() || !axis.is_finite() {
            return Err(Error::InvalidInput("observable parameters must be finite".into()));
        }
        if alpha2 == 0.0 {
            return Ok(LocalObservable {
                alpha1,
                alpha2: 0.0,
                axis: UnitVec3::Z,
            });
        }
        if axis.norm() == 0.0 {
            return Err(Error::InvalidInput(
                "observable axis is zero while alpha2 is nonzero".into(),
            ));
        }
        let (alpha2, axis) = if alpha2 < 0.0 {
            (-alpha2, -axis)
        } else {
            (alpha2, axis)
        };
        Ok(LocalObservable {
            alpha1,
            alpha2,
            axis: UnitVec3::normalize(axis)?,
        })
    }

    /// σ·a
    pub fn spin(axis: UnitVec3) -> Self {
        LocalObservable {
            alpha1: 0.0,
            alpha2: 1.0,
            axis,
        }
    }

    pub fn identity() -> Self {
        LocalObservable {
            alpha1: 1.0,
            alpha2: 0.0,
            axis: UnitVec3::Z,
        }
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    pub fn axis(&self) -> UnitVec3 {
        self.axis
    }

    /// Same offset and gap, different axis.
    pub fn with_axis(&self, axis: UnitVec3) -> Self {
        LocalObservable { axis, ..*self }
    }

    /// Eigenvalue attached to a response sign: α₁ + s α₂.
    pub fn value(&self, sign: i8) -> f64 {
        self.alpha1 + f64::from(sign) * self.alpha2
    }

    pub fn spectrum(&self) -> [f64; 2] {
        [self.alpha1 - self.alpha2, self.alpha1 + self.alpha2]
    }

    pub fn matrix(&self) -> CMat2 {
        pauli_from_vector(self.alpha1, self.alpha2, &self.axis.get())
            .expect("canonical axis is a unit vector")
    }

    /// Projectors onto the eigenspaces of σ·a for sign +1 and −1.
    pub fn sign_projectors(&self) -> [CMat2; 2] {
        let half = C64::new(0.5, 0.0);
        let id = CMat2::identity();
        let s = pauli_from_vector(0.0, 1.0, &self.axis.get()).expect("unit axis");
        [(id + s).scale(half), (id - s).scale(half)]
    }
}

/// Normalized pure state of two qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState", into = "RawState")]
pub struct TwoQubitState {
    ket: Ket4,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawState {
    amplitudes: [[f64; 2]; 4],
}

impl TryFrom<RawState> for TwoQubitState {
    type Error = Error;
    fn try_from(r: RawState) -> Result<Self> {
        TwoQubitState::from_amplitudes(r.amplitudes.map(|[re, im]| C64::new(re, im)))
    }
}

impl From<TwoQubitState> for RawState {
    fn from(s: TwoQubitState) -> Self {
        RawState {
            amplitudes: s.ket.0.map(|c| [c.re, c.im]),
        }
    }
}

impl TwoQubitState {
    /// Builds a state from amplitudes over |00⟩, |01⟩, |10⟩, |11⟩, normalizing them.
    pub fn from_amplitudes(amps: [C64; 4]) -> Result<Self> {
        if amps.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidInput("state amplitudes must be finite".into()));
        }
        Ok(TwoQubitState {
            ket: Ket(amps).normalized()?,
        })
    }

    /// Wraps a ket that is already normalized within the structural tolerance.
    pub fn from_ket(ket: Ket4) -> Result<Self> {
        let n = ket.norm();
        if (n - 1.0).abs() > TOL.structural {
            return Err(Error::InvalidInput(format!("ket norm {n} is not 1")));
        }
        Ok(TwoQubitState {
            ket: ket.normalized()?,
        })
    }

    pub fn ket(&self) -> &Ket4 {
        &self.ket
    }

    /// Coefficient matrix C with C[i][j] = ⟨ij|ψ⟩.
    pub fn coefficients(&self) -> CMat2 {
        let a = self.ket.0;
        crate::linalg::CMat([[a[0], a[1]], [a[2], a[3]]])
    }

    /// √μ₁ |00⟩ + √(1−μ₁) |11⟩.
    pub fn schmidt_form(mu1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu1) {
            return Err(Error::InvalidInput(format!("mu1 = {mu1} outside [0, 1]")));
        }
        Self::from_amplitudes([
            C64::new(mu1.sqrt(), 0.0),
            ZERO,
            ZERO,
            C64::new((1.0 - mu1).sqrt(), 0.0),
        ])
    }

    pub fn product(left: &crate::linalg::Ket2, right: &crate::linalg::Ket2) -> Result<Self> {
        Self::from_amplitudes(crate::linalg::ket_tensor(left, right).0)
    }
}

/// (|01⟩ − |10⟩)/√2
pub fn singlet() -> TwoQubitState {
    let h = FRAC_1_SQRT_2;
    TwoQubitState {
        ket: Ket([ZERO, C64::new(h, 0.0), C64::new(-h, 0.0), ZERO]),
    }
}

/// X ⊗ Y as a 4×4 matrix.
pub fn joint_matrix(x: &LocalObservable, y: &LocalObservable) -> CMat4 {
    tensor_product(&x.matrix(), &y.matrix())
}

/// Four complex Gaussians, normalized.
pub fn random_state_with<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    loop {
        let mut amps = [ZERO; 4];
        for a in amps.iter_mut() {
            *a = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
        if let Ok(s) = TwoQubitState::from_amplitudes(amps) {
            return s;
        }
    }
}

/// α₁ uniform on [−2, 2], α₂ uniform on [0, 2], axis uniform on the sphere.
pub fn random_observable_with<R: Rng + ?Sized>(rng: &mut R) -> LocalObservable {
    let alpha1 = rng.random_range(-2.0..=2.0);
    let alpha2 = rng.random_range(0.0..=2.0);
    let axis = sample_sphere(rng).0;
    LocalObservable::canonicalize(alpha1, alpha2, axis.get()).expect("finite sampled parameters")
}

pub fn random_state(seed: u64) -> TwoQubitState {
    random_state_with(&mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_observable(seed: u64) -> LocalObservable {
    random_observable_with(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Uniform unit axis (helper for sweeps and tests).
pub fn random_axis_with<R: Rng + ?Sized>(rng: &mut R) -> UnitVec3 {
    sample_sphere(rng).0
}
