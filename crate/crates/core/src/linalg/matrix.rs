use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::vec3::Vec3;
use crate::error::{Error, Result};
use crate::tolerances::TOL;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense N×N complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat<const N: usize>(pub [[C64; N]; N]);

pub type CMat2 = CMat<2>;
pub type CMat4 = CMat<4>;

/// Column vector of N complex amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket<const N: usize>(pub [C64; N]);

pub type Ket2 = Ket<2>;
/// Two-qubit ket in the basis order |00⟩, |01⟩, |10⟩, |11⟩.
pub type Ket4 = Ket<4>;

impl<const N: usize> CMat<N> {
    pub fn zeros() -> Self {
        CMat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn diag(d: [C64; N]) -> Self {
        let mut m = Self::zeros();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    pub fn from_rows(rows: [[C64; N]; N]) -> Self {
        CMat(rows)
    }

    /// Matrix whose columns are the given kets.
    pub fn from_columns(cols: [Ket<N>; N]) -> Self {
        let mut m = Self::zeros();
        for (j, c) in cols.iter().enumerate() {
            for i in 0..N {
                m.0[i][j] = c.0[i];
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> Ket<N> {
        let mut k = [ZERO; N];
        for (i, v) in k.iter_mut().enumerate() {
            *v = self.0[i][j];
        }
        Ket(k)
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[j][i] = self.0[i][j].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[j][i] = self.0[i][j];
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn apply(&self, k: &Ket<N>) -> Ket<N> {
        let mut out = [ZERO; N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..N).map(|j| self.0[i][j] * k.0[j]).sum();
        }
        Ket(out)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..N {
            for j in 0..N {
                d = d.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        d
    }

    /// Largest entrywise modulus of `M - M†`.
    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Largest entrywise modulus of `M†M - I`.
    pub fn unitary_deviation(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let deviation = self.hermitian_deviation();
        if deviation > TOL.structural || !deviation.is_finite() {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }
}

impl<const N: usize> Mul for CMat<N> {
    type Output = CMat<N>;
    fn mul(self, o: CMat<N>) -> CMat<N> {
        let mut m = CMat::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    m.0[i][j] += a * o.0[k][j];
                }
            }
        }
        m
    }
}

impl<const N: usize> Add for CMat<N> {
    type Output = CMat<N>;
    fn add(self, o: CMat<N>) -> CMat<N> {
        let mut m = self;
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] += o.0[i][j];
            }
        }
        m
    }
}

impl<const N: usize> Sub for CMat<N> {
    type Output = CMat<N>;
    fn sub(self, o: CMat<N>) -> CMat<N> {
        let mut m = self;
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] -= o.0[i][j];
            }
        }
        m
    }
}

impl<const N: usize> Ket<N> {
    pub fn zeros() -> Self {
        Ket([ZERO; N])
    }

    pub fn basis(i: usize) -> Self {
        let mut k = Self::zeros();
        k.0[i] = ONE;
        k
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Ket<N>) -> C64 {
        (0..N).map(|i| self.0[i].conj() * other.0[i]).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut k = *self;
        for v in k.0.iter_mut() {
            *v *= s;
        }
        k
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidInput("cannot normalize a zero or non-finite ket".into()));
        }
        if (n - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(*self);
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn conj(&self) -> Self {
        let mut k = *self;
        for v in k.0.iter_mut() {
            *v = v.conj();
        }
        k
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut k = *self;
        for (v, w) in k.0.iter_mut().zip(o.0.iter()) {
            *v -= *w;
        }
        k
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut k = *self;
        for (v, w) in k.0.iter_mut().zip(o.0.iter()) {
            *v += *w;
        }
        k
    }

    /// `|self⟩⟨self|`
    pub fn projector(&self) -> CMat<N> {
        let mut m = CMat::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[i] * self.0[j].conj();
            }
        }
        m
    }

    /// Applies the phase convention in place and returns the factor used.
    pub fn fix_phase(&mut self) -> C64 {
        let phase = phase_convention_factor(&self.0);
        for v in self.0.iter_mut() {
            *v *= phase;
        }
        phase
    }
}

/// Unit-modulus factor that makes the first component with modulus above
/// `TOL.phase_pivot` real and nonnegative.
pub fn phase_convention_factor(v: &[C64]) -> C64 {
    v.iter()
        .find(|c| c.norm() > TOL.phase_pivot)
        .map(|c| c.conj() / c.norm())
        .unwrap_or(ONE)
}

/// Kronecker product L ⊗ R in the basis |00⟩, |01⟩, |10⟩, |11⟩.
pub fn tensor_product(l: &CMat2, r: &CMat2) -> CMat4 {
    let mut m = CMat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for q in 0..2 {
                    m.0[2 * i + k][2 * j + q] = l.0[i][j] * r.0[k][q];
                }
            }
        }
    }
    m
}

pub fn ket_tensor(l: &Ket2, r: &Ket2) -> Ket4 {
    Ket([l.0[0] * r.0[0], l.0[0] * r.0[1], l.0[1] * r.0[0], l.0[1] * r.0[1]])
}

pub fn sigma_x() -> CMat2 {
    CMat([[ZERO, ONE], [ONE, ZERO]])
}

pub fn sigma_y() -> CMat2 {
    CMat([[ZERO, -I], [I, ZERO]])
}

pub fn sigma_z() -> CMat2 {
    CMat([[ONE, ZERO], [ZERO, -ONE]])
}

/// The three Pauli matrices in order x, y, z.
pub fn paulis() -> [CMat2; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}

/// σ·v for an arbitrary real 3-vector.
pub fn sigma_dot(v: &Vec3) -> CMat2 {
    let [x, y, z] = v.0;
    CMat([
        [C64::new(z, 0.0), C64::new(x, -y)],
        [C64::new(x, y), C64::new(-z, 0.0)],
    ])
}

/// α₁ I + α₂ σ·a. The axis must be a unit vector within the structural tolerance.
pub fn pauli_from_vector(alpha1: f64, alpha2: f64, a: &Vec3) -> Result<CMat2> {
    let norm = a.norm();
    if (norm - 1.0).abs() > TOL.structural {
        return Err(Error::NotUnit { norm });
    }
    Ok(CMat2::identity().scale(C64::new(alpha1, 0.0)) + sigma_dot(a).scale(C64::new(alpha2, 0.0)))
}

/// Bloch vector ⟨k|σ|k⟩ of a normalized qubit ket.
pub fn bloch_vector(k: &Ket2) -> Vec3 {
    let [a, b] = k.0;
    let ab = a.conj() * b;
    Vec3([2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()])
}

/// Real 3-vector v with M = v₀ I + σ·v for a Hermitian 2×2 M (returns (v₀, v)).
pub fn pauli_components(m: &CMat2) -> (f64, Vec3) {
    let half = C64::new(0.5, 0.0);
    let c0 = (m.trace() * half).re;
    let v: Vec<f64> = paulis().iter().map(|s| ((*s * *m).trace() * half).re).collect();
    (c0, Vec3([v[0], v[1], v[2]]))
}

/// ⟨ψ|M|ψ⟩ for Hermitian M. The imaginary part is discarded if below the
/// spectral tolerance; above that it is reported as an error.
pub fn expectation<const N: usize>(psi: &Ket<N>, m: &CMat<N>) -> Result<f64> {
    let v = psi.inner(&m.apply(psi));
    if v.im.abs() > TOL.spectral {
        return Err(Error::Numerical(format!(
            "expectation value has imaginary part {:e}",
            v.im
        )));
    }
    Ok(v.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_tensor_identity() {
        assert_eq!(tensor_product(&CMat2::identity(), &CMat2::identity()), CMat4::identity());
    }

    #[test]
    fn zz_is_diagonal() {
        let zz = tensor_product(&sigma_z(), &sigma_z());
        assert_eq!(zz, CMat4::diag([ONE, -ONE, -ONE, ONE]));
    }

    #[test]
    fn xy_matches_hand_expansion() {
        // σx ⊗ σy = [[0, σy], [σy, 0]]
        let o = ZERO;
        let expected = CMat([
            [o, o, o, c(0.0, -1.0)],
            [o, o, c(0.0, 1.0), o],
            [o, c(0.0, -1.0), o, o],
            [c(0.0, 1.0), o, o, o],
        ]);
        assert_eq!(tensor_product(&sigma_x(), &sigma_y()), expected);
    }

    #[test]
    fn pauli_from_vector_axes() {
        assert_eq!(pauli_from_vector(0.0, 1.0, &Vec3::Z).unwrap(), sigma_z());
        assert_eq!(pauli_from_vector(0.0, 1.0, &Vec3::X).unwrap(), sigma_x());
        assert!(pauli_from_vector(0.0, 1.0, &Vec3::new(1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn pauli_components_round_trip() {
        let v = Vec3::new(0.3, -0.4, 0.5);
        let m = CMat2::identity().scale(c(0.7, 0.0)) + sigma_dot(&v);
        let (c0, w) = pauli_components(&m);
        assert!((c0 - 0.7).abs() < 1e-15);
        assert!(w.max_abs_diff(&v) < 1e-15);
    }

    #[test]
    fn bloch_of_basis_states() {
        let up = Ket2::basis(0);
        assert!(bloch_vector(&up).max_abs_diff(&Vec3::Z) < 1e-15);
        let plus = Ket([c(1.0, 0.0), c(1.0, 0.0)]).normalized().unwrap();
        assert!(bloch_vector(&plus).max_abs_diff(&Vec3::X) < 1e-15);
    }

    #[test]
    fn expectation_on_product_state() {
        let k00 = Ket4::basis(0);
        let zz = tensor_product(&sigma_z(), &sigma_z());
        assert_eq!(expectation(&k00, &zz).unwrap(), 1.0);
    }

    #[test]
    fn expectation_rejects_non_hermitian_imaginary_part() {
        let k = Ket([c(1.0, 0.0), ZERO]);
        let m = CMat([[c(0.0, 1.0), ZERO], [ZERO, ZERO]]);
        assert!(expectation(&k, &m).is_err());
    }

    #[test]
    fn phase_convention_makes_pivot_real() {
        let mut k = Ket([c(1e-12, 0.0), c(0.0, -1.0)]);
        k.fix_phase();
        assert!(k.0[1].im.abs() < 1e-15 && k.0[1].re > 0.0);
    }
}
