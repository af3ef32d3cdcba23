//! Fixed-size complex linear algebra for one and two qubits.

mod eigen;
mod matrix;
mod vec3;

pub use eigen::{hermitian_eigen, hermitian_eigen2, relative_phase, svd_2x2, unitary_exp, Eigen, Svd2};
pub use matrix::{
    bloch_vector, expectation, ket_tensor, pauli_components, pauli_from_vector, paulis,
    phase_convention_factor, sigma_dot, sigma_x, sigma_y, sigma_z, tensor_product, CMat, CMat2,
    CMat4, Ket, Ket2, Ket4, C64, I, ONE, ZERO,
};
pub use vec3::{Mat3, UnitVec3, Vec3};
