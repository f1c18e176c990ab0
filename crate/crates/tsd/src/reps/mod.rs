//! Single-qubit channel representations.
//!
//! Two pictures are used throughout the crate: the real 4x4 Pauli transfer
//! matrix ([`PauliTransferMatrix`], basis order fixed to I, X, Y, Z) and the
//! complex 4x4 Choi matrix ([`ChoiMatrix`], output factor first, trace 2).
//! The conversions between them are exact mutual inverses, and complex
//! arithmetic stays confined to the Choi picture; everything expressed in the
//! transfer-matrix picture is purely real.

mod choi;
mod fidelity;
pub(crate) mod gate;
mod ptm;

pub use choi::{ChoiMatrix, CptpDiagnostic};
pub use fidelity::{average_gate_fidelity, entanglement_fidelity, entanglement_fidelity_choi};
pub use gate::{rotation_about, UnitaryGate};
pub use ptm::PauliTransferMatrix;

use nalgebra::{Matrix2, Vector4};
use num_complex::Complex64;

/// Pauli matrix in the fixed basis order: 0 = identity, 1 = X, 2 = Y, 3 = Z.
///
/// Panics if `alpha > 3`.
pub fn pauli(alpha: usize) -> Matrix2<Complex64> {
    let o = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match alpha {
        0 => Matrix2::new(o, z, z, o),
        1 => Matrix2::new(z, o, o, z),
        2 => Matrix2::new(z, -i, i, z),
        3 => Matrix2::new(o, z, z, -o),
        _ => panic!("Pauli index {alpha} out of range"),
    }
}

/// Coefficients of a state or measurement effect in the unnormalized Pauli
/// basis, `rho = sum_a p_a sigma_a` with `p_a = Tr[sigma_a rho] / 2`.
///
/// With this normalization a state has `p_0 = 1/2` and the outcome
/// probability of an effect `q` on a state `p` is `Tr[E rho] = 2 q.p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliVector(pub Vector4<f64>);

impl PauliVector {
    /// The ground state |0><0|.
    pub fn ket_zero() -> Self {
        PauliVector(Vector4::new(0.5, 0.0, 0.0, 0.5))
    }

    /// The excited state |1><1|, which doubles as the excited-state effect.
    pub fn ket_one() -> Self {
        PauliVector(Vector4::new(0.5, 0.0, 0.0, -0.5))
    }

    /// Coefficients of a Hermitian 2x2 matrix (imaginary parts of the traces
    /// are discarded; they vanish for Hermitian input).
    pub fn from_density(rho: &Matrix2<Complex64>) -> Self {
        let mut p = Vector4::zeros();
        for alpha in 0..4 {
            p[alpha] = 0.5 * (pauli(alpha) * rho).trace().re;
        }
        PauliVector(p)
    }

    /// The 2x2 matrix `sum_a p_a sigma_a`.
    pub fn density(&self) -> Matrix2<Complex64> {
        let mut rho = Matrix2::zeros();
        for alpha in 0..4 {
            rho += pauli(alpha) * Complex64::new(self.0[alpha], 0.0);
        }
        rho
    }

    /// Hilbert-Schmidt trace product `Tr[A B] = 2 p.q`; for an effect paired
    /// with a state this is the outcome probability.
    pub fn trace_product(&self, other: &PauliVector) -> f64 {
        2.0 * self.0.dot(&other.0)
    }
}
