//! Fidelity measures between channels.

use crate::error::{Error, Result};
use crate::reps::{ChoiMatrix, PauliTransferMatrix};

/// Entanglement fidelity `Tr[T_ideal T_actual^T] / 4`, equal to the overlap
/// of the two Choi matrices over 4.
pub fn entanglement_fidelity(ideal: &PauliTransferMatrix, actual: &PauliTransferMatrix) -> f64 {
    0.25 * (ideal.matrix() * actual.matrix().transpose()).trace()
}

/// Same quantity evaluated in the Choi picture, `Tr[rho_ideal rho_actual] / 4`.
pub fn entanglement_fidelity_choi(ideal: &ChoiMatrix, actual: &ChoiMatrix) -> f64 {
    0.25 * (ideal.matrix() * actual.matrix()).trace().re
}

/// Average gate fidelity `(2 F_e + 1) / 3`.
///
/// Rejects inputs outside [0, 1] by more than 1e-9; values inside the guard
/// band are clamped before the affine map.
pub fn average_gate_fidelity(entanglement: f64) -> Result<f64> {
    if !(-1e-9..=1.0 + 1e-9).contains(&entanglement) {
        return Err(Error::FidelityDomain { value: entanglement });
    }
    let f = entanglement.clamp(0.0, 1.0);
    Ok((2.0 * f + 1.0) / 3.0)
}
