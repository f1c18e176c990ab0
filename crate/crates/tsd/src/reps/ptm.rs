//! The real transfer-matrix picture.

use crate::reps::{PauliVector, UnitaryGate};
use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Real 4x4 transfer matrix `T_ab = Tr[sigma_a Phi(sigma_b)] / 2` in the
/// fixed I, X, Y, Z basis order.
///
/// A trace-preserving map has first row (1, 0, 0, 0); a unital one also has
/// first column (1, 0, 0, 0). For a unitary the lower-right 3x3 block is the
/// Bloch-sphere rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTransferMatrix {
    m: Matrix4<f64>,
}

impl PauliTransferMatrix {
    pub fn identity() -> Self {
        PauliTransferMatrix { m: Matrix4::identity() }
    }

    /// Wraps a raw matrix without validation.
    pub fn from_matrix(m: Matrix4<f64>) -> Self {
        PauliTransferMatrix { m }
    }

    pub fn of_unitary(gate: &UnitaryGate) -> Self {
        gate.ptm()
    }

    /// Embeds a 3x3 Bloch block into a trace-preserving unital matrix.
    pub fn from_bloch_block(block: &Matrix3<f64>) -> Self {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(block);
        PauliTransferMatrix { m }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.m
    }

    /// The lower-right 3x3 block acting on the Bloch vector.
    pub fn bloch_block(&self) -> Matrix3<f64> {
        self.m.fixed_view::<3, 3>(1, 1).into_owned()
    }

    /// The non-unital part: last three entries of the first column.
    pub fn translation(&self) -> Vector3<f64> {
        Vector3::new(self.m[(1, 0)], self.m[(2, 0)], self.m[(3, 0)])
    }

    /// Deviation of the first row from (1, 0, 0, 0).
    pub fn trace_preservation_defect(&self) -> f64 {
        let r = self.m.row(0);
        ((r[0] - 1.0).powi(2) + r[1].powi(2) + r[2].powi(2) + r[3].powi(2)).sqrt()
    }

    /// Action on a state in Pauli coordinates, `p' = T p`.
    pub fn apply(&self, p: &PauliVector) -> PauliVector {
        PauliVector(self.m * p.0)
    }

    /// Composition `self . inner` (apply `inner` first), which is the plain
    /// matrix product of the two transfer matrices.
    pub fn compose(&self, inner: &Self) -> Self {
        PauliTransferMatrix { m: self.m * inner.m }
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        (self.m - other.m).norm()
    }
}

#[derive(Serialize, Deserialize)]
struct PtmRecord {
    basis: String,
    matrix: [[f64; 4]; 4],
}

impl Serialize for PauliTransferMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut matrix = [[0.0; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                matrix[r][c] = self.m[(r, c)];
            }
        }
        PtmRecord { basis: "IXYZ".into(), matrix }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PauliTransferMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let record = PtmRecord::deserialize(deserializer)?;
        if record.basis != "IXYZ" {
            return Err(D::Error::custom(format!(
                "unsupported transfer-matrix basis {:?}; expected \"IXYZ\"",
                record.basis
            )));
        }
        let mut m = Matrix4::zeros();
        for r in 0..4 {
            for c in 0..4 {
                m[(r, c)] = record.matrix[r][c];
            }
        }
        Ok(PauliTransferMatrix { m })
    }
}
