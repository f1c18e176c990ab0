//! Twelve-setting process tomography: measurement model, dataset schema, and
//! the constrained reconstruction solver.
//!
//! Each setting sandwiches the gate under test between a preparation rotation
//! `A` and an analysis rotation `B`, then reads out the excited-state
//! population. In transfer-matrix language the expected outcome is linear in
//! the unknown gate, `y = 2 Tr[Y T]` with the rank-one observable
//! `Y = T_A p_0 p_1^T T_B`; the factor 2 makes `y` exactly the excitation
//! probability under the Pauli-vector normalization used here.

mod solver;

pub use solver::{
    mitigate_setting_errors, reconstruct, reconstruct_outcomes, reconstruct_with_trace,
    MitigatedReconstruction, ReconstructionConfig, ReconstructionResult,
};

use crate::error::{Error, Result};
use crate::reps::{PauliTransferMatrix, PauliVector, UnitaryGate};
use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

/// One tomography setting: preparation `A`, analysis `B`, and the
/// precomputed rank-one observable `Y = T_A p_0 p_1^T T_B`.
#[derive(Debug, Clone)]
pub struct MeasurementSetting {
    gate_a: UnitaryGate,
    gate_b: UnitaryGate,
    observable: Matrix4<f64>,
}

impl MeasurementSetting {
    pub fn new(gate_a: UnitaryGate, gate_b: UnitaryGate) -> Self {
        let col = gate_a.ptm().matrix() * PauliVector::ket_zero().0;
        let row = (gate_b.ptm().matrix().transpose() * PauliVector::ket_one().0).transpose();
        MeasurementSetting { gate_a, gate_b, observable: col * row }
    }

    pub fn gate_a(&self) -> &UnitaryGate {
        &self.gate_a
    }

    pub fn gate_b(&self) -> &UnitaryGate {
        &self.gate_b
    }

    pub fn observable(&self) -> &Matrix4<f64> {
        &self.observable
    }
}

/// Preparation rotations, in protocol order. Together they take the ground
/// state to four linearly independent Bloch vectors (+z, -z, -y, +x), which
/// is what makes the twelve-setting design full rank.
pub fn preparation_gates() -> [UnitaryGate; 4] {
    [
        UnitaryGate::identity(),
        UnitaryGate::rx(PI),
        UnitaryGate::rx(FRAC_PI_2),
        UnitaryGate::ry(FRAC_PI_2),
    ]
}

/// Analysis rotations, in protocol order.
pub fn analysis_gates() -> [UnitaryGate; 3] {
    [UnitaryGate::identity(), UnitaryGate::ry(FRAC_PI_2), UnitaryGate::rx(FRAC_PI_2)]
}

/// The twelve standard settings in A-major order: the preparation gate
/// varies slowest.
pub fn standard_settings() -> Vec<MeasurementSetting> {
    let mut settings = Vec::with_capacity(12);
    for a in preparation_gates() {
        for b in analysis_gates() {
            settings.push(MeasurementSetting::new(a, b));
        }
    }
    settings
}

/// Expected excitation probability `2 Tr[Y T]` for a channel in
/// transfer-matrix form. Values straying outside [0, 1] by at most 1e-9
/// (numerical fuzz on a physical channel) are clipped to the boundary.
pub fn predict_outcome(setting: &MeasurementSetting, t: &PauliTransferMatrix) -> f64 {
    let y = 2.0 * (setting.observable * t.matrix()).trace();
    if y < 0.0 && y >= -1e-9 {
        return 0.0;
    }
    if y > 1.0 && y <= 1.0 + 1e-9 {
        return 1.0;
    }
    y
}

/// Counts for one setting of a recorded dataset.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SettingRecord {
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "B")]
    pub b: String,
    pub n_shots: u64,
    pub n_excited: u64,
    /// Present when the data was generated from exact per-shot
    /// probabilities rather than sampled bits; takes precedence over the
    /// integer counts, which then hold the rounded equivalent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl SettingRecord {
    /// Estimated excitation probability for this setting.
    pub fn outcome(&self) -> f64 {
        match self.y_exact {
            Some(y) => y,
            None => self.n_excited as f64 / self.n_shots as f64,
        }
    }
}

/// A recorded twelve-setting dataset; the on-disk JSON schema.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TomographyDataset {
    pub protocol: String,
    pub gate_label: String,
    pub settings: Vec<SettingRecord>,
    /// Free-form description of how the data came to be (filled in by the
    /// simulator; ignored by the solver).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

impl TomographyDataset {
    pub const PROTOCOL: &'static str = "tsd-12";

    pub fn new(gate_label: impl Into<String>, settings: Vec<SettingRecord>) -> Self {
        TomographyDataset {
            protocol: Self::PROTOCOL.into(),
            gate_label: gate_label.into(),
            settings,
            provenance: None,
        }
    }

    /// Schema check with field-precise messages: protocol tag, the twelve
    /// settings in A-major order, count bounds, and finite outcomes.
    pub fn validate(&self) -> Result<()> {
        if self.protocol != Self::PROTOCOL {
            return Err(Error::Schema(format!(
                "protocol: unsupported value {:?} (expected {:?})",
                self.protocol,
                Self::PROTOCOL
            )));
        }
        if self.settings.len() != 12 {
            return Err(Error::Schema(format!(
                "settings: expected 12 entries, found {}",
                self.settings.len()
            )));
        }
        UnitaryGate::from_label(&self.gate_label)
            .map_err(|_| Error::Schema(format!("gate_label: unrecognized label {:?}", self.gate_label)))?;
        let preps = preparation_gates();
        let analyses = analysis_gates();
        for (i, rec) in self.settings.iter().enumerate() {
            let a = UnitaryGate::from_label(&rec.a)
                .map_err(|_| Error::Schema(format!("settings[{i}].A: unrecognized label {:?}", rec.a)))?;
            let b = UnitaryGate::from_label(&rec.b)
                .map_err(|_| Error::Schema(format!("settings[{i}].B: unrecognized label {:?}", rec.b)))?;
            let expected_a = preps[i / 3];
            let expected_b = analyses[i % 3];
            if a != expected_a || b != expected_b {
                return Err(Error::Schema(format!(
                    "settings[{i}]: expected A={:?} B={:?} at this position, found A={:?} B={:?}",
                    expected_a.label(),
                    expected_b.label(),
                    rec.a,
                    rec.b
                )));
            }
            if rec.n_shots == 0 {
                return Err(Error::Schema(format!("settings[{i}].n_shots: must be positive")));
            }
            if rec.n_excited > rec.n_shots {
                return Err(Error::Schema(format!(
                    "settings[{i}].n_excited: {} exceeds n_shots {}",
                    rec.n_excited, rec.n_shots
                )));
            }
            if let Some(y) = rec.y_exact {
                if !y.is_finite() {
                    return Err(Error::NonFiniteData);
                }
                if !(0.0..=1.0).contains(&y) {
                    return Err(Error::Schema(format!(
                        "settings[{i}].y_exact: {y} outside [0, 1]"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The measurement settings described by the records.
    pub fn measurement_settings(&self) -> Result<Vec<MeasurementSetting>> {
        self.settings
            .iter()
            .map(|rec| {
                Ok(MeasurementSetting::new(
                    UnitaryGate::from_label(&rec.a)?,
                    UnitaryGate::from_label(&rec.b)?,
                ))
            })
            .collect()
    }

    pub fn outcomes(&self) -> Vec<f64> {
        self.settings.iter().map(SettingRecord::outcome).collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}
