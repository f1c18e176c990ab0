//! Batch experiment plumbing: config files, the simulate/reconstruct/sweep
//! pipelines behind the CLI, sweep reports with a stable CSV rendering, and
//! file validation.
//!
//! Everything here is deterministic under a fixed config. Sweep points take
//! their dataset seed from `master seed + point index`, so appending values
//! to a sweep never changes the rows already computed; the identity
//! reference for mitigation runs offsets the seed by 2^32 to stay out of the
//! sweep's seed range.

use crate::decomposition::{decompose, ErrorBudget};
use crate::error::{Error, Result};
use crate::reps::{average_gate_fidelity, entanglement_fidelity, UnitaryGate};
use crate::simulator::{run_experiment, NoiseModel, NoiseScope, ReadoutModel, ShotPlan};
use crate::tomography::{
    mitigate_setting_errors, reconstruct, standard_settings, ReconstructionConfig,
    ReconstructionResult, TomographyDataset,
};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Seed offset for the identity-reference dataset of a mitigated run, far
/// above any plausible sweep length.
const REFERENCE_SEED_OFFSET: u64 = 1 << 32;

/// Which noise parameter a sweep varies. The parameter fixes the noise
/// family; the configured base noise model is ignored during a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Epsilon,
    Sigma,
    HalfWidth,
}

impl SweepParameter {
    pub fn noise(self, value: f64) -> NoiseModel {
        match self {
            SweepParameter::Epsilon => NoiseModel::Coherent { epsilon: value },
            SweepParameter::Sigma => NoiseModel::Gaussian { sigma: value },
            SweepParameter::HalfWidth => NoiseModel::TopHat { half_width: value },
        }
    }
}

/// A list of values for one noise parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep: value list is empty".into()));
        }
        for &v in &self.values {
            self.parameter.noise(v).validate()?;
        }
        Ok(())
    }
}

/// One experiment, as read from a `--config` JSON file. Only `gate` is
/// required; every other field has the obvious quiet default (no noise,
/// perfect readout, 10^4 sampled shots, seed 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Label of the gate under test, e.g. "Rx(pi)" or "Ry(0.95pi)".
    pub gate: String,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default)]
    pub noise_scope: NoiseScope,
    #[serde(default)]
    pub readout: ReadoutModel,
    #[serde(default)]
    pub plan: ShotPlan,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    /// Also simulate an identity-labeled reference dataset and fold its
    /// reconstruction into the gate's measurement model.
    #[serde(default)]
    pub mitigation: bool,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub solver: ReconstructionConfig,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from(".")
}

impl ExperimentConfig {
    pub fn new(gate: impl Into<String>) -> Self {
        ExperimentConfig {
            gate: gate.into(),
            noise: NoiseModel::None,
            noise_scope: NoiseScope::default(),
            readout: ReadoutModel::default(),
            plan: ShotPlan::default(),
            sweep: None,
            mitigation: false,
            output_dir: default_output_dir(),
            solver: ReconstructionConfig::default(),
        }
    }

    /// Reads and validates a config file; JSON errors carry line and column.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.gate_under_test()?;
        self.noise.validate()?;
        self.readout.validate()?;
        self.plan.validate()?;
        if let Some(sweep) = &self.sweep {
            sweep.validate()?;
        }
        Ok(())
    }

    pub fn gate_under_test(&self) -> Result<UnitaryGate> {
        UnitaryGate::from_label(&self.gate)
    }
}

/// Datasets produced by one simulate run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub dataset: TomographyDataset,
    /// Identity-labeled dataset under the same noise, for mitigation.
    pub identity_reference: Option<TomographyDataset>,
}

/// Simulate the configured experiment (and its identity reference when
/// mitigation is on).
pub fn run_simulate(config: &ExperimentConfig) -> Result<SimulationOutput> {
    config.validate()?;
    let settings = standard_settings();
    let dataset = run_experiment(
        &config.gate_under_test()?,
        &settings,
        &config.noise,
        config.noise_scope,
        &config.readout,
        &config.plan,
    )?;
    let identity_reference = if config.mitigation {
        let plan = ShotPlan {
            seed: config.plan.seed.wrapping_add(REFERENCE_SEED_OFFSET),
            ..config.plan.clone()
        };
        Some(run_experiment(
            &UnitaryGate::identity(),
            &settings,
            &config.noise,
            config.noise_scope,
            &config.readout,
            &plan,
        )?)
    } else {
        None
    };
    Ok(SimulationOutput { dataset, identity_reference })
}

/// Writes the simulate output into `out_dir` as `dataset.json` (plus
/// `identity_reference.json` when present) and returns the paths.
pub fn write_simulation(output: &SimulationOutput, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let path = out_dir.join("dataset.json");
    output.dataset.save(&path)?;
    written.push(path);
    if let Some(reference) = &output.identity_reference {
        let path = out_dir.join("identity_reference.json");
        reference.save(&path)?;
        written.push(path);
    }
    Ok(written)
}

/// Reconstruction plus the error analysis against the target gate; the
/// on-disk result format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructionReport {
    /// Target the budget and fidelities are measured against.
    pub gate: String,
    pub reconstruction: ReconstructionResult,
    pub budget: ErrorBudget,
    pub f_entanglement: f64,
    pub f_average: f64,
    /// Channel fitted to the identity reference, present on mitigated runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setting_channel: Option<ReconstructionResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gross_setting_error: Option<bool>,
    /// Echo of the solver settings the result was produced with.
    pub solver: ReconstructionConfig,
}

impl ReconstructionReport {
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

/// Reconstruct a dataset and decompose its deviation from `target` (the
/// dataset's own gate label when `None`). With `reference`, the identity
/// dataset's channel is folded into the measurement model first.
pub fn run_reconstruct(
    dataset: &TomographyDataset,
    target: Option<&str>,
    reference: Option<&TomographyDataset>,
    solver: &ReconstructionConfig,
) -> Result<ReconstructionReport> {
    let target = UnitaryGate::from_label(target.unwrap_or(&dataset.gate_label))?;
    let (reconstruction, setting_channel, gross_setting_error) = match reference {
        Some(identity) => {
            let m = mitigate_setting_errors(identity, dataset, solver)?;
            (m.mitigated, Some(m.setting_channel), Some(m.gross_setting_error))
        }
        None => (reconstruct(dataset, solver)?, None, None),
    };
    let budget = decompose(&target.ptm(), &reconstruction.t_hat)?.budget;
    let f_entanglement = entanglement_fidelity(&target.ptm(), &reconstruction.t_hat);
    let f_average = average_gate_fidelity(f_entanglement)?;
    Ok(ReconstructionReport {
        gate: target.label(),
        reconstruction,
        budget,
        f_entanglement,
        f_average,
        setting_channel,
        gross_setting_error,
        solver: solver.clone(),
    })
}

/// One sweep point, flattened so the CSV rendering is a plain table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Value of the swept parameter.
    pub value: f64,
    /// Dataset seed for this point (master seed + point index).
    pub seed: u64,
    pub eps2_total: f64,
    pub eps2_markovian: f64,
    pub eps2_coherent: f64,
    pub eps2_nonmark: f64,
    pub additivity_residual: f64,
    pub infidelity_r: f64,
    pub delta_theta_x: f64,
    pub delta_theta_y: f64,
    pub delta_theta_z: f64,
    pub f_entanglement: f64,
    pub f_average: f64,
    pub objective: f64,
    pub iterations: u64,
    pub kkt_primal: f64,
    pub kkt_dual: f64,
    pub converged: bool,
}

impl SweepRow {
    fn new(value: f64, seed: u64, report: &ReconstructionReport) -> Result<Self> {
        let budget = &report.budget;
        // A reflection in the polar factor would leave the rotation columns
        // undefined; rows are required to be complete.
        let [dx, dy, dz] = budget.delta_theta_xyz.ok_or(Error::Reflection)?;
        let r = &report.reconstruction;
        Ok(SweepRow {
            value,
            seed,
            eps2_total: budget.total,
            eps2_markovian: budget.markovian,
            eps2_coherent: budget.coherent,
            eps2_nonmark: budget.nonmarkovian,
            additivity_residual: budget.additivity_residual,
            infidelity_r: budget.infidelity_r,
            delta_theta_x: dx,
            delta_theta_y: dy,
            delta_theta_z: dz,
            f_entanglement: report.f_entanglement,
            f_average: report.f_average,
            objective: r.objective,
            iterations: r.iterations as u64,
            kkt_primal: r.kkt_primal,
            kkt_dual: r.kkt_dual,
            converged: r.converged,
        })
    }
}

/// Full pipeline output across a sweep; one row per swept value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub gate: String,
    pub parameter: SweepParameter,
    pub master_seed: u64,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// CSV rendering with a header row. Floats print in their shortest
    /// round-tripping form, so render -> parse -> render is byte-stable.
    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            writer.serialize(row).map_err(csv_error)?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::from(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| Error::Schema(format!("csv: {e}")))
    }

    pub fn rows_from_csv(text: &str) -> Result<Vec<SweepRow>> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        reader
            .deserialize()
            .map(|row| row.map_err(csv_error))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Writes `sweep.csv` and `sweep.json` into `out_dir`.
    pub fn save(&self, out_dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(out_dir)?;
        let csv_path = out_dir.join("sweep.csv");
        std::fs::write(&csv_path, self.to_csv()?)?;
        let json_path = out_dir.join("sweep.json");
        std::fs::write(&json_path, self.to_json()?)?;
        Ok((csv_path, json_path))
    }

    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Schema(format!("csv: {e}"))
}

/// Run simulate + reconstruct + decompose once per sweep value. Point `i`
/// simulates with seed `master + i`; everything else comes from the config.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepReport> {
    config.validate()?;
    let spec = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep: config has no sweep specification".into()))?;
    let master_seed = config.plan.seed;
    let mut rows = Vec::with_capacity(spec.values.len());
    for (index, &value) in spec.values.iter().enumerate() {
        let seed = master_seed.wrapping_add(index as u64);
        let point = ExperimentConfig {
            noise: spec.parameter.noise(value),
            plan: ShotPlan { seed, ..config.plan.clone() },
            sweep: None,
            ..config.clone()
        };
        let output = run_simulate(&point)?;
        let report = run_reconstruct(
            &output.dataset,
            Some(&config.gate),
            output.identity_reference.as_ref(),
            &config.solver,
        )?;
        log::info!(
            "sweep point {index}: {parameter:?}={value} seed={seed} converged={converged}",
            parameter = spec.parameter,
            converged = report.reconstruction.converged,
        );
        rows.push(SweepRow::new(value, seed, &report)?);
    }
    Ok(SweepReport {
        gate: config.gate.clone(),
        parameter: spec.parameter,
        master_seed,
        rows,
    })
}

/// What kind of file [`run_validate`] decided it was looking at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Dataset,
    Result,
}

impl std::fmt::Display for FileKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FileKind::Dataset => write!(f, "dataset"),
            FileKind::Result => write!(f, "result"),
        }
    }
}

/// One line of the validation listing.
#[derive(Debug, Clone)]
pub struct ValidationCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl ValidationCheck {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        ValidationCheck { name, passed, detail: detail.into() }
    }
}

/// Validation outcome: the detected file kind and one entry per check.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub kind: FileKind,
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Physicality tolerance for stored results: well above the solver's
/// constraint tolerance, well below any violation worth reporting.
const RESULT_CPTP_TOLERANCE: f64 = 1e-6;

/// Schema and physicality checks on a dataset or result file; the kind is
/// detected from the content. Unreadable or unrecognizable files are errors;
/// recognizable files with violations come back as a failed report.
pub fn run_validate(path: &Path) -> Result<ValidationReport> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let object = value
        .as_object()
        .ok_or_else(|| Error::Schema("file: top level is not a JSON object".into()))?;
    if object.contains_key("protocol") {
        let dataset: TomographyDataset = serde_json::from_value(value)?;
        Ok(validate_dataset(&dataset))
    } else if object.contains_key("reconstruction") {
        let report: ReconstructionReport = serde_json::from_value(value)?;
        Ok(validate_result(&report))
    } else {
        Err(Error::Schema(
            "file: neither a dataset (no \"protocol\" field) nor a result (no \"reconstruction\" field)"
                .into(),
        ))
    }
}

fn validate_dataset(dataset: &TomographyDataset) -> ValidationReport {
    let schema = match dataset.validate() {
        Ok(()) => ValidationCheck::new(
            "schema",
            true,
            format!("protocol {:?}, gate {:?}, 12 settings", dataset.protocol, dataset.gate_label),
        ),
        Err(e) => ValidationCheck::new("schema", false, e.to_string()),
    };
    let mut checks = vec![schema];
    if checks[0].passed {
        let total: u64 = dataset.settings.iter().map(|s| s.n_shots).sum();
        let exact = dataset.settings.iter().filter(|s| s.y_exact.is_some()).count();
        checks.push(ValidationCheck::new(
            "counts",
            true,
            format!("{total} shots total, {exact}/12 settings carry exact probabilities"),
        ));
    }
    ValidationReport { kind: FileKind::Dataset, checks }
}

fn validate_result(report: &ReconstructionReport) -> ValidationReport {
    let mut checks = Vec::new();
    let gate = UnitaryGate::from_label(&report.gate);
    checks.push(match &gate {
        Ok(_) => ValidationCheck::new("target", true, format!("gate {:?}", report.gate)),
        Err(e) => ValidationCheck::new("target", false, e.to_string()),
    });

    let diag = report.reconstruction.rho_hat.validate(RESULT_CPTP_TOLERANCE);
    checks.push(ValidationCheck::new(
        "hermiticity",
        diag.hermiticity_defect <= diag.tolerance,
        format!("defect {:.3e}", diag.hermiticity_defect),
    ));
    checks.push(ValidationCheck::new(
        "trace_preservation",
        diag.trace_preservation_defect <= diag.tolerance,
        format!("defect {:.3e}", diag.trace_preservation_defect),
    ));
    checks.push(ValidationCheck::new(
        "complete_positivity",
        diag.min_eigenvalue >= -diag.tolerance,
        format!("min eigenvalue {:.3e}", diag.min_eigenvalue),
    ));

    let pictures = report
        .reconstruction
        .t_hat
        .frobenius_distance(&report.reconstruction.rho_hat.ptm());
    checks.push(ValidationCheck::new(
        "picture_agreement",
        pictures <= 1e-9,
        format!("transfer/process distance {pictures:.3e}"),
    ));

    let b = &report.budget;
    let shortfall =
        b.total - (b.markovian + b.coherent + b.nonmarkovian + b.additivity_residual);
    checks.push(ValidationCheck::new(
        "budget_identity",
        shortfall.abs() <= 1e-12 * b.total.max(1.0),
        format!("total - parts - residual = {shortfall:.3e}"),
    ));

    let f_ok = (-1e-9..=1.0 + 1e-9).contains(&report.f_entanglement)
        && (report.f_average - (2.0 * report.f_entanglement.clamp(0.0, 1.0) + 1.0) / 3.0).abs()
            <= 1e-12;
    checks.push(ValidationCheck::new(
        "fidelities",
        f_ok,
        format!("F_e {:.6}, F_av {:.6}", report.f_entanglement, report.f_average),
    ));

    checks.push(ValidationCheck::new(
        "convergence",
        report.reconstruction.converged,
        format!(
            "{} iterations, primal {:.3e}, dual {:.3e}",
            report.reconstruction.iterations,
            report.reconstruction.kkt_primal,
            report.reconstruction.kkt_dual
        ),
    ));

    ValidationReport { kind: FileKind::Result, checks }
}
