//! Constrained reconstruction by operator splitting.
//!
//! The fit variable is the free part of the transfer matrix: the first row
//! is pinned to (1, 0, 0, 0) so trace preservation holds by construction,
//! leaving twelve coordinates. Complete positivity lives in the other
//! picture, as positive semidefiniteness of the process state. The solver
//! alternates three cheap steps (ADMM with scaled dual):
//!
//! 1. a ridge-regularized weighted least-squares solve in the transfer
//!    coordinates, with a constant Hessian factored once up front;
//! 2. an eigenvalue clip projecting the current process state plus dual
//!    onto the positive cone;
//! 3. a running dual update holding the two pictures together.
//!
//! Because the consensus variable of step 2 tracks a Douglas-Rachford
//! fixed-point iteration, the step norm `|(Z+U)_k - (Z+U)_{k-1}|` is
//! non-increasing; [`reconstruct_with_trace`] exposes that sequence so the
//! property can be checked directly.

use crate::error::{Error, Result};
use crate::reps::{ChoiMatrix, PauliTransferMatrix};
use crate::tomography::{MeasurementSetting, TomographyDataset};
use nalgebra::{Cholesky, DMatrix, DVector, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Stopping rules and weighting for [`reconstruct`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReconstructionConfig {
    /// Stop once the objective changes by less than this between sweeps.
    pub objective_tolerance: f64,
    /// Ceiling on both the primal residual (distance between the two
    /// pictures) and the dual residual (scaled consensus step) at the
    /// returned iterate.
    pub constraint_tolerance: f64,
    pub max_iterations: usize,
    /// Penalty weight coupling the two pictures. Any positive value
    /// converges; values near the scale of the data weights converge
    /// fastest.
    pub penalty_parameter: f64,
    /// Weight each setting by `n / (y(1-y) + 1e-3)`, the inverse binomial
    /// variance with a floor. Off by default: unit weights.
    pub binomial_weights: bool,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        ReconstructionConfig {
            objective_tolerance: 1e-10,
            constraint_tolerance: 1e-8,
            max_iterations: 50_000,
            penalty_parameter: 1.0,
            binomial_weights: false,
        }
    }
}

impl ReconstructionConfig {
    fn validate(&self) -> Result<()> {
        if !(self.objective_tolerance > 0.0) || !(self.constraint_tolerance > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be positive".into()));
        }
        if !(self.penalty_parameter > 0.0) {
            return Err(Error::Config("penalty_parameter must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of a reconstruction. `t_hat` and `rho_hat` describe the same
/// channel in the two pictures; `rho_hat` is trace preserving exactly and
/// positive semidefinite up to `kkt_primal`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructionResult {
    pub t_hat: PauliTransferMatrix,
    pub rho_hat: ChoiMatrix,
    /// Weighted sum of squared residuals at the returned iterate.
    pub objective: f64,
    pub iterations: usize,
    /// Frobenius distance between the fitted channel and its positive
    /// projection at the returned iterate.
    pub kkt_primal: f64,
    /// Scaled step of the consensus variable at the returned iterate.
    pub kkt_dual: f64,
    /// False when the iteration budget ran out first; the best iterate seen
    /// is returned in that case.
    pub converged: bool,
}

/// Reconstruction of a gate dataset together with the setting-error
/// reference it was corrected by.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MitigatedReconstruction {
    /// Channel fitted to the identity dataset: the combined action of the
    /// preparation and analysis errors.
    pub setting_channel: ReconstructionResult,
    /// Gate reconstruction with the setting channel folded into the
    /// measurement model.
    pub mitigated: ReconstructionResult,
    /// Set when the setting channel is so far from the identity that the
    /// correction cannot be trusted.
    pub gross_setting_error: bool,
}

// Free coordinates: slot k holds transfer-matrix entry (1 + k/4, k % 4).
const FREE: usize = 12;

fn ptm_from_free(x: &DVector<f64>) -> PauliTransferMatrix {
    let mut m = Matrix4::zeros();
    m[(0, 0)] = 1.0;
    for k in 0..FREE {
        m[(1 + k / 4, k % 4)] = x[k];
    }
    PauliTransferMatrix::from_matrix(m)
}

/// Adjoint of the free-coordinate embedding: project a process-picture
/// matrix back onto the twelve transfer coordinates. Exactly the transfer
/// image because the embedding basis is orthonormal.
fn free_from_process(m: &Matrix4<Complex64>) -> DVector<f64> {
    let t = ChoiMatrix::from_matrix(*m).ptm();
    let mut x = DVector::zeros(FREE);
    for k in 0..FREE {
        x[k] = t.matrix()[(1 + k / 4, k % 4)];
    }
    x
}

fn process_from_free(x: &DVector<f64>) -> Matrix4<Complex64> {
    *ChoiMatrix::from_ptm(&ptm_from_free(x)).matrix()
}

fn frobenius(m: &Matrix4<Complex64>) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn project_positive(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    *ChoiMatrix::from_matrix(*m).project_psd().matrix()
}

/// Linearized measurement model: `y_i = a_i . x + beta_i` where `a_i` and
/// `beta_i` read the observable against the free and pinned parts of the
/// transfer matrix.
struct Design {
    a: DMatrix<f64>,
    beta: DVector<f64>,
}

fn build_design(settings: &[MeasurementSetting]) -> Result<Design> {
    let n = settings.len();
    let mut a = DMatrix::zeros(n, FREE);
    let mut beta = DVector::zeros(n);
    for (i, s) in settings.iter().enumerate() {
        let obs = s.observable();
        // 2 Tr[Y E_rc] = 2 Y[c, r] for the unit matrix at (r, c).
        beta[i] = 2.0 * obs[(0, 0)];
        for k in 0..FREE {
            a[(i, k)] = 2.0 * obs[(k % 4, 1 + k / 4)];
        }
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteData);
    }
    let svd = a.clone().svd(false, false);
    let max_sv = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|s| **s > 1e-10 * max_sv).count();
    if rank < FREE {
        return Err(Error::RankDeficientDesign { rank });
    }
    Ok(Design { a, beta })
}

struct Iterate {
    x: DVector<f64>,
    objective: f64,
    primal: f64,
    dual: f64,
    iterations: usize,
}

fn result_from(it: Iterate, converged: bool) -> ReconstructionResult {
    let t_hat = ptm_from_free(&it.x);
    let rho_hat = ChoiMatrix::from_ptm(&t_hat);
    ReconstructionResult {
        t_hat,
        rho_hat,
        objective: it.objective,
        iterations: it.iterations,
        kkt_primal: it.primal,
        kkt_dual: it.dual,
        converged,
    }
}

fn splitting_loop(
    design: &Design,
    outcomes: &DVector<f64>,
    weights: &DVector<f64>,
    config: &ReconstructionConfig,
    trace: Option<&mut Vec<f64>>,
) -> ReconstructionResult {
    let rho = config.penalty_parameter;
    let wa = DMatrix::from_diagonal(weights) * &design.a;
    let hessian = design.a.transpose() * &wa * 2.0 + DMatrix::identity(FREE, FREE) * rho;
    let chol = Cholesky::new(hessian).expect("ridge Hessian is positive definite");
    let g = design.a.transpose() * DMatrix::from_diagonal(weights) * (outcomes - &design.beta) * 2.0;

    let objective = |x: &DVector<f64>| -> f64 {
        let r = &design.a * x + &design.beta - outcomes;
        r.iter().zip(weights.iter()).map(|(ri, wi)| wi * ri * ri).sum()
    };

    let mut z = Matrix4::<Complex64>::zeros();
    let mut u = Matrix4::<Complex64>::zeros();
    let mut f_prev = f64::INFINITY;
    let mut consensus_prev: Option<Matrix4<Complex64>> = None;
    let mut trace = trace;
    let mut best: Option<Iterate> = None;

    for iter in 1..=config.max_iterations {
        let rhs = &g + free_from_process(&(z - u)) * rho;
        let x = chol.solve(&rhs);
        let c_x = process_from_free(&x);
        let z_new = project_positive(&(c_x + u));
        u += c_x - z_new;
        let primal = frobenius(&(c_x - z_new));
        let dual = rho * frobenius(&(z_new - z));
        z = z_new;
        let f = objective(&x);

        let consensus = z + u;
        if let Some(prev) = consensus_prev {
            if let Some(t) = trace.as_deref_mut() {
                t.push(frobenius(&(consensus - prev)));
            }
        }
        consensus_prev = Some(consensus);

        let better = best
            .as_ref()
            .map_or(true, |b| primal.max(dual) < b.primal.max(b.dual));
        if better {
            best = Some(Iterate { x: x.clone(), objective: f, primal, dual, iterations: iter });
        }

        if (f_prev - f).abs() < config.objective_tolerance
            && primal < config.constraint_tolerance
            && dual < config.constraint_tolerance
        {
            return result_from(Iterate { x, objective: f, primal, dual, iterations: iter }, true);
        }
        f_prev = f;
    }

    result_from(best.expect("at least one sweep ran"), false)
}

fn solve(
    settings: &[MeasurementSetting],
    outcomes: &[f64],
    shots: Option<&[u64]>,
    config: &ReconstructionConfig,
    trace: Option<&mut Vec<f64>>,
) -> Result<ReconstructionResult> {
    config.validate()?;
    if settings.len() != outcomes.len() {
        return Err(Error::Config(format!(
            "{} settings but {} outcomes",
            settings.len(),
            outcomes.len()
        )));
    }
    if outcomes.iter().any(|y| !y.is_finite()) {
        return Err(Error::NonFiniteData);
    }
    let design = build_design(settings)?;
    let y = DVector::from_column_slice(outcomes);
    let weights = if config.binomial_weights {
        let shots = shots.ok_or_else(|| {
            Error::Config("binomial weights require per-setting shot counts".into())
        })?;
        if shots.len() != outcomes.len() {
            return Err(Error::Config(format!(
                "{} outcomes but {} shot counts",
                outcomes.len(),
                shots.len()
            )));
        }
        DVector::from_iterator(
            outcomes.len(),
            outcomes
                .iter()
                .zip(shots)
                .map(|(yi, ni)| *ni as f64 / (yi * (1.0 - yi) + 1e-3)),
        )
    } else {
        DVector::from_element(outcomes.len(), 1.0)
    };
    Ok(splitting_loop(&design, &y, &weights, config, trace))
}

/// Fit a channel to arbitrary settings and outcome estimates. `shots` is
/// only consulted when the config asks for binomial weighting.
pub fn reconstruct_outcomes(
    settings: &[MeasurementSetting],
    outcomes: &[f64],
    shots: Option<&[u64]>,
    config: &ReconstructionConfig,
) -> Result<ReconstructionResult> {
    solve(settings, outcomes, shots, config, None)
}

/// Fit a channel to a recorded dataset after schema validation.
pub fn reconstruct(
    dataset: &TomographyDataset,
    config: &ReconstructionConfig,
) -> Result<ReconstructionResult> {
    dataset.validate()?;
    let settings = dataset.measurement_settings()?;
    let outcomes = dataset.outcomes();
    let shots: Vec<u64> = dataset.settings.iter().map(|r| r.n_shots).collect();
    solve(&settings, &outcomes, Some(&shots), config, None)
}

/// Like [`reconstruct`], additionally returning the consensus step norms,
/// one per sweep after the first. The sequence is non-increasing.
pub fn reconstruct_with_trace(
    dataset: &TomographyDataset,
    config: &ReconstructionConfig,
) -> Result<(ReconstructionResult, Vec<f64>)> {
    dataset.validate()?;
    let settings = dataset.measurement_settings()?;
    let outcomes = dataset.outcomes();
    let shots: Vec<u64> = dataset.settings.iter().map(|r| r.n_shots).collect();
    let mut trace = Vec::new();
    let result = solve(&settings, &outcomes, Some(&shots), config, Some(&mut trace))?;
    Ok((result, trace))
}

/// Correct a gate reconstruction for preparation and analysis errors using
/// a companion identity dataset taken with the same settings.
///
/// The identity data is fitted first; whatever channel it reveals is the
/// combined action of the setting rotations' imperfections. That channel is
/// then folded into the measurement model of the second fit, so the gate
/// estimate no longer absorbs it. First-order accurate in the setting
/// error.
pub fn mitigate_setting_errors(
    identity: &TomographyDataset,
    gate: &TomographyDataset,
    config: &ReconstructionConfig,
) -> Result<MitigatedReconstruction> {
    use crate::reps::UnitaryGate;
    identity.validate()?;
    gate.validate()?;
    if UnitaryGate::from_label(&identity.gate_label)? != UnitaryGate::identity() {
        return Err(Error::Config(format!(
            "setting-error reference must be an identity dataset, got gate_label {:?}",
            identity.gate_label
        )));
    }
    let setting_channel = reconstruct(identity, config)?;
    let t0 = setting_channel.t_hat;
    let gross_setting_error =
        t0.frobenius_distance(&PauliTransferMatrix::identity()) > 1.0;

    // Fold the setting channel into each observable: the corrected model
    // reads y = 2 Tr[(Y T0) T].
    let corrected: Vec<MeasurementSetting> = gate
        .measurement_settings()?
        .into_iter()
        .map(|s| {
            let mut s = s;
            s.observable = s.observable * t0.matrix();
            s
        })
        .collect();
    let outcomes = gate.outcomes();
    let shots: Vec<u64> = gate.settings.iter().map(|r| r.n_shots).collect();
    let mitigated = solve(&corrected, &outcomes, Some(&shots), config, None)?;
    Ok(MitigatedReconstruction { setting_channel, mitigated, gross_setting_error })
}
