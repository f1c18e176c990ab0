//! Monte-Carlo trajectory simulation of the tomography circuit, with
//! injectable rotation-angle noise, readout confusion, and analytic
//! shot-averaged channels as independent oracles.
//!
//! Each shot prepares the ground state, applies the preparation rotation,
//! the gate under test, and the analysis rotation as pure-state unitaries,
//! then reads out the excited-state population through a two-outcome
//! confusion model. Angle noise enters as a fractional multiplier
//! `theta -> theta(1+delta)` drawn once per shot and held constant across
//! the shot's gates, mirroring slow hardware fluctuations.
//!
//! Randomness is counter-based: every (setting, shot) pair owns a dedicated
//! stream of the same seeded generator, so datasets are reproducible
//! bit-for-bit regardless of execution order or parallelism.

use crate::error::{Error, Result};
use crate::reps::gate::cross_matrix;
use crate::reps::{PauliTransferMatrix, UnitaryGate};
use crate::tomography::{MeasurementSetting, SettingRecord, TomographyDataset};
use nalgebra::{Matrix3, Vector2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Pure qubit state, unit norm.
#[derive(Debug, Clone)]
pub struct QubitState(Vector2<Complex64>);

impl QubitState {
    pub fn ground() -> Self {
        QubitState(Vector2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)))
    }

    pub fn amplitudes(&self) -> &Vector2<Complex64> {
        &self.0
    }

    pub fn apply_gate(&self, gate: &UnitaryGate) -> QubitState {
        let next = QubitState(gate.matrix() * self.0);
        debug_assert!((next.0.norm() - 1.0).abs() < 1e-12);
        next
    }

    pub fn excited_probability(&self) -> f64 {
        self.0[1].norm_sqr()
    }
}

/// Shot-to-shot rotation-angle fluctuation model, as a fractional
/// multiplier on the nominal angle.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NoiseModel {
    #[default]
    None,
    /// Fixed miscalibration: every shot rotates by `theta(1+epsilon)`.
    Coherent { epsilon: f64 },
    /// Fresh `delta ~ N(0, sigma^2)` per shot.
    Gaussian { sigma: f64 },
    /// Fresh `delta` uniform on `[-half_width, half_width]` per shot.
    TopHat { half_width: f64 },
}

impl NoiseModel {
    /// Top-hat model with the same angle variance as `Gaussian(sigma)`.
    pub fn variance_matched_top_hat(sigma: f64) -> NoiseModel {
        NoiseModel::TopHat { half_width: sigma * 3f64.sqrt() }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::None => Ok(()),
            NoiseModel::Coherent { epsilon } => {
                if !epsilon.is_finite() || !(-0.2..=0.2).contains(&epsilon) {
                    Err(Error::Config(format!(
                        "noise: epsilon {epsilon} outside the perturbative range [-0.2, 0.2]"
                    )))
                } else {
                    Ok(())
                }
            }
            NoiseModel::Gaussian { sigma } => {
                if !sigma.is_finite() || sigma < 0.0 {
                    Err(Error::Config(format!("noise: sigma {sigma} must be nonnegative")))
                } else {
                    Ok(())
                }
            }
            NoiseModel::TopHat { half_width } => {
                if !half_width.is_finite() || half_width < 0.0 {
                    Err(Error::Config(format!(
                        "noise: half_width {half_width} must be nonnegative"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// True when the multiplier is the same every shot, so the bit count
    /// is exactly binomial and per-shot simulation can be skipped.
    fn is_deterministic(&self) -> bool {
        matches!(self, NoiseModel::None | NoiseModel::Coherent { .. })
    }

    fn multiplier(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            NoiseModel::None => 1.0,
            NoiseModel::Coherent { epsilon } => 1.0 + epsilon,
            NoiseModel::Gaussian { sigma } => {
                if sigma == 0.0 {
                    1.0
                } else {
                    1.0 + Normal::new(0.0, sigma).unwrap().sample(rng)
                }
            }
            NoiseModel::TopHat { half_width } => {
                if half_width == 0.0 {
                    1.0
                } else {
                    1.0 + rng.gen_range(-half_width..half_width)
                }
            }
        }
    }
}

/// One rotation angle with the noise model applied.
pub fn sample_rotation_angle(
    theta_nominal: f64,
    noise: &NoiseModel,
    rng: &mut impl Rng,
) -> f64 {
    theta_nominal * noise.multiplier(rng)
}

/// Which of the circuit's operations the angle noise touches. The drawn
/// multiplier is shared by every operation it touches within one shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseScope {
    /// Only the gate under test; preparation and analysis stay ideal.
    #[default]
    GateOnly,
    /// Preparation, gate, and analysis all fluctuate together.
    AllGates,
    /// Only preparation and analysis; the gate under test stays ideal.
    /// This is the setting-error scenario the mitigation path corrects.
    SettingsOnly,
}

/// Readout confusion: probabilities of misreading each state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ReadoutModel {
    /// Probability of reading excited given ground.
    pub p_dark: f64,
    /// Probability of reading ground given excited.
    pub p_bright: f64,
}

impl ReadoutModel {
    pub fn perfect() -> Self {
        ReadoutModel::default()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_dark", self.p_dark), ("p_bright", self.p_bright)] {
            if !p.is_finite() || !(0.0..0.5).contains(&p) {
                return Err(Error::Config(format!("readout: {name} {p} outside [0, 0.5)")));
            }
        }
        Ok(())
    }

    /// Probability of *reading* excited given the true excited-state
    /// population.
    pub fn read_probability(&self, p_excited: f64) -> f64 {
        self.p_dark * (1.0 - p_excited) + (1.0 - self.p_bright) * p_excited
    }
}

/// Repetition count, seed, and sampling mode for one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShotPlan {
    pub n_shots: u64,
    pub seed: u64,
    /// When false, record exact per-shot-averaged probabilities instead of
    /// sampled bits (the counts then hold the rounded equivalent).
    pub shot_noise: bool,
}

impl Default for ShotPlan {
    fn default() -> Self {
        ShotPlan { n_shots: 10_000, seed: 0, shot_noise: true }
    }
}

impl ShotPlan {
    pub fn validate(&self) -> Result<()> {
        if self.n_shots == 0 {
            return Err(Error::Config("plan: n_shots must be positive".into()));
        }
        Ok(())
    }
}

/// Simulation metadata stored in the dataset's provenance field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationProvenance {
    pub noise: NoiseModel,
    pub scope: NoiseScope,
    pub readout: ReadoutModel,
    pub plan: ShotPlan,
}

// Stream ids pack (setting, shot); shots are limited to 2^44 per setting.
fn shot_rng(seed: u64, setting: usize, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((setting as u64) << 44) | shot);
    rng
}

/// True excited-state population after one noisy pass through the circuit.
/// Draws the shot's angle multiplier from `rng` (at most one draw).
pub fn shot_probability(
    gate: &UnitaryGate,
    setting: &MeasurementSetting,
    noise: &NoiseModel,
    scope: NoiseScope,
    rng: &mut impl Rng,
) -> f64 {
    let m = noise.multiplier(rng);
    let (m_prep, m_gate, m_analysis) = match scope {
        NoiseScope::GateOnly => (1.0, m, 1.0),
        NoiseScope::AllGates => (m, m, m),
        NoiseScope::SettingsOnly => (m, 1.0, m),
    };
    QubitState::ground()
        .apply_gate(&setting.gate_a().scaled(m_prep))
        .apply_gate(&gate.scaled(m_gate))
        .apply_gate(&setting.gate_b().scaled(m_analysis))
        .excited_probability()
}

/// One simulated measurement: noisy circuit, readout confusion, sampled bit.
pub fn simulate_shot(
    gate: &UnitaryGate,
    setting: &MeasurementSetting,
    noise: &NoiseModel,
    scope: NoiseScope,
    readout: &ReadoutModel,
    rng: &mut impl Rng,
) -> bool {
    let p = readout.read_probability(shot_probability(gate, setting, noise, scope, rng));
    rng.gen::<f64>() < p
}

/// Simulate a full dataset: `plan.n_shots` per setting, every (setting,
/// shot) pair on its own random stream. The records carry the nominal gate
/// labels; that is the point, the dataset describes what the experimenter
/// believes was run, not the noisy reality.
///
/// With a shot-independent multiplier (no noise, or coherent noise) the bit
/// count is drawn directly from the exact binomial law instead of looping
/// over shots; the result is distributionally identical and deterministic
/// under the seed.
pub fn run_experiment(
    gate: &UnitaryGate,
    settings: &[MeasurementSetting],
    noise: &NoiseModel,
    scope: NoiseScope,
    readout: &ReadoutModel,
    plan: &ShotPlan,
) -> Result<TomographyDataset> {
    noise.validate()?;
    readout.validate()?;
    plan.validate()?;
    let n = plan.n_shots;
    let mut records = Vec::with_capacity(settings.len());
    for (i, setting) in settings.iter().enumerate() {
        let (n_excited, y_exact) = if noise.is_deterministic() {
            let mut rng = shot_rng(plan.seed, i, 0);
            let p = readout
                .read_probability(shot_probability(gate, setting, noise, scope, &mut rng))
                .clamp(0.0, 1.0);
            if plan.shot_noise {
                (Binomial::new(n, p).unwrap().sample(&mut rng), None)
            } else {
                ((p * n as f64).round() as u64, Some(p))
            }
        } else if plan.shot_noise {
            let mut excited = 0u64;
            for shot in 0..n {
                let mut rng = shot_rng(plan.seed, i, shot);
                excited +=
                    simulate_shot(gate, setting, noise, scope, readout, &mut rng) as u64;
            }
            (excited, None)
        } else {
            let mut sum = 0.0;
            for shot in 0..n {
                let mut rng = shot_rng(plan.seed, i, shot);
                sum += readout
                    .read_probability(shot_probability(gate, setting, noise, scope, &mut rng));
            }
            let y = sum / n as f64;
            ((y * n as f64).round() as u64, Some(y))
        };
        records.push(SettingRecord {
            a: setting.gate_a().label(),
            b: setting.gate_b().label(),
            n_shots: n,
            n_excited,
            y_exact,
            timestamp: None,
        });
    }
    let mut dataset = TomographyDataset::new(gate.label(), records);
    dataset.provenance = Some(serde_json::to_value(SimulationProvenance {
        noise: *noise,
        scope,
        readout: *readout,
        plan: plan.clone(),
    })?);
    Ok(dataset)
}

/// Exact shot-averaged channel of a noisy rotation about x or y.
///
/// Averaging the Bloch rotation over the symmetric angle distribution
/// replaces cos/sin of the angle by their expectations, which factor as
/// `E[trig(theta(1+delta))] = E[cos(theta delta)] * trig(theta)`. The
/// attenuation factor is `exp(-(theta sigma)^2/2)` for Gaussian noise and
/// `sinc(theta w)` for the top hat; the result is the ideal rotation with
/// its transverse plane uniformly shrunk by that factor.
pub fn analytic_averaged_ptm(
    gate: &UnitaryGate,
    noise: &NoiseModel,
) -> Result<PauliTransferMatrix> {
    noise.validate()?;
    let axis = gate.axis();
    let on_x = (axis.x.abs() - 1.0).abs() < 1e-12;
    let on_y = (axis.y.abs() - 1.0).abs() < 1e-12;
    if !on_x && !on_y {
        return Err(Error::UnsupportedAxis);
    }
    let theta = gate.angle();
    let sinc = |x: f64| if x == 0.0 { 1.0 } else { x.sin() / x };
    let (cos_avg, sin_avg) = match *noise {
        NoiseModel::None => (theta.cos(), theta.sin()),
        NoiseModel::Coherent { epsilon } => {
            let t = theta * (1.0 + epsilon);
            (t.cos(), t.sin())
        }
        NoiseModel::Gaussian { sigma } => {
            let c = (-(theta * sigma).powi(2) / 2.0).exp();
            (c * theta.cos(), c * theta.sin())
        }
        NoiseModel::TopHat { half_width } => {
            let c = sinc(theta * half_width);
            (c * theta.cos(), c * theta.sin())
        }
    };
    let k = cross_matrix(&axis);
    let block = Matrix3::identity() + k * sin_avg + k * k * (1.0 - cos_avg);
    Ok(PauliTransferMatrix::from_bloch_block(&block))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tomography::{predict_outcome, reconstruct, standard_settings, ReconstructionConfig};
    use approx::assert_abs_diff_eq;
    use nalgebra::Vector3;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn gate_application_matches_hand_calculations() {
        let flipped = QubitState::ground().apply_gate(&UnitaryGate::rx(PI));
        // Rx(pi)|0> = -i|1>.
        assert_abs_diff_eq!(flipped.amplitudes()[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            (flipped.amplitudes()[1] - Complex64::new(0.0, -1.0)).norm(),
            0.0,
            epsilon = 1e-15
        );

        let half = QubitState::ground().apply_gate(&UnitaryGate::rx(FRAC_PI_2));
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(
            (half.amplitudes()[0] - Complex64::new(inv_sqrt2, 0.0)).norm(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            (half.amplitudes()[1] - Complex64::new(0.0, -inv_sqrt2)).norm(),
            0.0,
            epsilon = 1e-15
        );

        let idle = QubitState::ground().apply_gate(&UnitaryGate::identity());
        assert_abs_diff_eq!(idle.excited_probability(), 0.0, epsilon = 0.0);
    }

    #[test]
    fn norm_survives_long_gate_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut state = QubitState::ground();
        for _ in 0..200 {
            let axis = Vector3::new(
                rng.gen_range(-1.0..1.0f64),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let axis = if axis.norm() < 1e-3 { Vector3::z() } else { axis };
            let gate = UnitaryGate::about_axis(axis, rng.gen_range(-7.0..7.0)).unwrap();
            state = state.apply_gate(&gate);
        }
        assert_abs_diff_eq!(state.amplitudes().norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn angle_sampling_follows_each_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(sample_rotation_angle(PI, &NoiseModel::None, &mut rng), PI);
        for _ in 0..5 {
            assert_abs_diff_eq!(
                sample_rotation_angle(PI, &NoiseModel::Coherent { epsilon: -0.1 }, &mut rng),
                0.9 * PI,
                epsilon = 1e-15
            );
        }

        let n = 1_000_000;
        let sigma = 0.05;
        let draws: Vec<f64> = (0..n)
            .map(|_| sample_rotation_angle(PI, &NoiseModel::Gaussian { sigma }, &mut rng))
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let expected_std = sigma * PI;
        let mean_tolerance = 3.0 * expected_std / (n as f64).sqrt();
        assert_abs_diff_eq!(mean, PI, epsilon = mean_tolerance);
        assert_abs_diff_eq!(var.sqrt(), expected_std, epsilon = 0.01 * expected_std);

        let w = 0.08;
        let draws: Vec<f64> = (0..n)
            .map(|_| sample_rotation_angle(PI, &NoiseModel::TopHat { half_width: w }, &mut rng))
            .collect();
        assert!(draws.iter().all(|d| (d - PI).abs() <= w * PI));
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let expected_var = (w * PI).powi(2) / 3.0;
        assert_abs_diff_eq!(mean, PI, epsilon = 3.0 * (w * PI) / (n as f64).sqrt());
        assert_abs_diff_eq!(var, expected_var, epsilon = 0.02 * expected_var);
    }

    #[test]
    fn shot_probability_agrees_with_the_transfer_matrix_route() {
        // Independent implementations: state-vector evolution vs composed
        // transfer matrices.
        let gate = UnitaryGate::rx(PI);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for setting in standard_settings() {
            let p = shot_probability(
                &gate,
                &setting,
                &NoiseModel::None,
                NoiseScope::GateOnly,
                &mut rng,
            );
            let y = predict_outcome(&setting, &gate.ptm());
            assert_abs_diff_eq!(p, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn perfect_pi_pulse_always_reads_excited() {
        let gate = UnitaryGate::rx(PI);
        let setting = MeasurementSetting::new(UnitaryGate::identity(), UnitaryGate::identity());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            assert!(simulate_shot(
                &gate,
                &setting,
                &NoiseModel::None,
                NoiseScope::GateOnly,
                &ReadoutModel::perfect(),
                &mut rng
            ));
        }
    }

    #[test]
    fn readout_confusion_shifts_the_exact_probability() {
        let gate = UnitaryGate::rx(PI);
        let readout = ReadoutModel { p_dark: 0.0, p_bright: 0.02 };
        let plan = ShotPlan { n_shots: 100, seed: 0, shot_noise: false };
        let ds = run_experiment(
            &gate,
            &standard_settings(),
            &NoiseModel::None,
            NoiseScope::GateOnly,
            &readout,
            &plan,
        )
        .unwrap();
        // Setting (I, I): true excitation 1, read as excited 98% of the time.
        assert_abs_diff_eq!(ds.settings[0].y_exact.unwrap(), 0.98, epsilon = 1e-15);
    }

    #[test]
    fn exact_mode_without_noise_reproduces_predictions() {
        for gate in [UnitaryGate::identity(), UnitaryGate::rx(PI), UnitaryGate::ry(FRAC_PI_2)] {
            let plan = ShotPlan { n_shots: 1000, seed: 9, shot_noise: false };
            let ds = run_experiment(
                &gate,
                &standard_settings(),
                &NoiseModel::None,
                NoiseScope::GateOnly,
                &ReadoutModel::perfect(),
                &plan,
            )
            .unwrap();
            assert!(ds.validate().is_ok());
            assert_eq!(ds.gate_label, gate.label());
            for (rec, setting) in ds.settings.iter().zip(standard_settings()) {
                let y = predict_outcome(&setting, &gate.ptm());
                assert_abs_diff_eq!(rec.y_exact.unwrap(), y, epsilon = 1e-12);
                assert_eq!(rec.n_excited, (y * 1000.0).round() as u64);
            }
        }
    }

    #[test]
    fn datasets_are_reproducible_and_seed_sensitive() {
        let gate = UnitaryGate::rx(PI);
        let noise = NoiseModel::Gaussian { sigma: 0.05 };
        let plan = ShotPlan { n_shots: 200, seed: 42, shot_noise: true };
        let make = |plan: &ShotPlan| {
            run_experiment(
                &gate,
                &standard_settings(),
                &noise,
                NoiseScope::GateOnly,
                &ReadoutModel::perfect(),
                plan,
            )
            .unwrap()
        };
        let a = make(&plan);
        let b = make(&plan);
        assert_eq!(a, b);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let c = make(&ShotPlan { seed: 43, ..plan });
        assert_ne!(a, c);
    }

    #[test]
    fn sampled_counts_track_exact_probabilities() {
        let gate = UnitaryGate::rx(PI);
        let noise = NoiseModel::Gaussian { sigma: 0.05 };
        let n = 20_000u64;
        let sampled = run_experiment(
            &gate,
            &standard_settings(),
            &noise,
            NoiseScope::GateOnly,
            &ReadoutModel::perfect(),
            &ShotPlan { n_shots: n, seed: 1, shot_noise: true },
        )
        .unwrap();
        let exact = run_experiment(
            &gate,
            &standard_settings(),
            &noise,
            NoiseScope::GateOnly,
            &ReadoutModel::perfect(),
            &ShotPlan { n_shots: n, seed: 1, shot_noise: false },
        )
        .unwrap();
        for (s, e) in sampled.settings.iter().zip(&exact.settings) {
            let freq = s.n_excited as f64 / n as f64;
            let y = e.y_exact.unwrap();
            // 5 sigma of binomial + angle-sampling fluctuation.
            let tol = 5.0 * ((y * (1.0 - y) + 1e-3) / n as f64).sqrt();
            assert_abs_diff_eq!(freq, y, epsilon = tol);
        }
    }

    #[test]
    fn provenance_records_the_simulation_inputs() {
        let noise = NoiseModel::Coherent { epsilon: 0.1 };
        let plan = ShotPlan { n_shots: 50, seed: 3, shot_noise: true };
        let ds = run_experiment(
            &UnitaryGate::rx(PI),
            &standard_settings(),
            &noise,
            NoiseScope::AllGates,
            &ReadoutModel::perfect(),
            &plan,
        )
        .unwrap();
        let prov: SimulationProvenance =
            serde_json::from_value(ds.provenance.clone().unwrap()).unwrap();
        assert_eq!(prov.noise, noise);
        assert_eq!(prov.scope, NoiseScope::AllGates);
        assert_eq!(prov.plan, plan);
    }

    #[test]
    fn noise_scope_routes_the_error_to_the_right_gates() {
        let gate = UnitaryGate::rx(PI);
        let setting =
            MeasurementSetting::new(UnitaryGate::rx(FRAC_PI_2), UnitaryGate::identity());
        let noise = NoiseModel::Coherent { epsilon: 0.1 };
        let mut rng = ChaCha8Rng::seed_from_u64(0);

        let p_gate_only =
            shot_probability(&gate, &setting, &noise, NoiseScope::GateOnly, &mut rng);
        let expected = {
            let s = QubitState::ground()
                .apply_gate(&UnitaryGate::rx(FRAC_PI_2))
                .apply_gate(&UnitaryGate::rx(1.1 * PI));
            s.excited_probability()
        };
        assert_abs_diff_eq!(p_gate_only, expected, epsilon = 1e-12);

        let p_settings_only =
            shot_probability(&gate, &setting, &noise, NoiseScope::SettingsOnly, &mut rng);
        let expected = {
            let s = QubitState::ground()
                .apply_gate(&UnitaryGate::rx(1.1 * FRAC_PI_2))
                .apply_gate(&UnitaryGate::rx(PI));
            s.excited_probability()
        };
        assert_abs_diff_eq!(p_settings_only, expected, epsilon = 1e-12);

        let p_all = shot_probability(&gate, &setting, &noise, NoiseScope::AllGates, &mut rng);
        let expected = {
            let s = QubitState::ground()
                .apply_gate(&UnitaryGate::rx(1.1 * FRAC_PI_2))
                .apply_gate(&UnitaryGate::rx(1.1 * PI));
            s.excited_probability()
        };
        assert_abs_diff_eq!(p_all, expected, epsilon = 1e-12);
    }

    #[test]
    fn noise_model_serialization_is_tagged_and_snake_cased() {
        let json = serde_json::to_string(&NoiseModel::Gaussian { sigma: 0.05 }).unwrap();
        assert_eq!(json, "{\"type\":\"gaussian\",\"sigma\":0.05}");
        let back: NoiseModel =
            serde_json::from_str("{\"type\":\"top_hat\",\"half_width\":0.1}").unwrap();
        assert_eq!(back, NoiseModel::TopHat { half_width: 0.1 });
        let none: NoiseModel = serde_json::from_str("{\"type\":\"none\"}").unwrap();
        assert_eq!(none, NoiseModel::None);
    }

    #[test]
    fn invalid_configurations_are_rejected() {
        assert!(NoiseModel::Coherent { epsilon: 0.3 }.validate().is_err());
        assert!(NoiseModel::Gaussian { sigma: -0.1 }.validate().is_err());
        assert!(ReadoutModel { p_dark: 0.5, p_bright: 0.0 }.validate().is_err());
        assert!(ShotPlan { n_shots: 0, seed: 0, shot_noise: true }.validate().is_err());
        let err = run_experiment(
            &UnitaryGate::rx(PI),
            &standard_settings(),
            &NoiseModel::Coherent { epsilon: 0.5 },
            NoiseScope::GateOnly,
            &ReadoutModel::perfect(),
            &ShotPlan::default(),
        );
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn analytic_channel_matches_frozen_values() {
        let gate = UnitaryGate::rx(PI);
        let ideal = analytic_averaged_ptm(&gate, &NoiseModel::None).unwrap();
        assert_abs_diff_eq!(ideal.frobenius_distance(&gate.ptm()), 0.0, epsilon = 1e-14);

        let gauss =
            analytic_averaged_ptm(&gate, &NoiseModel::Gaussian { sigma: 0.05 }).unwrap();
        let c = (-(0.05 * PI) * (0.05 * PI) / 2.0_f64).exp();
        assert_abs_diff_eq!(c, 0.98774, epsilon = 1e-5);
        let expected = Matrix3::from_diagonal(&Vector3::new(1.0, -c, -c));
        assert_abs_diff_eq!(
            (gauss.bloch_block() - expected).norm(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(gauss.translation().norm(), 0.0, epsilon = 1e-15);

        let top = analytic_averaged_ptm(&gate, &NoiseModel::TopHat { half_width: 0.05 })
            .unwrap();
        let c_top = (0.05 * PI).sin() / (0.05 * PI);
        assert_abs_diff_eq!(c_top, 0.99589, epsilon = 1e-5);
        assert_abs_diff_eq!(top.bloch_block()[(1, 1)], -c_top, epsilon = 1e-12);

        let coherent =
            analytic_averaged_ptm(&gate, &NoiseModel::Coherent { epsilon: -0.1 }).unwrap();
        assert_abs_diff_eq!(
            coherent.frobenius_distance(&UnitaryGate::rx(0.9 * PI).ptm()),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn analytic_channel_rejects_unsupported_axes() {
        assert!(matches!(
            analytic_averaged_ptm(&UnitaryGate::rz(PI), &NoiseModel::Gaussian { sigma: 0.05 }),
            Err(Error::UnsupportedAxis)
        ));
        assert!(analytic_averaged_ptm(
            &UnitaryGate::ry(1.3),
            &NoiseModel::Gaussian { sigma: 0.05 }
        )
        .is_ok());
    }

    /// Quadrature oracle: average the Bloch rotation over the angle
    /// distribution by Simpson integration, independently of the
    /// closed-form attenuation factors.
    fn quadrature_averaged_block(
        gate: &UnitaryGate,
        density: impl Fn(f64) -> f64,
        lo: f64,
        hi: f64,
        n: usize,
    ) -> Matrix3<f64> {
        let h = (hi - lo) / n as f64;
        let mut acc = Matrix3::zeros();
        let mut weight_acc = 0.0;
        for j in 0..=n {
            let delta = lo + j as f64 * h;
            let w = if j == 0 || j == n {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let w = w * density(delta);
            acc += gate.scaled(1.0 + delta).bloch_rotation() * w;
            weight_acc += w;
        }
        acc / weight_acc
    }

    #[test]
    fn analytic_channel_matches_numerical_quadrature() {
        for gate in [UnitaryGate::rx(PI), UnitaryGate::ry(0.7 * PI), UnitaryGate::rx(1.3)] {
            let sigma = 0.07;
            let analytic =
                analytic_averaged_ptm(&gate, &NoiseModel::Gaussian { sigma }).unwrap();
            let numeric = quadrature_averaged_block(
                &gate,
                |d| (-d * d / (2.0 * sigma * sigma)).exp(),
                -8.0 * sigma,
                8.0 * sigma,
                4000,
            );
            assert_abs_diff_eq!(
                (analytic.bloch_block() - numeric).norm(),
                0.0,
                epsilon = 1e-9
            );

            let w = 0.09;
            let analytic =
                analytic_averaged_ptm(&gate, &NoiseModel::TopHat { half_width: w }).unwrap();
            let numeric = quadrature_averaged_block(&gate, |_| 1.0, -w, w, 4000);
            assert_abs_diff_eq!(
                (analytic.bloch_block() - numeric).norm(),
                0.0,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn variance_matched_models_are_nearly_indistinguishable() {
        let gate = UnitaryGate::rx(PI);
        for sigma in [0.02, 0.04, 0.06] {
            let gauss =
                analytic_averaged_ptm(&gate, &NoiseModel::Gaussian { sigma }).unwrap();
            let top = analytic_averaged_ptm(
                &gate,
                &NoiseModel::variance_matched_top_hat(sigma),
            )
            .unwrap();
            let dist = gauss.frobenius_distance(&top);
            assert!(dist < 5e-4, "sigma {sigma}: channels differ by {dist:.2e}");
        }
    }

    #[test]
    fn reconstructed_noisy_channel_converges_to_the_analytic_average() {
        let gate = UnitaryGate::rx(PI);
        let noise = NoiseModel::Gaussian { sigma: 0.05 };
        let plan = ShotPlan { n_shots: 1_000_000, seed: 17, shot_noise: false };
        let ds = run_experiment(
            &gate,
            &standard_settings(),
            &noise,
            NoiseScope::GateOnly,
            &ReadoutModel::perfect(),
            &plan,
        )
        .unwrap();
        let result = reconstruct(&ds, &ReconstructionConfig::default()).unwrap();
        assert!(result.converged);
        let analytic = analytic_averaged_ptm(&gate, &noise).unwrap();
        let dist = result.t_hat.frobenius_distance(&analytic);
        assert!(dist < 2e-3, "reconstruction off the averaged channel by {dist:.2e}");
    }
}
