//! Shot-to-shot angle fluctuations leave no coherent trace: they surface as
//! non-Markovian error, growing with the fluctuation strength, and a
//! Gaussian spectrum is indistinguishable from a variance-matched top hat.

use tsd::pipeline::{run_reconstruct, run_simulate, ExperimentConfig};
use tsd::reps::UnitaryGate;
use tsd::simulator::{analytic_averaged_ptm, NoiseModel, ShotPlan};
use std::f64::consts::PI;

fn budget_for(noise: NoiseModel) -> tsd::decomposition::ErrorBudget {
    let mut config = ExperimentConfig::new("Rx(pi)");
    config.noise = noise;
    config.plan = ShotPlan { n_shots: 100_000, seed: 5, shot_noise: false };
    let output = run_simulate(&config).unwrap();
    run_reconstruct(&output.dataset, None, None, &config.solver).unwrap().budget
}

fn main() {
    println!("sigma   eps2_nonmark   analytic 2(1-c)^2   eps2_coherent");
    for sigma in [0.0, 0.02, 0.04, 0.06] {
        let budget = budget_for(NoiseModel::Gaussian { sigma });
        let c = (-(sigma * PI).powi(2) / 2.0).exp();
        println!(
            "  {sigma:.2}    {:.6e}   {:.6e}       {:.2e}",
            budget.nonmarkovian,
            2.0 * (1.0 - c) * (1.0 - c),
            budget.coherent
        );
    }

    // Same variance, different shape: the averaged channels and the error
    // budgets agree to within a few parts in ten thousand.
    let sigma = 0.05;
    let gauss = NoiseModel::Gaussian { sigma };
    let top = NoiseModel::variance_matched_top_hat(sigma);
    let gate = UnitaryGate::rx(PI);
    println!(
        "\nsigma = {sigma}: averaged channels differ by {:.2e} (Frobenius)",
        analytic_averaged_ptm(&gate, &gauss)
            .unwrap()
            .frobenius_distance(&analytic_averaged_ptm(&gate, &top).unwrap())
    );
    let (bg, bt) = (budget_for(gauss), budget_for(top));
    println!("gaussian reconstruction: eps2_nonmark {:.6e}", bg.nonmarkovian);
    println!("top-hat  reconstruction: eps2_nonmark {:.6e}", bt.nonmarkovian);
    println!(
        "relative difference: {:.2}%",
        100.0 * (bg.nonmarkovian - bt.nonmarkovian).abs() / bg.nonmarkovian
    );
}
