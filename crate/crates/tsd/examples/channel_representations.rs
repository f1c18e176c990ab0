//! Tour of the two channel pictures: transfer matrices for composition and
//! real arithmetic, Choi matrices for physicality questions.

use nalgebra::{Matrix3, Vector3};
use tsd::reps::{
    average_gate_fidelity, entanglement_fidelity, ChoiMatrix, PauliTransferMatrix, UnitaryGate,
};
use std::f64::consts::{FRAC_PI_2, PI};

fn main() {
    let half = UnitaryGate::rx(FRAC_PI_2);
    println!("transfer matrix of {}:", half.label());
    print_matrix(&half.ptm());

    // Two quarter turns compose into the half turn, in either picture.
    let composed = half.ptm().compose(&half.ptm());
    let full = UnitaryGate::rx(PI).ptm();
    println!(
        "Rx(pi/2) . Rx(pi/2) vs Rx(pi): Frobenius distance {:.2e}\n",
        composed.frobenius_distance(&full)
    );

    // A depolarizing channel shrinks the whole Bloch ball; its process
    // state stays positive until the shrink factor leaves [-1/3, 1].
    for lambda in [0.9, 0.2, -1.0 / 3.0] {
        let t = PauliTransferMatrix::from_bloch_block(&Matrix3::from_diagonal(
            &Vector3::new(lambda, lambda, lambda),
        ));
        let rho = ChoiMatrix::from_ptm(&t);
        let f_e = entanglement_fidelity(&UnitaryGate::identity().ptm(), &t);
        println!(
            "depolarizing lambda = {lambda:5.2}: min Choi eigenvalue {:8.4}, F_e to identity {:.4}, F_av {:.4}",
            rho.min_eigenvalue(),
            f_e,
            average_gate_fidelity(f_e).unwrap(),
        );
    }

    // An unphysical shrink factor fails validation; the positive projection
    // is the nearest physical process state.
    let bad = PauliTransferMatrix::from_bloch_block(&Matrix3::from_diagonal(
        &Vector3::new(-0.5, -0.5, -0.5),
    ));
    let rho = ChoiMatrix::from_ptm(&bad);
    let diagnostic = rho.validate(1e-9);
    println!(
        "\nlambda = -0.50 CPTP check passed: {} (min eigenvalue {:.4})",
        diagnostic.passed, diagnostic.min_eigenvalue
    );
    let projected = rho.project_psd();
    println!(
        "after projection: min eigenvalue {:.2e}, distance to original {:.4}",
        projected.min_eigenvalue(),
        // Frobenius distance between the process states, via their
        // transfer pictures.
        projected.ptm().frobenius_distance(&bad)
    );
}

fn print_matrix(t: &PauliTransferMatrix) {
    for r in 0..4 {
        let row: Vec<String> =
            (0..4).map(|c| format!("{:6.3}", t.matrix()[(r, c)])).collect();
        println!("  [{}]", row.join(" "));
    }
    println!();
}
