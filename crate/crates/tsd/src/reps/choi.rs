//! The Choi-matrix picture and complete-positivity checks.

use crate::reps::{pauli, PauliTransferMatrix};
use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::sync::OnceLock;

/// Choi matrix `rho_Phi = sum_ij Phi(|i><j|) (x) |i><j|` with the channel
/// output on the first tensor factor and total trace 2.
///
/// The map is completely positive exactly when this matrix is positive
/// semidefinite, and trace preserving exactly when the partial trace over the
/// first factor is the 2x2 identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChoiMatrix {
    m: Matrix4<Complex64>,
}

/// The sixteen matrices `sigma_a (x) sigma_b^T`, indexed `4 a + b`. They are
/// Hermitian and mutually orthogonal with norm 2, so the expansion
/// `rho = sum T_ab (sigma_a (x) sigma_b^T) / 2` inverts entry by entry.
fn choi_basis() -> &'static [Matrix4<Complex64>; 16] {
    static BASIS: OnceLock<[Matrix4<Complex64>; 16]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut out = [Matrix4::zeros(); 16];
        for a in 0..4 {
            for b in 0..4 {
                out[4 * a + b] = pauli(a).kronecker(&pauli(b).transpose());
            }
        }
        out
    })
}

impl ChoiMatrix {
    pub fn from_matrix(m: Matrix4<Complex64>) -> Self {
        ChoiMatrix { m }
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.m
    }

    /// `rho = sum_ab T_ab (sigma_a (x) sigma_b^T) / 2`.
    pub fn from_ptm(t: &PauliTransferMatrix) -> Self {
        let basis = choi_basis();
        let mut m = Matrix4::zeros();
        for a in 0..4 {
            for b in 0..4 {
                m += basis[4 * a + b] * Complex64::new(0.5 * t.matrix()[(a, b)], 0.0);
            }
        }
        ChoiMatrix { m }
    }

    /// `T_ab = Re Tr[rho (sigma_a (x) sigma_b^T)] / 2`. The imaginary parts
    /// vanish for Hermitian input and are discarded otherwise.
    pub fn ptm(&self) -> PauliTransferMatrix {
        let basis = choi_basis();
        let mut t = Matrix4::zeros();
        for a in 0..4 {
            for b in 0..4 {
                t[(a, b)] = 0.5 * (self.m * basis[4 * a + b]).trace().re;
            }
        }
        PauliTransferMatrix::from_matrix(t)
    }

    /// Channel action on a 2x2 input, `Phi(rho) = Tr_2[rho_Phi (1 (x) rho^T)]`.
    pub fn apply(&self, rho_in: &Matrix2<Complex64>) -> Matrix2<Complex64> {
        let lifted = Matrix2::<Complex64>::identity().kronecker(&rho_in.transpose());
        let product = self.m * lifted;
        let mut out = Matrix2::zeros();
        for i in 0..2 {
            for k in 0..2 {
                out[(i, k)] = product[(2 * i, 2 * k)] + product[(2 * i + 1, 2 * k + 1)];
            }
        }
        out
    }

    /// Partial trace over the output (first) factor; equals the identity for
    /// a trace-preserving map.
    pub fn input_marginal(&self) -> Matrix2<Complex64> {
        let mut out = Matrix2::zeros();
        for j in 0..2 {
            for l in 0..2 {
                out[(j, l)] = self.m[(j, l)] + self.m[(2 + j, 2 + l)];
            }
        }
        out
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (self.m - self.m.adjoint()).norm()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (self.m + self.m.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Nearest positive semidefinite matrix in Frobenius norm: hermitize,
    /// then clip negative eigenvalues to zero.
    pub fn project_psd(&self) -> ChoiMatrix {
        let herm = (self.m + self.m.adjoint()) * Complex64::new(0.5, 0.0);
        let mut eig = herm.symmetric_eigen();
        for v in eig.eigenvalues.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        ChoiMatrix { m: eig.recompose() }
    }

    pub fn validate(&self, tolerance: f64) -> CptpDiagnostic {
        let tp = {
            let d = self.input_marginal() - Matrix2::identity();
            d.norm()
        };
        let herm = self.hermiticity_defect();
        let min_eig = self.min_eigenvalue();
        CptpDiagnostic {
            min_eigenvalue: min_eig,
            hermiticity_defect: herm,
            trace_preservation_defect: tp,
            tolerance,
            passed: min_eig >= -tolerance && herm <= tolerance && tp <= tolerance,
        }
    }
}

/// Outcome of a complete-positivity and trace-preservation check.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CptpDiagnostic {
    pub min_eigenvalue: f64,
    pub hermiticity_defect: f64,
    pub trace_preservation_defect: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Serialize, Deserialize)]
struct ChoiRecord {
    basis: String,
    matrix: [[[f64; 2]; 4]; 4],
}

impl Serialize for ChoiMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut matrix = [[[0.0; 2]; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                matrix[r][c] = [self.m[(r, c)].re, self.m[(r, c)].im];
            }
        }
        ChoiRecord { basis: "IXYZ".into(), matrix }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ChoiMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let record = ChoiRecord::deserialize(deserializer)?;
        if record.basis != "IXYZ" {
            return Err(D::Error::custom(format!(
                "unsupported Choi basis {:?}; expected \"IXYZ\"",
                record.basis
            )));
        }
        let mut m = Matrix4::zeros();
        for r in 0..4 {
            for c in 0..4 {
                m[(r, c)] = Complex64::new(record.matrix[r][c][0], record.matrix[r][c][1]);
            }
        }
        Ok(ChoiMatrix { m })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reps::{PauliVector, UnitaryGate};
    use approx::assert_abs_diff_eq;
    use nalgebra::{Matrix4, Vector4};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    /// Independent route: evaluate the defining sum over basis kets for a
    /// channel given as an explicit map on 2x2 matrices.
    fn choi_via_definition(
        channel: impl Fn(&Matrix2<Complex64>) -> Matrix2<Complex64>,
    ) -> Matrix4<Complex64> {
        let mut rho = Matrix4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                let mut ket_bra = Matrix2::zeros();
                ket_bra[(i, j)] = Complex64::new(1.0, 0.0);
                rho += channel(&ket_bra).kronecker(&ket_bra);
            }
        }
        rho
    }

    fn depolarizing_ptm(lambda: f64) -> PauliTransferMatrix {
        PauliTransferMatrix::from_matrix(Matrix4::from_diagonal(&Vector4::new(
            1.0, lambda, lambda, lambda,
        )))
    }

    /// Kraus form of the depolarizing channel with Bloch contraction lambda.
    fn depolarize_via_kraus(lambda: f64, rho: &Matrix2<Complex64>) -> Matrix2<Complex64> {
        let q = 0.75 * (1.0 - lambda);
        let mut out = rho * Complex64::new(1.0 - q, 0.0);
        for k in 1..4 {
            out += pauli(k) * rho * pauli(k) * Complex64::new(q / 3.0, 0.0);
        }
        out
    }

    #[test]
    fn identity_channel_is_twice_the_maximally_entangled_projector() {
        let rho = ChoiMatrix::from_ptm(&PauliTransferMatrix::identity());
        let direct = choi_via_definition(|e| *e);
        assert_abs_diff_eq!((rho.matrix() - direct).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.matrix().trace().re, 2.0, epsilon = 1e-14);
        // Rank one with eigenvalue 2.
        let eig = rho.matrix().symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert_abs_diff_eq!(vals[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn unitary_choi_matches_definition() {
        for gate in [
            UnitaryGate::rx(PI),
            UnitaryGate::rx(FRAC_PI_2),
            UnitaryGate::ry(FRAC_PI_2),
            UnitaryGate::rz(0.4),
        ] {
            let u = gate.matrix();
            let direct = choi_via_definition(|e| u * e * u.adjoint());
            let converted = ChoiMatrix::from_ptm(&gate.ptm());
            assert_abs_diff_eq!((converted.matrix() - direct).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn pi_x_rotation_choi_is_supported_on_the_flipped_bell_state() {
        let rho = ChoiMatrix::from_ptm(&UnitaryGate::rx(PI).ptm());
        // 2 |psi><psi| with psi = (|01> + |10>) / sqrt(2).
        let mut expected = Matrix4::<Complex64>::zeros();
        for r in 1..3 {
            for c in 1..3 {
                expected[(r, c)] = Complex64::new(1.0, 0.0);
            }
        }
        assert_abs_diff_eq!((rho.matrix() - expected).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn depolarizing_choi_spectrum() {
        let rho = ChoiMatrix::from_ptm(&depolarizing_ptm(0.5));
        let mut vals: Vec<f64> = rho.matrix().symmetric_eigen().eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for v in &vals[..3] {
            assert_abs_diff_eq!(*v, 0.25, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(vals[3], 1.25, epsilon = 1e-12);
    }

    #[test]
    fn apply_matches_kraus_oracle_and_ptm_route() {
        for lambda in [0.0, 0.5] {
            let t = depolarizing_ptm(lambda);
            let rho = ChoiMatrix::from_ptm(&t);
            let input = PauliVector::ket_zero();
            let out = rho.apply(&input.density());
            let expected = depolarize_via_kraus(lambda, &input.density());
            assert_abs_diff_eq!((out - expected).norm(), 0.0, epsilon = 1e-14);
            // Same answer as the real-matrix route.
            let via_ptm = t.apply(&input);
            let via_choi = PauliVector::from_density(&out);
            assert_abs_diff_eq!((via_ptm.0 - via_choi.0).norm(), 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(via_choi.0[3], 0.5 * lambda, epsilon = 1e-14);
            assert_abs_diff_eq!(via_choi.0[0], 0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn validation_flags_a_stretched_bloch_axis() {
        let t = PauliTransferMatrix::from_matrix(Matrix4::from_diagonal(&Vector4::new(
            1.0, 1.2, 1.0, 1.0,
        )));
        let diag = ChoiMatrix::from_ptm(&t).validate(1e-9);
        assert!(!diag.passed);
        assert!(diag.min_eigenvalue < -0.09);
        assert!(diag.hermiticity_defect < 1e-14);
        assert!(diag.trace_preservation_defect < 1e-14);
    }

    #[test]
    fn validation_accepts_unitaries_and_depolarizing() {
        for t in [
            PauliTransferMatrix::identity(),
            UnitaryGate::ry(1.0).ptm(),
            depolarizing_ptm(0.3),
        ] {
            let diag = ChoiMatrix::from_ptm(&t).validate(1e-9);
            assert!(diag.passed, "{diag:?}");
        }
    }

    #[test]
    fn non_trace_preserving_input_is_reported() {
        let mut m = *UnitaryGate::rx(1.0).ptm().matrix();
        m[(0, 2)] = 0.05;
        let diag = ChoiMatrix::from_ptm(&PauliTransferMatrix::from_matrix(m)).validate(1e-9);
        assert!(!diag.passed);
        assert!(diag.trace_preservation_defect > 0.01);
    }

    #[test]
    fn psd_projection_clips_exactly_the_negative_part() {
        let t = PauliTransferMatrix::from_matrix(Matrix4::from_diagonal(&Vector4::new(
            1.0, 1.2, 1.0, 1.0,
        )));
        let rho = ChoiMatrix::from_ptm(&t);
        let projected = rho.project_psd();
        assert!(projected.min_eigenvalue() > -1e-14);
        // Projection onto a convex set: the result is no farther from any
        // feasible point than the original.
        let feasible = ChoiMatrix::from_ptm(&PauliTransferMatrix::identity());
        let before = (rho.matrix() - feasible.matrix()).norm();
        let after = (projected.matrix() - feasible.matrix()).norm();
        assert!(after <= before + 1e-14);
    }

    #[test]
    fn choi_serialization_round_trip() {
        let rho = ChoiMatrix::from_ptm(&UnitaryGate::ry(0.8).ptm());
        let json = serde_json::to_string(&rho).unwrap();
        assert!(json.contains("\"basis\":\"IXYZ\""));
        let back: ChoiMatrix = serde_json::from_str(&json).unwrap();
        assert_abs_diff_eq!((back.matrix() - rho.matrix()).norm(), 0.0, epsilon = 0.0);
    }

    proptest! {
        /// The two conversions are mutual inverses on arbitrary real input,
        /// not just on physical transfer matrices.
        #[test]
        fn conversion_round_trip(entries in proptest::collection::vec(-2.0f64..2.0, 16)) {
            let t = PauliTransferMatrix::from_matrix(Matrix4::from_iterator(entries));
            let back = ChoiMatrix::from_ptm(&t).ptm();
            prop_assert!((back.matrix() - t.matrix()).norm() < 1e-12);
        }

        /// Trace-preserving input stays exactly trace preserving through the
        /// Choi picture, and the Choi trace is 2.
        #[test]
        fn trace_preservation_is_structural(entries in proptest::collection::vec(-2.0f64..2.0, 12)) {
            let mut m = Matrix4::zeros();
            m[(0, 0)] = 1.0;
            for (k, v) in entries.iter().enumerate() {
                m[(1 + k / 4, k % 4)] = *v;
            }
            let rho = ChoiMatrix::from_ptm(&PauliTransferMatrix::from_matrix(m));
            prop_assert!((rho.input_marginal() - Matrix2::identity()).norm() < 1e-13);
            prop_assert!((rho.matrix().trace().re - 2.0).abs() < 1e-13);
            prop_assert!(rho.hermiticity_defect() < 1e-13);
        }

        /// Choi-route application agrees with the transfer-matrix route for
        /// random mixtures of rotations (always a physical channel).
        #[test]
        fn application_routes_agree(
            w in 0.0f64..1.0,
            a1 in -3.0f64..3.0,
            a2 in -3.0f64..3.0,
            px in -0.4f64..0.4,
            pz in -0.4f64..0.4,
        ) {
            let t1 = UnitaryGate::rx(a1).ptm();
            let t2 = UnitaryGate::ry(a2).ptm();
            let mixed = PauliTransferMatrix::from_matrix(t1.matrix() * w + t2.matrix() * (1.0 - w));
            let state = PauliVector(Vector4::new(0.5, px, 0.0, pz));
            let via_ptm = mixed.apply(&state);
            let via_choi = PauliVector::from_density(
                &ChoiMatrix::from_ptm(&mixed).apply(&state.density()),
            );
            prop_assert!((via_ptm.0 - via_choi.0).norm() < 1e-12);
        }
    }
}
