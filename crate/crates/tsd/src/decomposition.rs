//! Splitting a channel's deviation from a target rotation into Markovian,
//! coherent, and non-Markovian squared magnitudes.
//!
//! The split works on the 4x4 transfer matrices. First-row and first-column
//! deviations (trace and unitality defects) form the Markovian part. The 3x3
//! Bloch blocks are compared through the relative transform `M = R_ideal^T
//! R_expt`; its polar factors `M = P R` separate a residual rotation `R`
//! (coherent, `||1 - R||_F^2`) from a symmetric stretch `P` (non-Markovian,
//! `||1 - P||_F^2`). The three parts add up to the total squared deviation
//! only to leading order, so the shortfall is stored as a residual instead of
//! being assumed away.

use crate::error::{Error, Result};
use crate::reps::PauliTransferMatrix;
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

/// Squared error magnitudes, their additivity shortfall, and the
/// infidelity they imply.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub total: f64,
    pub markovian: f64,
    pub coherent: f64,
    pub nonmarkovian: f64,
    /// Signed shortfall `total - (markovian + coherent + nonmarkovian)`;
    /// cubic in the error size.
    pub additivity_residual: f64,
    /// `total / 12`, the average-gate infidelity implied by the total
    /// squared error in the perturbative regime.
    pub infidelity_r: f64,
    /// Residual rotation angle projected on the x, y, z axes; absent when
    /// the relative transform contains a reflection.
    pub delta_theta_xyz: Option<[f64; 3]>,
    /// Sign of the determinant of the orthogonal polar factor; -1 marks a
    /// reflection in the data (never silently absorbed).
    pub det_flag: i8,
}

/// Polar factors of the relative transform `M = P R`.
#[derive(Debug, Clone, Copy)]
pub struct PolarFactors {
    /// Orthogonal factor, the nearest rotation (or reflection) to `M`.
    pub rotation: Matrix3<f64>,
    /// Symmetric positive-semidefinite factor `sqrt(M M^T)`.
    pub stretch: Matrix3<f64>,
    /// Sign of `det(rotation)`.
    pub det_sign: i8,
    /// Set when `M` is singular, in which case the orthogonal factor is
    /// valid but not unique.
    pub rank_deficient: bool,
}

/// A residual rotation in axis-angle form, `angle` in [0, pi].
#[derive(Debug, Clone, Copy)]
pub struct AxisAngle {
    pub angle: f64,
    pub axis: Vector3<f64>,
}

impl AxisAngle {
    /// Signed components `angle * axis`.
    pub fn components(&self) -> [f64; 3] {
        [
            self.angle * self.axis[0],
            self.angle * self.axis[1],
            self.angle * self.axis[2],
        ]
    }
}

/// Full output of [`decompose`]: the budget plus the factors it came from.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub budget: ErrorBudget,
    pub polar: PolarFactors,
    /// Axis-angle form of the coherent part; `None` for a reflection.
    pub axis_angle: Option<AxisAngle>,
}

/// Squared deviation carried by the first row and first column: the trace
/// and unitality defects, which vanish for any unitary pair.
pub fn markovian_error(ideal: &PauliTransferMatrix, actual: &PauliTransferMatrix) -> f64 {
    let d = actual.matrix() - ideal.matrix();
    let mut sum = d[(0, 0)] * d[(0, 0)];
    for j in 1..4 {
        sum += d[(0, j)] * d[(0, j)] + d[(j, 0)] * d[(j, 0)];
    }
    sum
}

/// Relative transform `M = R_ideal^T R_expt` of the Bloch blocks.
///
/// The ideal block must be orthogonal (defect below 1e-6); orthogonality
/// makes `||R_ideal - R_expt|| = ||1 - M||`, so all block deviation survives
/// the change of frame.
pub fn relative_transform(
    ideal: &PauliTransferMatrix,
    actual: &PauliTransferMatrix,
) -> Result<Matrix3<f64>> {
    let r = ideal.bloch_block();
    let defect = (r.transpose() * r - Matrix3::identity()).norm();
    if defect > 1e-6 {
        return Err(Error::NonUnitaryTarget { defect });
    }
    Ok(r.transpose() * actual.bloch_block())
}

/// Polar factors via SVD: `M = U S V^T` gives `R = U V^T` and
/// `P = U S U^T`, so `M = P R` with `R` the nearest orthogonal matrix.
pub fn polar_decompose(m: &Matrix3<f64>) -> PolarFactors {
    let svd = m.svd(true, true);
    let u = svd.u.expect("3x3 SVD always produces U");
    let v_t = svd.v_t.expect("3x3 SVD always produces V^T");
    let rotation = u * v_t;
    let stretch = u * Matrix3::from_diagonal(&svd.singular_values) * u.transpose();
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    PolarFactors {
        rotation,
        stretch,
        det_sign: if rotation.determinant() < 0.0 { -1 } else { 1 },
        rank_deficient: smin <= 1e-12 * smax.max(1.0),
    }
}

/// Squared coherent error `||1 - R||_F^2`, equal to `4 (1 - cos angle)` for
/// a rotation.
pub fn coherent_error(rotation: &Matrix3<f64>) -> f64 {
    (Matrix3::identity() - rotation).norm_squared()
}

/// Squared non-Markovian error `||1 - P||_F^2` of the symmetric factor.
pub fn nonmarkovian_error(stretch: &Matrix3<f64>) -> f64 {
    (Matrix3::identity() - stretch).norm_squared()
}

/// Average-gate infidelity implied by a total squared error, `eps^2 / 12`.
pub fn infidelity_from_error(total_squared_error: f64) -> f64 {
    total_squared_error / 12.0
}

/// Axis-angle form of a rotation matrix.
///
/// Angles below 1e-8 collapse to exactly zero (zero axis, no spurious
/// direction). Within 1e-6 of a half turn the axis comes from the symmetric
/// part `(R + R^T)/2 + ...`, which stays well conditioned where the
/// antisymmetric part vanishes; its sign is aligned with the antisymmetric
/// part when that is resolvable and otherwise fixed by making the largest
/// component positive. A reflection (`det R < 0`) is refused.
pub fn axis_angle(rotation: &Matrix3<f64>) -> Result<AxisAngle> {
    if rotation.determinant() < 0.0 {
        return Err(Error::Reflection);
    }
    let r = rotation;
    let cos = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    // Antisymmetric part: (R - R^T)/2 has entries sin(angle) * axis.
    let anti = Vector3::new(
        0.5 * (r[(2, 1)] - r[(1, 2)]),
        0.5 * (r[(0, 2)] - r[(2, 0)]),
        0.5 * (r[(1, 0)] - r[(0, 1)]),
    );
    // acos is ill conditioned at both ends of its range, so near the ends
    // the angle comes from the antisymmetric part instead, where asin is
    // well conditioned.
    let sin = anti.norm().min(1.0);
    let angle = if cos > 0.9 {
        sin.asin()
    } else if cos < -0.9 {
        std::f64::consts::PI - sin.asin()
    } else {
        cos.acos()
    };
    if angle < 1e-8 {
        return Ok(AxisAngle { angle: 0.0, axis: Vector3::zeros() });
    }
    if angle > std::f64::consts::PI - 1e-6 {
        // Near pi the antisymmetric part loses the axis. The symmetrized
        // combination (R + R^T)/2 = n n^T (1 + cos) ... rearranges to
        // n n^T = (sym - cos * I) / (1 - cos), accurate to second order.
        let sym = (r + r.transpose()) * 0.5;
        let outer = (sym - Matrix3::identity() * cos) / (1.0 - cos);
        let mut best = 0usize;
        for c in 1..3 {
            if outer[(c, c)] > outer[(best, best)] {
                best = c;
            }
        }
        let col = outer.column(best).into_owned();
        let mut axis = col / col.norm();
        if anti.norm() > 1e-12 {
            if axis.dot(&anti) < 0.0 {
                axis = -axis;
            }
        } else {
            // Exactly half a turn: both signs are the same rotation; pick
            // the one whose largest component is positive.
            let mut biggest = 0usize;
            for c in 1..3 {
                if axis[c].abs() > axis[biggest].abs() {
                    biggest = c;
                }
            }
            if axis[biggest] < 0.0 {
                axis = -axis;
            }
        }
        return Ok(AxisAngle { angle, axis });
    }
    let axis = anti / angle.sin();
    let axis = axis / axis.norm();
    Ok(AxisAngle { angle, axis })
}

/// Full decomposition of the deviation of `actual` from the unitary target
/// `ideal`.
pub fn decompose(
    ideal: &PauliTransferMatrix,
    actual: &PauliTransferMatrix,
) -> Result<Decomposition> {
    let markovian = markovian_error(ideal, actual);
    let m = relative_transform(ideal, actual)?;
    let polar = polar_decompose(&m);
    let coherent = coherent_error(&polar.rotation);
    let nonmarkovian = nonmarkovian_error(&polar.stretch);
    let total = (ideal.matrix() - actual.matrix()).norm_squared();
    let axis_angle = match polar.det_sign {
        -1 => None,
        _ => Some(axis_angle(&polar.rotation)?),
    };
    let budget = ErrorBudget {
        total,
        markovian,
        coherent,
        nonmarkovian,
        additivity_residual: total - (markovian + coherent + nonmarkovian),
        infidelity_r: infidelity_from_error(total),
        delta_theta_xyz: axis_angle.as_ref().map(AxisAngle::components),
        det_flag: polar.det_sign,
    };
    Ok(Decomposition { budget, polar, axis_angle })
}
