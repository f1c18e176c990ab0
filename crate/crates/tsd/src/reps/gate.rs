//! Rotation gates about a fixed axis and their labels.

use crate::error::{Error, Result};
use crate::reps::{pauli, PauliTransferMatrix};
use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

/// A single-qubit rotation `exp(-i angle (axis . sigma) / 2)`.
///
/// The axis is a unit vector except for the identity gate, which keeps a zero
/// axis alongside a zero angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitaryGate {
    axis: Vector3<f64>,
    angle: f64,
}

impl UnitaryGate {
    pub fn identity() -> Self {
        UnitaryGate { axis: Vector3::zeros(), angle: 0.0 }
    }

    pub fn rx(angle: f64) -> Self {
        UnitaryGate { axis: Vector3::x(), angle }
    }

    pub fn ry(angle: f64) -> Self {
        UnitaryGate { axis: Vector3::y(), angle }
    }

    pub fn rz(angle: f64) -> Self {
        UnitaryGate { axis: Vector3::z(), angle }
    }

    /// Rotation about an arbitrary axis, which is normalized on entry.
    pub fn about_axis(axis: Vector3<f64>, angle: f64) -> Result<Self> {
        let norm = axis.norm();
        if norm < 1e-12 {
            if angle.abs() < 1e-12 {
                return Ok(Self::identity());
            }
            return Err(Error::ZeroAxis);
        }
        Ok(UnitaryGate { axis: axis / norm, angle })
    }

    pub fn axis(&self) -> Vector3<f64> {
        self.axis
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Same axis with the angle multiplied by `factor`; this is how angle
    /// noise enters a shot.
    pub fn scaled(&self, factor: f64) -> Self {
        UnitaryGate { axis: self.axis, angle: self.angle * factor }
    }

    /// The SU(2) matrix `cos(angle/2) 1 - i sin(angle/2) (axis . sigma)`.
    pub fn matrix(&self) -> Matrix2<Complex64> {
        let half = 0.5 * self.angle;
        let mut u = pauli(0) * Complex64::new(half.cos(), 0.0);
        let coeff = Complex64::new(0.0, -half.sin());
        for k in 0..3 {
            u += pauli(k + 1) * (coeff * Complex64::new(self.axis[k], 0.0));
        }
        u
    }

    /// Rodrigues form of the Bloch-sphere rotation: `1 + sin(angle) K +
    /// (1 - cos(angle)) K^2` with `K` the cross-product matrix of the axis.
    pub fn bloch_rotation(&self) -> Matrix3<f64> {
        let k = cross_matrix(&self.axis);
        Matrix3::identity() + k * self.angle.sin() + k * k * (1.0 - self.angle.cos())
    }

    pub fn ptm(&self) -> PauliTransferMatrix {
        PauliTransferMatrix::from_bloch_block(&self.bloch_rotation())
    }

    /// Canonical text label. Right angles about a principal axis print in
    /// "pi" notation ("Rx(pi/2)"); other angles print as radians in the
    /// shortest form that parses back to the identical gate.
    pub fn label(&self) -> String {
        format!("{self}")
    }

    /// Parses a label produced by [`UnitaryGate::label`]. Also accepts
    /// "identity", an optional sign, and angles written as multiples of pi
    /// ("Ry(0.95pi)").
    pub fn from_label(label: &str) -> Result<Self> {
        let s = label.trim();
        if s == "I" || s.eq_ignore_ascii_case("identity") {
            return Ok(Self::identity());
        }
        let (head, rest) = s.split_at(s.len().min(2));
        let make = match head {
            "Rx" => Self::rx as fn(f64) -> Self,
            "Ry" => Self::ry,
            "Rz" => Self::rz,
            _ => return Err(Error::Config(format!("unrecognized gate label {s:?}"))),
        };
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Config(format!("unrecognized gate label {s:?}")))?;
        Ok(make(parse_angle(inner, s)?))
    }
}

impl fmt::Display for UnitaryGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.angle == 0.0 {
            return write!(f, "I");
        }
        let prefix = if self.axis == Vector3::x() {
            "Rx"
        } else if self.axis == Vector3::y() {
            "Ry"
        } else if self.axis == Vector3::z() {
            "Rz"
        } else {
            let a = self.axis;
            return write!(f, "R([{},{},{}];{})", a[0], a[1], a[2], self.angle);
        };
        match self.angle {
            a if a == PI => write!(f, "{prefix}(pi)"),
            a if a == -PI => write!(f, "{prefix}(-pi)"),
            a if a == FRAC_PI_2 => write!(f, "{prefix}(pi/2)"),
            a if a == -FRAC_PI_2 => write!(f, "{prefix}(-pi/2)"),
            a => write!(f, "{prefix}({a})"),
        }
    }
}

fn parse_angle(text: &str, label: &str) -> Result<f64> {
    let bad = || Error::Config(format!("unrecognized gate label {label:?}"));
    let t = text.trim();
    let (sign, t) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t),
    };
    if t == "pi" {
        return Ok(sign * PI);
    }
    if t == "pi/2" {
        return Ok(sign * FRAC_PI_2);
    }
    if let Some(mult) = t.strip_suffix("pi") {
        let m: f64 = mult.parse().map_err(|_| bad())?;
        return Ok(sign * m * PI);
    }
    let radians: f64 = t.parse().map_err(|_| bad())?;
    Ok(sign * radians)
}

pub(crate) fn cross_matrix(axis: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(
        0.0, -axis[2], axis[1], //
        axis[2], 0.0, -axis[0], //
        -axis[1], axis[0], 0.0,
    )
}

/// Rotation matrix about a unit axis (Rodrigues form), shared with the
/// decomposition side for rebuilding rotations from axis-angle data.
pub fn rotation_about(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let k = cross_matrix(axis);
    Matrix3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos())
}
