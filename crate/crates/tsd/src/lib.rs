//! Tangent-space diagnostics for single-qubit gates.
//!
//! The crate reconstructs a quantum channel from excitation counts taken in
//! twelve pre- and post-rotation settings, enforcing complete positivity and
//! trace preservation, and then splits the squared deviation from a target
//! rotation into Markovian, coherent, and non-Markovian parts by a polar
//! decomposition in the tangent space of the rotation group. A Monte-Carlo
//! shot simulator regenerates the count data for calibrated noise models, so
//! every stage can be exercised end to end without hardware.
//!
//! Start with the runnable examples:
//!
//! ```text
//! cargo run --example channel_representations
//! cargo run --example error_decomposition
//! cargo run --example tomography_reconstruction
//! cargo run --example coherent_error_sweep
//! cargo run --example nonmarkovian_noise
//! cargo run --example setting_error_mitigation
//! ```
//!
//! The same capabilities are scriptable through the thin `tsd` binary
//! (`simulate`, `reconstruct`, `sweep`, `validate`).

pub mod decomposition;
pub mod error;
pub mod pipeline;
pub mod reps;
pub mod simulator;
pub mod tomography;

pub use error::{Error, Result};
