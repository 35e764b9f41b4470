//! Simulation of a classical optical bench in which a polarization/position
//! inseparable laser state passes a beam splitter, a local PT-symmetric
//! medium, a half-wave plate and polarization-resolved detection.
//!
//! The crate is organised bottom-up:
//!
//! * [`state`]: the 2x2 polarization/position amplitude tensor and the
//!   linear elements acting on one factor of it.
//! * [`medium`]: the PT-symmetric coupling Hamiltonian, its derived
//!   quantities and the analytic / numerical propagation operators.
//! * [`bench`]: the composed experiment, detection statistics, the
//!   no-signaling violation and the CHSH-like correlation.
//! * [`optimize`]: grid search plus coordinate-descent maximisers used by
//!   the CHSH and violation scans.
//! * [`paraxial`]: a split-step Fourier solver for the coupled paraxial
//!   equations, used to validate the diffraction-free matrix model.
//! * [`cli`]: configuration, commands and CSV output for the `ptbench` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod medium;
pub mod optimize;
pub mod output;
pub mod paraxial;
pub mod state;

pub use bench::{
    chsh_c, chsh_s, max_chsh, max_violation, p_single_closed_form, probabilities, run_bench,
    signaling_delta, ChshMax, DetectionRecord, ExperimentSettings, MediumPosition,
    ProbabilityTable, ViolationMax,
};
pub use error::{BenchError, Result};
pub use linalg::Mat2;
pub use medium::{DerivedMedium, PTMediumParams};
pub use state::{PolPosState, PolarizationOperator, PositionOperator};

pub use num_complex::Complex64;
