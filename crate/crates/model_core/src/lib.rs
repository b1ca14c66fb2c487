//! Scaled parameters, pump steady state and linear-response matrices of a
//! degenerate optical parametric oscillator with an intracavity photonic
//! crystal (sinusoidally modulated pump and signal detunings).

pub mod error;
pub mod matrix;
pub mod model;
pub mod params;

pub use error::{ModelError, Result};
pub use matrix::{invert_numeric, invert_numeric_with, ComplexMatrix, InversionOptions, NumericInverse, C64};
pub use model::{
    build_L, build_L6, coupling_constants, invert_L_closed, invert_L_closed_with, pump_harmonics,
    pump_steady_state, transfer_matrix, transfer_matrix_via, ClosedFormInverse, CouplingConstants,
    InversePath, PumpSteadyState,
};
pub use params::ModelParams;
