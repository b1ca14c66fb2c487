//! Stochastic simulation of the pump/signal field equations in the Q
//! representation on a periodic transverse grid.

pub mod config;
pub mod ensemble;
pub mod error;
pub mod grid;
pub mod near_field;
pub mod state;
pub mod stepper;
pub mod variance_map;

pub use config::{Scheme, SimConfig};
pub use ensemble::{run_ensemble, CompensatedSum, EnsembleStats, ModeMomentErrors, ModeMoments};
pub use error::{LangevinError, Result};
pub use grid::Grid;
pub use near_field::{near_field_record, NearFieldRecord};
pub use state::{trajectory_rng, FieldState, Snapshot};
pub use stepper::{Stepper, DIVERGENCE_BOUND};
pub use variance_map::{
    analytic_intracavity_map, compare_maps, intracavity_variance_map, normal_moments, vacuum_floor, variance_map_from,
    MapComparison, VarianceMap, MIN_BATCHES,
};
