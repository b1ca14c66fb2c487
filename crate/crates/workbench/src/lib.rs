//! Run configuration, parameter sweeps, result export and figure recipes
//! on top of the analytic and stochastic OPO engines.

pub mod checks;
pub mod config;
pub mod error;
pub mod export;
pub mod recipes;
pub mod sweep;

pub use checks::{draw_point, matrix_check, MatrixCheck};
pub use config::{config_load, config_parse, LoadedConfig, CONFIG_VERSION};
pub use error::{ExitClass, Result, WorkbenchError};
pub use export::{config_from_results, read_json, write_csv, write_json, write_output, ResultsFile};
pub use recipes::{load_recipe, quick, reproduce_figure, Recipe, FIGURE_IDS};
pub use sweep::{
    default_workers, evaluate_point, run_sweep, run_sweep_with, Axis, Engine, Observable, ObservableOptions, PointStatus,
    ResultRecord, SweepSpec, WORKERS_ENV,
};
