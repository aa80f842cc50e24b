//! Experiment drivers: time series, parameter sweeps and the localization
//! check-suite, all producing deterministic CSV.

mod config;
mod csv;
mod engine;
mod localize;
mod sweeps;

pub use config::{
    parse_grid, parse_pair, Evaluation, ExperimentConfig, PairSpec, PrepOverride, PrepSpec, ResolvedTopology, TimeGrid,
    TopologySpec,
};
pub use csv::{format_g12, write_csv, CSV_COLUMNS};
pub use engine::{PairPropagation, ProductState};
pub use localize::{
    localization_suite, BaselineOutcome, CaseOutcome, Check, DeltaOutcome, Failure, LocalizationReport,
    LocalizationSpec, Peak, CLASSICAL_FLOOR, HUB_REFERENCE_FLOOR, ZERO_FLOOR,
};
pub use sweeps::{first_local_max, run_time_series, sweep_delta, sweep_r, LocalMax, Section, SweepResult, SweepRow};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
