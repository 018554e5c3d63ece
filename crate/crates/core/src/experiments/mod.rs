//! The reproducible studies behind the command-line tool: set-size
//! simulation, leave-one-out stability, the three-class region map and the
//! property suites. Each is a pure function of an [`ExperimentConfig`].

pub mod config;
pub mod loo;
pub mod region_map;
pub mod simulate;
pub mod verify;

pub use config::{ExperimentConfig, LearnerKind, OutputFormat};
pub use loo::{run_loo_experiment, LooOutcome};
pub use region_map::{region_map, RegionPoint};
pub use simulate::{simulate_sizes, SizeRow};
pub use verify::{run_all, SuiteOutcome, VerifyReport};
