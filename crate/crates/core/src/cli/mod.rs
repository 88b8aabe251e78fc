//! Command-line front end: state files, halfspace export and JSON reports.

pub mod format;
mod hrep;
pub mod report;
mod run;
mod state_spec;

pub use hrep::{export_h_representation, parse_h_representation};
pub use report::{RegionReport, Report};
pub use run::{run_command, EXIT_INTERNAL, EXIT_OK, EXIT_VALIDATION};
pub use state_spec::{parse_state_spec, StateSpec};
