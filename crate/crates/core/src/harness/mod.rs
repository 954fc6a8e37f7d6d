//! Scenario-driven experiments: building operators from scenario files,
//! running localization, DoA and sweep studies, and writing artifacts.

mod output;
mod run;
mod scenario;

pub use output::{emit_outputs, emit_sweep, emit_strategy_table, read_measurements_csv, write_measurements_csv, Artifacts};
pub use run::*;
pub use scenario::*;
