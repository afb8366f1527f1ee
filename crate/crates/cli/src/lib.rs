//! Batch front end for the squeezed-cavity two-atom library: declarative
//! scenario configs in, CSV tables (and optional SVG plots) out.

pub mod config;
pub mod error;
pub mod figures;
pub mod plot;
pub mod run;
pub mod table;
pub mod units;

pub use config::ScenarioConfig;
pub use error::CliError;
pub use run::{run_scenario, Overrides, RunOutput};
pub use table::ResultTable;
