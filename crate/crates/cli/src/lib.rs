//! Front end for holderlab: configuration, snapshots, CSV reports and the
//! scenario runner behind the `holderlab` binary.

pub mod config;
pub mod error;
pub mod initial;
pub mod io;
pub mod report;
pub mod run;
pub mod snapshot;

pub use config::{emit_config, parse_config, InitialData, RunConfig, Scenario};
pub use error::{CliError, CliResult};
pub use run::{run, RunOutcome};
pub use snapshot::{read_snapshot, write_snapshot};
