//! The `hetnet` command line on top of `hetnet-core`, with TOML
//! configuration and CSV result tables.

pub mod cli;
pub mod config;
pub mod error;
pub mod parallel;
pub mod presets;
pub mod run;
pub mod table;

pub use config::{ClosedForm, Mode, Overrides, RunConfig, SweepSpec};
pub use error::CliError;
pub use parallel::Rayon;
pub use presets::{preset, Preset, FIGURES};
pub use run::execute;
pub use table::{ResultTable, HEADER};
