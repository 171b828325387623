//! Batch front end for `selfsim-core`: JSON job files in, JSON reports and
//! CSV/SVG artifacts out.

pub mod error;
pub mod export;
pub mod run;
pub mod spec;

pub use error::{CliError, Result};
pub use run::{run, Outcome, RunReport};
pub use spec::{parse_spec, Command, JobSpec};
