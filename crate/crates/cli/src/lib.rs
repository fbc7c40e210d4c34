//! Command implementations behind the `multiperm` binary. Each command
//! returns a report whose JSON form is canonical (sorted keys), so identical
//! inputs and seeds give byte-identical output.

pub mod analyze;
pub mod couple;
pub mod error;
pub mod ingest;
pub mod moments_cmd;
pub mod oracle_cmd;
pub mod render;
pub mod simulate;
pub mod tables;

pub use error::{CliError, Result};
