//! Command-line front end: CSV and SVG export of tone stack responses and
//! the mesh/nodal comparison.
//!
//! Exit codes: 0 success, 1 input error, 2 numerical failure, 3 comparison
//! failure.

pub mod commands;
pub mod csv_out;
pub mod svg;

pub use commands::{run, Cli, CliError};
