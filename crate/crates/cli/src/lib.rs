//! Command-line harness: instance descriptors, result records and the
//! `solve`, `compare` and `verify` subcommands.

pub mod commands;
pub mod instance;
pub mod report;

pub use commands::{run, Cli};
