//! The `m2c` command-line tool and its HTTP service.

mod commands;
pub mod service;

pub use commands::{run, Cli, CliError, Command, EXIT_BAD_INPUT, EXIT_BAD_MODEL};
