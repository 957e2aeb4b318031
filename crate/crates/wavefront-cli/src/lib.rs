//! Command-line front end: configuration, subcommands and their output files.

pub mod commands;
pub mod config;
pub mod output;
