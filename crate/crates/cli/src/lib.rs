//! Library side of the `gauss-frames` command-line tool.

pub mod commands;
pub mod config;
