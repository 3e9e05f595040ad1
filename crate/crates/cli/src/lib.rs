//! The `envyline` command line: closed-form tables, error curves, the LRM
//! parameter search and the verification suites. All file output goes
//! through [`output`], which fixes number formatting and attaches a
//! [`RunManifest`].

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > y)` deliberately treats NaN as failure

pub mod args;
mod commands;
mod error;
pub mod format;
pub mod manifest;
pub mod output;
pub mod range;

pub use args::Cli;
pub use commands::{run, Status};
pub use error::{exit, CliError};
pub use manifest::RunManifest;
