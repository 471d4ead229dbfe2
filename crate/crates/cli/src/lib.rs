//! Command-line front end for the `hotelling-core` engine.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 a verification came out
//! negative, 3 two exact computations disagree.

pub mod args;
pub mod commands;
pub mod numfmt;
pub mod table1;

pub use args::Cli;
pub use commands::{run, table1_csv, Output, Status};
