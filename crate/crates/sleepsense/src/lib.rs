//! Files, configuration and command line for the sleepsense pipeline.
//!
//! The computation lives in `sleepsense-core`; this crate reads and writes
//! session directories, parses key=value configuration, and renders event
//! logs, score/epoch CSVs and reports.

pub mod clips;
pub mod commands;
pub mod compare;
pub mod config;
pub mod error;
pub mod formats;
pub mod kv;
pub mod session_io;

pub use error::{CliError, Result};
