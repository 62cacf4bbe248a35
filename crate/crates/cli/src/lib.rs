//! Command-line front end: named experiments, claim verification and distribution dumps.

pub mod claims;
pub mod config;
pub mod corpus;
pub mod dump;
pub mod error;
pub mod experiments;
pub mod report;

pub use error::{CliError, Result};
