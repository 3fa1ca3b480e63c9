//! Scenario runner and verification battery for `chronodyn`.

pub mod app;
pub mod error;
pub mod scenario;
pub mod simulate;
pub mod verify;

pub use error::CliError;
