//! File formats, the command-line front end and parallel beam evaluation for
//! [`prehom_core`].

pub mod commands;
pub mod format;
pub mod parallel;
pub mod pretty;
pub mod verify;

pub use format::{AnyForm, FormatError};
