//! File formats, evaluation tables and the command-line driver for
//! [`logifold_core`].

pub mod commands;
pub mod error;
pub mod io;
pub mod table;

pub use error::{Error, Result};
pub use logifold_core as core;
