//! Configuration, run directories, file formats and commands of the
//! `ringlab` tool.

pub mod checkpoint;
pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod sweep;
pub mod table;

pub use config::{Kind, RunConfig};
pub use error::{LabError, Result};
