//! Workload generation, file formats and the measurement loop behind the
//! `bits-kd` command.

pub mod commands;
mod error;
pub mod files;
pub mod quantize;
pub mod report;
pub mod workload;

pub use error::BenchError;
