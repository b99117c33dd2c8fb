//! Library surface of the CLI crate: configuration loading, the command
//! drivers, report rendering, and the fuzz-circuit generator. The binary
//! in `main.rs` is a thin argument parser over these.

pub mod config;
pub mod drivers;
pub mod fuzz;
pub mod gen;
pub mod report;
