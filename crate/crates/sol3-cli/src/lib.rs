//! Implementation of the sol3 command-line tool, exposed as a library so
//! integration tests and fuzz targets can drive the config and output
//! layers directly. The binary in `main.rs` is a thin wrapper.

pub mod commands;
pub mod config;
pub mod output;
