//! Verification harness and command-line front end for point counts of the
//! Dwork family and its mirror.

pub mod cache;
pub mod cli;
pub mod engine;
pub mod report;
pub mod verify;

pub const ENGINE_VERSION: &str = concat!("mirrorcount ", env!("CARGO_PKG_VERSION"));
