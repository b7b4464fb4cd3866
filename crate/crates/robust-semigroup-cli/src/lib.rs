//! Harness library behind the `robust-semigroup` binary: configuration,
//! experiment runners, and deterministic CSV reporting.

pub mod config;
pub mod report;
pub mod runner;
