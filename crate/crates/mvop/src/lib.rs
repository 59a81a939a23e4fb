//! Command-line front end for `mvop-core`: weight configs, verification suites,
//! and JSON/CSV export.

pub mod cli;
pub mod config;
pub mod export;
pub mod report;
pub mod suites;
