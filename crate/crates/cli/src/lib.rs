//! Front end for `lorch-core`: job files in, JSON reports and CSV
//! trajectories out.

pub mod commands;
pub mod config;
pub mod errata;
pub mod report;
