//! Configuration, reports, file formats and the verification pipeline on
//! top of `coble-core`.

pub mod config;
pub mod formats;
pub mod pipeline;
pub mod report;
