//! File formats, parallel preprocessing and the command-line front end for
//! `semcf-core`.

pub mod cache;
pub mod cli;
pub mod dataset;
pub mod overrides;
pub mod parallel;
pub mod report;
