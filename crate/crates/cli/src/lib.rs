//! Command-line front end for `hardy-core`: verification suites, classification
//! runs, matrix dumps and SVG plots of probe reports.

pub mod config;
pub mod dump;
pub mod error;
pub mod plot;
pub mod report;
pub mod spec;
pub mod suites;

pub use error::{Error, Result};
