//! Command-line tools and the walker service for Spectra specifications.

pub mod commands;
pub mod pipeline;
pub mod service;
