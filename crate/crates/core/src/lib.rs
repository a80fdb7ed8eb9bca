//! Parsing, checking, lowering and GR(1) synthesis for Spectra specifications.

pub mod analyses;
pub mod bdd;
pub mod diag;
pub mod gr1;
pub mod lowering;
pub mod oracle;
pub mod runtime;
pub mod semcheck;
pub mod syntax;
