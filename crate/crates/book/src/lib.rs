//! Doc-test harness for the guide. Each chapter of `book/src` becomes the
//! documentation of one module, so `cargo test --doc -p spectra-book` runs
//! every listing.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/language.md")]
pub mod language {}
#[doc = include_str!("../../../book/src/lowering.md")]
pub mod lowering {}
#[doc = include_str!("../../../book/src/synthesis.md")]
pub mod synthesis {}
#[doc = include_str!("../../../book/src/walking.md")]
pub mod walking {}
#[doc = include_str!("../../../book/src/analyses.md")]
pub mod analyses {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../book/src/testing.md")]
pub mod testing {}
