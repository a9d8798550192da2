//! The guide's chapters, compiled so that `cargo test` runs every listing.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/generating.md")]
pub mod generating {}
#[doc = include_str!("../../../book/src/derived.md")]
pub mod derived {}
#[doc = include_str!("../../../book/src/coincidence.md")]
pub mod coincidence {}
#[doc = include_str!("../../../book/src/cosets.md")]
pub mod cosets {}
#[doc = include_str!("../../../book/src/diffraction.md")]
pub mod diffraction {}
#[doc = include_str!("../../../book/src/pictures.md")]
pub mod pictures {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
