//! Kolakoski-(2m,2n) sequences through constant-length substitutions.
//!
//! The crate generates Kolakoski sequences, derives constant-length
//! substitutions whose fixed points block-expand to them, decides pure point
//! spectrum through coincidences, decomposes letter positions into lattice
//! cosets and computes the resulting Bragg peaks.
//!
//! ```
//! use kolakoski::coincidence::{full_coincidence, spectral_verdict};
//! use kolakoski::derive::height_one_substitution;
//! use kolakoski::EvenParams;
//!
//! let theta = height_one_substitution(EvenParams::new(2, 1)?)?;
//! assert_eq!(theta.sub.constant_length(), Some(3));
//! assert_eq!(full_coincidence(&theta.sub)?.unwrap().k, 2);
//! assert!(spectral_verdict(&theta.sub)?.pure_point);
//! # Ok::<(), kolakoski::Error>(())
//! ```

pub mod coincidence;
pub mod derive;
pub mod diffraction;
pub mod error;
pub mod kolakoski;
pub mod ladic;
pub mod matrix;
pub mod model_set;
pub mod render;
pub mod spectrum;
pub mod substitution;
pub mod word;

pub use error::{Error, Result};
pub use kolakoski::{EvenParams, KolParams};
pub use substitution::Substitution;
pub use word::{Alphabet, Letter, Word};
