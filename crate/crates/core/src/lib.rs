//! Monochromatic arithmetic progressions in fixed points of Thue–Morse and
//! generalised Thue–Morse substitutions.
//!
//! The crate is organised bottom-up:
//!
//! - [`subst`]: constant-length substitutions, iteration, classification.
//! - [`word`]: indexed and streamed access to fixed points.
//! - [`ap`]: longest monochromatic progressions (scans, closed forms, witnesses).
//! - [`lang`]: exact factor languages, run lengths and power-freeness.
//! - [`block`]: the two-dimensional block substitutions and their diagonals.
//! - [`bijective`]: checks for general bijective substitutions.
//! - [`spec_file`], [`table`], [`verify`]: file formats and reproduction suites.

pub mod ap;
pub mod bijective;
pub mod block;
pub mod error;
pub mod lang;
pub mod spec_file;
pub mod subst;
pub mod table;
pub mod verify;
pub mod word;

/// Largest alphabet accepted by [`Substitution::new`].
pub const MAX_ALPHABET: usize = 16;

pub use ap::{Family, Kind, Progression, ScanReport};
pub use error::{Error, Result};
pub use subst::{bar, Letter, Substitution, Word};
pub use word::{gtm_letter, tm_letter, WordSource};
