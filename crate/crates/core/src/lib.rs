//! Isolated circular orders of the modular group `(Z/2) * (Z/3)` through
//! their Markov systems, with exact rational arithmetic throughout.

pub mod catalog;
pub mod circle;
pub mod enumerate;
pub mod error;
pub mod markov;
pub mod order;
pub mod pingpong;
pub mod realization;
pub mod word;

pub use error::{Error, Result};
pub use markov::{MarkovPattern, PrincipalCycle, ValidationReport};
pub use realization::Realization;

pub use word::{GroupWord, Letter};
