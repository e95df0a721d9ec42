//! Overlap numbers, folding entropy and dimension bounds for affine iterated
//! function systems on the line.

pub mod algebraic;
pub mod cli;
pub mod dimension;
pub mod error;
pub mod ifs;
pub mod measures;
pub mod overlap;
pub mod scalar;
pub mod structure;

pub use error::{Error, Result};
