//! Galton-Watson branching processes: exact numerics, spine simulation and
//! limit-law experiments.

pub mod error;
pub mod exec;
pub mod experiments;
pub(crate) mod numerics;
pub mod offspring;
pub mod pgf;
pub mod rng;
pub mod simulate;
pub mod stats;

pub use error::{Error, Result};
