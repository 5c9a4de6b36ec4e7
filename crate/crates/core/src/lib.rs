//! Attractors of sequences of iterated function systems on an interval.
//!
//! Stage sets, gaps with symbolic provenance, relative-position spectra,
//! renormalization diagnostics and dimension estimates, all computed in
//! exact rational arithmetic when the maps allow it.

pub mod analysis;
pub mod attractor;
pub mod cli;
pub mod error;
pub mod numerics;
pub mod systems;
pub mod words;

pub use error::{Error, Hypothesis, Result};
