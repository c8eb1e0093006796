//! Signal denoising primitives built on Empirical Mode Decomposition.
//!
//! Two interchangeable denoisers share one decomposition front end:
//!
//! * IMF thresholding ([`threshold`]): universal thresholds estimated from the
//!   first IMF, applied per IMF with a hard, soft or continuous custom rule.
//! * A per-sample multilayer perceptron ([`mlp`], [`train`], [`ann`]) that maps
//!   the 13 IMF values at each time index to the clean sample.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and the
//! experiment runners live in the `emdenoise` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod ann;
pub mod dataset;
pub mod emd;
mod error;
pub mod fft;
pub mod metrics;
pub mod mlp;
pub mod noise;
pub mod rng;
pub mod signal;
pub mod synth;
pub mod threshold;
pub mod train;

pub use error::{Error, Result};
pub use signal::{AffineParams, Signal};
