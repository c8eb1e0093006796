//! File formats, experiment runners and the command-line front end around
//! `emdenoise-core`.

pub mod bench;
pub mod cli;
pub mod config;
mod error;
pub mod fsio;
pub mod imf_dump;
pub mod model_io;
pub mod report;
pub mod spectrogram;
pub mod wav;

pub use error::{Error, Result};
