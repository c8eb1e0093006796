//! Empirical Mode Decomposition.
//!
//! [`decompose`] repeatedly sifts the running residue into intrinsic mode
//! functions until the residue runs out of extrema (monotonic or constant) or
//! `max_imfs` is reached. Envelopes are natural cubic splines through the
//! local extrema, with the two extrema nearest each end mirrored about the
//! endpoint. [`to_fixed_13`] folds any decomposition into 13 channels.

mod extrema;
mod fixed;
mod sift;
mod spline;

pub use extrema::{count_zero_crossings, find_extrema, is_imf, Extrema, Extremum};
pub use fixed::{to_fixed_13, Imf13, CHANNELS};
pub use sift::{decompose, envelopes, extract_imf, ImfStack, SiftConfig, NEGLIGIBLE_RESIDUE};
pub use spline::NaturalSpline;
