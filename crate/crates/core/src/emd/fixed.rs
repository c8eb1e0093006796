use alloc::vec::Vec;

use super::sift::ImfStack;
use crate::AffineParams;

/// Channel count of the fixed-width representation.
pub const CHANNELS: usize = 13;

/// A decomposition folded into exactly 13 channels.
///
/// Channels 1..=12 are IMFs 1..=12 (zeros where the decomposition was
/// shallower); channel 13 holds IMF 13 and every deeper IMF plus the residue,
/// so the channels still sum to the decomposed signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Imf13 {
    pub channels: Vec<Vec<f64>>,
    pub affine: AffineParams,
}

impl Imf13 {
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The 13 channel values at time index `t`.
    pub fn row(&self, t: usize) -> [f64; CHANNELS] {
        core::array::from_fn(|c| self.channels[c][t])
    }

    pub fn rows(&self) -> impl Iterator<Item = [f64; CHANNELS]> + '_ {
        (0..self.len()).map(|t| self.row(t))
    }

    pub fn channel_sum(&self) -> Vec<f64> {
        self.rows().map(|r| r.iter().sum()).collect()
    }
}

pub fn to_fixed_13(stack: &ImfStack, affine: AffineParams) -> Imf13 {
    let n = stack.residue.len();
    let mut channels: Vec<Vec<f64>> = (0..CHANNELS - 1)
        .map(|i| stack.imfs.get(i).cloned().unwrap_or_else(|| alloc::vec![0.0; n]))
        .collect();
    let mut last = stack.imfs.get(CHANNELS - 1).cloned().unwrap_or_else(|| alloc::vec![0.0; n]);
    for imf in stack.imfs.iter().skip(CHANNELS) {
        for (l, v) in last.iter_mut().zip(imf) {
            *l += v;
        }
    }
    for (l, r) in last.iter_mut().zip(&stack.residue) {
        *l += r;
    }
    channels.push(last);
    Imf13 { channels, affine }
}
