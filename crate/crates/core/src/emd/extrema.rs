use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Extrema {
    pub maxima: Vec<Extremum>,
    pub minima: Vec<Extremum>,
}

impl Extrema {
    pub fn count(&self) -> usize {
        self.maxima.len() + self.minima.len()
    }
}

/// Strict interior local extrema.
///
/// A flat run bounded by lower (higher) neighbours on both sides is a single
/// maximum (minimum) at the run's midpoint. Runs touching either end of the
/// sequence are never extrema.
pub fn find_extrema(x: &[f64]) -> Result<Extrema> {
    let n = x.len();
    if n < 3 {
        return Err(Error::TooShort { min: 3, actual: n });
    }
    let mut out = Extrema::default();
    let mut i = 1;
    while i < n && x[i] == x[0] {
        i += 1;
    }
    while i < n - 1 {
        let mut j = i;
        while j + 1 < n && x[j + 1] == x[i] {
            j += 1;
        }
        if j >= n - 1 {
            break;
        }
        let (prev, next, v) = (x[i - 1], x[j + 1], x[i]);
        let index = (i + j) / 2;
        if v > prev && v > next {
            out.maxima.push(Extremum { index, value: v });
        } else if v < prev && v < next {
            out.minima.push(Extremum { index, value: v });
        }
        i = j + 1;
    }
    Ok(out)
}

/// Sign changes between consecutive non-zero samples.
pub fn count_zero_crossings(x: &[f64]) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for &v in x {
        let s = if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            continue;
        };
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// The extrema / zero-crossing half of the IMF definition: the two counts
/// differ by at most one.
pub fn is_imf(x: &[f64]) -> bool {
    match find_extrema(x) {
        Ok(e) => e.count().abs_diff(count_zero_crossings(x)) <= 1,
        Err(_) => false,
    }
}
