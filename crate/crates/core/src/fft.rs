//! Iterative radix-2 FFT for power-of-two lengths.
//!
//! Only the noise and carrier synthesizers need a transform inside the core,
//! and both are free to work on a power-of-two grid and truncate.

use alloc::vec::Vec;
use num_complex::Complex64;

pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

/// In-place forward transform, `X[k] = Σ x[n]·e^{-2πikn/N}`.
pub fn forward(buf: &mut [Complex64]) {
    transform(buf, false);
}

/// In-place inverse transform including the 1/N factor.
pub fn inverse(buf: &mut [Complex64]) {
    transform(buf, true);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

fn transform(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "radix-2 FFT needs a power-of-two length");
    if n <= 1 {
        return;
    }

    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }

    let sign = if inverse { 1.0 } else { -1.0 };
    let twiddles: Vec<Complex64> = (0..n / 2)
        .map(|k| {
            let angle = sign * 2.0 * core::f64::consts::PI * k as f64 / n as f64;
            Complex64::new(libm::cos(angle), libm::sin(angle))
        })
        .collect();

    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}
