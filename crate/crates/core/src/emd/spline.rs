use alloc::vec::Vec;

use crate::{Error, Result};

/// Natural cubic spline (zero second derivative at both end knots).
#[derive(Debug, Clone)]
pub struct NaturalSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    second: Vec<f64>,
}

impl NaturalSpline {
    /// `xs` must be strictly increasing; at least two knots.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n != ys.len() {
            return Err(Error::LengthMismatch { expected: n, actual: ys.len() });
        }
        if n < 2 {
            return Err(Error::TooShort { min: 2, actual: n });
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("xs", "knots must be strictly increasing"));
        }

        // Thomas algorithm on the interior second derivatives.
        let mut second = alloc::vec![0.0; n];
        if n > 2 {
            let m = n - 2;
            let mut c_prime = alloc::vec![0.0; m];
            let mut d_prime = alloc::vec![0.0; m];
            for k in 0..m {
                let i = k + 1;
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let a = h0;
                let b = 2.0 * (h0 + h1);
                let c = h1;
                let d = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
                if k == 0 {
                    c_prime[k] = c / b;
                    d_prime[k] = d / b;
                } else {
                    let denom = b - a * c_prime[k - 1];
                    c_prime[k] = c / denom;
                    d_prime[k] = (d - a * d_prime[k - 1]) / denom;
                }
            }
            second[m] = d_prime[m - 1];
            for k in (0..m - 1).rev() {
                second[k + 1] = d_prime[k] - c_prime[k] * second[k + 2];
            }
        }
        Ok(Self { xs, ys, second })
    }

    fn eval_segment(&self, seg: usize, x: f64) -> f64 {
        let (x0, x1) = (self.xs[seg], self.xs[seg + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        a * self.ys[seg]
            + b * self.ys[seg + 1]
            + ((a * a * a - a) * self.second[seg] + (b * b * b - b) * self.second[seg + 1]) * h * h / 6.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        let last = self.xs.len() - 2;
        let seg = match self.xs.binary_search_by(|k| k.total_cmp(&x)) {
            Ok(i) => i.min(last),
            Err(i) => i.saturating_sub(1).min(last),
        };
        self.eval_segment(seg, x)
    }

    /// Evaluates at `0, 1, ..., len - 1` in one forward sweep.
    pub fn eval_grid(&self, len: usize) -> Vec<f64> {
        let last = self.xs.len() - 2;
        let mut seg = 0;
        (0..len)
            .map(|i| {
                let x = i as f64;
                while seg < last && x > self.xs[seg + 1] {
                    seg += 1;
                }
                self.eval_segment(seg, x)
            })
            .collect()
    }
}
