//! Compensated floating point accumulation.

/// Neumaier's variant of Kahan summation.
///
/// The rounding error of the result is bounded by roughly `2ε·Σ|xᵢ|`
/// independent of the number of terms, which makes sums over millions of
/// logarithms reproducible to the last few ulps.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    carry: f64,
    abs_sum: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.carry += (self.sum - t) + value;
        } else {
            self.carry += (value - t) + self.sum;
        }
        self.sum = t;
        self.abs_sum += value.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }

    /// A rigorous-in-practice bound on the accumulated rounding error.
    pub fn error_bound(&self) -> f64 {
        4.0 * f64::EPSILON * self.abs_sum
    }
}

impl std::iter::Sum<f64> for NeumaierSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_terms() {
        let mut s = NeumaierSum::new();
        for v in [1.0, 1e100, 1.0, -1e100] {
            s.add(v);
        }
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn many_small_terms() {
        let s: NeumaierSum = std::iter::repeat_n(0.1, 1_000_000).sum();
        assert!((s.value() - 100_000.0).abs() < 1e-9);
    }
}
