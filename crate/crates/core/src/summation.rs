//! Compensated accumulation used by every batch reduction in the crate.

/// Neumaier's variant of Kahan summation. Sequential, so the result is a
/// pure function of the input order.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

pub(crate) fn sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::default();
    for x in values {
        acc.add(x);
    }
    acc.total()
}

/// Arithmetic mean; `values` must be non-empty.
pub(crate) fn mean(values: &[f64]) -> f64 {
    sum(values.iter().copied()) / values.len() as f64
}

/// Unbiased sample variance by the two-pass algorithm; needs `len >= 2`.
pub(crate) fn sample_variance(values: &[f64]) -> (f64, f64) {
    let m = mean(values);
    let ss = sum(values.iter().map(|&x| (x - m) * (x - m)));
    (m, ss / (values.len() - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let values = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(sum(values), 2.0);
    }

    #[test]
    fn two_pass_variance_survives_large_offset() {
        let base = [1.0, 2.0, 3.0, 4.0];
        let shifted: Vec<f64> = base.iter().map(|x| x + 1e9).collect();
        let (m, v) = sample_variance(&shifted);
        assert_eq!(m, 1e9 + 2.5);
        assert!((v - 5.0 / 3.0).abs() < 1e-9);
    }
}
