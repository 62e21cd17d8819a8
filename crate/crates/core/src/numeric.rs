//! Small numeric helpers shared by the functionals.

/// Neumaier-compensated accumulator.
///
/// Sums are order dependent; callers that need reproducible totals feed
/// terms in a fixed order and combine partials in index order.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().total()
}

/// Tolerance used by sign tests: `scale * (1 + magnitude)`.
#[inline]
pub fn scaled_tol(scale: f64, magnitude: f64) -> f64 {
    scale * (1.0 + magnitude.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_recovers_small_terms() {
        let terms = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(terms), 2.0);
        let naive: f64 = terms.iter().sum();
        assert_eq!(naive, 0.0);
    }
}
