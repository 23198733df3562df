//! Streaming mean/variance accumulation for Monte Carlo estimates.

/// Mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation divided by `sqrt(samples)`.
    pub std_error: f64,
    pub samples: u64,
}

impl McEstimate {
    /// `(mean - target) / std_error`; zero when both the error and the
    /// deviation vanish, infinite when only the error does.
    pub fn z_score(&self, target: f64) -> f64 {
        let dev = self.mean - target;
        if self.std_error > 0.0 {
            dev / self.std_error
        } else if dev == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(dev)
        }
    }

    /// Whether `target` lies within `sigmas` standard errors.
    ///
    /// A small absolute floor absorbs round-off when the estimator has zero
    /// spread (e.g. a quantity that is identically zero).
    pub fn agrees_with(&self, target: f64, sigmas: f64) -> bool {
        let dev = (self.mean - target).abs();
        dev <= sigmas * self.std_error || dev <= 1e-15 * (1.0 + target.abs())
    }
}

/// Welford accumulator; merging follows Chan et al.'s pairwise update, so a
/// fixed merge order yields bit-identical results.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Accumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let na = self.count as f64;
        let nb = other.count as f64;
        let nn = n as f64;
        self.mean += delta * nb / nn;
        self.m2 += other.m2 + delta * delta * na * nb / nn;
        self.count = n;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    /// `None` with fewer than two samples.
    pub fn estimate(&self) -> Option<McEstimate> {
        if self.count < 2 {
            return None;
        }
        Some(McEstimate {
            mean: self.mean,
            std_error: libm::sqrt(self.variance() / self.count as f64),
            samples: self.count,
        })
    }
}

/// Merges a sequence of accumulators by a balanced pairwise tree in index order.
pub fn pairwise_merge<T: Clone>(mut items: alloc::vec::Vec<T>, merge: impl Fn(&mut T, &T)) -> Option<T> {
    if items.is_empty() {
        return None;
    }
    while items.len() > 1 {
        let mut next = alloc::vec::Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(mut left) = it.next() {
            if let Some(right) = it.next() {
                merge(&mut left, &right);
            }
            next.push(left);
        }
        items = next;
    }
    items.pop()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1.0, 2.0, 4.0, 7.0, 11.0];
        let mut acc = Accumulator::new();
        xs.iter().for_each(|&x| acc.push(x));
        let mean = xs.iter().sum::<f64>() / 5.0;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 4.0;
        assert!((acc.mean() - mean).abs() < 1e-14);
        assert!((acc.variance() - var).abs() < 1e-12);
        let est = acc.estimate().unwrap();
        assert!((est.std_error - libm::sqrt(var / 5.0)).abs() < 1e-14);
    }

    #[test]
    fn merge_matches_sequential() {
        let xs: alloc::vec::Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut whole = Accumulator::new();
        xs.iter().for_each(|&x| whole.push(x));
        let parts: alloc::vec::Vec<Accumulator> = xs
            .chunks(7)
            .map(|c| {
                let mut a = Accumulator::new();
                c.iter().for_each(|&x| a.push(x));
                a
            })
            .collect();
        let merged = pairwise_merge(parts, |a, b| a.merge(b)).unwrap();
        assert_eq!(merged.count(), 100);
        assert!((merged.mean() - whole.mean()).abs() < 1e-14);
        assert!((merged.variance() - whole.variance()).abs() < 1e-13);
    }

    #[test]
    fn single_sample_has_no_estimate() {
        let mut acc = Accumulator::new();
        acc.push(1.0);
        assert!(acc.estimate().is_none());
        assert!(pairwise_merge(vec![] as alloc::vec::Vec<Accumulator>, |a, b| a.merge(b)).is_none());
    }

    #[test]
    fn z_scores() {
        let e = McEstimate {
            mean: 1.0,
            std_error: 0.5,
            samples: 10,
        };
        assert_eq!(e.z_score(0.0), 2.0);
        let exact = McEstimate {
            mean: 0.0,
            std_error: 0.0,
            samples: 10,
        };
        assert_eq!(exact.z_score(0.0), 0.0);
        assert!(exact.agrees_with(0.0, 4.0));
        assert!(!exact.agrees_with(0.1, 4.0));
    }
}
