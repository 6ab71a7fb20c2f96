//! Categorical distributions over action indices.

use rand::Rng;

/// Probability vector over `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn uniform(len: usize) -> Self {
        assert!(len > 0, "distribution over an empty set");
        Self {
            probs: vec![1.0 / len as f64; len],
        }
    }

    /// Normalized `exp(log_weights)`, shifted by the maximum before
    /// exponentiating so that no spread of finite log-weights overflows and
    /// the largest weight is exactly 1.
    pub fn from_log_weights(log_weights: &[f64]) -> Self {
        assert!(!log_weights.is_empty(), "distribution over an empty set");
        let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut probs: Vec<f64> = log_weights.iter().map(|&w| (w - max).exp()).collect();
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
        Self { probs }
    }

    /// Normalizes nonnegative weights; at least one must be positive.
    pub fn from_weights(weights: &[f64]) -> Option<Self> {
        let total: f64 = weights.iter().sum();
        if weights.is_empty() || !(total > 0.0) || weights.iter().any(|w| !(*w >= 0.0)) {
            return None;
        }
        Some(Self {
            probs: weights.iter().map(|w| w / total).collect(),
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Inverse-CDF draw over ascending index order.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.quantile(rng.gen())
    }

    /// Smallest index whose cumulative probability exceeds `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (k, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return k;
            }
        }
        // Rounding left the cumulative sum just below u.
        self.probs
            .iter()
            .rposition(|&p| p > 0.0)
            .expect("some probability is positive")
    }

    /// Euclidean distance between probability vectors.
    pub fn l2_distance(&self, other: &Distribution) -> f64 {
        assert_eq!(self.len(), other.len());
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt()
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }
}
