//! Softmax n-armed bandit baseline.
//!
//! One value estimate per reservation vector, updated only for the action
//! played with the reward `G = -C(a, b)`: `Q(a) <- Q(a) + beta (G - Q(a))`.
//! Actions are drawn from `softmax(Q / tau)`.

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::model::CostEvaluator;
use crate::policy::{Observation, ReservationPolicy};
use crate::SimRng;

#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxBandit {
    q_values: Vec<f64>,
    beta: f64,
    tau: f64,
}

impl SoftmaxBandit {
    /// `q_init = 0` is optimistic here since every reward is at most zero.
    pub fn new(space_size: usize, beta: f64, tau: f64, q_init: f64) -> Result<Self> {
        if space_size == 0 {
            return Err(Error::param("space_size", "must be at least 1"));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::param("beta", format!("must lie in (0, 1], got {beta}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::param("tau", format!("must be positive and finite, got {tau}")));
        }
        if !q_init.is_finite() {
            return Err(Error::param("q_init", "must be finite"));
        }
        Ok(Self {
            q_values: vec![q_init; space_size],
            beta,
            tau,
        })
    }

    pub fn q_values(&self) -> &[f64] {
        &self.q_values
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn distribution(&self) -> Distribution {
        let scaled: Vec<f64> = self.q_values.iter().map(|q| q / self.tau).collect();
        Distribution::from_log_weights(&scaled)
    }

    pub fn update(&mut self, action: usize, reward: f64) -> Result<()> {
        if reward.is_nan() {
            return Err(Error::param("reward", "NaN"));
        }
        let len = self.q_values.len();
        let q = self
            .q_values
            .get_mut(action)
            .ok_or(Error::IndexOutOfRange {
                index: action,
                cardinality: len,
            })?;
        *q += self.beta * (reward - *q);
        Ok(())
    }
}

impl ReservationPolicy for SoftmaxBandit {
    fn distribution(&mut self, _rng: &mut SimRng) -> Distribution {
        SoftmaxBandit::distribution(self)
    }

    fn observe(
        &mut self,
        outcome: Observation<'_>,
        _costs: &dyn CostEvaluator,
        _rng: &mut SimRng,
    ) -> Result<()> {
        self.update(outcome.action, -outcome.cost.total)
    }
}
