//! Exponentially weighted randomized reservation.
//!
//! Each action `a` carries the weight `exp(-eta * D(a))` where `D(a)` is its
//! (optionally discounted) cumulative cost; the reservation for the next slot
//! is drawn from the normalized weights. Weights are kept in the log domain:
//! at the reference scale the raw weights underflow long before the horizon.

mod explore;

pub use explore::{CostCache, RandomExploration};

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::model::CostEvaluator;
use crate::policy::{Observation, ReservationPolicy};
use crate::SimRng;

/// Step size `sqrt(ln|A| / T)` that balances the regret bound at horizon `T`.
pub fn default_eta(space_size: usize, horizon: usize) -> f64 {
    ((space_size as f64).ln() / horizon.max(1) as f64).sqrt()
}

/// Log-domain weight vector over a finite action set.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpWeights {
    eta: f64,
    discount: f64,
    /// `D(a) = sum_s W^{t-s} C(a, b^s)`; `W = 1` gives the plain cumulative cost.
    accumulated: Vec<f64>,
    slot: usize,
}

impl ExpWeights {
    pub fn new(space_size: usize, eta: f64, discount: f64) -> Result<Self> {
        if space_size == 0 {
            return Err(Error::param("space_size", "must be at least 1"));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::param("eta", format!("must be positive and finite, got {eta}")));
        }
        if !(discount > 0.0 && discount <= 1.0) {
            return Err(Error::param("discount", format!("must lie in (0, 1], got {discount}")));
        }
        Ok(Self {
            eta,
            discount,
            accumulated: vec![0.0; space_size],
            slot: 1,
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    /// 1-based index of the slot the current weights are for.
    pub fn slot(&self) -> usize {
        self.slot
    }

    pub fn len(&self) -> usize {
        self.accumulated.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accumulated.is_empty()
    }

    pub fn accumulated(&self) -> &[f64] {
        &self.accumulated
    }

    /// Folds in one slot's cost vector: `D <- W (D + c)`.
    pub fn update(&mut self, costs: &[f64]) -> Result<()> {
        if costs.len() != self.accumulated.len() {
            return Err(Error::DimensionMismatch {
                expected: self.accumulated.len(),
                got: costs.len(),
            });
        }
        if let Some(k) = costs.iter().position(|c| !c.is_finite()) {
            return Err(Error::param("costs", format!("entry {k} is not finite")));
        }
        for (d, &c) in self.accumulated.iter_mut().zip(costs) {
            *d = self.discount * (*d + c);
        }
        self.slot += 1;
        Ok(())
    }

    pub fn log_weights(&self) -> Vec<f64> {
        self.accumulated.iter().map(|d| -self.eta * d).collect()
    }

    pub fn distribution(&self) -> Distribution {
        Distribution::from_log_weights(&self.log_weights())
    }
}

/// Full-information play: after each slot the cost of every action against
/// the observed request is evaluated and folded into the weights. Only the
/// per-action accumulators are stored.
#[derive(Debug, Clone)]
pub struct FullInformation {
    weights: ExpWeights,
    scratch: Vec<f64>,
}

impl FullInformation {
    pub fn new(space_size: usize, eta: f64) -> Result<Self> {
        Self::discounted(space_size, eta, 1.0)
    }

    pub fn discounted(space_size: usize, eta: f64, discount: f64) -> Result<Self> {
        Ok(Self {
            weights: ExpWeights::new(space_size, eta, discount)?,
            scratch: Vec::with_capacity(space_size),
        })
    }

    pub fn weights(&self) -> &ExpWeights {
        &self.weights
    }
}

impl ReservationPolicy for FullInformation {
    fn distribution(&mut self, _rng: &mut SimRng) -> Distribution {
        self.weights.distribution()
    }

    fn observe(
        &mut self,
        outcome: Observation<'_>,
        costs: &dyn CostEvaluator,
        _rng: &mut SimRng,
    ) -> Result<()> {
        costs.costs_for_all(outcome.request, &mut self.scratch);
        self.weights.update(&self.scratch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_start() {
        let w = ExpWeights::new(125, 0.1, 1.0).unwrap();
        assert_eq!(w.slot(), 1);
        assert!(w.log_weights().iter().all(|&x| x == 0.0));
        assert!(w.distribution().probs().iter().all(|&p| (p - 0.008).abs() < 1e-15));
        let single = ExpWeights::new(1, 0.1, 1.0).unwrap();
        assert_eq!(single.distribution().probs(), &[1.0]);
    }

    #[test]
    fn reference_step_size() {
        assert!((default_eta(125, 10_000) - 0.021_973_424_260_461_32).abs() < 1e-15);
        assert!((default_eta(125, 10_000) - 0.021972).abs() < 5e-6);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ExpWeights::new(0, 0.1, 1.0).is_err());
        assert!(ExpWeights::new(3, 0.0, 1.0).is_err());
        assert!(ExpWeights::new(3, f64::NAN, 1.0).is_err());
        assert!(ExpWeights::new(3, 0.1, 0.0).is_err());
        assert!(ExpWeights::new(3, 0.1, 1.5).is_err());
        let mut w = ExpWeights::new(3, 0.1, 1.0).unwrap();
        assert!(w.update(&[1.0, 2.0]).is_err());
        assert!(w.update(&[1.0, f64::NAN, 0.0]).is_err());
        assert_eq!(w.slot(), 1);
    }

    #[test]
    fn two_action_closed_form() {
        let mut w = ExpWeights::new(2, 1.0, 1.0).unwrap();
        w.update(&[0.0, 1.0]).unwrap();
        let p = w.distribution();
        assert!((p.probs()[0] - 0.7311).abs() < 1e-4);
        assert!((p.probs()[1] - 0.2689).abs() < 1e-4);
        assert_eq!(w.slot(), 2);
    }

    #[test]
    fn discounted_unroll() {
        let mut w = ExpWeights::new(2, 1.0, 0.5).unwrap();
        w.update(&[0.0, 2.0]).unwrap();
        w.update(&[0.0, 0.0]).unwrap();
        assert_eq!(w.accumulated(), &[0.0, 0.5]);
        let p = w.distribution();
        let expected = 1.0 / (1.0 + (-0.5f64).exp());
        assert!((p.probs()[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn constant_cost_keeps_uniform() {
        let mut w = ExpWeights::new(5, 0.3, 1.0).unwrap();
        w.update(&[4.0; 5]).unwrap();
        assert!(w.distribution().probs().iter().all(|&p| (p - 0.2).abs() < 1e-15));
    }

    #[test]
    fn separation_grows_every_slot() {
        let mut w = ExpWeights::new(2, 0.05, 1.0).unwrap();
        let mut prev = w.distribution().probs()[0];
        for _ in 0..200 {
            w.update(&[0.0, 0.7]).unwrap();
            let p = w.distribution().probs()[0];
            assert!(p > prev || p == 1.0);
            prev = p;
        }
    }

    proptest! {
        #[test]
        fn shift_invariance(costs in prop::collection::vec(0.0f64..100.0, 2..20), shift in 0.0f64..50.0) {
            let mut a = ExpWeights::new(costs.len(), 0.2, 1.0).unwrap();
            let mut b = a.clone();
            a.update(&costs).unwrap();
            let shifted: Vec<f64> = costs.iter().map(|c| c + shift).collect();
            b.update(&shifted).unwrap();
            for (p, q) in a.distribution().probs().iter().zip(b.distribution().probs()) {
                prop_assert!((p - q).abs() <= 1e-12);
            }
        }

        #[test]
        fn recursion_matches_direct_sum(
            history in prop::collection::vec(prop::collection::vec(0.0f64..112.5, 4), 1..100),
            discounted in any::<bool>(),
        ) {
            let discount = if discounted { 0.5 } else { 1.0 };
            let eta = 0.021972;
            let mut w = ExpWeights::new(4, eta, discount).unwrap();
            for c in &history {
                w.update(c).unwrap();
            }
            let t = history.len();
            for a in 0..4 {
                let direct: f64 = history
                    .iter()
                    .enumerate()
                    .map(|(s, c)| discount.powi((t - s) as i32) * c[a])
                    .sum();
                prop_assert!((w.log_weights()[a] + eta * direct).abs() <= 1e-9);
            }
        }
    }
}
