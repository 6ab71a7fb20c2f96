//! Budget-limited exponential weights with random exploration.
//!
//! Only `K` costs `C(a, b^s)` may be evaluated per slot: the cost actually
//! paid plus `K - 1` combinations drawn uniformly from those never evaluated.
//! Every missing combination is stood in for by a placeholder drawn
//! uniformly from `[0, 3 Theta]`. A placeholder is drawn the first time its
//! combination enters the weights and kept until the real cost replaces it;
//! `placeholder_redraw` instead redraws every placeholder on every slot.

use rand::Rng;

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::model::{CostEvaluator, RequestVector};
use crate::policy::{Observation, ReservationPolicy};
use crate::SimRng;

const NOT_POOLED: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CachedCost {
    Pending,
    Placeholder(f64),
    Evaluated(f64),
}

/// Per-(action, slot) costs, evaluated or stood in for.
#[derive(Debug, Clone)]
pub struct CostCache {
    width: usize,
    // slot-major: slot * width + action
    entries: Vec<CachedCost>,
    evaluated_sum: Vec<f64>,
    placeholder_sum: Vec<f64>,
    // combinations not yet evaluated, with their position in `pool`
    pool: Vec<usize>,
    pool_pos: Vec<usize>,
}

impl CostCache {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            entries: Vec::new(),
            evaluated_sum: vec![0.0; width],
            placeholder_sum: vec![0.0; width],
            pool: Vec::new(),
            pool_pos: Vec::new(),
        }
    }

    pub fn n_slots(&self) -> usize {
        self.entries.len() / self.width
    }

    pub fn get(&self, action: usize, slot: usize) -> Option<CachedCost> {
        self.entries.get(slot * self.width + action).copied()
    }

    pub fn unevaluated(&self) -> usize {
        self.pool.len()
    }

    pub fn evaluated_count(&self) -> usize {
        self.entries.len() - self.pool.len()
    }

    /// Incrementally maintained `sum_s C(a, b^s)` over evaluated entries.
    pub fn evaluated_sums(&self) -> &[f64] {
        &self.evaluated_sum
    }

    /// Evaluated costs plus current placeholders, per action.
    pub fn estimated_sums(&self) -> Vec<f64> {
        self.evaluated_sum
            .iter()
            .zip(&self.placeholder_sum)
            .map(|(e, p)| e + p)
            .collect()
    }

    /// Largest gap between the incremental evaluated sums and a recount
    /// from the stored entries.
    pub fn audit(&self) -> f64 {
        let mut recount = vec![0.0; self.width];
        for (k, entry) in self.entries.iter().enumerate() {
            if let CachedCost::Evaluated(c) = entry {
                recount[k % self.width] += c;
            }
        }
        recount
            .iter()
            .zip(&self.evaluated_sum)
            .map(|(r, s)| (r - s).abs())
            .fold(0.0, f64::max)
    }

    /// Adds a slot whose combinations are all pending; returns its index.
    pub fn open_slot(&mut self) -> usize {
        let slot = self.n_slots();
        let base = self.entries.len();
        for k in base..base + self.width {
            self.entries.push(CachedCost::Pending);
            self.pool_pos.push(self.pool.len());
            self.pool.push(k);
        }
        slot
    }

    fn record(&mut self, combo: usize, cost: f64) {
        let action = combo % self.width;
        match self.entries[combo] {
            CachedCost::Evaluated(_) => return,
            CachedCost::Placeholder(z) => self.placeholder_sum[action] -= z,
            CachedCost::Pending => {}
        }
        self.entries[combo] = CachedCost::Evaluated(cost);
        self.evaluated_sum[action] += cost;
        let pos = self.pool_pos[combo];
        self.pool.swap_remove(pos);
        if let Some(&moved) = self.pool.get(pos) {
            self.pool_pos[moved] = pos;
        }
        self.pool_pos[combo] = NOT_POOLED;
    }

    pub fn insert(&mut self, action: usize, slot: usize, cost: f64) {
        self.record(slot * self.width + action, cost);
    }

    fn draw(range: f64, rng: &mut SimRng) -> f64 {
        if range > 0.0 {
            rng.gen::<f64>() * range
        } else {
            0.0
        }
    }

    /// Gives every pending combination of `slot` a placeholder in `[0, range)`.
    pub fn fill_placeholders(&mut self, slot: usize, range: f64, rng: &mut SimRng) {
        for action in 0..self.width {
            let k = slot * self.width + action;
            if self.entries[k] == CachedCost::Pending {
                let z = Self::draw(range, rng);
                self.entries[k] = CachedCost::Placeholder(z);
                self.placeholder_sum[action] += z;
            }
        }
    }

    /// Fresh placeholders for every unevaluated combination, in slot order.
    pub fn redraw_placeholders(&mut self, range: f64, rng: &mut SimRng) {
        self.placeholder_sum.fill(0.0);
        for k in 0..self.entries.len() {
            if !matches!(self.entries[k], CachedCost::Evaluated(_)) {
                let z = Self::draw(range, rng);
                self.entries[k] = CachedCost::Placeholder(z);
                self.placeholder_sum[k % self.width] += z;
            }
        }
    }

    /// Evaluates up to `count` unevaluated combinations drawn uniformly
    /// without replacement; `cost(action, slot)` supplies the value. When
    /// fewer remain, all of them are evaluated without consuming
    /// randomness.
    pub fn explore<F>(&mut self, count: usize, rng: &mut SimRng, mut cost: F)
    where
        F: FnMut(usize, usize) -> f64,
    {
        if count >= self.pool.len() {
            while let Some(&k) = self.pool.last() {
                let c = cost(k % self.width, k / self.width);
                self.record(k, c);
            }
            return;
        }
        for _ in 0..count {
            let k = self.pool[rng.gen_range(0..self.pool.len())];
            let c = cost(k % self.width, k / self.width);
            self.record(k, c);
        }
    }
}

/// Random-exploration variant of the exponentially weighted policy.
#[derive(Debug, Clone)]
pub struct RandomExploration {
    eta: f64,
    placeholder_range: f64,
    budget: usize,
    redraw: bool,
    cache: CostCache,
    history: Vec<RequestVector>,
}

impl RandomExploration {
    /// `theta` is the uniform per-component cost bound; placeholders are
    /// drawn from `[0, 3 theta]`.
    pub fn new(space_size: usize, eta: f64, theta: f64, budget: usize, redraw: bool) -> Result<Self> {
        if space_size == 0 {
            return Err(Error::param("space_size", "must be at least 1"));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::param("eta", format!("must be positive and finite, got {eta}")));
        }
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::param("theta", format!("must be finite and nonnegative, got {theta}")));
        }
        if budget == 0 {
            return Err(Error::param("budget", "at least one evaluation per slot is required"));
        }
        Ok(Self {
            eta,
            placeholder_range: 3.0 * theta,
            budget,
            redraw,
            cache: CostCache::new(space_size),
            history: Vec::new(),
        })
    }

    pub fn cache(&self) -> &CostCache {
        &self.cache
    }

    pub fn budget(&self) -> usize {
        self.budget
    }
}

impl ReservationPolicy for RandomExploration {
    fn distribution(&mut self, rng: &mut SimRng) -> Distribution {
        if self.redraw {
            self.cache.redraw_placeholders(self.placeholder_range, rng);
        } else if let Some(last) = self.cache.n_slots().checked_sub(1) {
            self.cache.fill_placeholders(last, self.placeholder_range, rng);
        }
        let log_weights: Vec<f64> = self
            .cache
            .estimated_sums()
            .iter()
            .map(|s| -self.eta * s)
            .collect();
        Distribution::from_log_weights(&log_weights)
    }

    fn observe(
        &mut self,
        outcome: Observation<'_>,
        costs: &dyn CostEvaluator,
        rng: &mut SimRng,
    ) -> Result<()> {
        self.history.push(outcome.request.clone());
        let slot = self.cache.open_slot();
        self.cache.insert(outcome.action, slot, outcome.cost.total);
        let history = &self.history;
        self.cache.explore(self.budget - 1, rng, |action, s| {
            costs.cost(action, &history[s]).total
        });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn cache_bookkeeping() {
        let mut rng = SimRng::seed_from_u64(1);
        let mut cache = CostCache::new(3);
        assert_eq!(cache.open_slot(), 0);
        assert_eq!(cache.unevaluated(), 3);
        cache.insert(1, 0, 2.5);
        assert_eq!(cache.unevaluated(), 2);
        cache.fill_placeholders(0, 10.0, &mut rng);
        let z = match cache.get(0, 0).unwrap() {
            CachedCost::Placeholder(z) => z,
            other => panic!("expected placeholder, got {other:?}"),
        };
        assert!((0.0..10.0).contains(&z));
        assert_eq!(cache.get(1, 0), Some(CachedCost::Evaluated(2.5)));
        assert_eq!(cache.estimated_sums()[0], z);
        cache.insert(0, 0, 1.0);
        assert_eq!(cache.estimated_sums()[0], 1.0);
        assert_eq!(cache.evaluated_sums(), &[1.0, 2.5, 0.0]);
        // Re-inserting an evaluated combination is a no-op.
        cache.insert(0, 0, 99.0);
        assert_eq!(cache.evaluated_sums()[0], 1.0);
        assert_eq!(cache.audit(), 0.0);
        assert_eq!(cache.evaluated_count(), 2);
    }

    #[test]
    fn exploration_is_without_replacement() {
        let mut rng = SimRng::seed_from_u64(9);
        let mut cache = CostCache::new(5);
        for _ in 0..4 {
            cache.open_slot();
        }
        let mut seen = Vec::new();
        cache.explore(12, &mut rng, |a, s| {
            seen.push((a, s));
            (a + 10 * s) as f64
        });
        let mut unique = seen.clone();
        unique.sort();
        unique.dedup();
        assert_eq!(unique.len(), 12);
        assert!(seen.iter().all(|&(a, s)| a < 5 && s < 4));
        assert_eq!(cache.unevaluated(), 8);
        let untouched = rng.clone();
        cache.explore(100, &mut rng, |a, s| (a + 10 * s) as f64);
        assert_eq!(cache.unevaluated(), 0);
        assert_eq!(rng, untouched);
        assert_eq!(cache.audit(), 0.0);
        assert_eq!(cache.evaluated_sums(), &[60.0, 64.0, 68.0, 72.0, 76.0]);
    }

    #[test]
    fn redraw_replaces_every_placeholder() {
        let mut rng = SimRng::seed_from_u64(4);
        let mut cache = CostCache::new(2);
        cache.open_slot();
        cache.open_slot();
        cache.insert(0, 0, 3.0);
        cache.redraw_placeholders(5.0, &mut rng);
        let before: Vec<_> = (0..2).flat_map(|s| (0..2).map(move |a| (a, s))).map(|(a, s)| cache.get(a, s)).collect();
        cache.redraw_placeholders(5.0, &mut rng);
        let after: Vec<_> = (0..2).flat_map(|s| (0..2).map(move |a| (a, s))).map(|(a, s)| cache.get(a, s)).collect();
        assert_eq!(before[0], Some(CachedCost::Evaluated(3.0)));
        assert_eq!(after[0], before[0]);
        assert_ne!(before[1..], after[1..]);
        let expected: f64 = after[1..]
            .iter()
            .filter_map(|e| match e {
                Some(CachedCost::Placeholder(z)) => Some(*z),
                _ => None,
            })
            .sum();
        let sums = cache.estimated_sums();
        assert!((sums[0] + sums[1] - 3.0 - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_range_draws_nothing() {
        let mut rng = SimRng::seed_from_u64(5);
        let reference = SimRng::seed_from_u64(5);
        let mut cache = CostCache::new(4);
        cache.open_slot();
        cache.fill_placeholders(0, 0.0, &mut rng);
        assert_eq!(cache.estimated_sums(), vec![0.0; 4]);
        assert_eq!(rng, reference);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(RandomExploration::new(0, 0.1, 1.0, 5, false).is_err());
        assert!(RandomExploration::new(5, -0.1, 1.0, 5, false).is_err());
        assert!(RandomExploration::new(5, 0.1, -1.0, 5, false).is_err());
        assert!(RandomExploration::new(5, 0.1, 1.0, 0, false).is_err());
    }
}
