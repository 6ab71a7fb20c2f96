//! Simulation harness: request scenarios, the regret ledger and the
//! per-slot run loop.

mod ledger;
mod runner;
mod scenario;

pub use ledger::RegretLedger;
pub use runner::{EvaluatorKind, Experiment, PhaseTimings, PolicySpec, RunRecord, StepRow};
pub use scenario::{policy_rng, scenario_hash, scenario_rng, Scenario, ScenarioKind};

use crate::error::{Error, Result};

/// High-probability regret bound of the full-information policy:
/// `(9 theta^2 / 8 + 1) sqrt(T ln|A|) + 3 theta sqrt(ln(1/delta) T / 2)`.
pub fn regret_bound(horizon: usize, theta: f64, space_size: usize, delta: f64) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::param("horizon", "must be at least 1"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", format!("must lie in (0, 1), got {delta}")));
    }
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::param("theta", format!("must be finite and nonnegative, got {theta}")));
    }
    if space_size == 0 {
        return Err(Error::param("space_size", "must be at least 1"));
    }
    let t = horizon as f64;
    let log_a = (space_size as f64).ln();
    Ok((9.0 * theta * theta / 8.0 + 1.0) * (t * log_a).sqrt()
        + 3.0 * theta * (0.5 * (1.0 / delta).ln() * t).sqrt())
}

/// First 1-based slot `t` such that `values[t-1..t-1+window]` all lie
/// strictly below `threshold`.
pub fn first_sustained_crossing(values: &[f64], threshold: f64, window: usize) -> Option<usize> {
    if window == 0 {
        return Some(1);
    }
    let mut run = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < threshold {
            run += 1;
            if run == window {
                return Some(i + 2 - window);
            }
        } else {
            run = 0;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_reference_value() {
        let b = regret_bound(10_000, 37.5, 125, 0.05).unwrap();
        assert!((b - 361_614.748_660_763_7).abs() < 1e-6);
    }

    #[test]
    fn bound_rejects_bad_inputs() {
        assert!(regret_bound(10, 1.0, 4, 1.0).is_err());
        assert!(regret_bound(10, 1.0, 4, 0.0).is_err());
        assert!(regret_bound(0, 1.0, 4, 0.5).is_err());
        assert!(regret_bound(10, f64::NAN, 4, 0.5).is_err());
    }

    #[test]
    fn single_action_zero_theta() {
        assert_eq!(regret_bound(100, 0.0, 1, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn sustained_crossing() {
        let v = [1.0, 0.1, 0.1, 1.0, 0.1, 0.1, 0.1, 0.1];
        assert_eq!(first_sustained_crossing(&v, 0.5, 3), Some(5));
        assert_eq!(first_sustained_crossing(&v, 0.5, 2), Some(2));
        assert_eq!(first_sustained_crossing(&v, 0.5, 5), None);
        assert_eq!(first_sustained_crossing(&v, 0.1, 1), None);
    }
}
