use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::model::{RequestBounds, RequestVector};
use crate::SimRng;

/// How request vectors are produced slot by slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioKind {
    /// Each server's request drawn independently and uniformly from its bounds.
    IidUniform,
    /// Whole request vectors drawn i.i.d. from `support` with `weights`.
    IidCategorical {
        support: Vec<Vec<i64>>,
        weights: Vec<f64>,
    },
    /// One request vector held for `period` slots at a time. Blocks cycle
    /// through `blocks`; when empty, every block gets a fresh uniform vector.
    PiecewiseConstant {
        period: usize,
        #[serde(default)]
        blocks: Vec<Vec<i64>>,
    },
}

/// Generator for the scenario's request stream of `seed`.
pub fn scenario_rng(seed: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

/// Generator for a policy's own draws under `seed`, independent of the
/// request stream so that every policy sees the same requests.
pub fn policy_rng(seed: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub horizon: usize,
    pub bounds: RequestBounds,
    pub seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let check = |v: &Vec<i64>, what: &str| {
            let b = RequestVector(v.clone());
            if self.bounds.contains(&b) {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "scenario.{what}: request {v:?} lies outside the request bounds"
                )))
            }
        };
        match &self.kind {
            ScenarioKind::IidUniform => {
                self.bounds.grid()?;
            }
            ScenarioKind::IidCategorical { support, weights } => {
                if support.is_empty() || support.len() != weights.len() {
                    return Err(Error::Config(
                        "scenario.weights: needs one weight per support vector".into(),
                    ));
                }
                if Distribution::from_weights(weights).is_none() {
                    return Err(Error::Config(
                        "scenario.weights: must be nonnegative with a positive sum".into(),
                    ));
                }
                support.iter().try_for_each(|v| check(v, "support"))?;
            }
            ScenarioKind::PiecewiseConstant { period, blocks } => {
                if *period == 0 {
                    return Err(Error::Config("scenario.period: must be at least 1".into()));
                }
                if blocks.is_empty() {
                    self.bounds.grid()?;
                }
                blocks.iter().try_for_each(|v| check(v, "blocks"))?;
            }
        }
        Ok(())
    }

    /// The request stream for this scenario's seed.
    pub fn requests(&self) -> Result<Vec<RequestVector>> {
        self.generate_requests(&mut scenario_rng(self.seed))
    }

    pub fn generate_requests(&self, rng: &mut SimRng) -> Result<Vec<RequestVector>> {
        self.validate()?;
        let uniform = |rng: &mut SimRng| -> Result<RequestVector> {
            let grid = self.bounds.grid()?;
            Ok(RequestVector(
                grid.min()
                    .iter()
                    .zip(grid.max())
                    .map(|(&lo, &hi)| rng.gen_range(lo..=hi))
                    .collect(),
            ))
        };
        let mut out = Vec::with_capacity(self.horizon);
        match &self.kind {
            ScenarioKind::IidUniform => {
                for _ in 0..self.horizon {
                    out.push(uniform(rng)?);
                }
            }
            ScenarioKind::IidCategorical { support, weights } => {
                let dist = Distribution::from_weights(weights).expect("validated");
                for _ in 0..self.horizon {
                    out.push(RequestVector(support[dist.sample(rng)].clone()));
                }
            }
            ScenarioKind::PiecewiseConstant { period, blocks } => {
                let mut current = None;
                for t in 0..self.horizon {
                    if t % period == 0 {
                        let block = t / period;
                        current = Some(if blocks.is_empty() {
                            uniform(rng)?
                        } else {
                            RequestVector(blocks[block % blocks.len()].clone())
                        });
                    }
                    out.push(current.clone().expect("set at t = 0"));
                }
            }
        }
        Ok(out)
    }
}

/// Fingerprint of a request stream; runs are comparable iff they match.
pub fn scenario_hash(requests: &[RequestVector]) -> String {
    let mut hasher = Sha256::new();
    hasher.update((requests.len() as u64).to_le_bytes());
    for b in requests {
        hasher.update((b.0.len() as u64).to_le_bytes());
        for v in &b.0 {
            hasher.update(v.to_le_bytes());
        }
    }
    hex::encode(hasher.finalize())
}
