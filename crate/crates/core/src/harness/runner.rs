use std::collections::HashMap;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::ledger::RegretLedger;
use super::scenario::{policy_rng, scenario_hash, Scenario, ScenarioKind};
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::ew_policy::{FullInformation, RandomExploration};
use crate::model::{
    theta_bound, ActionSpace, CostBreakdown, CostEvaluator, CostModel, CostTable, ExactCosts,
    RequestBounds,
};
use crate::policy::{Observation, ReservationPolicy};
use crate::rl_policy::SoftmaxBandit;

/// A fully resolved policy with every parameter explicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    EwFull {
        eta: f64,
    },
    EwDiscounted {
        eta: f64,
        discount: f64,
    },
    EwExplore {
        eta: f64,
        budget: usize,
        placeholder_redraw: bool,
    },
    RlBandit {
        beta: f64,
        tau: f64,
        q_init: f64,
    },
}

impl PolicySpec {
    /// Short name used in output file names.
    pub fn label(&self) -> String {
        match self {
            PolicySpec::EwFull { .. } => "ew_full".into(),
            PolicySpec::EwDiscounted { .. } => "ew_discounted".into(),
            PolicySpec::EwExplore { budget, .. } => format!("ew_explore_k{budget}"),
            PolicySpec::RlBandit { .. } => "rl_bandit".into(),
        }
    }

    pub fn build(&self, space_size: usize, theta: f64) -> Result<Box<dyn ReservationPolicy>> {
        Ok(match *self {
            PolicySpec::EwFull { eta } => Box::new(FullInformation::new(space_size, eta)?),
            PolicySpec::EwDiscounted { eta, discount } => {
                Box::new(FullInformation::discounted(space_size, eta, discount)?)
            }
            PolicySpec::EwExplore {
                eta,
                budget,
                placeholder_redraw,
            } => Box::new(RandomExploration::new(
                space_size,
                eta,
                theta,
                budget,
                placeholder_redraw,
            )?),
            PolicySpec::RlBandit { beta, tau, q_init } => {
                Box::new(SoftmaxBandit::new(space_size, beta, tau, q_init)?)
            }
        })
    }
}

/// How `C(a, b)` is obtained during a run. Both give identical values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluatorKind {
    /// Solve the transfer problem on every evaluation.
    #[default]
    Solve,
    /// Look up a precomputed table over the bounded request space.
    Table,
}

/// One slot of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRow {
    pub t: usize,
    pub action: usize,
    pub reservation: Vec<i64>,
    pub request: Vec<i64>,
    pub cost: CostBreakdown,
    pub regret: f64,
    /// `||P^t - P^{t-1}||_2`; zero on the first slot.
    pub p_dist: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub scenario: Duration,
    /// Hindsight costs of every action, for the regret ledger.
    pub ledger: Duration,
    /// Selection, payment and policy updates.
    pub policy: Duration,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub label: String,
    pub seed: u64,
    pub policy: PolicySpec,
    pub scenario_hash: String,
    pub rows: Vec<StepRow>,
    pub timings: PhaseTimings,
    pub hindsight_best: (usize, f64),
    /// `max_t |sum P^t - 1|`.
    pub max_mass_error: f64,
    pub ledger: RegretLedger,
}

impl RunRecord {
    pub fn final_regret(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.regret)
    }

    pub fn regret_at(&self, t: usize) -> Option<f64> {
        t.checked_sub(1).and_then(|i| self.rows.get(i)).map(|r| r.regret)
    }

    pub fn p_dists(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.p_dist).collect()
    }
}

/// A network instance, cost model and request scenario over a fixed horizon;
/// runs differ only in policy and seed.
#[derive(Debug)]
pub struct Experiment {
    pub space: ActionSpace,
    pub bounds: RequestBounds,
    pub model: CostModel,
    pub scenario: ScenarioKind,
    pub horizon: usize,
    theta: f64,
    table: OnceLock<CostTable>,
}

impl Experiment {
    /// Computes the exact cost bound up front; the request bounds must be
    /// finite.
    pub fn new(
        space: ActionSpace,
        bounds: RequestBounds,
        model: CostModel,
        scenario: ScenarioKind,
        horizon: usize,
    ) -> Result<Self> {
        if model.n_servers() != space.n_servers() || bounds.min.len() != space.n_servers() {
            return Err(Error::DimensionMismatch {
                expected: space.n_servers(),
                got: model.n_servers().min(bounds.min.len()),
            });
        }
        let theta = theta_bound(&space, &bounds, &model)?;
        let experiment = Self {
            space,
            bounds,
            model,
            scenario,
            horizon,
            theta,
            table: OnceLock::new(),
        };
        experiment.scenario_for(0).validate()?;
        Ok(experiment)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn space_size(&self) -> usize {
        self.space.cardinality()
    }

    pub fn scenario_for(&self, seed: u64) -> Scenario {
        Scenario {
            kind: self.scenario.clone(),
            horizon: self.horizon,
            bounds: self.bounds.clone(),
            seed,
        }
    }

    pub fn cost_table(&self) -> Result<&CostTable> {
        if let Some(table) = self.table.get() {
            return Ok(table);
        }
        let table = CostTable::build(&self.space, &self.bounds, &self.model)?;
        Ok(self.table.get_or_init(|| table))
    }

    /// Executes the reserve / observe / transfer / pay loop for `horizon`
    /// slots.
    pub fn run(&self, policy: &PolicySpec, seed: u64, evaluator: EvaluatorKind) -> Result<RunRecord> {
        match evaluator {
            EvaluatorKind::Solve => self.run_with(policy, seed, &ExactCosts::new(&self.space, &self.model)),
            EvaluatorKind::Table => self.run_with(policy, seed, self.cost_table()?),
        }
    }

    pub fn run_with(
        &self,
        spec: &PolicySpec,
        seed: u64,
        costs: &dyn CostEvaluator,
    ) -> Result<RunRecord> {
        let mut timings = PhaseTimings::default();
        let clock = Instant::now();
        let requests = self.scenario_for(seed).requests()?;
        let hash = scenario_hash(&requests);
        timings.scenario = clock.elapsed();

        let size = self.space_size();
        let mut policy = spec.build(size, self.theta)?;
        let mut rng = policy_rng(seed);
        let mut ledger = RegretLedger::new(size);
        let mut hindsight_rows: HashMap<&[i64], Vec<f64>> = HashMap::new();
        let mut previous: Option<Distribution> = None;
        let mut max_mass_error = 0.0f64;
        let mut rows = Vec::with_capacity(requests.len());

        for (i, request) in requests.iter().enumerate() {
            let clock = Instant::now();
            let dist = policy.distribution(&mut rng);
            let action = dist.sample(&mut rng);
            let cost = costs.cost(action, request);
            policy.observe(
                Observation {
                    action,
                    request,
                    cost,
                },
                costs,
                &mut rng,
            )?;
            timings.policy += clock.elapsed();

            let p_dist = previous.as_ref().map_or(0.0, |q| dist.l2_distance(q));
            max_mass_error = max_mass_error.max((dist.total_mass() - 1.0).abs());
            previous = Some(dist);

            let clock = Instant::now();
            let row = hindsight_rows.entry(request.as_slice()).or_insert_with(|| {
                let mut row = Vec::with_capacity(size);
                costs.costs_for_all(request, &mut row);
                row
            });
            let regret = ledger.record(row, cost.total);
            timings.ledger += clock.elapsed();

            rows.push(StepRow {
                t: i + 1,
                action,
                reservation: self.space.decode(action)?.0,
                request: request.0.clone(),
                cost,
                regret,
                p_dist,
            });
        }

        Ok(RunRecord {
            label: spec.label(),
            seed,
            policy: spec.clone(),
            scenario_hash: hash,
            rows,
            timings,
            hindsight_best: ledger.hindsight_best(),
            max_mass_error,
            ledger,
        })
    }
}
