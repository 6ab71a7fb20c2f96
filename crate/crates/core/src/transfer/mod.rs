//! Optimal per-slot job transfers.
//!
//! After requests `b` meet reservations `a`, server `n` has a deficit
//! `(b[n] - a[n])^+` and server `m` a surplus `(a[m] - b[m])^+`. A plan moves
//! `delta[n][m]` jobs from deficit servers to surplus servers, paying
//! `f^T_{n,m}(delta[n][m])` per link and `f^V_n` on whatever deficit is left.
//! Neither a sender's outflow nor a receiver's inflow may exceed its deficit
//! or surplus.

mod brute;
mod flow;

use serde::{Deserialize, Serialize};

pub use brute::{brute_force_transfer, DEFAULT_ORACLE_LIMIT};

use crate::model::{CostModel, RequestVector, ReservationVector};
use flow::Bipartite;

/// Row-major `N x N` matrix of jobs moved from server `n` (row) to `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransferPlan {
    n: usize,
    delta: Vec<u32>,
}

impl TransferPlan {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            delta: vec![0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Self {
        let n = rows.len();
        Self {
            n,
            delta: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn n_servers(&self) -> usize {
        self.n
    }

    pub fn get(&self, from: usize, to: usize) -> u32 {
        self.delta[from * self.n + to]
    }

    pub fn set(&mut self, from: usize, to: usize, jobs: u32) {
        self.delta[from * self.n + to] = jobs;
    }

    /// Row-major entries; plans compare lexicographically on this slice.
    pub fn flattened(&self) -> &[u32] {
        &self.delta
    }

    pub fn outflow(&self, from: usize) -> u32 {
        self.delta[from * self.n..(from + 1) * self.n].iter().sum()
    }

    pub fn inflow(&self, to: usize) -> u32 {
        (0..self.n).map(|n| self.get(n, to)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.delta.iter().all(|&d| d == 0)
    }

    /// Checks the diagonal, per-edge and aggregate caps against `(a, b)`.
    pub fn is_feasible(&self, a: &ReservationVector, b: &RequestVector) -> bool {
        let (deficit, surplus) = imbalance(a, b);
        if deficit.len() != self.n {
            return false;
        }
        (0..self.n).all(|n| {
            self.get(n, n) == 0
                && self.outflow(n) <= deficit[n]
                && self.inflow(n) <= surplus[n]
                && (0..self.n).all(|m| self.get(n, m) <= deficit[n].min(surplus[m]))
        })
    }
}

/// An optimal plan and its cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferSolution {
    pub plan: TransferPlan,
    pub transfer_cost: f64,
    pub violation_cost: f64,
    pub objective: f64,
}

impl TransferSolution {
    fn from_plan(plan: TransferPlan, a: &ReservationVector, b: &RequestVector, model: &CostModel) -> Self {
        let (transfer_cost, violation_cost) = evaluate_plan(&plan, a, b, model);
        Self {
            plan,
            transfer_cost,
            violation_cost,
            objective: transfer_cost + violation_cost,
        }
    }
}

/// Per-server `(deficit, surplus)`.
pub fn imbalance(a: &ReservationVector, b: &RequestVector) -> (Vec<u32>, Vec<u32>) {
    a.0.iter()
        .zip(&b.0)
        .map(|(&a, &b)| ((b - a).max(0) as u32, (a - b).max(0) as u32))
        .unzip()
}

/// Transfer and violation cost of an arbitrary plan. The violation argument
/// is clamped at zero.
pub fn evaluate_plan(
    plan: &TransferPlan,
    a: &ReservationVector,
    b: &RequestVector,
    model: &CostModel,
) -> (f64, f64) {
    let n = plan.n_servers();
    let mut transfer = 0.0;
    for from in 0..n {
        for to in 0..n {
            let d = plan.get(from, to);
            if from != to && d > 0 {
                transfer += model.transfer_fn(from, to).eval(u64::from(d));
            }
        }
    }
    let mut violation = 0.0;
    for s in 0..n {
        let unserved = b.0[s] - a.0[s] - i64::from(plan.outflow(s));
        if unserved > 0 {
            violation += model.violation_fn(s).eval(unserved as u64);
        }
    }
    (transfer, violation)
}

/// Objectives within this distance of the optimum count as ties.
pub(crate) fn tie_tolerance(optimum: f64) -> f64 {
    1e-9 * optimum.abs().max(1.0)
}

/// Exact minimum-cost transfer plan for `(a, b)`.
///
/// Among optimal plans the lexicographically smallest flattened matrix is
/// returned: the flow optimum fixes the target objective, then each edge in
/// row-major order is pinned to the smallest value that still admits an
/// optimal completion.
pub fn solve_transfer(a: &ReservationVector, b: &RequestVector, model: &CostModel) -> TransferSolution {
    let n = model.n_servers();
    let (deficit, surplus) = imbalance(a, b);
    let senders: Vec<_> = (0..n).filter(|&s| deficit[s] > 0).map(|s| (s, deficit[s])).collect();
    let receivers: Vec<_> = (0..n).filter(|&r| surplus[r] > 0).map(|r| (r, surplus[r])).collect();
    if senders.is_empty() || receivers.is_empty() {
        return TransferSolution::from_plan(TransferPlan::zero(n), a, b, model);
    }

    let graph = Bipartite {
        model,
        senders,
        receivers,
    };
    let to_plan = |flows: &[u32]| {
        let mut plan = TransferPlan::zero(n);
        let width = graph.receivers.len();
        for (e, &f) in flows.iter().enumerate() {
            plan.set(graph.senders[e / width].0, graph.receivers[e % width].0, f);
        }
        plan
    };
    let objective = |flows: &[u32]| {
        let (t, v) = evaluate_plan(&to_plan(flows), a, b, model);
        t + v
    };

    let mut pinned = vec![None; graph.n_edges()];
    let mut best = graph.solve(&pinned).expect("unpinned instance is feasible");
    let limit = {
        let optimum = objective(&best);
        optimum + tie_tolerance(optimum)
    };
    for e in 0..graph.n_edges() {
        for v in 0..best[e] {
            pinned[e] = Some(v);
            if let Some(flows) = graph.solve(&pinned) {
                if objective(&flows) <= limit {
                    best = flows;
                    break;
                }
            }
        }
        pinned[e] = Some(best[e]);
    }

    let solution = TransferSolution::from_plan(to_plan(&best), a, b, model);
    debug_assert!(solution.plan.is_feasible(a, b));
    solution
}
