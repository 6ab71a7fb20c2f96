//! Action and request spaces, cost families and per-slot cost evaluation.

mod cost;
mod evaluator;
mod space;

use serde::{Deserialize, Serialize};

pub use cost::{CostModel, Polynomial};
pub use evaluator::{CostEvaluator, CostTable, ExactCosts};
pub use space::{ActionSpace, IntBox, RequestBounds, RequestVector, ReservationVector};

use crate::error::Result;
use crate::transfer;

/// Cost paid in one slot, split by component.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub reservation: f64,
    pub transfer: f64,
    pub violation: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn new(reservation: f64, transfer: f64, violation: f64) -> Self {
        Self {
            reservation,
            transfer,
            violation,
            total: reservation + transfer + violation,
        }
    }
}

/// `sum_n f^R_n(a[n])`.
pub fn reservation_cost(a: &ReservationVector, model: &CostModel) -> f64 {
    a.0.iter()
        .enumerate()
        .map(|(n, &v)| model.reservation_fn(n).eval(v.max(0) as u64))
        .sum()
}

/// Reservation cost plus the transfer and violation costs of the optimal
/// transfer plan for `(a, b)`.
pub fn total_cost(a: &ReservationVector, b: &RequestVector, model: &CostModel) -> CostBreakdown {
    let reservation = reservation_cost(a, model);
    let solution = transfer::solve_transfer(a, b, model);
    CostBreakdown::new(reservation, solution.transfer_cost, solution.violation_cost)
}

/// Exact uniform bound on the magnitude of each cost component over every
/// (reservation, request) pair, by exhaustive enumeration.
pub fn theta_bound(space: &ActionSpace, bounds: &RequestBounds, model: &CostModel) -> Result<f64> {
    let requests = bounds.grid()?;
    let mut theta = 0.0f64;
    for a in space.actions() {
        theta = theta.max(reservation_cost(&a, model));
        for b in requests.iter() {
            let s = transfer::solve_transfer(&a, &RequestVector(b), model);
            theta = theta.max(s.transfer_cost).max(s.violation_cost);
        }
    }
    Ok(theta)
}

/// The three-server instance used throughout the experiments: reservations
/// and requests in `1..=5`, `0.5 x^2` reservation and violation costs, and
/// `0.2 x^2` / `0.3 x^2` link transfer costs (`0.3` between servers 1 and 3).
pub fn three_server_instance() -> (ActionSpace, RequestBounds, CostModel) {
    let space = ActionSpace::uniform(3, 1, 5).expect("valid space");
    let bounds = RequestBounds::new(vec![1; 3], Some(vec![5; 3])).expect("valid bounds");
    let half = Polynomial::quadratic(0.5).expect("valid");
    let near = Polynomial::quadratic(0.2).expect("valid");
    let far = Polynomial::quadratic(0.3).expect("valid");
    let zero = Polynomial::zero();
    let transfer = vec![
        vec![zero.clone(), near.clone(), far.clone()],
        vec![near.clone(), zero.clone(), near.clone()],
        vec![far, near, zero],
    ];
    let model = CostModel::new(vec![half.clone(); 3], vec![half; 3], transfer).expect("valid model");
    (space, bounds, model)
}
