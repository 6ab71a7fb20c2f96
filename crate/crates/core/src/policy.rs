//! Interface shared by every reservation policy the harness can drive.

use crate::distribution::Distribution;
use crate::error::Result;
use crate::model::{CostBreakdown, CostEvaluator, RequestVector};
use crate::SimRng;

/// What the operator learns at the end of a slot.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    pub action: usize,
    pub request: &'a RequestVector,
    /// Cost paid for `action` against `request`.
    pub cost: CostBreakdown,
}

pub trait ReservationPolicy {
    /// Selection distribution for the current slot.
    fn distribution(&mut self, rng: &mut SimRng) -> Distribution;

    /// Feeds back the slot outcome; `costs` is the policy's cost oracle.
    fn observe(
        &mut self,
        outcome: Observation<'_>,
        costs: &dyn CostEvaluator,
        rng: &mut SimRng,
    ) -> Result<()>;
}
