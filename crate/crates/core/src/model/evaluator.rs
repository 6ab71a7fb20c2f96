use super::{total_cost, ActionSpace, CostBreakdown, CostModel, IntBox, RequestBounds, RequestVector};
use crate::error::Result;

/// Per-slot cost oracle `C(a, b)` with `a` addressed by its action index.
///
/// Implementations must return bit-identical values for the same inputs so
/// that runs do not depend on which evaluator backs them.
pub trait CostEvaluator: Sync {
    fn space(&self) -> &ActionSpace;

    fn cost(&self, action: usize, request: &RequestVector) -> CostBreakdown;

    /// Totals for every action, written in index order.
    fn costs_for_all(&self, request: &RequestVector, out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..self.space().cardinality()).map(|a| self.cost(a, request).total));
    }
}

/// Solves the transfer problem afresh on every call.
#[derive(Debug, Clone)]
pub struct ExactCosts<'a> {
    space: &'a ActionSpace,
    model: &'a CostModel,
    actions: Vec<super::ReservationVector>,
}

impl<'a> ExactCosts<'a> {
    pub fn new(space: &'a ActionSpace, model: &'a CostModel) -> Self {
        Self {
            space,
            model,
            actions: space.actions().collect(),
        }
    }
}

impl CostEvaluator for ExactCosts<'_> {
    fn space(&self) -> &ActionSpace {
        self.space
    }

    fn cost(&self, action: usize, request: &RequestVector) -> CostBreakdown {
        total_cost(&self.actions[action], request, self.model)
    }
}

/// Every `C(a, b)` over the bounded request space, precomputed with the
/// exact solver. Requests outside the table fall back to a fresh solve.
#[derive(Debug, Clone)]
pub struct CostTable {
    space: ActionSpace,
    model: CostModel,
    requests: IntBox,
    // request-major: entries[b * |A| + a]
    entries: Vec<CostBreakdown>,
}

impl CostTable {
    pub fn build(space: &ActionSpace, bounds: &RequestBounds, model: &CostModel) -> Result<Self> {
        let requests = bounds.grid()?;
        let actions: Vec<_> = space.actions().collect();
        let mut entries = Vec::with_capacity(requests.cardinality() * actions.len());
        for b in requests.iter() {
            let b = RequestVector(b);
            entries.extend(actions.iter().map(|a| total_cost(a, &b, model)));
        }
        Ok(Self {
            space: space.clone(),
            model: model.clone(),
            requests,
            entries,
        })
    }

    fn row(&self, request: &RequestVector) -> Option<&[CostBreakdown]> {
        let b = self.requests.encode(&request.0).ok()?;
        let width = self.space.cardinality();
        Some(&self.entries[b * width..(b + 1) * width])
    }
}

impl CostEvaluator for CostTable {
    fn space(&self) -> &ActionSpace {
        &self.space
    }

    fn cost(&self, action: usize, request: &RequestVector) -> CostBreakdown {
        match self.row(request) {
            Some(row) => row[action],
            None => {
                let a = self.space.decode(action).expect("action index in range");
                total_cost(&a, request, &self.model)
            }
        }
    }

    fn costs_for_all(&self, request: &RequestVector, out: &mut Vec<f64>) {
        out.clear();
        match self.row(request) {
            Some(row) => out.extend(row.iter().map(|c| c.total)),
            None => out.extend(
                self.space
                    .actions()
                    .map(|a| total_cost(&a, request, &self.model).total),
            ),
        }
    }
}
