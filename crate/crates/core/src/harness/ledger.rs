/// Cumulative hindsight costs of every fixed action alongside the cost the
/// policy actually paid.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretLedger {
    cumulative: Vec<f64>,
    incurred: f64,
    curve: Vec<f64>,
}

impl RegretLedger {
    pub fn new(space_size: usize) -> Self {
        Self {
            cumulative: vec![0.0; space_size],
            incurred: 0.0,
            curve: Vec::new(),
        }
    }

    /// Adds one slot: `costs[a] = C(a, b^t)` for every action and the cost
    /// paid. Returns the regret over the prefix so far.
    pub fn record(&mut self, costs: &[f64], paid: f64) -> f64 {
        assert_eq!(costs.len(), self.cumulative.len());
        for (sum, c) in self.cumulative.iter_mut().zip(costs) {
            *sum += c;
        }
        self.incurred += paid;
        let regret = self.incurred - self.hindsight_best().1;
        self.curve.push(regret);
        regret
    }

    /// Best fixed action for the slots recorded so far; ties go to the
    /// lowest index.
    pub fn hindsight_best(&self) -> (usize, f64) {
        let mut best = (0, self.cumulative[0]);
        for (a, &c) in self.cumulative.iter().enumerate().skip(1) {
            if c < best.1 {
                best = (a, c);
            }
        }
        best
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn incurred(&self) -> f64 {
        self.incurred
    }

    /// `R_t` for `t = 1..=slots`.
    pub fn curve(&self) -> &[f64] {
        &self.curve
    }

    pub fn regret(&self) -> f64 {
        self.curve.last().copied().unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_ledger() {
        let ledger = RegretLedger::new(4);
        assert_eq!(ledger.hindsight_best(), (0, 0.0));
        assert_eq!(ledger.regret(), 0.0);
    }

    #[test]
    fn regret_against_prefix_minimum() {
        let mut ledger = RegretLedger::new(3);
        assert_eq!(ledger.record(&[3.0, 1.0, 2.0], 3.0), 2.0);
        assert_eq!(ledger.record(&[0.0, 4.0, 2.0], 0.0), 0.0);
        // Sums (3, 5, 4): action 0 is now best.
        assert_eq!(ledger.hindsight_best(), (0, 3.0));
        assert_eq!(ledger.curve(), &[2.0, 0.0]);
        // Lucky play can beat every fixed action.
        // Sums (8, 6, 9) against 4 paid.
        assert_eq!(ledger.record(&[5.0, 1.0, 5.0], 1.0), -2.0);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let mut ledger = RegretLedger::new(3);
        ledger.record(&[2.0, 1.0, 1.0], 1.0);
        assert_eq!(ledger.hindsight_best(), (1, 1.0));
    }
}
