//! Integer min-cost flow for the transfer problem.
//!
//! Network: source -> sender (supply = remaining deficit) -> receiver
//! (convex link cost) -> sink, plus a sender -> sink "unserved" arc whose
//! cost is the violation function of the flow it carries. Every unit of
//! deficit must reach the sink, so the flow cost equals the transfer plus
//! violation cost of the induced plan. With convex arc costs, pushing one
//! unit at a time along a shortest residual path (marginal arc costs) yields
//! an integer optimum.

use crate::model::{CostModel, Polynomial};

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
struct Arc<'m> {
    from: usize,
    to: usize,
    cap: u32,
    flow: u32,
    cost: Option<&'m Polynomial>,
}

impl Arc<'_> {
    fn forward_cost(&self) -> f64 {
        self.cost
            .map_or(0.0, |f| f.eval(u64::from(self.flow) + 1) - f.eval(u64::from(self.flow)))
    }

    fn backward_cost(&self) -> f64 {
        self.cost
            .map_or(0.0, |f| f.eval(u64::from(self.flow) - 1) - f.eval(u64::from(self.flow)))
    }
}

/// Senders and receivers of one `(a, b)` instance. Both lists are sorted by
/// server index, so edge `s * receivers.len() + r` follows the row-major
/// order of the full transfer matrix.
#[derive(Debug, Clone)]
pub(super) struct Bipartite<'m> {
    pub model: &'m CostModel,
    /// `(server, deficit)`
    pub senders: Vec<(usize, u32)>,
    /// `(server, surplus)`
    pub receivers: Vec<(usize, u32)>,
}

impl<'m> Bipartite<'m> {
    pub fn n_edges(&self) -> usize {
        self.senders.len() * self.receivers.len()
    }

    /// Optimal per-edge flows with some edges pinned to given values, or
    /// `None` if the pinned values violate an aggregate cap.
    pub fn solve(&self, pinned: &[Option<u32>]) -> Option<Vec<u32>> {
        let n_s = self.senders.len();
        let n_r = self.receivers.len();
        let mut supply: Vec<i64> = self.senders.iter().map(|&(_, d)| i64::from(d)).collect();
        let mut room: Vec<i64> = self.receivers.iter().map(|&(_, s)| i64::from(s)).collect();
        for (e, pin) in pinned.iter().enumerate() {
            if let Some(v) = pin {
                supply[e / n_r] -= i64::from(*v);
                room[e % n_r] -= i64::from(*v);
            }
        }
        if supply.iter().chain(&room).any(|&x| x < 0) {
            return None;
        }

        let source = 0;
        let sink = n_s + n_r + 1;
        let node_s = |i: usize| 1 + i;
        let node_r = |j: usize| 1 + n_s + j;

        let mut arcs: Vec<Arc<'m>> = Vec::with_capacity(2 * n_s + n_r + self.n_edges());
        let mut edge_arc = vec![usize::MAX; self.n_edges()];
        for (i, &(server, _)) in self.senders.iter().enumerate() {
            let cap = supply[i] as u32;
            arcs.push(Arc {
                from: source,
                to: node_s(i),
                cap,
                flow: 0,
                cost: None,
            });
            arcs.push(Arc {
                from: node_s(i),
                to: sink,
                cap,
                flow: 0,
                cost: Some(self.model.violation_fn(server)),
            });
            for (j, &(receiver, _)) in self.receivers.iter().enumerate() {
                let e = i * n_r + j;
                if pinned[e].is_some() {
                    continue;
                }
                edge_arc[e] = arcs.len();
                arcs.push(Arc {
                    from: node_s(i),
                    to: node_r(j),
                    cap: cap.min(room[j] as u32),
                    flow: 0,
                    cost: Some(self.model.transfer_fn(server, receiver)),
                });
            }
        }
        for (j, &r) in room.iter().enumerate() {
            arcs.push(Arc {
                from: node_r(j),
                to: sink,
                cap: r as u32,
                flow: 0,
                cost: None,
            });
        }

        let n_nodes = sink + 1;
        let units: i64 = supply.iter().sum();
        let mut dist = vec![f64::INFINITY; n_nodes];
        // (arc index, forward?)
        let mut pred: Vec<Option<(usize, bool)>> = vec![None; n_nodes];
        for _ in 0..units {
            dist.fill(f64::INFINITY);
            pred.fill(None);
            dist[source] = 0.0;
            for _ in 0..n_nodes {
                let mut changed = false;
                for (k, arc) in arcs.iter().enumerate() {
                    if arc.flow < arc.cap && dist[arc.from].is_finite() {
                        let d = dist[arc.from] + arc.forward_cost();
                        if d < dist[arc.to] - EPS {
                            dist[arc.to] = d;
                            pred[arc.to] = Some((k, true));
                            changed = true;
                        }
                    }
                    if arc.flow > 0 && dist[arc.to].is_finite() {
                        let d = dist[arc.to] + arc.backward_cost();
                        if d < dist[arc.from] - EPS {
                            dist[arc.from] = d;
                            pred[arc.from] = Some((k, false));
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            // The unserved arcs keep the sink reachable while supply remains.
            let mut node = sink;
            while node != source {
                let (k, forward) = pred[node].expect("sink reachable through unserved arcs");
                if forward {
                    arcs[k].flow += 1;
                    node = arcs[k].from;
                } else {
                    arcs[k].flow -= 1;
                    node = arcs[k].to;
                }
            }
        }

        Some(
            pinned
                .iter()
                .zip(&edge_arc)
                .map(|(pin, &k)| pin.unwrap_or_else(|| arcs[k].flow))
                .collect(),
        )
    }
}
