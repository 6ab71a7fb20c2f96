use super::{evaluate_plan, imbalance, tie_tolerance, TransferPlan, TransferSolution};
use crate::error::{Error, Result};
use crate::model::{CostModel, RequestVector, ReservationVector};

pub const DEFAULT_ORACLE_LIMIT: u128 = 10_000_000;

/// Exhaustive search over every feasible integer plan.
///
/// Edges with a nonzero per-edge cap are enumerated as an odometer whose
/// first edge (row-major) is the most significant digit, so plans are visited
/// in lexicographic order. A first pass finds the optimum; a second returns
/// the first plan within tie tolerance of it.
pub fn brute_force_transfer(
    a: &ReservationVector,
    b: &RequestVector,
    model: &CostModel,
    limit: u128,
) -> Result<TransferSolution> {
    let n = model.n_servers();
    let (deficit, surplus) = imbalance(a, b);
    let mut edges = Vec::new();
    for from in 0..n {
        for to in 0..n {
            let cap = deficit[from].min(surplus[to]);
            if from != to && cap > 0 {
                edges.push((from, to, cap));
            }
        }
    }
    let plans: u128 = edges.iter().map(|&(_, _, cap)| u128::from(cap) + 1).product();
    if plans > limit {
        return Err(Error::OracleLimit { plans, limit });
    }

    let visit = |f: &mut dyn FnMut(&TransferPlan, f64) -> bool| {
        let mut digits = vec![0u32; edges.len()];
        let mut plan = TransferPlan::zero(n);
        loop {
            for (&(from, to, _), &d) in edges.iter().zip(&digits) {
                plan.set(from, to, d);
            }
            let within_caps =
                (0..n).all(|s| plan.outflow(s) <= deficit[s] && plan.inflow(s) <= surplus[s]);
            if within_caps {
                let (t, v) = evaluate_plan(&plan, a, b, model);
                if f(&plan, t + v) {
                    return;
                }
            }
            // Increment, last edge fastest.
            let mut k = edges.len();
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                if digits[k] < edges[k].2 {
                    digits[k] += 1;
                    break;
                }
                digits[k] = 0;
            }
        }
    };

    let mut optimum = f64::INFINITY;
    visit(&mut |_, obj| {
        optimum = optimum.min(obj);
        false
    });
    let limit = optimum + tie_tolerance(optimum);
    let mut chosen = None;
    visit(&mut |plan, obj| {
        if obj <= limit {
            chosen = Some(plan.clone());
            true
        } else {
            false
        }
    });

    let plan = chosen.expect("zero plan is always feasible");
    let (transfer_cost, violation_cost) = evaluate_plan(&plan, a, b, model);
    Ok(TransferSolution {
        plan,
        transfer_cost,
        violation_cost,
        objective: transfer_cost + violation_cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{three_server_instance, Polynomial};

    #[test]
    fn no_surplus_gives_zero_plan() {
        let (_, _, model) = three_server_instance();
        let s = brute_force_transfer(
            &ReservationVector(vec![1, 1, 1]),
            &RequestVector(vec![5, 5, 5]),
            &model,
            DEFAULT_ORACLE_LIMIT,
        )
        .unwrap();
        assert!(s.plan.is_zero());
        assert_eq!(s.violation_cost, 24.0);
    }

    #[test]
    fn two_server_oracle_value() {
        let half = Polynomial::quadratic(0.5).unwrap();
        let link = Polynomial::quadratic(0.2).unwrap();
        let model = CostModel::homogeneous(2, half.clone(), half, link).unwrap();
        let s = brute_force_transfer(
            &ReservationVector(vec![1, 3]),
            &RequestVector(vec![3, 1]),
            &model,
            DEFAULT_ORACLE_LIMIT,
        )
        .unwrap();
        assert!((s.objective - 0.7).abs() < 1e-12);
        assert_eq!(s.plan.get(0, 1), 1);
    }

    #[test]
    fn refuses_oversized_instances() {
        let q = Polynomial::quadratic(1.0).unwrap();
        let model = CostModel::homogeneous(2, q.clone(), q.clone(), q).unwrap();
        let err = brute_force_transfer(
            &ReservationVector(vec![1, 100]),
            &RequestVector(vec![100, 1]),
            &model,
            50,
        )
        .unwrap_err();
        assert!(matches!(err, Error::OracleLimit { plans: 100, limit: 50 }));
    }
}
