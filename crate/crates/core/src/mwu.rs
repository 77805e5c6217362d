//! Multiplicative-weights solver for the distance LP.
//!
//! Garg–Könemann style: lengths start at `1 / w_e` on finite arcs and 0 on
//! infinite ones; each step routes the bottleneck capacity along the
//! globally shortest terminal-to-terminal path and multiplies the length of
//! every finite arc on it by `1 + step * c / w_e`. At any moment the current
//! lengths, scaled by the shortest inter-terminal distance, are a primal
//! solution, and the routed flow divided by its worst congestion is a dual
//! one. The solver stops once the best primal seen is within `1 + epsilon`
//! of the best dual, so the returned gap is certified.
//!
//! Lengths are kept normalized (an explicit scale factor would only shift
//! the classic stopping rule, which the certificate replaces) and rescaled
//! whenever they grow large.

use crate::error::{Error, Result};
use crate::instance::{DirectedInstance, NodeInstance};
use crate::lp::{lp_cost, scale_to_feasible, FractionalSolution};
use crate::paths::{closest_pair, Csr};
use crate::reductions::node_split_reduction;

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub solution: FractionalSolution,
    pub primal_cost: f64,
    pub dual_flow_value: f64,
    pub epsilon: f64,
    pub iterations: u64,
}

/// Iteration budget from the classic analysis with step `e` over `m_f`
/// finite arcs, plus slack.
fn iteration_cap(m_f: usize, e: f64) -> u64 {
    let m = m_f.max(1) as f64;
    // log_{1+e}((1+e)/delta) with delta = (1+e)((1+e) m)^(-1/e)
    let log_term = ((1.0 + e) * m).ln() / (e * (1.0 + e).ln());
    let cap = (m / e * log_term).ceil();
    if cap.is_finite() && cap < 1e15 {
        cap as u64 + 10_000
    } else {
        u64::MAX
    }
}

pub fn solve_lp_mwu(inst: &DirectedInstance, epsilon: f64) -> Result<LpResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Param(format!("epsilon {epsilon} must lie in (0, 1)")));
    }
    let m = inst.m();
    let step = epsilon / 2.0;
    let weight: Vec<f64> = inst.arcs().iter().map(|a| a.weight.value()).collect();
    // Zero-weight arcs are cut for free: they are removed from the search
    // and given length 1 in the output.
    let mut len: Vec<f64> = weight
        .iter()
        .map(|&w| if w.is_infinite() { 0.0 } else if w == 0.0 { f64::INFINITY } else { 1.0 / w })
        .collect();
    let finite: Vec<bool> = weight.iter().map(|w| w.is_finite()).collect();
    let csr = Csr::directed(inst);
    let terminal_of = |v: usize| inst.terminal_index(v);
    let shortest = |len: &[f64]| closest_pair(&csr, inst.terminals(), terminal_of, |_| 0.0, |id, _| len[id], false);

    let finalize = |lengths: &[f64], dual: f64, iterations: u64| -> Result<LpResult> {
        let x: Vec<f64> = lengths.iter().map(|&l| if l.is_infinite() { 1.0 } else { l }).collect();
        let solution = scale_to_feasible(inst, &FractionalSolution::edge(x))?;
        let primal_cost = lp_cost(inst, &solution)?;
        Ok(LpResult { solution, primal_cost, dual_flow_value: dual, epsilon, iterations })
    };

    let Some(first) = shortest(&len) else {
        return finalize(&vec![0.0; m], 0.0, 0);
    };
    if first.length == 0.0 {
        return Err(Error::InfiniteLp {
            from: inst.terminals()[first.from] + 1,
            to: inst.terminals()[first.to] + 1,
        });
    }

    let cap = iteration_cap(inst.finite_arc_count(), step);
    let mut weighted: f64 = (0..m).filter(|&e| finite[e] && weight[e] > 0.0).map(|e| weight[e] * len[e]).sum();
    let mut load = vec![0.0; m];
    let mut max_congestion = 0.0f64;
    let mut total_flow = 0.0;
    let mut best_primal = f64::INFINITY;
    let mut best_lengths = len.clone();
    let mut best_dual = 0.0f64;
    let mut path = first;
    let mut iterations = 0u64;
    loop {
        let primal = weighted / path.length;
        if primal < best_primal {
            best_primal = primal;
            best_lengths.copy_from_slice(&len);
        }
        if best_dual > 0.0 && best_primal <= (1.0 + epsilon) * best_dual {
            break;
        }
        if iterations >= cap {
            return Err(Error::IterationCap { cap, gap: best_primal / best_dual - 1.0 });
        }
        iterations += 1;

        let c = path
            .members
            .iter()
            .filter(|&&e| finite[e])
            .map(|&e| weight[e])
            .fold(f64::INFINITY, f64::min);
        total_flow += c;
        for &e in &path.members {
            if finite[e] {
                load[e] += c;
                max_congestion = max_congestion.max(load[e] / weight[e]);
                let grown = len[e] * (1.0 + step * c / weight[e]);
                weighted += weight[e] * (grown - len[e]);
                len[e] = grown;
            }
        }
        best_dual = best_dual.max(total_flow / max_congestion);

        path = shortest(&len).expect("terminal pairs stay connected");
        if path.length > 1e100 {
            let d = path.length;
            for l in len.iter_mut() {
                *l /= d;
            }
            weighted /= d;
            path.length = 1.0;
        }
    }
    finalize(&best_lengths, best_dual, iterations)
}

/// Node LP through the node-split reduction. Terminals that are adjacent
/// make the LP infinite.
pub fn solve_node_lp(inst: &NodeInstance, epsilon: f64) -> Result<LpResult> {
    if let Some((a, b)) = inst.adjacent_terminals() {
        return Err(Error::InfiniteLp { from: a + 1, to: b + 1 });
    }
    let split = node_split_reduction(inst)?;
    // Terminals keep their ids in the split graph, so errors need no remapping.
    let res = solve_lp_mwu(&split.instance, epsilon)?;
    let solution = split.node_lengths(&res.solution)?;
    let primal_cost = lp_cost(inst, &solution)?;
    Ok(LpResult { solution, primal_cost, ..res })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Arc, Weight};
    use crate::lp::verify_feasible;

    #[test]
    fn two_cycle_optimum_is_eight() {
        let inst = DirectedInstance::new(2, vec![Arc::new(0, 1, 3.0), Arc::new(1, 0, 5.0)], vec![0, 1]).unwrap();
        let r = solve_lp_mwu(&inst, 0.05).unwrap();
        assert!(r.primal_cost >= 8.0 - 1e-9 && r.primal_cost <= 8.4, "{r:?}");
        assert!(r.dual_flow_value >= 8.0 / 1.05 && r.dual_flow_value <= r.primal_cost * (1.0 + 1e-6));
        assert!(verify_feasible(&inst, &r.solution, 0.0).unwrap().feasible);
    }

    #[test]
    fn infinite_and_empty_lps() {
        let inf = DirectedInstance::new(2, vec![Arc::new(0, 1, Weight::Infinite)], vec![0, 1]).unwrap();
        assert!(matches!(solve_lp_mwu(&inf, 0.1), Err(Error::InfiniteLp { from: 1, to: 2 })));
        let none = DirectedInstance::new(3, vec![Arc::new(0, 2, 1.0)], vec![0, 1]).unwrap();
        let r = solve_lp_mwu(&none, 0.1).unwrap();
        assert_eq!((r.primal_cost, r.iterations), (0.0, 0));
    }

    #[test]
    fn zero_weight_arcs_are_free() {
        let inst = DirectedInstance::new(2, vec![Arc::new(0, 1, 0.0), Arc::new(1, 0, 2.0)], vec![0, 1]).unwrap();
        let r = solve_lp_mwu(&inst, 0.05).unwrap();
        assert!(r.primal_cost >= 2.0 - 1e-9 && r.primal_cost <= 2.1);
        assert!(verify_feasible(&inst, &r.solution, 0.0).unwrap().feasible);
    }

    #[test]
    fn node_lp_star_and_path() {
        let star = NodeInstance::new(
            4,
            vec![(0, 3), (1, 3), (2, 3)],
            vec![Weight::Infinite, Weight::Infinite, Weight::Infinite, 1.0.into()],
            vec![0, 1, 2],
        )
        .unwrap();
        let r = solve_node_lp(&star, 0.05).unwrap();
        assert!(r.primal_cost >= 1.0 - 1e-9 && r.primal_cost <= 1.05);
        assert!(verify_feasible(&star, &r.solution, 0.0).unwrap().feasible);
        let path = NodeInstance::new(4, vec![(0, 1), (1, 2), (2, 3)], vec![1.0.into(); 4], vec![0, 3]).unwrap();
        let r = solve_node_lp(&path, 0.05).unwrap();
        assert!(r.primal_cost >= 1.0 - 1e-9 && r.primal_cost <= 1.05, "{r:?}");
        assert_eq!((r.solution.values[0], r.solution.values[3]), (0.0, 0.0));
        let adjacent = NodeInstance::new(2, vec![(0, 1)], vec![1.0.into(); 2], vec![0, 1]).unwrap();
        assert!(matches!(solve_node_lp(&adjacent, 0.05), Err(Error::InfiniteLp { .. })));
    }

    #[test]
    fn reruns_are_bit_identical() {
        let inst = DirectedInstance::new(
            3,
            vec![Arc::new(0, 1, 1.5), Arc::new(1, 2, 0.5), Arc::new(2, 0, 2.0), Arc::new(1, 0, 1.0)],
            vec![0, 2],
        )
        .unwrap();
        assert_eq!(solve_lp_mwu(&inst, 0.05).unwrap(), solve_lp_mwu(&inst, 0.05).unwrap());
    }
}
