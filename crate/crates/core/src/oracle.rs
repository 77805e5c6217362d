//! Exact minimum cuts for small instances by branch and bound.
//!
//! The search keeps a set of removed and a set of protected members. It
//! finds a surviving terminal path that crosses as few undecided members as
//! possible; if there is none the removed set is a cut, otherwise some
//! undecided member on the path must go, and the branches are "remove the
//! j-th, protect the earlier ones". Branches that cannot beat the best cut
//! found so far are pruned. Among equal-cost optima the lexicographically
//! smallest member list wins.

use crate::cut::{CutKind, CutMeta, CutSolution};
use crate::error::{Error, Result};
use crate::instance::{DirectedInstance, NodeInstance, Weight};
use crate::paths::{closest_pair, dijkstra, node_csr, Csr};
use crate::reductions::DirectedNodeInstance;

pub const MAX_ORACLE_ARCS: usize = 26;
pub const MAX_ORACLE_NODES: usize = 24;

#[derive(Clone, Copy, PartialEq)]
enum State {
    Open,
    Removed,
    Kept,
}

struct Search<F> {
    weights: Vec<f64>,
    state: Vec<State>,
    violation: F,
    best: Option<(f64, Vec<usize>)>,
}

impl<F: FnMut(&[State]) -> Option<Vec<usize>>> Search<F> {
    fn tol(&self) -> f64 {
        self.best.as_ref().map_or(0.0, |(c, _)| 1e-9 * c.abs().max(1.0))
    }

    fn run(&mut self, cost: f64) {
        if self.best.as_ref().is_some_and(|(c, _)| cost > c + self.tol()) {
            return;
        }
        let Some(path) = (self.violation)(&self.state) else {
            let members: Vec<usize> = (0..self.state.len()).filter(|&e| self.state[e] == State::Removed).collect();
            let better = match &self.best {
                None => true,
                Some((c, m)) => cost < c - self.tol() || (cost <= c + self.tol() && members < *m),
            };
            if better {
                self.best = Some((cost, members));
            }
            return;
        };
        for &e in &path {
            self.state[e] = State::Removed;
            self.run(cost + self.weights[e]);
            self.state[e] = State::Kept;
        }
        for &e in &path {
            self.state[e] = State::Open;
        }
    }
}

/// Run the search. `violation` returns the undecided members of a
/// surviving path (empty when the path cannot be broken).
fn search(
    weights: &[Weight],
    limit: usize,
    violation: impl FnMut(&[State]) -> Option<Vec<usize>>,
) -> Result<(f64, Vec<usize>)> {
    let count = weights.iter().filter(|w| !w.is_infinite()).count();
    if count > limit {
        return Err(Error::GuardExceeded { count, limit });
    }
    let mut s = Search {
        weights: weights.iter().map(|w| w.finite().unwrap_or(f64::INFINITY)).collect(),
        state: weights.iter().map(|w| if w.is_infinite() { State::Kept } else { State::Open }).collect(),
        violation,
        best: None,
    };
    s.run(0.0);
    s.best.ok_or(Error::NoFiniteCut)
}

/// Undecided members along a path, or `None` if the path is infinite
/// (nothing survives).
fn open_members(path: Option<(f64, Vec<usize>)>, state: &[State]) -> Option<Vec<usize>> {
    path.filter(|(len, _)| len.is_finite())
        .map(|(_, members)| members.into_iter().filter(|&e| state[e] == State::Open).collect())
}

fn step_cost(state: State) -> f64 {
    match state {
        State::Open => 1.0,
        State::Removed => f64::INFINITY,
        State::Kept => 0.0,
    }
}

fn edge_cut(inst: &DirectedInstance, (_, members): (f64, Vec<usize>)) -> Result<CutSolution> {
    CutSolution::edges(inst, members)
}

/// Minimum directed multiway cut.
pub fn exact_min_dirmc(inst: &DirectedInstance) -> Result<CutSolution> {
    let weights: Vec<Weight> = inst.arcs().iter().map(|a| a.weight).collect();
    let csr = Csr::directed(inst);
    let best = search(&weights, MAX_ORACLE_ARCS, |state| {
        let p = closest_pair(&csr, inst.terminals(), |v| inst.terminal_index(v), |_| 0.0, |id, _| step_cost(state[id]), false);
        open_members(p.map(|p| (p.length, p.members)), state)
    })?;
    edge_cut(inst, best)
}

/// Minimum cut of all `from -> to` paths (terminal indices), ignoring the
/// other direction and other terminals.
pub fn exact_one_way_cut(inst: &DirectedInstance, from: usize, to: usize) -> Result<CutSolution> {
    if from >= inst.k() || to >= inst.k() || from == to {
        return Err(Error::Param(format!("bad terminal pair ({from}, {to})")));
    }
    let weights: Vec<Weight> = inst.arcs().iter().map(|a| a.weight).collect();
    let csr = Csr::directed(inst);
    let (s, t) = (inst.terminals()[from], inst.terminals()[to]);
    let best = search(&weights, MAX_ORACLE_ARCS, |state| {
        let sp = dijkstra(&csr, &[(s, 0.0)], |id, _| step_cost(state[id]));
        let path = sp.dist[t].is_finite().then(|| (sp.dist[t], sp.path_ids(t)));
        open_members(path, state)
    })?;
    edge_cut(inst, best)
}

/// Minimum node multiway cut; terminals are never removed.
pub fn exact_min_nodemc(inst: &NodeInstance) -> Result<CutSolution> {
    let weights: Vec<Weight> = (0..inst.n()).map(|v| inst.effective_weight(v)).collect();
    let csr = node_csr(inst);
    let best = search(&weights, MAX_ORACLE_NODES, |state| {
        let p = closest_pair(
            &csr,
            inst.terminals(),
            |v| inst.terminal_index(v),
            |s| step_cost(state[s]),
            |_, v| step_cost(state[v]),
            true,
        );
        open_members(p.map(|p| (p.length, p.members)), state)
    })?;
    CutSolution::nodes(inst, best.1)
}

/// Minimum node set separating `s` and `t` in both directions.
pub fn exact_min_stbicut(inst: &DirectedNodeInstance) -> Result<CutSolution> {
    let csr = Csr::build(inst.n, inst.arcs.iter().enumerate().map(|(i, &(u, v))| (u, v, i)));
    let terminals = [inst.s, inst.t];
    let terminal_of = |v: usize| terminals.iter().position(|&x| x == v);
    let (cost, members) = search(&inst.weights, MAX_ORACLE_NODES, |state| {
        let p = closest_pair(&csr, &terminals, terminal_of, |_| 0.0, |_, v| step_cost(state[v]), true);
        open_members(p.map(|p| (p.length, p.members)), state)
    })?;
    Ok(CutSolution { kind: CutKind::Node, members, cost, meta: CutMeta::default() })
}
