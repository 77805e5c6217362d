//! Reductions between problem variants.

use crate::cut::{CutKind, CutSolution};
use crate::error::{Error, Result};
use crate::instance::{Arc, DirectedInstance, NodeInstance, Weight};
use crate::lp::FractionalSolution;

/// A node instance rewritten as a directed edge-weighted one.
///
/// Every non-terminal `v` becomes `v- -> v+` carrying `w_v` (`v-` keeps id
/// `v`, `v+` gets a fresh id); every edge `uv` becomes the infinite arcs
/// `u+ -> v-` and `v+ -> u-`. Terminals stay single nodes.
#[derive(Debug, Clone)]
pub struct NodeSplit {
    pub instance: DirectedInstance,
    /// Split arc of each node (`None` for terminals).
    pub split_arc: Vec<Option<usize>>,
    /// Node owning each split arc (`None` for edge arcs).
    pub arc_node: Vec<Option<usize>>,
}

pub fn node_split_reduction(inst: &NodeInstance) -> Result<NodeSplit> {
    if let Some((a, b)) = inst.adjacent_terminals() {
        return Err(Error::NotCanonical(a + 1, b + 1));
    }
    let n = inst.n();
    let mut plus = (0..n).collect::<Vec<_>>();
    let mut split_arc = vec![None; n];
    let mut arcs = Vec::with_capacity(n + 2 * inst.m());
    let mut arc_node = Vec::with_capacity(n + 2 * inst.m());
    let mut next = n;
    for v in 0..n {
        if !inst.is_terminal(v) {
            plus[v] = next;
            split_arc[v] = Some(arcs.len());
            arcs.push(Arc::new(v, next, inst.weights()[v]));
            arc_node.push(Some(v));
            next += 1;
        }
    }
    for &(u, v) in inst.edges() {
        arcs.push(Arc::new(plus[u], v, Weight::Infinite));
        arcs.push(Arc::new(plus[v], u, Weight::Infinite));
        arc_node.extend([None, None]);
    }
    let instance = DirectedInstance::new(next, arcs, inst.terminals().to_vec())?;
    Ok(NodeSplit { instance, split_arc, arc_node })
}

impl NodeSplit {
    /// Map an edge cut of the split instance back to a node cut.
    pub fn node_cut(&self, inst: &NodeInstance, cut: &CutSolution) -> Result<CutSolution> {
        if cut.kind != CutKind::Edge {
            return Err(Error::InvalidCut("expected an edge cut".into()));
        }
        let members = cut
            .members
            .iter()
            .map(|&e| {
                self.arc_node.get(e).copied().flatten().ok_or_else(|| {
                    Error::InvalidCut(format!("arc {e} is not a split arc"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CutSolution::nodes(inst, members)?.with_meta(cut.meta))
    }

    /// Map a node cut to the corresponding split arcs.
    pub fn edge_cut(&self, cut: &CutSolution) -> Result<CutSolution> {
        if cut.kind != CutKind::Node {
            return Err(Error::InvalidCut("expected a node cut".into()));
        }
        let members = cut
            .members
            .iter()
            .map(|&v| {
                self.split_arc.get(v).copied().flatten().ok_or_else(|| {
                    Error::InvalidCut(format!("node {v} has no split arc"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CutSolution::edges(&self.instance, members)?.with_meta(cut.meta))
    }

    /// Node lengths read off the split arcs; terminals get 0.
    pub fn node_lengths(&self, x: &FractionalSolution) -> Result<FractionalSolution> {
        x.check_len(crate::instance::Mode::Edge, self.instance.m())?;
        Ok(FractionalSolution::node(
            self.split_arc.iter().map(|a| a.map_or(0.0, |e| x.values[e])).collect(),
        ))
    }

    /// Arc lengths carrying each node's value on its split arc.
    pub fn arc_lengths(&self, x: &FractionalSolution) -> Result<FractionalSolution> {
        x.check_len(crate::instance::Mode::Node, self.split_arc.len())?;
        Ok(FractionalSolution::edge(
            self.arc_node.iter().map(|v| v.map_or(0.0, |v| x.values[v])).collect(),
        ))
    }
}

/// A directed graph with weights on nodes and two terminals `s`, `t`.
/// A node cut is feasible when it leaves no `s -> t` and no `t -> s` path.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedNodeInstance {
    pub n: usize,
    pub arcs: Vec<(usize, usize)>,
    /// Terminals carry `Weight::Infinite`.
    pub weights: Vec<Weight>,
    pub s: usize,
    pub t: usize,
}

impl DirectedNodeInstance {
    /// True iff removing the nodes flagged in `removed` separates `s` and
    /// `t` in both directions.
    pub fn separates(&self, removed: &[bool]) -> bool {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.arcs {
            adj[u].push(v);
        }
        let reach = |from: usize| {
            let mut seen = vec![false; self.n];
            let mut stack = vec![from];
            seen[from] = true;
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if !seen[v] && !removed[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen
        };
        !reach(self.s)[self.t] && !reach(self.t)[self.s]
    }

    /// Node ids with finite weight.
    pub fn finite_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&v| !self.weights[v].is_infinite())
    }

    /// Directed node split: finite nodes become `v -> v+` with weight `w_v`,
    /// arcs become infinite `u+ -> v`. Terminals `s`, `t` stay single nodes.
    pub fn to_directed(&self) -> Result<DirectedInstance> {
        let mut plus = (0..self.n).collect::<Vec<_>>();
        let mut arcs = Vec::new();
        let mut next = self.n;
        for v in 0..self.n {
            if v != self.s && v != self.t {
                plus[v] = next;
                arcs.push(Arc::new(v, next, self.weights[v]));
                next += 1;
            }
        }
        arcs.extend(self.arcs.iter().map(|&(u, v)| Arc::new(plus[u], v, Weight::Infinite)));
        DirectedInstance::new(next, arcs, vec![self.s, self.t])
    }
}

/// Four-terminal node multiway cut as a node-weighted st-bicut.
///
/// Adds `s` (id `n`) and `t` (id `n + 1`), bidirects every edge, and
/// attaches the terminals with infinite arcs `s -> s1`, `s1 -> s`,
/// `s2 -> s`, `s2 -> t`, `s -> s3`, `t -> s3`, `t -> s4`, `s4 -> t`. A set of
/// non-terminal nodes separates the four terminals in the input iff it
/// separates `s` and `t` both ways in the output.
pub fn reduce_4terminal_to_stbicut(inst: &NodeInstance) -> Result<DirectedNodeInstance> {
    if inst.k() != 4 {
        return Err(Error::Param(format!("need exactly 4 terminals, got {}", inst.k())));
    }
    let n = inst.n();
    let (s, t) = (n, n + 1);
    let [s1, s2, s3, s4] = [0, 1, 2, 3].map(|i| inst.terminals()[i]);
    let mut arcs: Vec<(usize, usize)> = inst.edges().iter().flat_map(|&(u, v)| [(u, v), (v, u)]).collect();
    arcs.extend([(s, s1), (s1, s), (s2, s), (s2, t), (s, s3), (t, s3), (t, s4), (s4, t)]);
    let mut weights: Vec<Weight> = (0..n).map(|v| inst.effective_weight(v)).collect();
    weights.extend([Weight::Infinite, Weight::Infinite]);
    Ok(DirectedNodeInstance { n: n + 2, arcs, weights, s, t })
}
