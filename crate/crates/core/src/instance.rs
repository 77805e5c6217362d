//! Instance data model.
//!
//! Node ids are 0-based everywhere in this crate. The text formats in
//! [`crate::format`] use 1-based ids; the mapping is `file_id = id + 1`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::paths::Csr;

/// A nonnegative member weight. Uncuttable members carry [`Weight::Infinite`]
/// rather than a large sentinel value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    Finite(f64),
    Infinite,
}

impl Weight {
    pub fn finite(self) -> Option<f64> {
        match self {
            Weight::Finite(w) => Some(w),
            Weight::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Weight::Infinite)
    }

    /// The weight as an `f64`, mapping `Infinite` to `f64::INFINITY`.
    pub fn value(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    fn check(self) -> Result<Self> {
        match self {
            Weight::Finite(w) if !w.is_finite() || w < 0.0 => Err(Error::InvalidInstance(format!(
                "weight {w} is not a finite nonnegative number"
            ))),
            w => Ok(w),
        }
    }
}

impl From<f64> for Weight {
    fn from(w: f64) -> Self {
        Weight::Finite(w)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(w) => write!(f, "{w}"),
            Weight::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Weight {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "inf" {
            return Ok(Weight::Infinite);
        }
        let w: f64 = s.parse().map_err(|_| format!("bad weight `{s}`"))?;
        if !w.is_finite() {
            return Err(format!("bad weight `{s}` (use `inf` for uncuttable members)"));
        }
        if w < 0.0 {
            return Err(format!("negative weight {s}"));
        }
        Ok(Weight::Finite(w))
    }
}

/// Whether an instance (or a fractional solution) lives on arcs or on nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Edge,
    Node,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub weight: Weight,
}

impl Arc {
    pub fn new(tail: usize, head: usize, weight: impl Into<Weight>) -> Self {
        Arc { tail, head, weight: weight.into() }
    }
}

const NOT_TERMINAL: u32 = u32::MAX;

fn index_terminals(n: usize, terminals: &[usize]) -> Result<Vec<u32>> {
    if terminals.len() < 2 {
        return Err(Error::InvalidInstance(format!(
            "need at least 2 terminals, got {}",
            terminals.len()
        )));
    }
    let mut terminal_of = vec![NOT_TERMINAL; n];
    for (i, &s) in terminals.iter().enumerate() {
        if s >= n {
            return Err(Error::InvalidInstance(format!("terminal {} out of range", s + 1)));
        }
        if terminal_of[s] != NOT_TERMINAL {
            return Err(Error::InvalidInstance(format!("duplicate terminal {}", s + 1)));
        }
        terminal_of[s] = i as u32;
    }
    Ok(terminal_of)
}

/// Directed graph with arc weights and `k >= 2` terminals.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedInstance {
    n: usize,
    arcs: Vec<Arc>,
    terminals: Vec<usize>,
    terminal_of: Vec<u32>,
    out: Csr,
}

impl DirectedInstance {
    /// Outgoing adjacency, built once at construction.
    pub(crate) fn out(&self) -> &Csr {
        &self.out
    }

    pub fn new(n: usize, arcs: Vec<Arc>, terminals: Vec<usize>) -> Result<Self> {
        let terminal_of = index_terminals(n, &terminals)?;
        for (i, a) in arcs.iter().enumerate() {
            if a.tail >= n || a.head >= n {
                return Err(Error::InvalidInstance(format!("arc {i} has an endpoint out of range")));
            }
            if a.tail == a.head {
                return Err(Error::InvalidInstance(format!("arc {i} is a self-loop")));
            }
            a.weight.check()?;
        }
        let out = Csr::build(n, arcs.iter().enumerate().map(|(i, a)| (a.tail, a.head, i)));
        Ok(DirectedInstance { n, arcs, terminals, terminal_of, out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.arcs.len()
    }

    pub fn k(&self) -> usize {
        self.terminals.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    /// Position of `v` in the terminal list, if it is a terminal.
    pub fn terminal_index(&self, v: usize) -> Option<usize> {
        match self.terminal_of[v] {
            NOT_TERMINAL => None,
            i => Some(i as usize),
        }
    }

    pub fn finite_arc_count(&self) -> usize {
        self.arcs.iter().filter(|a| !a.weight.is_infinite()).count()
    }
}

/// Undirected graph with node weights and `k >= 2` terminals. Terminals
/// are never removable: their effective weight is infinite whatever is
/// stored for them.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeInstance {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<Weight>,
    terminals: Vec<usize>,
    terminal_of: Vec<u32>,
}

impl NodeInstance {
    pub fn new(
        n: usize,
        edges: Vec<(usize, usize)>,
        weights: Vec<Weight>,
        terminals: Vec<usize>,
    ) -> Result<Self> {
        if weights.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: weights.len() });
        }
        let terminal_of = index_terminals(n, &terminals)?;
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::InvalidInstance(format!("edge {i} has an endpoint out of range")));
            }
            if u == v {
                return Err(Error::InvalidInstance(format!("edge {i} is a self-loop")));
            }
        }
        for w in &weights {
            w.check()?;
        }
        Ok(NodeInstance { n, edges, weights, terminals, terminal_of })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn k(&self) -> usize {
        self.terminals.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Weights as stored (and serialized).
    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    /// The weight used for cut costs: infinite on terminals.
    pub fn effective_weight(&self, v: usize) -> Weight {
        if self.is_terminal(v) {
            Weight::Infinite
        } else {
            self.weights[v]
        }
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    pub fn terminal_index(&self, v: usize) -> Option<usize> {
        match self.terminal_of[v] {
            NOT_TERMINAL => None,
            i => Some(i as usize),
        }
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.terminal_of[v] != NOT_TERMINAL
    }

    /// Non-terminal nodes with finite weight, i.e. the removable nodes.
    pub fn finite_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&v| !self.effective_weight(v).is_infinite())
    }

    /// First pair of adjacent terminals, if any.
    pub fn adjacent_terminals(&self) -> Option<(usize, usize)> {
        self.edges
            .iter()
            .copied()
            .find(|&(u, v)| self.is_terminal(u) && self.is_terminal(v))
    }

    pub fn is_canonical(&self) -> bool {
        self.adjacent_terminals().is_none()
    }
}

/// Make the terminals an independent set.
///
/// Instances whose terminals are already pairwise non-adjacent are returned
/// unchanged. Otherwise every terminal `s_i` gets a pendant dummy terminal
/// `s'_i` (node id `n + i`); the dummies become the terminals and each old
/// terminal becomes an ordinary node of infinite weight, so the minimum cut
/// value is unchanged.
pub fn canonicalize_node_instance(inst: &NodeInstance) -> NodeInstance {
    if inst.is_canonical() {
        return inst.clone();
    }
    let n = inst.n + inst.k();
    let mut weights = inst.weights.clone();
    for &s in &inst.terminals {
        weights[s] = Weight::Infinite;
    }
    weights.extend(std::iter::repeat(Weight::Infinite).take(inst.k()));
    let mut edges = inst.edges.clone();
    let mut terminals = Vec::with_capacity(inst.k());
    for (i, &s) in inst.terminals.iter().enumerate() {
        edges.push((s, inst.n + i));
        terminals.push(inst.n + i);
    }
    NodeInstance::new(n, edges, weights, terminals).expect("canonicalization keeps validity")
}

/// Either kind of instance, as read from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Directed(DirectedInstance),
    Node(NodeInstance),
}

impl Instance {
    pub fn mode(&self) -> Mode {
        match self {
            Instance::Directed(_) => Mode::Edge,
            Instance::Node(_) => Mode::Node,
        }
    }
}

impl From<DirectedInstance> for Instance {
    fn from(inst: DirectedInstance) -> Self {
        Instance::Directed(inst)
    }
}

impl From<NodeInstance> for Instance {
    fn from(inst: NodeInstance) -> Self {
        Instance::Node(inst)
    }
}
