//! Shortest paths under fractional lengths.
//!
//! Two searches share one adjacency representation: plain (multi-source)
//! Dijkstra, and a label-setting variant that keeps, for every node, the
//! `h` nearest *distinct* terminals. Labels are settled in `(distance,
//! terminal index)` order, which makes ties deterministic.
//!
//! Edge-length mode charges `x_e` for traversing arc `e`. Node-length mode
//! charges `x_v` for entering `v` and starts each source at `x_source`, so a
//! path's length counts the weights of both endpoints.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::instance::{DirectedInstance, Mode, NodeInstance};
use crate::lp::FractionalSolution;

pub(crate) const NONE: u32 = u32::MAX;

/// Outgoing adjacency in compressed form. Each slot carries the head and
/// the id of the member whose length applies (an arc index, or an edge
/// index in undirected graphs).
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Csr {
    offsets: Vec<usize>,
    heads: Vec<u32>,
    ids: Vec<u32>,
}

impl Csr {
    pub(crate) fn build(n: usize, links: impl Iterator<Item = (usize, usize, usize)> + Clone) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for (u, _, _) in links.clone() {
            offsets[u + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let total = offsets[n];
        let mut fill = offsets.clone();
        let mut heads = vec![0u32; total];
        let mut ids = vec![0u32; total];
        for (u, v, id) in links {
            heads[fill[u]] = v as u32;
            ids[fill[u]] = id as u32;
            fill[u] += 1;
        }
        Csr { offsets, heads, ids }
    }

    pub(crate) fn directed(inst: &DirectedInstance) -> &Self {
        inst.out()
    }

    /// Both orientations of every link, sharing the link's id.
    pub(crate) fn symmetric(n: usize, links: &[(usize, usize)]) -> Self {
        Csr::build(
            n,
            links
                .iter()
                .enumerate()
                .flat_map(|(i, &(u, v))| [(u, v, i), (v, u, i)]),
        )
    }

    pub(crate) fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub(crate) fn out(&self, u: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let r = self.offsets[u]..self.offsets[u + 1];
        self.heads[r.clone()]
            .iter()
            .zip(&self.ids[r])
            .map(|(&v, &id)| (v as usize, id as usize))
    }
}

#[derive(Clone, Copy)]
struct Entry {
    dist: f64,
    term: u32,
    node: u32,
    pred: u32,
    via: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    // Reversed so that BinaryHeap pops the smallest (dist, term, node).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.term.cmp(&self.term))
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Monotone priority queue for label-setting searches (a radix heap over
/// the bit patterns of nonnegative distances). Entries equal to the last
/// popped distance sit in a binary heap, so pops follow the exact
/// `(dist, term, node)` order of [`Entry`].
struct RadixQueue {
    last: u64,
    current: BinaryHeap<Entry>,
    buckets: Vec<Vec<Entry>>,
}

impl RadixQueue {
    fn new() -> Self {
        RadixQueue { last: 0, current: BinaryHeap::new(), buckets: vec![Vec::new(); 64] }
    }

    fn key(dist: f64) -> u64 {
        (dist + 0.0).to_bits()
    }

    fn push(&mut self, e: Entry) {
        debug_assert!(e.dist >= 0.0 && Self::key(e.dist) >= self.last);
        let key = Self::key(e.dist);
        if key == self.last {
            self.current.push(e);
        } else {
            self.buckets[63 - (key ^ self.last).leading_zeros() as usize].push(e);
        }
    }

    fn pop(&mut self) -> Option<Entry> {
        if self.current.is_empty() {
            let i = self.buckets.iter().position(|b| !b.is_empty())?;
            let mut items = std::mem::take(&mut self.buckets[i]);
            self.last = items.iter().map(|e| Self::key(e.dist)).min().expect("nonempty bucket");
            // everything lands in lower buckets, so the storage can go back
            for e in items.drain(..) {
                self.push(e);
            }
            self.buckets[i] = items;
        }
        self.current.pop()
    }
}

/// Result of a plain Dijkstra run: distances plus the predecessor slot
/// (`(tail, id)`) that settled each node.
pub(crate) struct ShortestPaths {
    pub dist: Vec<f64>,
    pub pred: Vec<(u32, u32)>,
}

impl ShortestPaths {
    /// Member ids along the shortest path into `v`, source first.
    pub(crate) fn path_ids(&self, mut v: usize) -> Vec<usize> {
        let mut ids = Vec::new();
        while self.pred[v].0 != NONE {
            ids.push(self.pred[v].1 as usize);
            v = self.pred[v].0 as usize;
        }
        ids.reverse();
        ids
    }
}

/// Multi-source Dijkstra. `len(id, head)` is the nonnegative cost of a slot;
/// an infinite cost removes the slot.
pub(crate) fn dijkstra(
    csr: &Csr,
    sources: &[(usize, f64)],
    len: impl Fn(usize, usize) -> f64,
) -> ShortestPaths {
    let n = csr.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![(NONE, NONE); n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &(s, d0) in sources {
        if d0 < dist[s] {
            dist[s] = d0;
            heap.push(Entry { dist: d0, term: 0, node: s as u32, pred: NONE, via: NONE });
        }
    }
    while let Some(Entry { dist: d, node, .. }) = heap.pop() {
        let u = node as usize;
        if done[u] {
            continue;
        }
        done[u] = true;
        for (v, id) in csr.out(u) {
            let l = len(id, v);
            if l == f64::INFINITY {
                continue;
            }
            let nd = d + l;
            if nd < dist[v] {
                dist[v] = nd;
                pred[v] = (u as u32, id as u32);
                heap.push(Entry { dist: nd, term: 0, node: v as u32, pred: NONE, via: NONE });
            }
        }
    }
    ShortestPaths { dist, pred }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Label {
    pub node: u32,
    pub term: u32,
    pub dist: f64,
    pred: u32,
    via: u32,
}

/// Settled labels of an h-nearest search.
pub(crate) struct LabelSet {
    h: usize,
    pub labels: Vec<Label>,
    slots: Vec<u32>,
    count: Vec<u8>,
}

impl LabelSet {
    pub(crate) fn at(&self, v: usize) -> impl Iterator<Item = &Label> + '_ {
        self.slots[v * self.h..v * self.h + self.count[v] as usize]
            .iter()
            .map(|&l| &self.labels[l as usize])
    }

    /// Member ids along the path that produced label `l`, source first.
    pub(crate) fn path_ids(&self, mut l: u32) -> Vec<usize> {
        let mut ids = Vec::new();
        while self.labels[l as usize].pred != NONE {
            ids.push(self.labels[l as usize].via as usize);
            l = self.labels[l as usize].pred;
        }
        ids.reverse();
        ids
    }

    pub(crate) fn path_nodes(&self, mut l: u32) -> Vec<usize> {
        let mut nodes = vec![self.labels[l as usize].node as usize];
        while self.labels[l as usize].pred != NONE {
            l = self.labels[l as usize].pred;
            nodes.push(self.labels[l as usize].node as usize);
        }
        nodes.reverse();
        nodes
    }
}

/// Record a pending `(dist, term)` offer in a node's list of the best
/// offers with distinct terminals; `false` if it cannot settle there.
fn offer_at(list: &mut [(f64, u32)], dist: f64, term: u32) -> bool {
    let less = |a: (f64, u32), b: (f64, u32)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)) == Ordering::Less;
    let slot = match list.iter().position(|o| o.1 == term) {
        Some(i) if less((dist, term), list[i]) => i,
        Some(_) => return false,
        None => {
            let worst = (0..list.len()).max_by(|&a, &b| if less(list[a], list[b]) { Ordering::Less } else { Ordering::Greater });
            match worst {
                Some(i) if list[i].1 == NONE || less((dist, term), list[i]) => i,
                _ => return false,
            }
        }
    };
    list[slot] = (dist, term);
    true
}

/// Label-setting search keeping up to `h` distinct-terminal labels per
/// node. `sources[i] = (node, initial distance)` for terminal `i`.
///
/// `stop` is called on each label as it is settled; returning `true` ends
/// the search early with that label as the last one in the set.
pub(crate) fn nearest_labels(
    csr: &Csr,
    sources: &[(usize, f64)],
    h: usize,
    len: impl Fn(usize, usize) -> f64,
    mut stop: impl FnMut(&Label) -> bool,
) -> LabelSet {
    let n = csr.node_count();
    assert!(h >= 1 && h < u8::MAX as usize);
    let mut set = LabelSet {
        h,
        labels: Vec::with_capacity(n),
        slots: vec![NONE; n * h],
        count: vec![0; n],
    };
    let has = |set: &LabelSet, v: usize, term: u32| {
        set.slots[v * h..v * h + set.count[v] as usize]
            .iter()
            .any(|&l| set.labels[l as usize].term == term)
    };
    // Per node, the h best pending (distance, terminal) offers with distinct
    // terminals. An offer beaten by h others can never settle, so it is not
    // pushed; this keeps the heap near n * h entries.
    let mut offers = vec![(f64::INFINITY, NONE); n * h];
    let offer = |offers: &mut [(f64, u32)], v: usize, dist: f64, term: u32| offer_at(&mut offers[v * h..v * h + h], dist, term);
    let mut heap = RadixQueue::new();
    for (i, &(s, d0)) in sources.iter().enumerate() {
        if offer(&mut offers, s, d0, i as u32) {
            heap.push(Entry { dist: d0, term: i as u32, node: s as u32, pred: NONE, via: NONE });
        }
    }
    while let Some(e) = heap.pop() {
        let u = e.node as usize;
        if set.count[u] as usize >= h || has(&set, u, e.term) {
            continue;
        }
        let id = set.labels.len() as u32;
        let label = Label { node: e.node, term: e.term, dist: e.dist, pred: e.pred, via: e.via };
        set.labels.push(label);
        set.slots[u * h + set.count[u] as usize] = id;
        set.count[u] += 1;
        if stop(&label) {
            break;
        }
        for (v, slot_id) in csr.out(u) {
            // a settled terminal keeps its (minimal) offer, so offers also
            // reject paths back to terminals already settled at v
            if (set.count[v] as usize) < h {
                let l = len(slot_id, v);
                if l == f64::INFINITY || !offer(&mut offers, v, e.dist + l, e.term) {
                    continue;
                }
                heap.push(Entry {
                    dist: e.dist + l,
                    term: e.term,
                    node: v as u32,
                    pred: id,
                    via: slot_id as u32,
                });
            }
        }
    }
    set
}

/// Distances from one source.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTable {
    pub source: usize,
    pub dist: Vec<f64>,
}

/// For every node, up to `h` `(terminal index, distance)` pairs: the
/// terminals from which the node is closest, in `(distance, index)` order.
/// Distances run from the terminal to the node.
#[derive(Debug, Clone, PartialEq)]
pub struct NearTerminalTable {
    h: usize,
    entries: Vec<(u32, f64)>,
    /// Distance of the same terminal at the predecessor on the shortest
    /// path (0 for a terminal's own entry).
    entered: Vec<f64>,
    count: Vec<u8>,
}

impl NearTerminalTable {
    fn from_labels(set: &LabelSet, n: usize, h: usize) -> Self {
        let mut entries = vec![(NONE, f64::INFINITY); n * h];
        let mut entered = vec![f64::INFINITY; n * h];
        for v in 0..n {
            for (j, l) in set.at(v).enumerate() {
                entries[v * h + j] = (l.term, l.dist);
                entered[v * h + j] = if l.pred == NONE { 0.0 } else { set.labels[l.pred as usize].dist };
            }
        }
        NearTerminalTable { h, entries, entered, count: set.count.clone() }
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn node_count(&self) -> usize {
        self.count.len()
    }

    /// The nearest terminals of `v`; fewer than `h` when fewer terminals
    /// reach `v`.
    pub fn get(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries[v * self.h..v * self.h + self.count[v] as usize]
            .iter()
            .map(|&(t, d)| (t as usize, d))
    }

    /// The `j`-th nearest terminal of `v` (0-based), if any.
    pub fn nth(&self, v: usize, j: usize) -> Option<(usize, f64)> {
        (j < self.count[v] as usize).then(|| {
            let (t, d) = self.entries[v * self.h + j];
            (t as usize, d)
        })
    }

    /// Distance of the `j`-th nearest terminal at the node preceding `v` on
    /// its shortest path. Under node lengths this is `d - x_v` computed
    /// without cancellation.
    pub fn entered(&self, v: usize, j: usize) -> Option<f64> {
        (j < self.count[v] as usize).then(|| self.entered[v * self.h + j])
    }
}

/// A shortest path between two distinct terminals.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalPath {
    /// Terminal indices (positions in the terminal list).
    pub from: usize,
    pub to: usize,
    pub length: f64,
    /// Arc indices (edge mode) or node ids (node mode), in path order.
    pub members: Vec<usize>,
}

pub(crate) fn check_edge_lengths(inst: &DirectedInstance, x: &FractionalSolution) -> Result<()> {
    x.check_len(Mode::Edge, inst.m())
}

pub(crate) fn check_node_lengths(inst: &NodeInstance, x: &FractionalSolution) -> Result<()> {
    x.check_len(Mode::Node, inst.n())
}

pub fn sssp(inst: &DirectedInstance, lengths: &FractionalSolution, source: usize) -> Result<DistanceTable> {
    check_edge_lengths(inst, lengths)?;
    if source >= inst.n() {
        return Err(Error::Param(format!("source {source} out of range")));
    }
    let x = &lengths.values;
    let sp = dijkstra(&Csr::directed(inst), &[(source, 0.0)], |id, _| x[id]);
    Ok(DistanceTable { source, dist: sp.dist })
}

pub fn h_nearest_terminals(
    inst: &DirectedInstance,
    lengths: &FractionalSolution,
    h: usize,
) -> Result<NearTerminalTable> {
    check_edge_lengths(inst, lengths)?;
    if h == 0 || h > inst.k() {
        return Err(Error::Param(format!("h = {h} must lie in 1..={}", inst.k())));
    }
    let x = &lengths.values;
    let sources: Vec<_> = inst.terminals().iter().map(|&s| (s, 0.0)).collect();
    let set = nearest_labels(Csr::directed(inst), &sources, h, |id, _| x[id], |_| false);
    Ok(NearTerminalTable::from_labels(&set, inst.n(), h))
}

/// [`h_nearest_terminals`] restricted to distances up to `limit`: entries
/// within the limit are exactly those of the full table, farther ones may
/// be missing.
pub(crate) fn h_nearest_within(
    inst: &DirectedInstance,
    lengths: &FractionalSolution,
    h: usize,
    limit: f64,
) -> Result<NearTerminalTable> {
    check_edge_lengths(inst, lengths)?;
    if h == 0 || h > inst.k() {
        return Err(Error::Param(format!("h = {h} must lie in 1..={}", inst.k())));
    }
    let x = &lengths.values;
    let sources: Vec<_> = inst.terminals().iter().map(|&s| (s, 0.0)).collect();
    let set = nearest_labels(Csr::directed(inst), &sources, h, |id, _| x[id], |l| l.dist > limit);
    Ok(NearTerminalTable::from_labels(&set, inst.n(), h))
}

/// Shortest path between two distinct terminals over a prepared adjacency.
///
/// One label-setting pass with `h = 2` suffices: at a terminal node the
/// first label is its own (distance `x_s`, which is 0 for terminals) and the
/// first foreign label to settle anywhere is the global minimum over
/// terminal pairs, so the search stops there.
pub(crate) fn closest_pair(
    csr: &Csr,
    terminals: &[usize],
    terminal_of: impl Fn(usize) -> Option<usize>,
    start: impl Fn(usize) -> f64,
    len: impl Fn(usize, usize) -> f64,
    node_members: bool,
) -> Option<TerminalPath> {
    let sources: Vec<_> = terminals.iter().map(|&s| (s, start(s))).collect();
    let mut hit = None;
    let set = nearest_labels(csr, &sources, 2, len, |l| {
        let foreign = terminal_of(l.node as usize).is_some_and(|t| t != l.term as usize);
        if foreign {
            hit = Some(());
        }
        foreign
    });
    hit?;
    let last = (set.labels.len() - 1) as u32;
    let l = set.labels[last as usize];
    Some(TerminalPath {
        from: l.term as usize,
        to: terminal_of(l.node as usize).expect("stopped at a terminal"),
        length: l.dist,
        members: if node_members { set.path_nodes(last) } else { set.path_ids(last) },
    })
}

/// Shortest directed path `s_i -> s_j`, `i != j`, over all pairs.
pub fn closest_terminal_pair(inst: &DirectedInstance, lengths: &FractionalSolution) -> Result<Option<TerminalPath>> {
    check_edge_lengths(inst, lengths)?;
    let x = &lengths.values;
    Ok(closest_pair(
        &Csr::directed(inst),
        inst.terminals(),
        |v| inst.terminal_index(v),
        |_| 0.0,
        |id, _| x[id],
        false,
    ))
}

/// `min_{i != j} d(s_i, s_j)`; infinite when no terminal reaches another.
pub fn min_interterminal_distance(inst: &DirectedInstance, lengths: &FractionalSolution) -> Result<f64> {
    Ok(closest_terminal_pair(inst, lengths)?.map_or(f64::INFINITY, |p| p.length))
}

pub(crate) fn node_csr(inst: &NodeInstance) -> Csr {
    Csr::symmetric(inst.n(), inst.edges())
}

/// Node-weighted distances from `source`, counting both endpoints.
pub fn node_sssp(inst: &NodeInstance, x: &FractionalSolution, source: usize) -> Result<DistanceTable> {
    check_node_lengths(inst, x)?;
    if source >= inst.n() {
        return Err(Error::Param(format!("source {source} out of range")));
    }
    let xv = &x.values;
    let sp = dijkstra(&node_csr(inst), &[(source, xv[source])], |_, v| xv[v]);
    Ok(DistanceTable { source, dist: sp.dist })
}

pub fn node_h_nearest_terminals(inst: &NodeInstance, x: &FractionalSolution, h: usize) -> Result<NearTerminalTable> {
    check_node_lengths(inst, x)?;
    if h == 0 || h > inst.k() {
        return Err(Error::Param(format!("h = {h} must lie in 1..={}", inst.k())));
    }
    let xv = &x.values;
    let sources: Vec<_> = inst.terminals().iter().map(|&s| (s, xv[s])).collect();
    let set = nearest_labels(&node_csr(inst), &sources, h, |_, v| xv[v], |_| false);
    Ok(NearTerminalTable::from_labels(&set, inst.n(), h))
}

/// Closest pair of distinct terminals under node lengths; the path is
/// returned as a node sequence.
pub fn node_closest_terminal_pair(inst: &NodeInstance, x: &FractionalSolution) -> Result<Option<TerminalPath>> {
    check_node_lengths(inst, x)?;
    let xv = &x.values;
    Ok(closest_pair(
        &node_csr(inst),
        inst.terminals(),
        |v| inst.terminal_index(v),
        |s| xv[s],
        |_, v| xv[v],
        true,
    ))
}

pub fn node_min_interterminal_distance(inst: &NodeInstance, x: &FractionalSolution) -> Result<f64> {
    Ok(node_closest_terminal_pair(inst, x)?.map_or(f64::INFINITY, |p| p.length))
}
