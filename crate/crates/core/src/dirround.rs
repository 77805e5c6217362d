//! Rounding fractional directed solutions by ball cutting.
//!
//! All procedures require a feasible `x` (inter-terminal distances at least
//! `1 - FEASIBILITY_TOL`). Thresholds are applied as `theta * min(D, 1)`,
//! `D` being the minimum inter-terminal distance, which amounts to rounding
//! the exactly feasible `x / D` whenever `D` falls a rounding error short.

use crate::cut::{CutKind, CutMeta, CutSolution};
use crate::error::{Error, Result};
use crate::instance::{Arc, DirectedInstance, Weight};
use crate::lp::{threshold_scale, FractionalSolution, FEASIBILITY_TOL};
use crate::paths::{self, closest_pair, dijkstra, nearest_labels, Csr, NearTerminalTable, TerminalPath};
use crate::rng::{open_unit, trial_rng};

/// `inst` plus super terminals `t_i` (ids `n + i`) and zero-length infinite
/// arcs `t_i -> s_j` for all `j != i`, appended after the original arcs.
#[derive(Debug, Clone)]
pub struct AugmentedInstance {
    pub instance: DirectedInstance,
    pub x: FractionalSolution,
    pub super_terminals: Vec<usize>,
    /// Number of arcs of the original instance (they keep their indices).
    pub base_arcs: usize,
}

pub fn augment_with_super_terminals(inst: &DirectedInstance, x: &FractionalSolution) -> Result<AugmentedInstance> {
    x.check_len(crate::instance::Mode::Edge, inst.m())?;
    let (n, k) = (inst.n(), inst.k());
    let mut arcs = inst.arcs().to_vec();
    let mut values = x.values.clone();
    for i in 0..k {
        for (j, &s) in inst.terminals().iter().enumerate() {
            if i != j {
                arcs.push(Arc::new(n + i, s, Weight::Infinite));
                values.push(0.0);
            }
        }
    }
    let instance = DirectedInstance::new(n + k, arcs, inst.terminals().to_vec())?;
    Ok(AugmentedInstance {
        instance,
        x: FractionalSolution::edge(values),
        super_terminals: (n..n + k).collect(),
        base_arcs: inst.m(),
    })
}

fn check_theta(theta: f64, upper: f64) -> Result<()> {
    if theta > 0.0 && theta < upper {
        Ok(())
    } else {
        Err(Error::Param(format!("theta {theta} must lie in (0, {upper})")))
    }
}

/// The literal ball cut: every arc leaving some `B(t_i, theta)`.
pub fn round_at_theta(inst: &DirectedInstance, x: &FractionalSolution, theta: f64) -> Result<CutSolution> {
    check_theta(theta, 1.0)?;
    let scale = threshold_scale(inst, x)?;
    let r = theta * scale;
    let aug = augment_with_super_terminals(inst, x)?;
    let csr = Csr::directed(&aug.instance);
    let xv = &aug.x.values;
    let mut members = Vec::new();
    for &t in &aug.super_terminals {
        let dist = dijkstra(&csr, &[(t, 0.0)], |id, _| xv[id]).dist;
        members.extend(
            inst.arcs()
                .iter()
                .enumerate()
                .filter(|(_, a)| dist[a.tail] <= r && !(dist[a.head] <= r))
                .map(|(e, _)| e),
        );
    }
    Ok(CutSolution::edges(inst, members)?.with_meta(CutMeta { theta: Some(r), ..CutMeta::default() }))
}

/// Half-open interval `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, theta: f64) -> bool {
        self.lo <= theta && theta < self.hi
    }
}

/// Per arc `(u, v)`: the intervals anchored at the distances to `u` from its
/// nearest and second-nearest terminal, each of length `x_e`. Missing
/// terminals and zero lengths give `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutIntervals {
    pub intervals: Vec<[Option<Interval>; 2]>,
}

impl CutIntervals {
    /// Arcs whose interval contains `theta`.
    pub fn members_at(&self, theta: f64) -> Vec<usize> {
        self.intervals
            .iter()
            .enumerate()
            .filter(|(_, iv)| iv.iter().flatten().any(|i| i.contains(theta)))
            .map(|(e, _)| e)
            .collect()
    }
}

/// Intervals from the 2-nearest-terminal table. The distance from `t_i` to
/// `u` is the minimum over `j != i` of `d(s_j, u)`, so the two nearest
/// terminals determine every ball boundary crossing an arc.
pub fn build_cut_intervals(inst: &DirectedInstance, x: &FractionalSolution) -> Result<CutIntervals> {
    Ok(intervals_from_table(inst, x, &paths::h_nearest_terminals(inst, x, 2)?))
}

/// Interval of arc `e` for the `j`-th nearest terminal of its tail.
fn arc_interval(inst: &DirectedInstance, x: &FractionalSolution, table: &NearTerminalTable, e: usize, j: usize) -> Option<Interval> {
    let xe = x.values[e];
    table.nth(inst.arcs()[e].tail, j).filter(|_| xe > 0.0).map(|(_, d)| Interval { lo: d, hi: d + xe })
}

fn intervals_from_table(inst: &DirectedInstance, x: &FractionalSolution, table: &NearTerminalTable) -> CutIntervals {
    let intervals = (0..inst.m()).map(|e| [arc_interval(inst, x, table, e, 0), arc_interval(inst, x, table, e, 1)]).collect();
    CutIntervals { intervals }
}

/// The 2-nearest-terminal table and the threshold scale from one search.
/// The nearest foreign terminal of each terminal is in its table row, which
/// gives the minimum inter-terminal distance without a second search. The
/// scale never exceeds 1, so with `limit >= 1` the table holds every entry
/// below it.
fn prepare(inst: &DirectedInstance, x: &FractionalSolution, limit: f64) -> Result<(NearTerminalTable, f64)> {
    let table = paths::h_nearest_within(inst, x, 2, limit)?;
    let d = inst
        .terminals()
        .iter()
        .enumerate()
        .flat_map(|(i, &s)| table.get(s).filter(move |&(t, _)| t != i).map(|(_, d)| d))
        .fold(f64::INFINITY, f64::min);
    // the full check reports the violating path
    let scale = if d >= 1.0 - FEASIBILITY_TOL { d.min(1.0) } else { threshold_scale(inst, x)? };
    Ok((table, scale))
}

fn interval_cut(inst: &DirectedInstance, iv: &CutIntervals, theta: f64, meta: CutMeta) -> Result<CutSolution> {
    Ok(CutSolution::edges(inst, iv.members_at(theta))?.with_meta(meta))
}

/// Precomputed state for repeated randomized rounding of one solution.
#[derive(Debug, Clone)]
pub struct DirectedRounder<'a> {
    inst: &'a DirectedInstance,
    intervals: CutIntervals,
    scale: f64,
}

impl<'a> DirectedRounder<'a> {
    pub fn new(inst: &'a DirectedInstance, x: &FractionalSolution) -> Result<Self> {
        let (table, scale) = prepare(inst, x, f64::INFINITY)?;
        Ok(DirectedRounder { inst, intervals: intervals_from_table(inst, x, &table), scale })
    }

    pub fn intervals(&self) -> &CutIntervals {
        &self.intervals
    }

    /// Interval cut at threshold `theta` in (0, 1).
    pub fn at(&self, theta: f64) -> Result<CutSolution> {
        check_theta(theta, 1.0)?;
        let r = theta * self.scale;
        interval_cut(self.inst, &self.intervals, r, CutMeta { theta: Some(r), ..CutMeta::default() })
    }

    /// Trial `trial` of seed `seed`; trial 0 matches [`round_randomized`].
    pub fn trial(&self, seed: u64, trial: u64) -> Result<CutSolution> {
        let mut rng = trial_rng(seed, trial);
        let r = open_unit(&mut rng) * self.scale;
        interval_cut(self.inst, &self.intervals, r, CutMeta { theta: Some(r), ell: None, seed: Some(seed) })
    }
}

/// The interval cut at a uniform threshold drawn from the seeded generator.
pub fn round_randomized(inst: &DirectedInstance, x: &FractionalSolution, seed: u64) -> Result<CutSolution> {
    DirectedRounder::new(inst, x)?.trial(seed, 0)
}

/// Breakpoint of a sweep: value plus signed membership change, packed so
/// that integer order is value, then member, entries before exits. Values
/// are nonnegative, so their bit patterns order like the values.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Event(u128);

impl Event {
    fn new(at: f64, member: u32, enter: bool) -> Self {
        Event(((at + 0.0).to_bits() as u128) << 64 | (member as u128) << 1 | !enter as u128)
    }
    fn at(self) -> f64 {
        f64::from_bits((self.0 >> 64) as u64)
    }
    fn member(self) -> u32 {
        (self.0 >> 1) as u32
    }
    fn enter(self) -> bool {
        self.0 & 1 == 0
    }
}

/// Minimum-cost interval cut over all thresholds in (0, 1).
///
/// Sorts the interval endpoints and sweeps them while maintaining the
/// weight of the active cut; every piece between consecutive breakpoints
/// is evaluated. The reported threshold lies inside the winning piece and
/// the member set and cost are recomputed there directly.
pub fn round_deterministic(inst: &DirectedInstance, x: &FractionalSolution) -> Result<CutSolution> {
    let (table, scale) = prepare(inst, x, 1.0)?;
    let interval = |e: usize, j: usize| arc_interval(inst, x, &table, e, j);
    let mut events = Vec::new();
    for e in 0..inst.m() {
        for i in (0..2).filter_map(|j| interval(e, j)) {
            if i.lo < scale && i.lo < i.hi {
                events.push(Event::new(i.lo, e as u32, true));
                events.push(Event::new(i.hi, e as u32, false));
            }
        }
    }
    events.sort_unstable();
    let theta = sweep_min(&events, inst.m(), scale, |e| inst.arcs()[e as usize].weight).ok_or(Error::NoFiniteCut)?;
    let members = (0..inst.m()).filter(|&e| (0..2).any(|j| interval(e, j).is_some_and(|i| i.contains(theta)))).collect();
    Ok(CutSolution::edges(inst, members)?.with_meta(CutMeta { theta: Some(theta), ..CutMeta::default() }))
}

/// Sweep over breakpoints in `[0, upper)`, returning a threshold inside the
/// cheapest piece. Pieces whose cut contains an infinite-weight member are
/// skipped.
fn sweep_min(events: &[Event], members: usize, upper: f64, weight: impl Fn(u32) -> Weight) -> Option<f64> {
    let mut active = vec![0u8; members];
    let mut finite_sum = 0.0;
    let mut infinite = 0usize;
    let mut best: Option<(f64, f64)> = None;
    let mut i = 0;
    let mut at = 0.0;
    loop {
        while i < events.len() && events[i].at() <= at {
            let ev = events[i];
            let count = &mut active[ev.member() as usize];
            let before = *count;
            if ev.enter() {
                *count += 1;
            } else {
                *count -= 1;
            }
            let after = *count;
            if (before == 0) != (after == 0) {
                let sign = if after > 0 { 1.0 } else { -1.0 };
                match weight(ev.member()) {
                    Weight::Finite(w) => finite_sum += sign * w,
                    Weight::Infinite if after > 0 => infinite += 1,
                    Weight::Infinite => infinite -= 1,
                }
            }
            i += 1;
        }
        let next = if i < events.len() { events[i].at().min(upper) } else { upper };
        if infinite == 0 && best.map_or(true, |(c, _)| finite_sum < c) {
            best = Some((finite_sum, if at > 0.0 { at } else { next / 2.0 }));
        }
        if next >= upper {
            break;
        }
        at = next;
    }
    best.map(|(_, theta)| theta)
}

/// Result of a cut check; `witness` is a surviving terminal path.
#[derive(Debug, Clone, PartialEq)]
pub struct CutCheck {
    pub ok: bool,
    pub witness: Option<TerminalPath>,
}

pub fn verify_cut(inst: &DirectedInstance, cut: &CutSolution) -> Result<CutCheck> {
    if cut.kind != CutKind::Edge {
        return Err(Error::InvalidCut("expected an edge cut".into()));
    }
    if let Some(&e) = cut.members.iter().find(|&&e| e >= inst.m() || inst.arcs()[e].weight.is_infinite()) {
        return Err(Error::InvalidCut(format!("arc {e} is out of range or has infinite weight")));
    }
    let removed = cut.mask(inst.m());
    let witness = closest_pair(
        &Csr::directed(inst),
        inst.terminals(),
        |v| inst.terminal_index(v),
        |_| 0.0,
        |id, _| if removed[id] { f64::INFINITY } else { 0.0 },
        false,
    );
    Ok(CutCheck { ok: witness.is_none(), witness })
}

/// Minimum inter-terminal distance when arcs are read as undirected edges.
pub fn undirected_min_interterminal_distance(inst: &DirectedInstance, x: &FractionalSolution) -> Result<f64> {
    x.check_len(crate::instance::Mode::Edge, inst.m())?;
    let xv = &x.values;
    let p = closest_pair(&undirected_csr(inst), inst.terminals(), |v| inst.terminal_index(v), |_| 0.0, |id, _| xv[id], false);
    Ok(p.map_or(f64::INFINITY, |p| p.length))
}

fn undirected_csr(inst: &DirectedInstance) -> Csr {
    let links: Vec<_> = inst.arcs().iter().map(|a| (a.tail, a.head)).collect();
    Csr::symmetric(inst.n(), &links)
}

/// Undirected ball cut: every edge with exactly one endpoint in some
/// `B(s_i, theta)`, `theta` in (0, 1/2). Arcs of `inst` are read as
/// undirected edges and each is one cut member.
pub fn round_edge_undirected(inst: &DirectedInstance, x: &FractionalSolution, theta: f64) -> Result<CutSolution> {
    check_theta(theta, 0.5)?;
    x.check_len(crate::instance::Mode::Edge, inst.m())?;
    let xv = &x.values;
    let csr = undirected_csr(inst);
    let pair = closest_pair(&csr, inst.terminals(), |v| inst.terminal_index(v), |_| 0.0, |id, _| xv[id], false);
    let d = pair.as_ref().map_or(f64::INFINITY, |p| p.length);
    if let Some(p) = pair.filter(|p| p.length < 1.0 - FEASIBILITY_TOL) {
        return Err(Error::Infeasible {
            from: inst.terminals()[p.from] + 1,
            to: inst.terminals()[p.to] + 1,
            distance: p.length,
        });
    }
    let r = theta * d.min(1.0);
    // Balls of radius below 1/2 are disjoint, so each node belongs to the
    // ball of its nearest terminal or to none.
    let sources: Vec<_> = inst.terminals().iter().map(|&s| (s, 0.0)).collect();
    let labels = nearest_labels(&csr, &sources, 1, |id, _| xv[id], |_| false);
    let mut owner = vec![None; inst.n()];
    for l in &labels.labels {
        if l.dist <= r {
            owner[l.node as usize] = Some(l.term);
        }
    }
    let members = inst
        .arcs()
        .iter()
        .enumerate()
        .filter(|(_, a)| owner[a.tail] != owner[a.head])
        .map(|(e, _)| e)
        .collect();
    Ok(CutSolution::edges(inst, members)?.with_meta(CutMeta { theta: Some(r), ..CutMeta::default() }))
}

/// Undirected counterpart of [`verify_cut`].
pub fn verify_undirected_cut(inst: &DirectedInstance, cut: &CutSolution) -> Result<CutCheck> {
    if cut.kind != CutKind::Edge {
        return Err(Error::InvalidCut("expected an edge cut".into()));
    }
    let removed = cut.mask(inst.m());
    let witness = closest_pair(
        &undirected_csr(inst),
        inst.terminals(),
        |v| inst.terminal_index(v),
        |_| 0.0,
        |id, _| if removed[id] { f64::INFINITY } else { 0.0 },
        false,
    );
    Ok(CutCheck { ok: witness.is_none(), witness })
}

/// Threshold in (0, 1/2) for trial `trial` of seed `seed`, for
/// [`round_edge_undirected`].
pub fn undirected_theta(seed: u64, trial: u64) -> f64 {
    open_unit(&mut trial_rng(seed, trial)) * 0.5
}
