//! Rounding fractional node solutions.
//!
//! For a skipped terminal `l` and threshold `theta` in (0, 1/2) the cut
//! `C(l, theta)` is the union of the boundaries `B+(s_i, theta)` over
//! `i != l`. Node `v` lies in `B+(s, theta)` iff `theta` falls in
//! `[d(s, v) - x_v, d(s, v))`, and these intervals are nested by distance,
//! so only the nearest terminal other than `s_l` matters for `v`. The left
//! end is read off the predecessor on the shortest path rather than
//! computed by subtraction, so consecutive intervals along a path abut
//! exactly in floating point.

use rand::Rng;

use crate::cut::{CutKind, CutMeta, CutSolution};
use crate::error::{Error, Result};
use crate::instance::{NodeInstance, Weight};
use crate::lp::{threshold_scale, FractionalSolution, Relaxation};
use crate::paths::{self, closest_pair, NearTerminalTable};
use crate::rng::{open_unit, trial_rng};
use crate::dirround::CutCheck;

/// `B+(center, radius)`: nodes outside the ball with a neighbor inside.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySet {
    pub center: usize,
    pub radius: f64,
    pub members: Vec<usize>,
}

/// Boundary via the characterization `d(s, v) - x_v <= r < d(s, v)`, with
/// `d(s, v) - x_v` taken as the least distance among the neighbors of `v`.
pub fn boundary(inst: &NodeInstance, x: &FractionalSolution, source: usize, r: f64) -> Result<BoundarySet> {
    if !(r >= 0.0) {
        return Err(Error::Param(format!("radius {r} must be nonnegative")));
    }
    let dist = paths::node_sssp(inst, x, source)?.dist;
    let mut entered = vec![f64::INFINITY; inst.n()];
    for &(u, v) in inst.edges() {
        entered[v] = entered[v].min(dist[u]);
        entered[u] = entered[u].min(dist[v]);
    }
    let members = (0..inst.n()).filter(|&v| entered[v] <= r && r < dist[v]).collect();
    Ok(BoundarySet { center: source, radius: r, members })
}

/// Precomputed state for rounding one node solution at many `(l, theta)`.
#[derive(Debug, Clone)]
pub struct NodeRounder<'a> {
    inst: &'a NodeInstance,
    x: &'a FractionalSolution,
    table: NearTerminalTable,
    scale: f64,
}

impl<'a> NodeRounder<'a> {
    pub fn new(inst: &'a NodeInstance, x: &'a FractionalSolution) -> Result<Self> {
        let scale = threshold_scale(inst, x)?;
        let table = paths::node_h_nearest_terminals(inst, x, 2)?;
        Ok(NodeRounder { inst, x, table, scale })
    }

    /// Interval of `v` for its `j`-th nearest terminal, clipped to `(0, upper)`.
    fn interval(&self, v: usize, j: usize, upper: f64) -> Option<(usize, f64, f64)> {
        let xv = self.x.values[v];
        if xv <= 0.0 || self.inst.is_terminal(v) {
            return None;
        }
        let (term, d) = self.table.nth(v, j)?;
        let (lo, hi) = (self.table.entered(v, j)?, d.min(upper));
        (lo < hi).then_some((term, lo, hi))
    }

    fn members(&self, ell: usize, r: f64) -> Vec<usize> {
        (0..self.inst.n())
            .filter(|&v| {
                let j = match self.table.nth(v, 0) {
                    Some((t, _)) if t == ell => 1,
                    _ => 0,
                };
                self.interval(v, j, f64::INFINITY).is_some_and(|(_, lo, hi)| lo <= r && r < hi)
            })
            .collect()
    }

    fn cut(&self, ell: usize, r: f64, seed: Option<u64>) -> Result<CutSolution> {
        Ok(CutSolution::nodes(self.inst, self.members(ell, r))?
            .with_meta(CutMeta { theta: Some(r), ell: Some(ell), seed }))
    }

    /// `C(ell, theta)` for a terminal index `ell` and `theta` in (0, 1/2).
    pub fn at(&self, ell: usize, theta: f64) -> Result<CutSolution> {
        if ell >= self.inst.k() {
            return Err(Error::Param(format!("terminal index {ell} out of range")));
        }
        if !(theta > 0.0 && theta < 0.5) {
            return Err(Error::Param(format!("theta {theta} must lie in (0, 1/2)")));
        }
        self.cut(ell, theta * self.scale, None)
    }

    /// Trial `trial` of seed `seed`: draws `l`, then `theta`.
    pub fn trial(&self, seed: u64, trial: u64) -> Result<CutSolution> {
        let mut rng = trial_rng(seed, trial);
        let ell = rng.gen_range(0..self.inst.k() as u64) as usize;
        let r = open_unit(&mut rng) * 0.5 * self.scale;
        self.cut(ell, r, Some(seed))
    }

    /// Cheapest `C(l, theta)` over all `l` and `theta`.
    ///
    /// For fixed `theta` the cut weight for `l` is `T1 - E1[l] + E2[l]`:
    /// `T1` sums nodes whose nearest-terminal interval contains `theta`,
    /// and `E1[l]`, `E2[l]` sum, over nodes whose nearest terminal is `l`,
    /// those with `theta` in the first and second interval respectively.
    pub fn deterministic(&self) -> Result<CutSolution> {
        let (n, k) = (self.inst.n(), self.inst.k());
        let upper = 0.5 * self.scale;
        let mut events = Vec::with_capacity(4 * n);
        let mut owner = vec![0u32; n];
        for v in 0..n {
            if let Some((a1, _)) = self.table.nth(v, 0) {
                owner[v] = a1 as u32;
            }
            for j in 0..2 {
                if let Some((_, lo, hi)) = self.interval(v, j, upper) {
                    events.push((lo, v as u32, j as u8, true));
                    events.push((hi, v as u32, j as u8, false));
                }
            }
        }
        events.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)).then(b.3.cmp(&a.3)));

        // Finite sums and infinite-member counts.
        let mut t1 = (0.0, 0i64);
        let mut e1 = vec![(0.0, 0i64); k];
        let mut e2 = vec![(0.0, 0i64); k];
        let apply = |acc: &mut (f64, i64), w: Weight, sign: f64| match w {
            Weight::Finite(w) => acc.0 += sign * w,
            Weight::Infinite => acc.1 += sign as i64,
        };
        let mut best: Option<(f64, usize, f64)> = None;
        let mut i = 0;
        let mut at = 0.0;
        loop {
            while i < events.len() && events[i].0 <= at {
                let (_, v, j, enter) = events[i];
                let w = self.inst.member_weight(v as usize);
                let sign = if enter { 1.0 } else { -1.0 };
                let l = owner[v as usize] as usize;
                if j == 0 {
                    apply(&mut t1, w, sign);
                    apply(&mut e1[l], w, sign);
                } else {
                    apply(&mut e2[l], w, sign);
                }
                i += 1;
            }
            let next = if i < events.len() { events[i].0.min(upper) } else { upper };
            let theta = if at > 0.0 { at } else { next / 2.0 };
            for l in 0..k {
                if t1.1 - e1[l].1 + e2[l].1 == 0 {
                    let cost = t1.0 - e1[l].0 + e2[l].0;
                    if best.map_or(true, |(c, _, _)| cost < c) {
                        best = Some((cost, l, theta));
                    }
                }
            }
            if next >= upper {
                break;
            }
            at = next;
        }
        let (_, ell, r) = best.ok_or(Error::NoFiniteCut)?;
        self.cut(ell, r, None)
    }
}

pub fn round_node_randomized(inst: &NodeInstance, x: &FractionalSolution, seed: u64) -> Result<CutSolution> {
    NodeRounder::new(inst, x)?.trial(seed, 0)
}

pub fn round_node_deterministic(inst: &NodeInstance, x: &FractionalSolution) -> Result<CutSolution> {
    NodeRounder::new(inst, x)?.deterministic()
}

pub fn verify_node_cut(inst: &NodeInstance, cut: &CutSolution) -> Result<CutCheck> {
    if cut.kind != CutKind::Node {
        return Err(Error::InvalidCut("expected a node cut".into()));
    }
    if let Some(&v) = cut.members.iter().find(|&&v| v >= inst.n() || inst.effective_weight(v).is_infinite()) {
        return Err(Error::InvalidCut(format!("node {v} is out of range, a terminal, or of infinite weight")));
    }
    let removed = cut.mask(inst.n());
    let witness = closest_pair(
        &paths::node_csr(inst),
        inst.terminals(),
        |v| inst.terminal_index(v),
        |_| 0.0,
        |_, v| if removed[v] { f64::INFINITY } else { 0.0 },
        true,
    );
    Ok(CutCheck { ok: witness.is_none(), witness })
}
