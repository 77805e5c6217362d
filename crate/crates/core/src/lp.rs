//! Fractional solutions of the distance LP and their checks.
//!
//! A solution assigns a length `x >= 0` to every arc (edge mode) or every
//! node (node mode). It is feasible when every path between two distinct
//! terminals has length at least 1; in node mode path lengths include both
//! endpoints and terminals must carry `x = 0`.

use crate::error::{Error, Result};
use crate::instance::{DirectedInstance, Mode, NodeInstance, Weight};
use crate::paths::{self, TerminalPath};

/// Default tolerance for feasibility checks.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution {
    pub mode: Mode,
    pub values: Vec<f64>,
}

impl FractionalSolution {
    pub fn edge(values: Vec<f64>) -> Self {
        FractionalSolution { mode: Mode::Edge, values }
    }

    pub fn node(values: Vec<f64>) -> Self {
        FractionalSolution { mode: Mode::Node, values }
    }

    pub fn zeros(mode: Mode, len: usize) -> Self {
        FractionalSolution { mode, values: vec![0.0; len] }
    }

    pub(crate) fn check_len(&self, mode: Mode, len: usize) -> Result<()> {
        if self.mode != mode {
            return Err(Error::Param(format!("expected a {mode:?}-mode solution, got {:?}", self.mode)));
        }
        if self.values.len() != len {
            return Err(Error::DimensionMismatch { expected: len, got: self.values.len() });
        }
        if let Some(v) = self.values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Param(format!("fractional value {v} is not finite and nonnegative")));
        }
        Ok(())
    }
}

/// The two relaxations share cost, feasibility and scaling logic; this
/// trait is what they differ in.
pub trait Relaxation {
    fn mode(&self) -> Mode;
    /// Arcs in edge mode, nodes in node mode.
    fn member_count(&self) -> usize;
    fn member_weight(&self, i: usize) -> Weight;
    /// Validate `x` against this instance.
    fn check_solution(&self, x: &FractionalSolution) -> Result<()>;
    /// Shortest path between two distinct terminals under `x`.
    fn closest_pair(&self, x: &FractionalSolution) -> Result<Option<TerminalPath>>;
    /// Node id of the `i`-th terminal.
    fn terminal(&self, i: usize) -> usize;
}

impl Relaxation for DirectedInstance {
    fn mode(&self) -> Mode {
        Mode::Edge
    }
    fn member_count(&self) -> usize {
        self.m()
    }
    fn member_weight(&self, i: usize) -> Weight {
        self.arcs()[i].weight
    }
    fn check_solution(&self, x: &FractionalSolution) -> Result<()> {
        x.check_len(Mode::Edge, self.m())
    }
    fn closest_pair(&self, x: &FractionalSolution) -> Result<Option<TerminalPath>> {
        paths::closest_terminal_pair(self, x)
    }
    fn terminal(&self, i: usize) -> usize {
        self.terminals()[i]
    }
}

impl Relaxation for NodeInstance {
    fn mode(&self) -> Mode {
        Mode::Node
    }
    fn member_count(&self) -> usize {
        self.n()
    }
    fn member_weight(&self, i: usize) -> Weight {
        self.effective_weight(i)
    }
    fn check_solution(&self, x: &FractionalSolution) -> Result<()> {
        x.check_len(Mode::Node, self.n())?;
        if let Some(&s) = self.terminals().iter().find(|&&s| x.values[s] != 0.0) {
            return Err(Error::Param(format!("terminal {} must have x = 0, has {}", s + 1, x.values[s])));
        }
        Ok(())
    }
    fn closest_pair(&self, x: &FractionalSolution) -> Result<Option<TerminalPath>> {
        paths::node_closest_terminal_pair(self, x)
    }
    fn terminal(&self, i: usize) -> usize {
        self.terminals()[i]
    }
}

/// `sum w x` over finite-weight members. A positive value on an
/// infinite-weight member makes the cost infinite.
pub fn lp_cost<I: Relaxation + ?Sized>(inst: &I, x: &FractionalSolution) -> Result<f64> {
    if x.mode != inst.mode() {
        return Err(Error::Param(format!("expected a {:?}-mode solution", inst.mode())));
    }
    if x.values.len() != inst.member_count() {
        return Err(Error::DimensionMismatch { expected: inst.member_count(), got: x.values.len() });
    }
    let mut cost = 0.0;
    for (i, &v) in x.values.iter().enumerate() {
        match inst.member_weight(i) {
            Weight::Finite(w) => cost += w * v,
            Weight::Infinite if v > 0.0 => return Ok(f64::INFINITY),
            Weight::Infinite => {}
        }
    }
    Ok(cost)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// Shortest distance between two distinct terminals (infinite when no
    /// terminal reaches another).
    pub min_distance: f64,
    /// A shortest violating path when infeasible.
    pub witness: Option<TerminalPath>,
}

pub fn verify_feasible<I: Relaxation + ?Sized>(inst: &I, x: &FractionalSolution, tol: f64) -> Result<Feasibility> {
    inst.check_solution(x)?;
    let pair = inst.closest_pair(x)?;
    let min_distance = pair.as_ref().map_or(f64::INFINITY, |p| p.length);
    let feasible = min_distance >= 1.0 - tol;
    Ok(Feasibility { feasible, min_distance, witness: if feasible { None } else { pair } })
}

/// Check feasibility within [`FEASIBILITY_TOL`] and return the factor
/// `min(D, 1)` by which rounding thresholds are scaled, `D` being the
/// minimum inter-terminal distance. Rounding at `theta * scale` is rounding
/// of `x / scale`, which is exactly feasible.
pub(crate) fn threshold_scale<I: Relaxation + ?Sized>(inst: &I, x: &FractionalSolution) -> Result<f64> {
    let f = verify_feasible(inst, x, FEASIBILITY_TOL)?;
    if let Some(p) = f.witness {
        return Err(Error::Infeasible {
            from: inst.terminal(p.from) + 1,
            to: inst.terminal(p.to) + 1,
            distance: p.length,
        });
    }
    Ok(f.min_distance.min(1.0))
}

/// Divide `lengths` by the minimum inter-terminal distance so the result is
/// feasible with zero tolerance.
pub fn scale_to_feasible<I: Relaxation + ?Sized>(inst: &I, lengths: &FractionalSolution) -> Result<FractionalSolution> {
    inst.check_solution(lengths)?;
    let Some(pair) = inst.closest_pair(lengths)? else {
        return Ok(FractionalSolution::zeros(lengths.mode, lengths.values.len()));
    };
    if pair.length == 0.0 {
        return Err(Error::ZeroDistance { from: inst.terminal(pair.from) + 1, to: inst.terminal(pair.to) + 1 });
    }
    let mut x = lengths.clone();
    let mut d = pair.length;
    if d == 1.0 {
        return Ok(x);
    }
    for v in &mut x.values {
        *v /= d;
    }
    d = inst.closest_pair(&x)?.map_or(f64::INFINITY, |p| p.length);
    // Division can land a hair below 1; nudge until the check is exact.
    for _ in 0..8 {
        if d >= 1.0 {
            return Ok(x);
        }
        let factor = (1.0 + f64::EPSILON) / d;
        for v in &mut x.values {
            *v *= factor;
        }
        d = inst.closest_pair(&x)?.map_or(f64::INFINITY, |p| p.length);
    }
    unreachable!("scaling failed to reach distance 1 (last distance {d})")
}

/// Check a multicommodity flow and return its total value.
///
/// `commodities[c] = (i, j)` routes from terminal `i` to terminal `j` with
/// per-arc amounts `flows[c]`. Each commodity must be nonnegative and
/// conserved away from its endpoints; the summed flow on every finite arc
/// must stay within its weight (up to `tol`, relative). The value is a
/// lower bound on the LP optimum.
pub fn check_multicommodity_flow(
    inst: &DirectedInstance,
    commodities: &[(usize, usize)],
    flows: &[Vec<f64>],
    tol: f64,
) -> Result<f64> {
    if commodities.len() != flows.len() {
        return Err(Error::DimensionMismatch { expected: commodities.len(), got: flows.len() });
    }
    let mut load = vec![0.0; inst.m()];
    let mut total = 0.0;
    for (&(i, j), f) in commodities.iter().zip(flows) {
        if f.len() != inst.m() {
            return Err(Error::DimensionMismatch { expected: inst.m(), got: f.len() });
        }
        if i == j || i >= inst.k() || j >= inst.k() {
            return Err(Error::Param(format!("bad commodity ({i}, {j})")));
        }
        let mut net = vec![0.0; inst.n()];
        for (e, (a, &amount)) in inst.arcs().iter().zip(f).enumerate() {
            if amount < 0.0 {
                return Err(Error::Param(format!("negative flow on arc {e}")));
            }
            net[a.tail] += amount;
            net[a.head] -= amount;
            load[e] += amount;
        }
        let (s, t) = (inst.terminals()[i], inst.terminals()[j]);
        let scale = f.iter().fold(1.0f64, |m, &v| m.max(v));
        for (v, &bal) in net.iter().enumerate() {
            if v != s && v != t && bal.abs() > tol * scale {
                return Err(Error::Param(format!("flow not conserved at node {} (excess {bal})", v + 1)));
            }
        }
        total += net[s];
    }
    for (e, a) in inst.arcs().iter().enumerate() {
        if let Weight::Finite(w) = a.weight {
            if load[e] > w * (1.0 + tol) + tol {
                return Err(Error::Param(format!("arc {e} carries {} over capacity {w}", load[e])));
            }
        }
    }
    Ok(total)
}
