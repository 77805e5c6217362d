//! Analytic instance families and random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Arc, DirectedInstance, Instance, Mode, NodeInstance, Weight};
use crate::lp::FractionalSolution;

/// Closed-form reference values of a family member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyStats {
    /// Level `i` for the gap family, `h` for the fractionality family.
    pub index: usize,
    pub alpha: f64,
    pub one_way_cut: f64,
    pub two_way_cut: f64,
    pub lp_opt: f64,
    pub flow_opt: f64,
    /// Fractionality family only: `x(u_i, u_i+1) + x(v_i, v_i+1)` at every
    /// optimum.
    pub pair_sum: Option<f64>,
}

const MAX_NODES: usize = 10_000_000;

/// Gap family level `i` with terminals `s` (index 0) and `t` (index 1).
///
/// Level 0 is `s -> q <- t`, `q -> r` (weight 1), `s <- r -> t`. Level
/// `i + 1` takes two copies `H`, `H'` of level `i`, identifies `t` of `H`
/// with `s` of `H'` as the center `v`, and adds `v1`, `v2` with unit arcs
/// `v1 -> v -> v2` and infinite arcs `s -> v1`, `t -> v1`, `v2 -> s`,
/// `v2 -> t`, where `s` is `H`'s source and `t` is `H'`'s sink.
pub fn gen_gap_family(level: usize) -> Result<DirectedInstance> {
    if level > 20 || 5usize << level > MAX_NODES {
        return Err(Error::Param(format!("gap family level {level} exceeds {MAX_NODES} nodes")));
    }
    let (n, arcs, s, t) = gap_level(level);
    DirectedInstance::new(n, arcs, vec![s, t])
}

fn gap_level(level: usize) -> (usize, Vec<Arc>, usize, usize) {
    let inf = Weight::Infinite;
    if level == 0 {
        let (s, q, r, t) = (0, 1, 2, 3);
        let arcs = vec![Arc::new(s, q, inf), Arc::new(t, q, inf), Arc::new(q, r, 1.0), Arc::new(r, s, inf), Arc::new(r, t, inf)];
        return (4, arcs, s, t);
    }
    let (n, sub, s0, t0) = gap_level(level - 1);
    let mut arcs = sub.clone();
    let center = t0;
    // Relabel the second copy: its source becomes the center.
    let mut map = vec![0; n];
    let mut next = n;
    for (u, slot) in map.iter_mut().enumerate() {
        if u == s0 {
            *slot = center;
        } else {
            *slot = next;
            next += 1;
        }
    }
    arcs.extend(sub.iter().map(|a| Arc::new(map[a.tail], map[a.head], a.weight)));
    let (s, t) = (s0, map[t0]);
    let (v1, v2) = (next, next + 1);
    arcs.extend([
        Arc::new(v1, center, 1.0),
        Arc::new(center, v2, 1.0),
        Arc::new(s, v1, Weight::Infinite),
        Arc::new(t, v1, Weight::Infinite),
        Arc::new(v2, s, Weight::Infinite),
        Arc::new(v2, t, Weight::Infinite),
    ]);
    (next + 2, arcs, s, t)
}

/// `alpha_i = 2 - 1/(i + 1)`; other values from the construction.
pub fn gap_family_stats(level: usize) -> FamilyStats {
    let i = level as f64;
    FamilyStats {
        index: level,
        alpha: 2.0 - 1.0 / (i + 1.0),
        one_way_cut: i + 1.0,
        two_way_cut: 2.0 * i + 1.0,
        lp_opt: i + 1.0,
        flow_opt: i + 1.0,
        pair_sum: None,
    }
}

/// `alpha` by iterating `alpha' = (4 - alpha) / (3 - alpha)` from 1.
pub fn gap_alpha_by_recurrence(level: usize) -> f64 {
    (0..level).fold(1.0, |a, _| (4.0 - a) / (3.0 - a))
}

/// An optimal fractional solution of the gap family: the unit arc of level
/// 0 gets 1; each level halves both copies and puts 1/2 on its two new unit
/// arcs. Its cost is `level + 1` exactly.
pub fn gap_family_primal(level: usize) -> FractionalSolution {
    fn go(level: usize) -> Vec<f64> {
        if level == 0 {
            return vec![0.0, 0.0, 1.0, 0.0, 0.0];
        }
        let sub = go(level - 1);
        let mut x: Vec<f64> = sub.iter().chain(&sub).map(|v| v / 2.0).collect();
        x.extend([0.5, 0.5, 0.0, 0.0, 0.0, 0.0]);
        x
    }
    FractionalSolution::edge(go(level))
}

/// A maximum two-commodity flow of the gap family as per-arc amounts for
/// `s -> t` (index 0) and `t -> s` (index 1), of total value `level + 1`.
///
/// Level 0 routes 1/2 along `s q r t` and 1/2 along `t q r s`. Each level
/// concatenates the flows of its copies through the center and adds one
/// unit along `s v1 v v2 t`.
pub fn gap_family_flow(level: usize) -> [Vec<f64>; 2] {
    if level == 0 {
        return [vec![0.5, 0.0, 0.5, 0.0, 0.5], vec![0.0, 0.5, 0.5, 0.5, 0.0]];
    }
    let [st, ts] = gap_family_flow(level - 1);
    let extend = |f: &Vec<f64>, tail: [f64; 6]| -> Vec<f64> { f.iter().chain(f).copied().chain(tail).collect() };
    [extend(&st, [1.0, 1.0, 1.0, 0.0, 0.0, 1.0]), extend(&ts, [0.0; 6])]
}

/// Fractionality family with terminals `s` (node 0) and `t` (node 1),
/// `u_i = 1 + i` and `v_i = 1 + h + i` for `i` in `1..=h`.
///
/// Arc order: `(u_i, u_i+1)` for `i < h`, then `(v_i, v_i+1)`, then the
/// infinite arcs `s u_1`, `t v_1`, `v_h t`, `u_h s` and the cross arcs
/// `(u_i+1, v_i)`, `(v_i+1, u_i)`.
pub fn gen_fractionality_family(h: usize) -> Result<DirectedInstance> {
    if h < 2 {
        return Err(Error::Param(format!("fractionality family needs h >= 2, got {h}")));
    }
    if 2 * h + 2 > MAX_NODES {
        return Err(Error::Param(format!("h = {h} exceeds {MAX_NODES} nodes")));
    }
    let u = |i: usize| 1 + i;
    let v = |i: usize| 1 + h + i;
    let inf = Weight::Infinite;
    let mut arcs: Vec<Arc> = (1..h).map(|i| Arc::new(u(i), u(i + 1), 1.0)).collect();
    arcs.extend((1..h).map(|i| Arc::new(v(i), v(i + 1), 1.0)));
    arcs.extend([Arc::new(0, u(1), inf), Arc::new(1, v(1), inf), Arc::new(v(h), 1, inf), Arc::new(u(h), 0, inf)]);
    for i in 1..h {
        arcs.push(Arc::new(u(i + 1), v(i), inf));
        arcs.push(Arc::new(v(i + 1), u(i), inf));
    }
    DirectedInstance::new(2 * h + 2, arcs, vec![0, 1])
}

/// Arc indices of `(u_i, u_i+1)` and `(v_i, v_i+1)` for `i` in `1..h`.
pub fn fractionality_pairs(h: usize) -> Vec<(usize, usize)> {
    (0..h.saturating_sub(1)).map(|i| (i, h - 1 + i)).collect()
}

/// `lp_opt = flow_opt = 2(h - 1)/h`. A single unit arc breaks one
/// direction, so the one-way cut is 1; the two-way cut is 1 for `h = 2`
/// (one arc lies on every path) and 2 otherwise.
pub fn fractionality_stats(h: usize) -> FamilyStats {
    let hf = h as f64;
    let lp = 2.0 * (hf - 1.0) / hf;
    let two_way = if h <= 2 { 1.0 } else { 2.0 };
    FamilyStats {
        index: h,
        alpha: two_way / lp,
        one_way_cut: 1.0,
        two_way_cut: two_way,
        lp_opt: lp,
        flow_opt: lp,
        pair_sum: Some(2.0 / hf),
    }
}

/// Parameters of [`gen_random_instance`].
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSpec {
    pub n: usize,
    /// Probability of each ordered pair (dirmc) or unordered pair (nodemc).
    pub density: f64,
    pub k: usize,
    /// Finite weights are uniform in `[lo, hi]`, rounded to 3 decimals.
    pub weight_range: (f64, f64),
    /// Probability that a member is given infinite weight.
    pub infinite_fraction: f64,
    /// Reject samples with more finite-weight members than this.
    pub max_finite: Option<usize>,
    pub seed: u64,
    pub mode: Mode,
}

impl RandomSpec {
    pub fn new(n: usize, density: f64, k: usize, seed: u64, mode: Mode) -> Self {
        RandomSpec {
            n,
            density,
            k,
            weight_range: (1.0, 10.0),
            infinite_fraction: 0.0,
            max_finite: None,
            seed,
            mode,
        }
    }
}

const MAX_ATTEMPTS: usize = 10_000;

/// A random instance in which every ordered terminal pair is joined by a
/// path and every such path crosses a finite-weight member. Rejection
/// sampled from one seeded stream, so equal specs give equal instances.
pub fn gen_random_instance(spec: &RandomSpec) -> Result<Instance> {
    let (lo, hi) = spec.weight_range;
    if spec.k < 2 || spec.k > spec.n {
        return Err(Error::Param(format!("need 2 <= k <= n, got k = {}, n = {}", spec.k, spec.n)));
    }
    if !(0.0..=1.0).contains(&spec.density) || !(0.0..=1.0).contains(&spec.infinite_fraction) {
        return Err(Error::Param("density and infinite fraction must lie in [0, 1]".into()));
    }
    if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::Param(format!("bad weight range [{lo}, {hi}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let weight = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(spec.infinite_fraction) {
            Weight::Infinite
        } else {
            Weight::Finite((rng.gen_range(lo..=hi) * 1000.0).round() / 1000.0)
        }
    };
    for _ in 0..MAX_ATTEMPTS {
        let terminals = rand::seq::index::sample(&mut rng, spec.n, spec.k).into_vec();
        let inst = match spec.mode {
            Mode::Edge => {
                let mut arcs = Vec::new();
                for u in 0..spec.n {
                    for v in 0..spec.n {
                        if u != v && rng.gen_bool(spec.density) {
                            arcs.push(Arc::new(u, v, weight(&mut rng)));
                        }
                    }
                }
                Instance::Directed(DirectedInstance::new(spec.n, arcs, terminals)?)
            }
            Mode::Node => {
                let mut edges = Vec::new();
                for u in 0..spec.n {
                    for v in u + 1..spec.n {
                        if rng.gen_bool(spec.density) {
                            edges.push((u, v));
                        }
                    }
                }
                let mut weights: Vec<Weight> = (0..spec.n).map(|_| weight(&mut rng)).collect();
                for &s in &terminals {
                    weights[s] = Weight::Infinite;
                }
                Instance::Node(NodeInstance::new(spec.n, edges, weights, terminals)?)
            }
        };
        if acceptable(&inst, spec.max_finite) {
            return Ok(inst);
        }
    }
    Err(Error::Param(format!("no acceptable instance after {MAX_ATTEMPTS} samples")))
}

fn acceptable(inst: &Instance, max_finite: Option<usize>) -> bool {
    // adjacency with a flag for finite (cuttable) steps
    let (n, terminals, adj, finite_count): (usize, &[usize], Vec<Vec<(usize, bool)>>, usize) = match inst {
        Instance::Directed(d) => {
            let mut adj = vec![Vec::new(); d.n()];
            for a in d.arcs() {
                adj[a.tail].push((a.head, !a.weight.is_infinite()));
            }
            (d.n(), d.terminals(), adj, d.finite_arc_count())
        }
        Instance::Node(g) => {
            if !g.is_canonical() {
                return false;
            }
            let mut adj = vec![Vec::new(); g.n()];
            for &(u, v) in g.edges() {
                adj[u].push((v, !g.effective_weight(v).is_infinite()));
                adj[v].push((u, !g.effective_weight(u).is_infinite()));
            }
            (g.n(), g.terminals(), adj, g.finite_nodes().count())
        }
    };
    if max_finite.is_some_and(|m| finite_count > m) {
        return false;
    }
    let reach = |s: usize, free_only: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for &(v, finite) in &adj[u] {
                if !seen[v] && !(free_only && finite) {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    };
    terminals.iter().all(|&s| {
        let all = reach(s, false);
        let free = reach(s, true);
        terminals.iter().all(|&t| t == s || (all[t] && !free[t]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{check_multicommodity_flow, lp_cost, verify_feasible};

    #[test]
    fn gap_family_sizes() {
        for i in 0..=6 {
            let g = gen_gap_family(i).unwrap();
            assert_eq!(g.n(), 5 * (1 << i) - 1, "level {i}");
            assert_eq!(g.finite_arc_count(), 3 * (1 << i) - 2, "level {i}");
            assert!(g.arcs().iter().all(|a| a.weight == Weight::Finite(1.0) || a.weight.is_infinite()));
        }
        assert_eq!(gen_gap_family(1).unwrap().finite_arc_count(), 4);
        assert_eq!(gen_gap_family(6).unwrap().m(), 698);
        assert!(gen_gap_family(30).is_err());
    }

    #[test]
    fn closed_form_alpha_matches_recurrence() {
        for i in 0..=10 {
            let s = gap_family_stats(i);
            assert!((s.alpha - gap_alpha_by_recurrence(i)).abs() < 1e-12, "level {i}");
            assert_eq!(s.alpha, s.two_way_cut / s.lp_opt);
        }
        assert_eq!(gap_family_stats(1).two_way_cut, 3.0);
        assert!(2.0 - gap_family_stats(1000).alpha < 1e-3);
    }

    #[test]
    fn gap_primal_and_flow_certify_each_other() {
        for i in 0..=6 {
            let g = gen_gap_family(i).unwrap();
            let x = gap_family_primal(i);
            assert!(verify_feasible(&g, &x, 0.0).unwrap().feasible, "level {i}");
            assert_eq!(lp_cost(&g, &x).unwrap(), (i + 1) as f64);
            let [st, ts] = gap_family_flow(i);
            let value = check_multicommodity_flow(&g, &[(0, 1), (1, 0)], &[st, ts], 1e-12).unwrap();
            assert_eq!(value, (i + 1) as f64);
        }
    }

    #[test]
    fn fractionality_uniform_solution() {
        for h in 2..=8 {
            let g = gen_fractionality_family(h).unwrap();
            assert_eq!(g.finite_arc_count(), 2 * (h - 1));
            let x: Vec<f64> = g.arcs().iter().map(|a| if a.weight.is_infinite() { 0.0 } else { 1.0 / h as f64 }).collect();
            let x = FractionalSolution::edge(x);
            assert!(verify_feasible(&g, &x, 1e-12).unwrap().feasible, "h {h}");
            let want = fractionality_stats(h).lp_opt;
            assert!((lp_cost(&g, &x).unwrap() - want).abs() < 1e-12);
        }
        assert!(gen_fractionality_family(1).is_err());
        assert_eq!(fractionality_stats(4).lp_opt, 1.5);
    }

    #[test]
    fn random_instances_are_reproducible() {
        let spec = RandomSpec::new(8, 0.4, 3, 1, Mode::Edge);
        assert_eq!(gen_random_instance(&spec).unwrap(), gen_random_instance(&spec).unwrap());
        let spec = RandomSpec::new(8, 0.4, 3, 1, Mode::Node);
        let Instance::Node(g) = gen_random_instance(&spec).unwrap() else { panic!() };
        assert!(g.is_canonical());
        assert!(gen_random_instance(&RandomSpec::new(3, 0.5, 4, 0, Mode::Edge)).is_err());
    }
}
