//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use mwcut_core::*;
use proptest::prelude::*;

/// Bellman-Ford distances from `sources` (each with an initial value) over
/// links `(u, v, len)`.
pub fn bellman_ford(n: usize, links: &[(usize, usize, f64)], sources: &[(usize, f64)]) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; n];
    for &(s, d) in sources {
        dist[s] = dist[s].min(d);
    }
    for _ in 0..n {
        let mut changed = false;
        for &(u, v, l) in links {
            if dist[u] + l < dist[v] {
                dist[v] = dist[u] + l;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

pub fn arc_links(inst: &DirectedInstance, x: &FractionalSolution) -> Vec<(usize, usize, f64)> {
    inst.arcs().iter().zip(&x.values).map(|(a, &l)| (a.tail, a.head, l)).collect()
}

/// Node-weighted distances from `s`, counting both endpoints.
pub fn node_distances(inst: &NodeInstance, x: &FractionalSolution, s: usize) -> Vec<f64> {
    let links: Vec<_> = inst
        .edges()
        .iter()
        .flat_map(|&(u, v)| [(u, v, x.values[v]), (v, u, x.values[u])])
        .collect();
    bellman_ford(inst.n(), &links, &[(s, x.values[s])])
}

fn reachable(n: usize, links: &[(usize, usize)], from: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut stack = vec![from];
    while let Some(u) = stack.pop() {
        for &(a, b) in links {
            if a == u && !seen[b] {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    seen
}

/// Does removing `removed` arcs disconnect every ordered terminal pair?
pub fn arcs_separate(inst: &DirectedInstance, removed: &[bool]) -> bool {
    let links: Vec<_> = inst
        .arcs()
        .iter()
        .enumerate()
        .filter(|(e, _)| !removed[*e])
        .map(|(_, a)| (a.tail, a.head))
        .collect();
    inst.terminals().iter().all(|&s| {
        let seen = reachable(inst.n(), &links, s);
        inst.terminals().iter().all(|&t| t == s || !seen[t])
    })
}

/// Does removing `removed` nodes disconnect every terminal pair?
pub fn nodes_separate(inst: &NodeInstance, removed: &[bool]) -> bool {
    let links: Vec<_> = inst
        .edges()
        .iter()
        .filter(|&&(u, v)| !removed[u] && !removed[v])
        .flat_map(|&(u, v)| [(u, v), (v, u)])
        .collect();
    inst.terminals().iter().all(|&s| {
        let seen = reachable(inst.n(), &links, s);
        inst.terminals().iter().all(|&t| t == s || !seen[t])
    })
}

/// Cheapest subset of `candidates` (by enumeration) satisfying `ok`.
pub fn brute_force_min(
    size: usize,
    candidates: &[usize],
    weight: impl Fn(usize) -> f64,
    ok: impl Fn(&[bool]) -> bool,
) -> Option<f64> {
    assert!(candidates.len() <= 20, "too many candidates for enumeration");
    let mut best: Option<f64> = None;
    let mut removed = vec![false; size];
    for mask in 0u32..(1 << candidates.len()) {
        let mut cost = 0.0;
        for (j, &c) in candidates.iter().enumerate() {
            removed[c] = mask >> j & 1 == 1;
            if removed[c] {
                cost += weight(c);
            }
        }
        if best.map_or(true, |b| cost < b) && ok(&removed) {
            best = Some(cost);
        }
    }
    best
}

pub fn brute_force_dirmc(inst: &DirectedInstance) -> Option<f64> {
    let cands: Vec<usize> = (0..inst.m()).filter(|&e| !inst.arcs()[e].weight.is_infinite()).collect();
    brute_force_min(inst.m(), &cands, |e| inst.arcs()[e].weight.value(), |r| arcs_separate(inst, r))
}

pub fn brute_force_nodemc(inst: &NodeInstance) -> Option<f64> {
    let cands: Vec<usize> = inst.finite_nodes().collect();
    brute_force_min(inst.n(), &cands, |v| inst.effective_weight(v).value(), |r| nodes_separate(inst, r))
}

fn weight_strategy() -> impl Strategy<Value = Weight> {
    prop_oneof![
        4 => (1u32..=8).prop_map(|w| Weight::Finite(w as f64 / 2.0)),
        1 => Just(Weight::Infinite),
    ]
}

/// Small directed instances; terminals are the first `k` nodes.
pub fn directed_instance(max_n: usize, max_m: usize) -> impl Strategy<Value = DirectedInstance> {
    (2..=max_n)
        .prop_flat_map(move |n| {
            let arc = (0..n, 1..n, weight_strategy()).prop_map(move |(u, d, w)| Arc::new(u, (u + d) % n, w));
            (Just(n), 2..=n.min(4), prop::collection::vec(arc, 1..=max_m))
        })
        .prop_map(|(n, k, arcs)| DirectedInstance::new(n, arcs, (0..k).collect()).unwrap())
}

/// Small node instances with non-adjacent terminals (the first `k` nodes).
pub fn node_instance(max_n: usize, max_m: usize) -> impl Strategy<Value = NodeInstance> {
    (3..=max_n)
        .prop_flat_map(move |n| {
            let edge = (0..n, 1..n).prop_map(move |(u, d)| (u, (u + d) % n));
            let weights = prop::collection::vec(weight_strategy(), n);
            (Just(n), 2..=(n - 1).min(5), prop::collection::vec(edge, 1..=max_m), weights)
        })
        .prop_map(|(n, k, edges, weights)| {
            let edges = edges.into_iter().filter(|&(u, v)| !(u < k && v < k)).collect();
            NodeInstance::new(n, edges, weights, (0..k).collect()).unwrap()
        })
}

/// Lengths on a grid of multiples of 1/8.
pub fn lengths(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0u32..=8).prop_map(|v| v as f64 / 8.0), len)
}

/// `raw` scaled to a feasible solution, or `None` when no scaling works.
pub fn feasible_from<I: Relaxation>(inst: &I, raw: FractionalSolution) -> Option<FractionalSolution> {
    scale_to_feasible(inst, &raw).ok()
}

pub fn random_directed(seed: u64, max_finite: usize) -> DirectedInstance {
    let n = 5 + (seed as usize * 7) % 36;
    let k = 2 + (seed as usize) % 5;
    let mut spec = RandomSpec::new(n, (2.5 / (n - 1) as f64).min(0.6), k.min(n), seed, Mode::Edge);
    spec.max_finite = Some(max_finite);
    spec.infinite_fraction = 0.1;
    match gen_random_instance(&spec).unwrap() {
        Instance::Directed(g) => g,
        Instance::Node(_) => unreachable!(),
    }
}

pub fn random_node(seed: u64, n: usize, k: usize) -> NodeInstance {
    let mut spec = RandomSpec::new(n, (3.0 / (n - 1) as f64).min(0.6), k, seed, Mode::Node);
    spec.infinite_fraction = 0.1;
    match gen_random_instance(&spec).unwrap() {
        Instance::Node(g) => g,
        Instance::Directed(_) => unreachable!(),
    }
}

/// Directed instance small enough for enumeration (at most `max_finite`
/// finite arcs).
pub fn small_directed(seed: u64, max_finite: usize) -> DirectedInstance {
    let n = 4 + seed as usize % 5;
    let k = 2 + seed as usize % 3;
    let density = (0.8 * max_finite as f64 / (n * (n - 1)) as f64).min(0.9);
    let mut spec = RandomSpec::new(n, density, k, seed, Mode::Edge);
    spec.max_finite = Some(max_finite);
    spec.infinite_fraction = 0.1;
    match gen_random_instance(&spec).unwrap() {
        Instance::Directed(g) => g,
        Instance::Node(_) => unreachable!(),
    }
}
