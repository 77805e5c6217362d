//! Instances shared by the benchmarks.

use mwcut_core::{open_unit, trial_rng, Arc, DirectedInstance, FractionalSolution};

/// Sparse random instance with `m` arcs on `m / 4` nodes and 8 terminals,
/// with a feasible `x`: arcs into terminals have length 1, the rest are
/// uniform in [0, 1/10).
pub fn synthetic(m: usize, seed: u64) -> (DirectedInstance, FractionalSolution) {
    let n = (m / 4).max(16);
    let terminals: Vec<usize> = (0..8).map(|i| i * (n / 8)).collect();
    let mut rng = trial_rng(seed, 0);
    let mut pick = |bound: usize| ((open_unit(&mut rng) * bound as f64) as usize).min(bound - 1);
    let mut arcs = Vec::with_capacity(m);
    let mut lengths = Vec::with_capacity(m);
    while arcs.len() < m {
        let (u, v) = (pick(n), pick(n));
        if u != v {
            arcs.push(Arc::new(u, v, 1.0 + pick(10) as f64));
            lengths.push(if terminals.contains(&v) { 1.0 } else { pick(1 << 20) as f64 / (10 << 20) as f64 });
        }
    }
    let inst = DirectedInstance::new(n, arcs, terminals).expect("valid synthetic instance");
    (inst, FractionalSolution::edge(lengths))
}
