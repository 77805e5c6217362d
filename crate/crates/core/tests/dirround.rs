mod common;

use common::*;
use mwcut_core::*;
use proptest::prelude::*;

/// Random lengths scaled to feasibility; zero on infinite arcs.
fn feasible_lengths(g: &DirectedInstance, raw: &[f64]) -> Option<FractionalSolution> {
    let x = g
        .arcs()
        .iter()
        .zip(raw)
        .map(|(a, &v)| if a.weight.is_infinite() { 0.0 } else { v })
        .collect();
    feasible_from(g, FractionalSolution::edge(x))
}

fn cost_of(g: &DirectedInstance, members: Vec<usize>) -> Option<f64> {
    CutSolution::edges(g, members).ok().map(|c| c.cost)
}

/// Cheapest interval cut over every piece of the breakpoint arrangement.
fn brute_force_sweep(g: &DirectedInstance, rounder: &DirectedRounder, scale: f64) -> Option<f64> {
    let iv = rounder.intervals();
    let mut points: Vec<f64> = iv
        .intervals
        .iter()
        .flatten()
        .flatten()
        .flat_map(|i| [i.lo, i.hi])
        .filter(|&p| p > 0.0 && p < scale)
        .collect();
    points.extend((1..1000).map(|i| scale * i as f64 / 1000.0));
    points.push(0.0);
    points.push(scale);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut candidates: Vec<f64> = points.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect();
    candidates.extend(points.iter().copied().filter(|&p| p > 0.0 && p < scale));
    candidates.into_iter().filter_map(|r| cost_of(g, iv.members_at(r))).min_by(f64::total_cmp)
}

proptest! {
    #[test]
    fn interval_cuts_separate_terminals(g in directed_instance(7, 16), raw in lengths(16)) {
        let Some(x) = feasible_lengths(&g, &raw) else { return Ok(()) };
        let rounder = DirectedRounder::new(&g, &x).unwrap();
        for i in 1..50 {
            let theta = i as f64 / 50.0;
            let Ok(cut) = rounder.at(theta) else { continue };
            prop_assert!(verify_cut(&g, &cut).unwrap().ok, "theta {}", theta);
            prop_assert!(arcs_separate(&g, &cut.mask(g.m())));
            let literal = round_at_theta(&g, &x, theta).unwrap();
            prop_assert!(literal.members.iter().all(|e| cut.members.contains(e)));
            prop_assert!(arcs_separate(&g, &literal.mask(g.m())));
        }
    }

    #[test]
    fn sweep_finds_the_cheapest_piece(g in directed_instance(7, 16), raw in lengths(16)) {
        let Some(x) = feasible_lengths(&g, &raw) else { return Ok(()) };
        let rounder = DirectedRounder::new(&g, &x).unwrap();
        let scale = min_interterminal_distance(&g, &x).unwrap().min(1.0);
        let want = brute_force_sweep(&g, &rounder, scale);
        match round_deterministic(&g, &x) {
            Ok(cut) => {
                let want = want.unwrap();
                prop_assert!((cut.cost - want).abs() <= 1e-9 * (1.0 + want), "{} vs {}", cut.cost, want);
                prop_assert!(verify_cut(&g, &cut).unwrap().ok);
            }
            Err(Error::NoFiniteCut) => prop_assert!(want.is_none()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn deterministic_cost_within_twice_lp(g in directed_instance(7, 16), raw in lengths(16)) {
        let Some(x) = feasible_lengths(&g, &raw) else { return Ok(()) };
        if let Ok(cut) = round_deterministic(&g, &x) {
            prop_assert!(cut.cost <= 2.0 * lp_cost(&g, &x).unwrap());
        }
    }
}

#[test]
fn mwu_solutions_round_within_twice_lp_and_above_optimum() {
    for seed in 0..30 {
        let g = small_directed(seed, 14);
        let r = solve_lp_mwu(&g, 0.05).unwrap();
        let cut = round_deterministic(&g, &r.solution).unwrap();
        let opt = brute_force_dirmc(&g).unwrap();
        assert!(verify_cut(&g, &cut).unwrap().ok);
        assert!(cut.cost <= 2.0 * lp_cost(&g, &r.solution).unwrap(), "seed {seed}");
        assert!(cut.cost >= opt - 1e-9, "seed {seed}");
        for trial in 0..20 {
            let c = DirectedRounder::new(&g, &r.solution).unwrap().trial(seed, trial).unwrap();
            assert!(arcs_separate(&g, &c.mask(g.m())));
        }
    }
}

/// Measure of the thresholds in `(0, scale)` at which arc `e` is cut.
fn cut_measure(iv: &CutIntervals, e: usize, scale: f64) -> f64 {
    let mut parts: Vec<(f64, f64)> =
        iv.intervals[e].iter().flatten().map(|i| (i.lo.max(0.0), i.hi.min(scale))).filter(|p| p.0 < p.1).collect();
    parts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut total, mut reach) = (0.0, f64::NEG_INFINITY);
    for (lo, hi) in parts {
        let lo = lo.max(reach);
        if hi > lo {
            total += hi - lo;
            reach = hi;
        }
    }
    total
}

#[test]
fn per_arc_cut_probability_is_bounded() {
    let trials = 20_000u64;
    for seed in [3u64, 11, 29] {
        let g = random_directed(seed, 120);
        let r = solve_lp_mwu(&g, 0.05).unwrap();
        let rounder = DirectedRounder::new(&g, &r.solution).unwrap();
        let mut hits = vec![0u64; g.m()];
        for t in 0..trials {
            for e in rounder.trial(seed, t).unwrap().members {
                hits[e] += 1;
            }
        }
        for (e, &h) in hits.iter().enumerate() {
            let xe = r.solution.values[e];
            let p = cut_measure(rounder.intervals(), e, 1.0);
            // endpoints are d and d + x, so lengths carry rounding error
            assert!(p <= 2.0 * xe + 1e-12, "seed {seed} arc {e}: measure {p} vs x {xe}");
            // observed frequency against the exact probability, 5 sigma plus one count
            let slack = 5.0 * (p * (1.0 - p) / trials as f64).sqrt() + 1.0 / trials as f64;
            let freq = h as f64 / trials as f64;
            assert!((freq - p).abs() <= slack, "seed {seed} arc {e}: {freq} vs {p}");
        }
    }
}

#[test]
fn randomized_rounding_is_reproducible() {
    let g = random_directed(5, 120);
    let r = solve_lp_mwu(&g, 0.05).unwrap();
    for seed in 0..5 {
        assert_eq!(round_randomized(&g, &r.solution, seed).unwrap(), round_randomized(&g, &r.solution, seed).unwrap());
    }
}

#[test]
fn gap_family_rounding_pays_at_least_the_optimum() {
    let g = gen_gap_family(3).unwrap();
    let r = solve_lp_mwu(&g, 0.05).unwrap();
    let cut = round_deterministic(&g, &r.solution).unwrap();
    assert!(cut.cost >= 7.0 && cut.cost <= 2.0 * r.primal_cost);
    assert!(verify_cut(&g, &cut).unwrap().ok);
}

#[test]
fn undirected_triangle() {
    let g = DirectedInstance::new(3, vec![Arc::new(0, 1, 1.0), Arc::new(1, 2, 1.0), Arc::new(2, 0, 1.0)], vec![0, 1, 2])
        .unwrap();
    let x = FractionalSolution::edge(vec![1.0; 3]);
    for seed in 0..10 {
        let cut = round_edge_undirected(&g, &x, undirected_theta(seed, 0)).unwrap();
        assert_eq!(cut.cost, 3.0);
    }
    let half = FractionalSolution::edge(vec![0.5; 3]);
    assert!(matches!(round_edge_undirected(&g, &half, 0.25), Err(Error::Infeasible { .. })));
}

#[test]
fn undirected_balls_cut_every_path() {
    for seed in 0..30 {
        let g = random_directed(seed, 120);
        let raw: Vec<f64> =
            g.arcs().iter().enumerate().map(|(e, a)| if a.weight.is_infinite() { 0.0 } else { 0.1 + (e % 7) as f64 / 10.0 }).collect();
        let d = undirected_min_interterminal_distance(&g, &FractionalSolution::edge(raw.clone())).unwrap();
        if !(d > 0.0 && d.is_finite()) {
            continue;
        }
        let x = FractionalSolution::edge(raw.iter().map(|v| v / d * (1.0 + 1e-12)).collect());
        let undirected_links: Vec<_> =
            g.arcs().iter().zip(&x.values).flat_map(|(a, &l)| [(a.tail, a.head, l), (a.head, a.tail, l)]).collect();
        for trial in 0..10 {
            let theta = undirected_theta(seed, trial);
            let Ok(cut) = round_edge_undirected(&g, &x, theta) else { continue };
            assert!(verify_undirected_cut(&g, &cut).unwrap().ok, "seed {seed}");
            let r = cut.meta.theta.unwrap();
            // reference: an edge is cut iff its endpoints lie in different balls
            let owner: Vec<Option<usize>> = {
                let dists: Vec<Vec<f64>> =
                    g.terminals().iter().map(|&s| bellman_ford(g.n(), &undirected_links, &[(s, 0.0)])).collect();
                (0..g.n()).map(|v| (0..g.k()).find(|&i| dists[i][v] <= r)).collect()
            };
            let want: Vec<usize> = (0..g.m()).filter(|&e| owner[g.arcs()[e].tail] != owner[g.arcs()[e].head]).collect();
            assert_eq!(cut.members, want, "seed {seed}");
        }
    }
}
