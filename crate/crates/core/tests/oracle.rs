mod common;

use common::*;
use mwcut_core::*;
use proptest::prelude::*;

fn same_optimum(got: Result<CutSolution>, want: Option<f64>) -> std::result::Result<(), String> {
    match (got, want) {
        (Ok(c), Some(w)) if (c.cost - w).abs() <= 1e-9 * (1.0 + w) => Ok(()),
        (Err(Error::NoFiniteCut), None) => Ok(()),
        (got, want) => Err(format!("oracle {got:?}, enumeration {want:?}")),
    }
}

proptest! {
    #[test]
    fn directed_oracle_matches_enumeration(g in directed_instance(7, 14)) {
        let got = exact_min_dirmc(&g);
        if let Ok(c) = &got {
            prop_assert!(arcs_separate(&g, &c.mask(g.m())));
        }
        same_optimum(got, brute_force_dirmc(&g)).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn node_oracle_matches_enumeration(g in node_instance(9, 18)) {
        let got = exact_min_nodemc(&g);
        if let Ok(c) = &got {
            prop_assert!(nodes_separate(&g, &c.mask(g.n())));
        }
        same_optimum(got, brute_force_nodemc(&g)).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn node_split_preserves_optimum(g in node_instance(8, 14)) {
        let split = node_split_reduction(&g).unwrap();
        let direct = exact_min_nodemc(&g);
        let via = exact_min_dirmc(&split.instance);
        match (direct, via) {
            (Ok(a), Ok(b)) => {
                prop_assert!((a.cost - b.cost).abs() < 1e-9);
                let back = split.node_cut(&g, &b).unwrap();
                prop_assert_eq!(back.cost, b.cost);
                prop_assert!(nodes_separate(&g, &back.mask(g.n())));
                prop_assert_eq!(split.edge_cut(&a).unwrap().cost, a.cost);
            }
            (Err(Error::NoFiniteCut), Err(Error::NoFiniteCut)) => {}
            (a, b) => return Err(TestCaseError::fail(format!("{a:?} vs {b:?}"))),
        }
    }

    #[test]
    fn node_split_maps_lengths_both_ways(g in node_instance(8, 14), raw in lengths(8)) {
        let mut vals = raw[..g.n()].to_vec();
        for &s in g.terminals() {
            vals[s] = 0.0;
        }
        let x = FractionalSolution::node(vals);
        let split = node_split_reduction(&g).unwrap();
        let y = split.arc_lengths(&x).unwrap();
        prop_assert_eq!(split.node_lengths(&y).unwrap(), x.clone());
        prop_assert_eq!(
            min_interterminal_distance(&split.instance, &y).unwrap(),
            node_min_interterminal_distance(&g, &x).unwrap()
        );
    }

    #[test]
    fn canonicalization_preserves_optimum(g in node_instance(8, 14)) {
        prop_assert_eq!(canonicalize_node_instance(&g), g.clone());
        // adjacent terminals cannot be separated before or after
        let mut edges = g.edges().to_vec();
        edges.push((0, 1));
        let raw = NodeInstance::new(g.n(), edges, g.weights().to_vec(), g.terminals().to_vec()).unwrap();
        let canon = canonicalize_node_instance(&raw);
        prop_assert!(canon.is_canonical());
        prop_assert_eq!(brute_force_nodemc(&raw), None);
        prop_assert!(matches!(exact_min_nodemc(&canon), Err(Error::NoFiniteCut)));
    }
}

#[test]
fn canonicalization_of_terminal_triangle() {
    let tri = NodeInstance::new(4, vec![(0, 1), (1, 2), (0, 2), (2, 3)], vec![1.0.into(); 4], vec![0, 1, 2]).unwrap();
    let canon = canonicalize_node_instance(&tri);
    assert_eq!((canon.n(), canon.k()), (7, 3));
    assert!(canon.is_canonical());
    assert!(canon.terminals().iter().all(|&s| canon.effective_weight(s).is_infinite()));
}

#[test]
fn canonicalization_keeps_optimum_on_random_instances() {
    // Dummies on a canonical instance: attach them by hand and compare.
    for seed in 0..30 {
        let g = random_node(seed, 8, 2 + seed as usize % 3);
        let n = g.n();
        let mut edges = g.edges().to_vec();
        let mut weights = g.weights().to_vec();
        let mut terminals = Vec::new();
        for (i, &s) in g.terminals().iter().enumerate() {
            edges.push((s, n + i));
            weights[s] = Weight::Infinite;
            terminals.push(n + i);
        }
        weights.extend(std::iter::repeat(Weight::Infinite).take(g.k()));
        let padded = NodeInstance::new(n + g.k(), edges, weights, terminals).unwrap();
        let a = exact_min_nodemc(&g).unwrap().cost;
        let b = exact_min_nodemc(&padded).unwrap().cost;
        assert_eq!(a, b, "seed {seed}");
        assert_eq!(Some(a), brute_force_nodemc(&g));
    }
}

#[test]
fn gap_family_exact_cuts() {
    for level in 0..=3 {
        let g = gen_gap_family(level).unwrap();
        let two_way = exact_min_dirmc(&g).unwrap();
        assert_eq!(two_way.cost, (2 * level + 1) as f64, "level {level}");
        assert_eq!(exact_one_way_cut(&g, 0, 1).unwrap().cost, (level + 1) as f64);
        assert_eq!(exact_one_way_cut(&g, 1, 0).unwrap().cost, (level + 1) as f64);
        let stats = gap_family_stats(level);
        assert_eq!((stats.two_way_cut, stats.one_way_cut), (two_way.cost, (level + 1) as f64));
    }
    assert_eq!(brute_force_dirmc(&gen_gap_family(1).unwrap()), Some(3.0));
}

#[test]
fn fractionality_family_exact_cuts() {
    for h in 2..=5 {
        let g = gen_fractionality_family(h).unwrap();
        let stats = fractionality_stats(h);
        assert_eq!(exact_min_dirmc(&g).unwrap().cost, stats.two_way_cut, "h {h}");
        assert_eq!(exact_one_way_cut(&g, 0, 1).unwrap().cost, stats.one_way_cut, "h {h}");
        assert_eq!(exact_one_way_cut(&g, 1, 0).unwrap().cost, stats.one_way_cut, "h {h}");
        if g.finite_arc_count() <= 20 {
            assert_eq!(brute_force_dirmc(&g), Some(stats.two_way_cut));
        }
    }
}

#[test]
fn stbicut_reduction_is_equivalent_on_every_subset() {
    for seed in 0..40 {
        let g = random_node(seed, 4 + 2 + seed as usize % 7, 4);
        let red = reduce_4terminal_to_stbicut(&g).unwrap();
        let finite: Vec<usize> = g.finite_nodes().collect();
        assert!(finite.len() <= 12);
        for mask in 0u32..(1 << finite.len()) {
            let mut removed = vec![false; red.n];
            for (j, &v) in finite.iter().enumerate() {
                removed[v] = mask >> j & 1 == 1;
            }
            assert_eq!(nodes_separate(&g, &removed[..g.n()]), red.separates(&removed), "seed {seed} mask {mask}");
        }
        let a = exact_min_nodemc(&g).unwrap();
        let b = exact_min_stbicut(&red).unwrap();
        assert!((a.cost - b.cost).abs() < 1e-9, "seed {seed}: {} vs {}", a.cost, b.cost);
        let c = exact_min_dirmc(&red.to_directed().unwrap()).unwrap();
        assert!((c.cost - a.cost).abs() < 1e-9, "seed {seed}");
    }
}
