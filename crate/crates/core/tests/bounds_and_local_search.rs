mod common;

use common::arb_graph;
use mwis::bounds::{clique_cover, clique_cover_bound};
use mwis::local_search::{ils_run, IlsBudget};
use mwis::oracle::brute_force_mwis;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn cover_is_a_partition_into_cliques(g in arb_graph(16)) {
        let cover = clique_cover(&g);
        let mut all: Vec<usize> = cover.cliques.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, g.vertices().collect::<Vec<_>>());
        for (c, &w) in cover.cliques.iter().zip(&cover.clique_weights) {
            for (i, &u) in c.iter().enumerate() {
                for &v in &c[i + 1..] {
                    prop_assert!(g.has_edge(u, v));
                }
            }
            prop_assert_eq!(w, c.iter().map(|&v| g.weight(v)).max().unwrap());
        }
    }

    #[test]
    fn bound_dominates_optimum(g in arb_graph(16)) {
        prop_assert!(clique_cover_bound(&g) >= brute_force_mwis(&g).unwrap().weight);
    }

    #[test]
    fn local_search_is_valid_and_bounded(g in arb_graph(16), seed in any::<u64>()) {
        let out = ils_run(&g, IlsBudget::iterations(200), seed);
        out.solution.verify(&g).unwrap();
        prop_assert!(out.solution.weight <= brute_force_mwis(&g).unwrap().weight);
        prop_assert_eq!(out.convergence.last().unwrap().weight, out.solution.weight);
        prop_assert!(out.convergence.windows(2).all(|w| w[0].weight < w[1].weight && w[0].elapsed <= w[1].elapsed));
        // maximal: every outside vertex has a solution neighbour
        for v in g.vertices() {
            if out.solution.vertices.binary_search(&v).is_err() {
                prop_assert!(g.neighbors(v).iter().any(|u| out.solution.vertices.binary_search(u).is_ok()));
            }
        }
    }

    #[test]
    fn local_search_is_deterministic(g in arb_graph(16), seed in any::<u64>()) {
        let a = ils_run(&g, IlsBudget::iterations(100), seed);
        let b = ils_run(&g, IlsBudget::iterations(100), seed);
        prop_assert_eq!(a.solution, b.solution);
        prop_assert_eq!(a.iterations, b.iterations);
    }
}

#[test]
fn local_search_usually_finds_the_optimum_on_g14() {
    let mut hits = 0;
    for seed in 0..100 {
        let g = common::random_graph(seed, 14, 0.3);
        let opt = brute_force_mwis(&g).unwrap().weight;
        let found = ils_run(&g, IlsBudget::iterations(10_000), seed).solution.weight;
        assert!(found <= opt);
        hits += usize::from(found == opt);
    }
    assert!(hits >= 95, "optimum reached in {hits}/100 runs");
}
