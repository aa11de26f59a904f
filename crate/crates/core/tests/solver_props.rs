mod common;

use common::arb_graph;
use mwis::oracle::brute_force_mwis;
use mwis::solver::{solve, BranchOrder, SolverConfig, Variant};
use mwis::WeightedGraph;
use proptest::prelude::*;

fn config(variant: Variant) -> SolverConfig {
    SolverConfig { variant, ..SolverConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn exact_on_small_graphs(g in arb_graph(16)) {
        let opt = brute_force_mwis(&g).unwrap().weight;
        for variant in [Variant::Full, Variant::Dense] {
            let out = solve(&g, &config(variant)).unwrap();
            prop_assert_eq!(out.solution.weight, opt);
            prop_assert!(out.solution.optimal);
            out.solution.verify(&g).unwrap();
        }
    }

    #[test]
    fn order_and_pruning_do_not_change_the_weight(g in arb_graph(14)) {
        let reference = solve(&g, &SolverConfig::default()).unwrap().solution.weight;
        for order in [BranchOrder::IncludeFirst, BranchOrder::ExcludeFirst] {
            for pruning in [true, false] {
                let c = SolverConfig { branch_order: order, pruning, ..SolverConfig::default() };
                prop_assert_eq!(solve(&g, &c).unwrap().solution.weight, reference);
            }
        }
    }

    #[test]
    fn disjoint_union_adds_up(a in arb_graph(8), b in arb_graph(8)) {
        let na = a.capacity();
        let mut weights: Vec<u64> = a.vertices().map(|v| a.weight(v)).collect();
        weights.extend(b.vertices().map(|v| b.weight(v)));
        let mut edges = Vec::new();
        for u in a.vertices() {
            edges.extend(a.neighbors(u).iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        for u in b.vertices() {
            edges.extend(b.neighbors(u).iter().filter(|&&v| u < v).map(|&v| (u + na, v + na)));
        }
        let union = WeightedGraph::from_edges(weights, &edges).unwrap();
        let sum = brute_force_mwis(&a).unwrap().weight + brute_force_mwis(&b).unwrap().weight;
        prop_assert_eq!(solve(&union, &SolverConfig::default()).unwrap().solution.weight, sum);
    }

    #[test]
    fn solving_is_deterministic(g in arb_graph(16), seed in any::<u64>()) {
        let c = SolverConfig { seed, ..SolverConfig::default() };
        let a = solve(&g, &c).unwrap();
        let b = solve(&g, &c).unwrap();
        prop_assert_eq!(a.solution, b.solution);
        prop_assert_eq!(a.stats, b.stats);
    }
}

#[test]
fn structured_families_match_oracle() {
    for seed in 0..5 {
        for g in common::structured_family(seed) {
            let opt = brute_force_mwis(&g).unwrap().weight;
            for variant in [Variant::Full, Variant::Dense] {
                assert_eq!(solve(&g, &config(variant)).unwrap().solution.weight, opt);
            }
        }
    }
}

#[test]
fn medium_graphs_agree_across_variants() {
    for seed in 0..30 {
        let mut r = common::rng(seed);
        let n = 30 + seed as usize;
        let w = mwis::generate::uniform_weights(n, 1, 200, &mut r);
        let g = mwis::generate::gnm(n, 2 * n, w, &mut r);
        let full = solve(&g, &config(Variant::Full)).unwrap();
        let dense = solve(&g, &config(Variant::Dense)).unwrap();
        assert_eq!(full.solution.weight, dense.solution.weight, "seed {seed}");
    }
}
