use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tsd_core::adversaries::{gen_random_graph, gen_random_tree, LabelScheme};
use tsd_core::format::{parse_instance, write_instance};
use tsd_core::game::{play, AdversaryInstance, GameParameters, Knowledge};
use tsd_core::graph::{NodeId, TemporalGraph, Time};
use tsd_core::infection::{run_round, SeedInfection, TiePolicy};
use tsd_core::separators::{
    balanced_separator, check_separator, heuristic_tree_decomposition, NodeWeights,
};
use tsd_core::strategies::StrategySpec;
use tsd_core::verify::{check_engine_case, random_engine_case};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Applies a node permutation to an instance.
fn relabel(inst: &AdversaryInstance, perm: &[NodeId]) -> AdversaryInstance {
    let g = &inst.graph;
    let edges = g.edges().iter().map(|e| (perm[e.u], perm[e.v], e.label));
    let graph = TemporalGraph::new(g.n(), g.t_max(), edges).unwrap();
    AdversaryInstance::new(
        graph,
        inst.delta,
        perm[inst.source],
        inst.schedule.clone(),
        inst.tie,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn engine_agrees_with_oracle_and_tree_properties(seed in any::<u64>(), n_max in 1usize..40) {
        let case = random_engine_case(n_max, &mut rng(seed));
        let violations = check_engine_case(&case, seed ^ 1);
        prop_assert!(violations.is_empty(), "{:?}", violations);
    }

    #[test]
    fn lifting_never_changes_a_round(seed in any::<u64>()) {
        let case = random_engine_case(25, &mut rng(seed));
        let lifted = case.graph.complete_lift(case.delta);
        let a = run_round(&case.graph, case.seed, case.delta, TiePolicy::LowestId).unwrap();
        let b = run_round(&lifted, case.seed, case.delta, TiePolicy::LowestId).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn relabeling_permutes_infection_times(seed in any::<u64>(), shift in 1usize..50) {
        let case = random_engine_case(30, &mut rng(seed));
        let n = case.graph.n();
        let perm: Vec<NodeId> = (0..n).map(|v| (v + shift) % n).collect();
        let edges = case.graph.edges().iter().map(|e| (perm[e.u], perm[e.v], e.label));
        let g2 = TemporalGraph::new(n, case.graph.t_max(), edges).unwrap();
        let seed2 = SeedInfection { node: perm[case.seed.node], time: case.seed.time };
        let a = run_round(&case.graph, case.seed, case.delta, TiePolicy::LowestId).unwrap();
        let b = run_round(&g2, seed2, case.delta, TiePolicy::HighestId).unwrap();
        for (v, &pv) in perm.iter().enumerate() {
            prop_assert_eq!(a.time(v), b.time(pv));
        }
    }

    #[test]
    fn brute_force_price_is_permutation_equivariant(seed in any::<u64>(), n in 2usize..40) {
        // Brute force watches in index order, so moving the source to index i
        // must give the price of a source at index i, whatever the graph.
        let inst = gen_random_tree(n, &LabelScheme::default(), &mut rng(seed)).unwrap();
        let target = (seed as usize) % n;
        let mut perm: Vec<NodeId> = (0..n).collect();
        perm.swap(inst.source, target);
        let moved = relabel(&inst, &perm);
        let price = |i: &AdversaryInstance| {
            let params = GameParameters::for_instance(i, 1, Knowledge::Unknown);
            let mut s = StrategySpec::Brute.build();
            play(i, s.as_mut(), &params, n * n, &mut rng(0)).unwrap()
        };
        let t = price(&moved);
        let per_round = inst.outcome(0).unwrap().count() as u64;
        prop_assert!(t.won);
        prop_assert_eq!(t.price, per_round * (target + 2).min(n) as u64);
    }

    #[test]
    fn consistent_rounds_repeat_exactly(seed in any::<u64>(), n in 1usize..60) {
        let inst = gen_random_tree(n, &LabelScheme::default(), &mut rng(seed)).unwrap();
        let first = inst.outcome(0).unwrap();
        for round in 1..4 {
            prop_assert_eq!(&inst.outcome(round).unwrap(), &first);
        }
    }

    #[test]
    fn written_instances_parse_back(seed in any::<u64>(), n in 1usize..30, dynamic in 0usize..4) {
        let scheme = LabelScheme { dynamic_seeds: dynamic, ..LabelScheme::default() };
        let m = n - 1 + n / 3;
        let inst = gen_random_graph(n, m.min(n * (n - 1) / 2), &scheme, &mut rng(seed)).unwrap();
        prop_assert_eq!(parse_instance(&write_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn separators_from_min_fill_are_balanced(seed in any::<u64>(), n in 1usize..50, extra in 0usize..40) {
        let m = (n - 1 + extra).min(n * (n - 1) / 2);
        let inst = gen_random_graph(n, m, &LabelScheme::default(), &mut rng(seed)).unwrap();
        let g = inst.graph.underlying_static();
        let td = heuristic_tree_decomposition(&g);
        prop_assert!(td.check(&g).is_ok());
        let subset: Vec<NodeId> = (0..n).filter(|v| (seed >> (v % 64)) & 1 == 1).collect();
        let w = if subset.is_empty() { NodeWeights::uniform(n) } else { NodeWeights::from_set(n, subset) };
        let s = balanced_separator(&g, &w, &td);
        prop_assert!(check_separator(&g, &w, &s, td.width() + 1).is_ok(), "{:?}", s);
    }
}

#[test]
fn seed_time_past_every_label_infects_only_the_source() {
    let g = TemporalGraph::new(3, 5, [(0, 1, 2), (1, 2, 4)]).unwrap();
    let o = run_round(
        &g,
        SeedInfection {
            node: 0,
            time: 5 as Time,
        },
        3,
        TiePolicy::LowestId,
    )
    .unwrap();
    assert_eq!(o.count(), 1);
}
