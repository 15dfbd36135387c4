//! Randomised invariants checked against brute-force references.

use mim_core::exact::exact_spread;
use mim_core::mckp::{brute_force_mckp, solve_mckp};
use mim_core::network::{LayerSpec, ModelKind, MultiplexNetwork, NodeId, SeedSet};
use mim_core::pgm::{chow_liu_fit, pearson_matrix, variable_grouping, GroupKind};
use mim_core::propagation::{simulate_once, SpreadEvaluator, StatusDataset, WorldSet};
use mim_core::reasoner::{bound_best, bound_general, bound_worst};
use mim_core::seeding::{celf_greedy, naive_greedy};
use proptest::prelude::*;

const PROBS: [f64; 4] = [0.2, 0.5, 0.8, 1.0];

type RawLayer = (bool, Vec<(u32, u32, usize)>);

fn build(n: usize, layers: &[RawLayer], force_ic: bool) -> MultiplexNetwork {
    let specs = layers
        .iter()
        .map(|(lt, edges)| {
            let lt = *lt && !force_ic;
            let mut spec = LayerSpec::new(if lt { ModelKind::LT } else { ModelKind::IC });
            let mut seen = std::collections::BTreeSet::new();
            for &(s, d, p) in edges {
                let (s, d) = (s % n as u32, d % n as u32);
                if s == d || !seen.insert((s, d)) {
                    continue;
                }
                spec.edges.push((s, d, if lt { None } else { Some(PROBS[p % PROBS.len()]) }));
            }
            spec
        })
        .collect();
    MultiplexNetwork::new(n, specs).unwrap()
}

fn raw_network(max_layers: usize, max_edges: usize) -> impl Strategy<Value = (usize, Vec<RawLayer>)> {
    (
        3usize..=7,
        prop::collection::vec(
            (any::<bool>(), prop::collection::vec((0u32..7, 0u32..7, 0usize..4), 1..=max_edges)),
            1..=max_layers,
        ),
    )
}

fn subset(n: usize, mask: u32) -> Vec<NodeId> {
    (0..n as NodeId).filter(|v| mask >> v & 1 == 1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_spread_is_monotone_and_submodular(
        (n, layers) in raw_network(3, 4),
        a in any::<u32>(),
        extra in any::<u32>(),
        v in 0u32..7,
    ) {
        let net = build(n, &layers, true);
        let v = v % n as u32;
        let a_set = subset(n, a);
        let b_set = subset(n, a | extra);
        prop_assume!(!b_set.contains(&v));
        let s = |nodes: &[NodeId]| exact_spread(&net, &SeedSet::from_nodes(nodes.iter().copied())).unwrap();
        let with = |set: &[NodeId]| {
            let mut x = set.to_vec();
            x.push(v);
            x
        };
        prop_assert!(s(&a_set) <= s(&b_set) + 1e-9);
        let gain_a = s(&with(&a_set)) - s(&a_set);
        let gain_b = s(&with(&b_set)) - s(&b_set);
        prop_assert!(gain_a >= gain_b - 1e-9, "gain on subset {gain_a} < gain on superset {gain_b}");
    }

    #[test]
    fn certain_edges_always_fire_across_layers(
        (n, layers) in raw_network(3, 5),
        seeds in any::<u32>(),
        rng_seed in any::<u64>(),
    ) {
        let net = build(n, &layers, false);
        let seeds = SeedSet::from_nodes(subset(n, seeds | 1));
        let trace = simulate_once(&net, &seeds, rng_seed).unwrap();
        let active = |v: NodeId| trace.activated.binary_search(&v).is_ok();
        for s in seeds.iter() {
            prop_assert!(active(s));
        }
        for layer in net.layers() {
            for e in layer.edges() {
                // an active identity spreads in every layer it belongs to
                let certain = match layer.model() {
                    ModelKind::IC => e.weight >= 1.0,
                    ModelKind::LT => e.weight >= layer.threshold(e.dst).unwrap(),
                };
                if certain && active(e.src) {
                    prop_assert!(active(e.dst), "edge {}->{} in layer {}", e.src, e.dst, layer.id());
                }
            }
            prop_assert_eq!(
                &trace.per_layer_activated[layer.id()],
                &trace.activated.iter().copied().filter(|&v| layer.is_member(v)).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn celf_matches_naive_greedy_on_ic(
        (n, layers) in raw_network(3, 6),
        budget in 0usize..5,
        world_seed in any::<u64>(),
    ) {
        let net = build(n, &layers, true);
        let worlds = WorldSet::sample(&net, 40, world_seed);
        let sigma = SpreadEvaluator::new(&net, &worlds, net.all_layers());
        let cands: Vec<NodeId> = (0..n as NodeId).collect();
        let lazy = celf_greedy(&sigma, &cands, budget);
        let naive = naive_greedy(&sigma, &cands, budget).prefixes();
        prop_assert_eq!(lazy, naive);
    }

    #[test]
    fn mckp_is_exact_and_monotone_in_budget(
        profits in prop::collection::vec(prop::collection::vec(-5.0f64..20.0, 1..6), 1..=4),
        l in 0usize..6,
    ) {
        let small = solve_mckp(&profits, l).unwrap();
        let large = solve_mckp(&profits, l + 1).unwrap();
        prop_assert!(small.total_cost() <= l);
        prop_assert_eq!(small.total_profit(), brute_force_mckp(&profits, l).unwrap());
        prop_assert!(small.total_profit() <= large.total_profit());
    }

    #[test]
    fn grouping_partitions_every_node(
        rows in prop::collection::vec(prop::collection::vec(0u8..2, 6), 2..40),
        xi in 0.05f64..=1.0,
    ) {
        let d = StatusDataset::from_rows(&rows).unwrap();
        let q = pearson_matrix(&d).unwrap();
        let p = variable_grouping(&d, &q, xi).unwrap();
        let mut seen = vec![0usize; d.num_nodes()];
        for (gi, g) in p.groups.iter().enumerate() {
            prop_assert!(!g.members.is_empty());
            prop_assert!(g.members.contains(&g.representative));
            for &v in &g.members {
                seen[v as usize] += 1;
                prop_assert_eq!(p.membership[v as usize], gi);
                let sum = d.column_sum(v as usize);
                match g.kind {
                    GroupKind::AlwaysActive => prop_assert_eq!(sum, d.num_rows()),
                    GroupKind::NeverActive => prop_assert_eq!(sum, 0),
                    GroupKind::Correlated => prop_assert!(sum > 0 && sum < d.num_rows()),
                }
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn fitted_tree_is_a_normalised_distribution(
        rows in prop::collection::vec(prop::collection::vec(0u8..2, 6), 2..40),
        alpha in 0.1f64..3.0,
    ) {
        let d = StatusDataset::from_rows(&rows).unwrap();
        let q = pearson_matrix(&d).unwrap();
        let p = variable_grouping(&d, &q, 0.95).unwrap();
        let tree = chow_liu_fit(&d, &p, alpha).unwrap();
        let k = tree.num_variables();
        prop_assert_eq!(tree.edges.len(), k.saturating_sub(1));
        for &v in &tree.variables {
            for parent in [false, true] {
                let c = tree.cpt(v, parent).unwrap();
                prop_assert!(c > 0.0 && c < 1.0);
            }
        }
        let total: f64 = (0..1u32 << k)
            .map(|bits| tree.joint(&(0..k).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>()))
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-12, "{total}");
    }

    #[test]
    fn bounds_are_ordered(k in 1usize..20, o in 0usize..1000, beta in 0.0f64..=1.0, eps in 0.0f64..0.99) {
        let (w, g, b) = (bound_worst(k, o, eps), bound_general(k, o, eps, beta), bound_best(k, o, eps));
        prop_assert!(w <= g * (1.0 + 1e-12) && g <= b * (1.0 + 1e-12));
        prop_assert!(b <= 1.0 - 1.0 / std::f64::consts::E + 1e-15);
    }
}
