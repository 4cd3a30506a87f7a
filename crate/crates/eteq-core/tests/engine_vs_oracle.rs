//! Differential suite: both search algorithms against the brute-force
//! oracle on randomized instances, under every filter configuration.

use eteq_core::generate::{generate_synthetic, sample_query, LabelDistribution};
use eteq_core::matcher::{exed, wced, FilterConfig, FilterIndexes};
use eteq_core::neighbourhood::{
    neighbourhood_pruning, node_distance, query_signature,
};
use eteq_core::oracle::{brute_force_answers, OracleConfig};
use eteq_core::path::{path_distance_lower_bound, query_paths};
use eteq_core::query::EditThreshold;
use eteq_core::{DataGraph, NodeId, QueryGraph};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct Instance {
    nodes: usize,
    avg_degree: f64,
    labels: usize,
    query_edges: usize,
    threshold: u32,
    graph_seed: u64,
    query_seed: u64,
}

fn instance_strategy() -> impl Strategy<Value = Instance> {
    (
        8usize..60,
        prop_oneof![Just(1.5f64), Just(2.5), Just(4.0)],
        1usize..8,
        1usize..5,
        0u32..3,
        any::<u64>(),
        any::<u64>(),
    )
        .prop_map(
            |(nodes, avg_degree, labels, query_edges, threshold, graph_seed, query_seed)| {
                Instance {
                    nodes,
                    avg_degree,
                    labels,
                    query_edges,
                    threshold,
                    graph_seed,
                    query_seed,
                }
            },
        )
}

fn realize(inst: &Instance) -> Option<(DataGraph, QueryGraph, EditThreshold)> {
    let g = generate_synthetic(
        inst.nodes,
        inst.avg_degree,
        inst.labels,
        LabelDistribution::Uniform,
        inst.graph_seed,
    )
    .ok()?;
    let edges = inst.query_edges.min(g.edge_count());
    let q = sample_query(&g, edges, inst.query_seed).ok()?;
    let t = EditThreshold(inst.threshold.min(q.edge_count() as u32 - 1));
    q.validate(t).ok()?;
    Some((g, q, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Both algorithms equal the oracle under every filter configuration.
    #[test]
    fn engine_matches_oracle(inst in instance_strategy()) {
        let Some((g, q, t)) = realize(&inst) else { return Ok(()); };
        let expected = brute_force_answers(&g, &q, t, OracleConfig::default()).unwrap();
        let indexes = FilterIndexes::build(&g, 2, 0.01);
        for filters in FilterConfig::ALL {
            let a = exed(&g, &q, t, filters, &indexes).unwrap();
            prop_assert_eq!(
                &a.answers, &expected,
                "exed/{} diverged on {:?}", filters.name(), inst
            );
            let b = wced(&g, &q, t, filters, &indexes).unwrap();
            prop_assert_eq!(
                &b.answers, &expected,
                "wced/{} diverged on {:?}", filters.name(), inst
            );
        }
    }

    /// No oracle answer image is ever dropped by a filter, and both
    /// per-node lower bounds stay below the answer's true distance.
    #[test]
    fn filters_never_drop_answers(inst in instance_strategy()) {
        let Some((g, q, t)) = realize(&inst) else { return Ok(()); };
        let answers = brute_force_answers(&g, &q, t, OracleConfig::default()).unwrap();
        if answers.is_empty() {
            return Ok(());
        }
        let depth = 2u8;
        let indexes = FilterIndexes::build(&g, depth, 0.01);
        for seed_idx in 0..q.node_count() {
            let seed = NodeId(seed_idx as u32);
            let mu = neighbourhood_pruning(&g, &q, t, seed, indexes.inverted());
            for answer in answers.iter() {
                for qn in 0..q.node_count() {
                    let image = answer.node_map[qn];
                    prop_assert!(
                        mu.candidates(NodeId(qn as u32)).iter().any(|&(n, _)| n == image),
                        "pruning from seed {seed_idx} dropped the image of query node {qn}"
                    );
                }
            }
        }
        for answer in answers.iter() {
            for qn in 0..q.node_count() {
                let qnode = NodeId(qn as u32);
                let image = answer.node_map[qn];
                let sig_q = query_signature(&q, qnode, depth);
                let sig_g = eteq_core::neighbourhood::data_signature(&g, image, depth);
                let nd = node_distance(&sig_q, &sig_g).unwrap();
                prop_assert!(
                    nd <= answer.distance,
                    "signature distance {nd} exceeds answer distance {}", answer.distance
                );
                let paths = query_paths(&q, qnode, depth, &g);
                let pb = path_distance_lower_bound(indexes.path_filters().filter(image), &paths);
                prop_assert!(
                    pb <= answer.distance,
                    "path bound {pb} exceeds answer distance {}", answer.distance
                );
            }
        }
    }

    /// Raising the threshold only adds answers.
    #[test]
    fn answers_monotone_in_threshold(inst in instance_strategy()) {
        let Some((g, q, _)) = realize(&inst) else { return Ok(()); };
        let indexes = FilterIndexes::build(&g, 2, 0.01);
        let mut previous: Option<eteq_core::AnswerSet> = None;
        for t in 0..q.edge_count() as u32 {
            let out = exed(&g, &q, EditThreshold(t), FilterConfig::Both, &indexes).unwrap();
            if let Some(prev) = &previous {
                prop_assert!(prev.is_subset_of(&out.answers));
            }
            previous = Some(out.answers);
        }
    }

    /// The verification order is always a connected expansion.
    #[test]
    fn edge_order_is_prefix_connected(inst in instance_strategy()) {
        let Some((g, q, _)) = realize(&inst) else { return Ok(()); };
        let stats = g.stats();
        for seed_idx in 0..q.node_count() {
            let seed = NodeId(seed_idx as u32);
            let order = eteq_core::matcher::edge_order(&q, seed, stats);
            prop_assert_eq!(order.len(), q.edge_count());
            let mut sorted = order.clone();
            sorted.sort();
            sorted.dedup();
            prop_assert_eq!(sorted.len(), q.edge_count(), "every edge exactly once");
            let mut covered = vec![false; q.node_count()];
            covered[seed.index()] = true;
            for &idx in &order {
                let e = q.edges()[idx];
                prop_assert!(
                    covered[e.src.index()] || covered[e.dst.index()],
                    "edge {idx} not incident to the covered prefix"
                );
                covered[e.src.index()] = true;
                covered[e.dst.index()] = true;
            }
        }
    }

    /// Search output is deterministic for identical inputs.
    #[test]
    fn runs_are_deterministic(inst in instance_strategy()) {
        let Some((g, q, t)) = realize(&inst) else { return Ok(()); };
        let indexes = FilterIndexes::build(&g, 2, 0.01);
        let a = exed(&g, &q, t, FilterConfig::Both, &indexes).unwrap();
        let b = exed(&g, &q, t, FilterConfig::Both, &indexes).unwrap();
        prop_assert_eq!(a.answers, b.answers);
        prop_assert_eq!(a.operations, b.operations);
        prop_assert_eq!(a.candidates, b.candidates);
    }
}
