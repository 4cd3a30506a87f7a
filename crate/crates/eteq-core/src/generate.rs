//! Synthetic graph generation and query sampling, deterministic under a
//! fixed seed.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::graph::{DataGraph, GraphBuilder, NodeId};
use crate::query::{QueryEdge, QueryGraph};
use crate::rng::Rng;
use crate::{Error, Result};

/// How edge labels are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LabelDistribution {
    Uniform,
    /// Rank `i` (1-based) is drawn with weight `i^-exponent`.
    Zipf { exponent: f64 },
}

struct LabelSampler {
    cumulative: Vec<f64>,
}

impl LabelSampler {
    fn new(n_labels: usize, dist: LabelDistribution) -> Self {
        let mut weights: Vec<f64> = (1..=n_labels)
            .map(|i| match dist {
                LabelDistribution::Uniform => 1.0,
                LabelDistribution::Zipf { exponent } => libm::pow(i as f64, -exponent),
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        for w in &mut weights {
            acc += *w / total;
            *w = acc;
        }
        LabelSampler { cumulative: weights }
    }

    fn sample(&self, rng: &mut Rng) -> usize {
        let x = rng.f64();
        self.cumulative.partition_point(|&c| c < x).min(self.cumulative.len() - 1)
    }
}

/// Generates a connected random graph: a random spanning tree plus random
/// extra placements, `floor(n_nodes * avg_degree / 2)` edges in total
/// (never fewer than the `n_nodes - 1` the spanning tree needs). Each
/// placement gets a random direction and a label drawn from `dist`.
pub fn generate_synthetic(
    n_nodes: usize,
    avg_degree: f64,
    n_labels: usize,
    dist: LabelDistribution,
    seed: u64,
) -> Result<DataGraph> {
    debug_assert!(n_nodes >= 1);
    debug_assert!(avg_degree >= 0.0);
    debug_assert!(n_labels >= 1);
    let mut rng = Rng::new(seed);
    let requested = (n_nodes as f64 * avg_degree / 2.0) as u64;
    let target = if n_nodes > 1 {
        requested.max(n_nodes as u64 - 1)
    } else {
        requested
    };
    let capacity = n_nodes as u64 * n_nodes.saturating_sub(1) as u64 * n_labels as u64;
    if target > capacity {
        return Err(Error::CapacityExceeded {
            requested: target,
            capacity,
        });
    }

    let sampler = LabelSampler::new(n_labels, dist);
    let mut placed: BTreeSet<(u32, u32, u32)> = BTreeSet::new();
    let mut edges: Vec<(u32, u32, u32)> = Vec::with_capacity(target as usize);

    let place = |u: usize, v: usize, rng: &mut Rng, placed: &mut BTreeSet<(u32, u32, u32)>| {
        let label = sampler.sample(rng) as u32;
        let (s, d) = if rng.coin() { (u, v) } else { (v, u) };
        let key = (s as u32, d as u32, label);
        placed.insert(key).then_some(key)
    };

    // spanning tree: attach each node to a random earlier one
    for v in 1..n_nodes {
        loop {
            let u = rng.index(v);
            if let Some(key) = place(u, v, &mut rng, &mut placed) {
                edges.push(key);
                break;
            }
        }
    }
    let mut attempts: u64 = 0;
    let max_attempts = 1000 * target.max(1);
    while (edges.len() as u64) < target {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::CapacityExceeded {
                requested: target,
                capacity,
            });
        }
        let u = rng.index(n_nodes);
        let v = rng.index(n_nodes);
        if u == v {
            continue;
        }
        if let Some(key) = place(u, v, &mut rng, &mut placed) {
            edges.push(key);
        }
    }

    let mut builder = GraphBuilder::new();
    // intern nodes first so ids follow the numeric order
    for i in 0..n_nodes {
        builder.intern_node(&node_name(i));
    }
    for l in 0..n_labels {
        builder.intern_label(&label_name(l));
    }
    for (s, d, l) in edges {
        builder.add_triple(
            &node_name(s as usize),
            &label_name(l as usize),
            &node_name(d as usize),
        );
    }
    Ok(builder.finish())
}

fn node_name(i: usize) -> String {
    alloc::format!("n{i}")
}

fn label_name(i: usize) -> String {
    alloc::format!("l{i}")
}

/// Samples a connected query of exactly `n_edges` edges by random edge
/// expansion from a random start node. The sampled query always has at
/// least one exact match in `g` (itself).
pub fn sample_query(g: &DataGraph, n_edges: usize, seed: u64) -> Result<QueryGraph> {
    debug_assert!(n_edges >= 1);
    if g.edge_count() < n_edges {
        return Err(Error::SamplingExhausted);
    }
    let mut rng = Rng::new(seed);
    'attempt: for _ in 0..256 {
        let start = NodeId(rng.index(g.node_count()) as u32);
        if g.degree(start) == 0 {
            continue;
        }
        let mut covered: BTreeSet<NodeId> = BTreeSet::new();
        covered.insert(start);
        let mut chosen: Vec<crate::graph::EdgeId> = Vec::new();
        let mut chosen_set: BTreeSet<crate::graph::EdgeId> = BTreeSet::new();
        for _ in 0..n_edges {
            let mut frontier: Vec<crate::graph::EdgeId> = Vec::new();
            for &n in &covered {
                for eid in g.incident(n) {
                    if !chosen_set.contains(&eid) && !frontier.contains(&eid) {
                        frontier.push(eid);
                    }
                }
            }
            if frontier.is_empty() {
                continue 'attempt;
            }
            frontier.sort();
            let eid = frontier[rng.index(frontier.len())];
            chosen.push(eid);
            chosen_set.insert(eid);
            let e = g.edge(eid);
            covered.insert(e.src);
            covered.insert(e.dst);
        }
        // renumber nodes in first-appearance order over the chosen edges
        let mut names: Vec<String> = Vec::new();
        let mut remap: alloc::collections::BTreeMap<NodeId, NodeId> =
            alloc::collections::BTreeMap::new();
        let mut edges = Vec::with_capacity(chosen.len());
        for eid in chosen {
            let e = g.edge(eid);
            let mut map = |n: NodeId, names: &mut Vec<String>| -> NodeId {
                *remap.entry(n).or_insert_with(|| {
                    let id = NodeId(names.len() as u32);
                    names.push(String::from(g.node_name(n)));
                    id
                })
            };
            let src = map(e.src, &mut names);
            let dst = map(e.dst, &mut names);
            edges.push(QueryEdge {
                src,
                dst,
                label: e.label,
            });
        }
        return Ok(QueryGraph::new(names, edges));
    }
    Err(Error::SamplingExhausted)
}
