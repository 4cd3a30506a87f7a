//! Per-node Bloom filters over signed, counted label paths, and the
//! path-based candidate filter.
//!
//! Every walk of length `1..=d` leaving a node is encoded as
//! `<count>P<±label><±label>...`, where `+` marks an outgoing step, `-`
//! an incoming one, and `count` says how many walks with that exact
//! label sequence leave the node (one key per count from 1 up to the
//! total, so a requirement of `r` copies is a single membership test).
//! Walks may revisit nodes but never immediately reverse the edge they
//! just used.
//!
//! The per-node lower bound counts unmatched query path groups that are
//! pairwise edge-disjoint. Each such group forces at least one
//! substitution among its own edges, and disjoint groups force distinct
//! substitutions; overlapping unmatched groups could all be explained by
//! one shared substituted edge, so they contribute only once.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::bloom::BloomFilter;
use crate::graph::{DataGraph, LabelId, NodeId};
use crate::query::{EditThreshold, QueryGraph};
use crate::{Error, Result};

/// Orientation of one step of a path relative to the walk direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Direction {
    Out,
    In,
}

impl Direction {
    fn sign(self) -> char {
        match self {
            Direction::Out => '+',
            Direction::In => '-',
        }
    }
}

/// Encodes a counted path as `<count>P<±label>...`.
pub fn encode_path(count: u32, steps: &[(Direction, &str)]) -> Result<String> {
    if steps.is_empty() {
        return Err(Error::EmptyPath);
    }
    debug_assert!(count >= 1);
    let mut out = String::new();
    out.push_str(&alloc::format!("{count}P"));
    for (dir, label) in steps {
        out.push(dir.sign());
        out.push_str(label);
    }
    Ok(out)
}

type Step = (Direction, LabelId);

/// Walk sequences leaving `n`, with multiplicities, lengths `1..=d`.
fn data_walk_counts(g: &DataGraph, n: NodeId, d: u8) -> BTreeMap<Vec<Step>, u32> {
    let mut counts: BTreeMap<Vec<Step>, u32> = BTreeMap::new();
    let mut seq: Vec<Step> = Vec::with_capacity(d as usize);
    walk(g, n, None, d, &mut seq, &mut counts);
    counts
}

fn walk(
    g: &DataGraph,
    node: NodeId,
    via: Option<crate::graph::EdgeId>,
    budget: u8,
    seq: &mut Vec<Step>,
    counts: &mut BTreeMap<Vec<Step>, u32>,
) {
    if budget == 0 {
        return;
    }
    for &eid in g.out_edges(node) {
        if Some(eid) == via {
            continue;
        }
        let e = g.edge(eid);
        seq.push((Direction::Out, e.label));
        *counts.entry(seq.clone()).or_insert(0) += 1;
        walk(g, e.dst, Some(eid), budget - 1, seq, counts);
        seq.pop();
    }
    for &eid in g.in_edges(node) {
        if Some(eid) == via {
            continue;
        }
        let e = g.edge(eid);
        seq.push((Direction::In, e.label));
        *counts.entry(seq.clone()).or_insert(0) += 1;
        walk(g, e.src, Some(eid), budget - 1, seq, counts);
        seq.pop();
    }
}

fn render_key(count: u32, seq: &[Step], g: &DataGraph) -> String {
    let mut out = alloc::format!("{count}P");
    for &(dir, label) in seq {
        out.push(dir.sign());
        out.push_str(g.label_name(label));
    }
    out
}

/// Builds the path filter of one data node. The filter is sized from the
/// actual number of keys; pass `capacity_estimate` to size it from an
/// external estimate instead (e.g. `avg_degree^d` when streaming).
pub fn build_path_filter_sized(
    g: &DataGraph,
    n: NodeId,
    d: u8,
    fpr: f64,
    capacity_estimate: Option<usize>,
) -> BloomFilter {
    let counts = data_walk_counts(g, n, d);
    let total_keys: usize = counts.values().map(|&c| c as usize).sum();
    let mut filter = BloomFilter::with_capacity(capacity_estimate.unwrap_or(total_keys), fpr);
    if filter.bit_count() == 0 && total_keys > 0 {
        // an undersized external estimate must not lose keys
        filter = BloomFilter::with_capacity(total_keys, fpr);
    }
    for (seq, &count) in counts.iter().map(|(s, c)| (s.as_slice(), c)) {
        for r in 1..=count {
            filter.insert(render_key(r, seq, g).as_bytes());
        }
    }
    filter
}

pub fn build_path_filter(g: &DataGraph, n: NodeId, d: u8, fpr: f64) -> BloomFilter {
    build_path_filter_sized(g, n, d, fpr, None)
}

/// One required query path group: the encoded key at the required count
/// plus the set of query edges its walks traverse.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryPathKey {
    pub key: String,
    pub edges: Vec<usize>,
}

/// Enumerates the path requirements of one query node. Walks that would
/// traverse a wildcard edge are skipped entirely: a wildcard step has no
/// stable encoding, so no requirement may depend on it.
pub fn query_paths(q: &QueryGraph, n: NodeId, d: u8, g: &DataGraph) -> Vec<QueryPathKey> {
    let mut groups: BTreeMap<Vec<Step>, (u32, BTreeSet<usize>)> = BTreeMap::new();
    let mut seq: Vec<Step> = Vec::new();
    let mut edges_used: Vec<usize> = Vec::new();
    query_walk(q, n, None, d, &mut seq, &mut edges_used, &mut groups);
    groups
        .into_iter()
        .map(|(seq, (count, edges))| QueryPathKey {
            key: render_key(count, &seq, g),
            edges: edges.into_iter().collect(),
        })
        .collect()
}

fn query_walk(
    q: &QueryGraph,
    node: NodeId,
    via: Option<usize>,
    budget: u8,
    seq: &mut Vec<Step>,
    edges_used: &mut Vec<usize>,
    groups: &mut BTreeMap<Vec<Step>, (u32, BTreeSet<usize>)>,
) {
    if budget == 0 {
        return;
    }
    for (idx, e) in q.edges().iter().enumerate() {
        if Some(idx) == via || e.label.is_wildcard() {
            continue;
        }
        let step_targets: &[(Direction, NodeId, NodeId)] = &[
            (Direction::Out, e.src, e.dst),
            (Direction::In, e.dst, e.src),
        ];
        for &(dir, from, to) in step_targets {
            if from != node {
                continue;
            }
            seq.push((dir, e.label));
            edges_used.push(idx);
            let entry = groups.entry(seq.clone()).or_insert_with(|| (0, BTreeSet::new()));
            entry.0 += 1;
            entry.1.extend(edges_used.iter().copied());
            query_walk(q, to, Some(idx), budget - 1, seq, edges_used, groups);
            edges_used.pop();
            seq.pop();
        }
    }
}

/// Lower bound on the substitutions any embedding placing the query node
/// on the filter's node must spend: the size of a greedy edge-disjoint
/// family of unmatched path groups.
pub fn path_distance_lower_bound(filter: &BloomFilter, paths: &[QueryPathKey]) -> u32 {
    let mut unmatched: Vec<&QueryPathKey> = paths
        .iter()
        .filter(|p| !filter.contains(p.key.as_bytes()))
        .collect();
    unmatched.sort_by(|a, b| (a.edges.len(), &a.key).cmp(&(b.edges.len(), &b.key)));
    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut bound = 0u32;
    for p in unmatched {
        if p.edges.iter().any(|e| used.contains(e)) {
            continue;
        }
        used.extend(p.edges.iter().copied());
        bound += 1;
    }
    bound
}

/// Path filters for every node of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct PathFilterSet {
    depth: u8,
    fpr: f64,
    filters: Vec<BloomFilter>,
}

impl PathFilterSet {
    pub fn build(g: &DataGraph, d: u8, fpr: f64) -> Self {
        let filters = (0..g.node_count())
            .map(|n| build_path_filter(g, NodeId(n as u32), d, fpr))
            .collect();
        PathFilterSet {
            depth: d,
            fpr,
            filters,
        }
    }

    pub fn from_parts(depth: u8, fpr: f64, filters: Vec<BloomFilter>) -> Self {
        PathFilterSet {
            depth,
            fpr,
            filters,
        }
    }

    pub fn depth(&self) -> u8 {
        self.depth
    }

    pub fn fpr(&self) -> f64 {
        self.fpr
    }

    pub fn filters(&self) -> &[BloomFilter] {
        &self.filters
    }

    pub fn filter(&self, n: NodeId) -> &BloomFilter {
        &self.filters[n.index()]
    }

    /// Data nodes that could host `query_node` within budget `t`.
    pub fn candidates(
        &self,
        q: &QueryGraph,
        query_node: NodeId,
        t: EditThreshold,
        g: &DataGraph,
    ) -> Vec<NodeId> {
        let paths = query_paths(q, query_node, self.depth, g);
        (0..self.filters.len())
            .map(|i| NodeId(i as u32))
            .filter(|&n| path_distance_lower_bound(&self.filters[n.index()], &paths) <= t.0)
            .collect()
    }
}

/// Per-query-node candidate sets from the path filter alone.
pub fn path_candidates(
    filters: &PathFilterSet,
    q: &QueryGraph,
    t: EditThreshold,
    g: &DataGraph,
) -> Vec<Vec<NodeId>> {
    (0..q.node_count())
        .map(|n| filters.candidates(q, NodeId(n as u32), t, g))
        .collect()
}

/// Intersection of two sorted candidate lists.
pub fn combine_filters(a: &[NodeId], b: &[NodeId]) -> Vec<NodeId> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_triples;
    use crate::query::parse_query;

    #[test]
    fn encoding_matches_documented_format() {
        let key = encode_path(2, &[(Direction::Out, "1"), (Direction::In, "2")]).unwrap();
        assert_eq!(key, "2P+1-2");
        assert_eq!(encode_path(1, &[(Direction::Out, "a")]).unwrap(), "1P+a");
        assert!(encode_path(1, &[]).is_err());
    }

    #[test]
    fn single_out_edge_filter_contents() {
        let g = parse_triples("n\ta\tm\n").unwrap();
        let n = g.node_id("n").unwrap();
        let f = build_path_filter(&g, n, 1, 0.01);
        assert!(f.contains(b"1P+a"));
        assert!(!f.contains(b"2P+a"));
        assert!(!f.contains(b"1P-a"));
    }

    #[test]
    fn counts_aggregate_parallel_sequences() {
        let g = parse_triples("n\ta\tm1\nn\ta\tm2\n").unwrap();
        let n = g.node_id("n").unwrap();
        let f = build_path_filter(&g, n, 1, 0.01);
        assert!(f.contains(b"1P+a"));
        assert!(f.contains(b"2P+a"));
        assert!(!f.contains(b"3P+a"));
    }

    #[test]
    fn walks_do_not_reverse_immediately() {
        let g = parse_triples("n\ta\tm\nm\tb\tk\n").unwrap();
        let n = g.node_id("n").unwrap();
        let f = build_path_filter(&g, n, 2, 0.01);
        assert!(f.contains(b"1P+a+b"));
        // going out over `a` and straight back over the same edge is banned
        assert!(!f.contains(b"1P+a-a"));
    }

    #[test]
    fn own_paths_always_match_own_filter() {
        let text = "a\tp\tb\nb\tq\tc\nc\tr\ta\nb\tp\td\n";
        let g = parse_triples(text).unwrap();
        let q = parse_query(text, &g).unwrap();
        let d = 3;
        for qn in 0..q.node_count() {
            let data_node = g.node_id(q.node_name(NodeId(qn as u32))).unwrap();
            let filter = build_path_filter(&g, data_node, d, 0.01);
            let paths = query_paths(&q, NodeId(qn as u32), d, &g);
            assert_eq!(path_distance_lower_bound(&filter, &paths), 0);
        }
    }

    #[test]
    fn direction_reversal_is_detected() {
        let fwd = parse_triples("x\tp\ty\ny\tq\tz\n").unwrap();
        let rev = parse_triples("x\tp\ty\nz\tq\ty\n").unwrap();
        let q = parse_query("a\tp\tb\nb\tq\tc\n", &fwd).unwrap();
        let paths = query_paths(&q, NodeId(0), 2, &fwd);
        let f_fwd = build_path_filter(&fwd, fwd.node_id("x").unwrap(), 2, 0.01);
        let f_rev = build_path_filter(&rev, rev.node_id("x").unwrap(), 2, 0.01);
        assert_eq!(path_distance_lower_bound(&f_fwd, &paths), 0);
        assert!(path_distance_lower_bound(&f_rev, &paths) >= 1);
    }

    #[test]
    fn shared_first_edge_groups_count_once() {
        // all query paths funnel through one edge; a single substitution
        // could explain every miss, so the bound must stay at 1
        let g = parse_triples("x\tp\ty\ny\tq\tz\ny\tr\tw\n").unwrap();
        let q = parse_query("a\tp\tb\nb\tq\tc\nb\tr\td\n", &g).unwrap();
        let paths = query_paths(&q, NodeId(0), 3, &g);
        let empty = BloomFilter::with_capacity(0, 0.01);
        assert_eq!(path_distance_lower_bound(&empty, &paths), 1);
    }

    #[test]
    fn disjoint_branches_accumulate() {
        let g = parse_triples("x\tp\ty\nx\tq\tz\n").unwrap();
        // two independent branches out of the seed
        let q = parse_query("a\tp\tb\na\tq\tc\n", &g).unwrap();
        let paths = query_paths(&q, NodeId(0), 2, &g);
        let empty = BloomFilter::with_capacity(0, 0.01);
        assert_eq!(path_distance_lower_bound(&empty, &paths), 2);
    }

    #[test]
    fn wildcard_paths_are_skipped() {
        let g = parse_triples("x\tp\ty\ny\tq\tz\n").unwrap();
        let q = parse_query("a\tp\tb\nb\t*\tc\n", &g).unwrap();
        let paths = query_paths(&q, NodeId(0), 2, &g);
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].key, "1P+p");
    }

    #[test]
    fn combine_is_sorted_intersection() {
        let a = alloc::vec![NodeId(0), NodeId(2), NodeId(5)];
        let b = alloc::vec![NodeId(2), NodeId(3), NodeId(5)];
        assert_eq!(combine_filters(&a, &b), alloc::vec![NodeId(2), NodeId(5)]);
        assert!(combine_filters(&a, &[]).is_empty());
    }

    #[test]
    fn loose_budget_admits_all_nodes() {
        let text = "a\tp\tb\nb\tq\tc\n";
        let g = parse_triples(text).unwrap();
        let q = parse_query(text, &g).unwrap();
        let filters = PathFilterSet::build(&g, 2, 0.01);
        let paths = query_paths(&q, NodeId(0), 2, &g);
        let all = filters.candidates(&q, NodeId(0), EditThreshold(paths.len() as u32), &g);
        assert_eq!(all.len(), g.node_count());
    }
}
