//! The two exact search algorithms.
//!
//! * [`exed`] — edit-budget search: one backtracking pass per seed
//!   candidate, carrying the number of substitutions spent so far and
//!   pruning any branch that would exceed the threshold.
//! * [`wced`] — wildcard expansion: one exact (`t = 0`) search per
//!   wildcard variant of the query, answers merged and deduplicated,
//!   distances recomputed against the original labels.
//!
//! Answers are injective embeddings: a node map plus an injective edge
//! map, keyed by the edge map for deduplication. Two embeddings onto the
//! same data subgraph are distinct answers.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::graph::{DataGraph, EdgeId, LabelId, LabelStats, NodeId};
use crate::neighbourhood::{
    neighbourhood_pruning, InvertedNeighbourhoodIndex, NeighbourhoodSignature,
};
use crate::path::{combine_filters, PathFilterSet};
use crate::query::{generate_wildcard_queries, select_seed, EditThreshold, QueryGraph};
use crate::Result;

/// Which candidate filters run before verification. The answer set is
/// identical for every configuration; only the work changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterConfig {
    None,
    Neighbour,
    Path,
    Both,
}

impl FilterConfig {
    pub const ALL: [FilterConfig; 4] = [
        FilterConfig::None,
        FilterConfig::Neighbour,
        FilterConfig::Path,
        FilterConfig::Both,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FilterConfig::None => "none",
            FilterConfig::Neighbour => "neighbour",
            FilterConfig::Path => "path",
            FilterConfig::Both => "both",
        }
    }
}

/// The per-node indexes both filters draw from.
#[derive(Debug, Clone)]
pub struct FilterIndexes {
    depth: u8,
    signatures: Vec<NeighbourhoodSignature>,
    inverted: InvertedNeighbourhoodIndex,
    path_filters: PathFilterSet,
}

impl FilterIndexes {
    pub fn build(g: &DataGraph, depth: u8, bloom_fpr: f64) -> Self {
        let signatures = crate::neighbourhood::build_signatures(g, depth);
        let inverted = InvertedNeighbourhoodIndex::from_signatures(&signatures, depth);
        let path_filters = PathFilterSet::build(g, depth, bloom_fpr);
        FilterIndexes {
            depth,
            signatures,
            inverted,
            path_filters,
        }
    }

    pub fn from_parts(
        depth: u8,
        signatures: Vec<NeighbourhoodSignature>,
        inverted: InvertedNeighbourhoodIndex,
        path_filters: PathFilterSet,
    ) -> Self {
        FilterIndexes {
            depth,
            signatures,
            inverted,
            path_filters,
        }
    }

    pub fn depth(&self) -> u8 {
        self.depth
    }

    pub fn signatures(&self) -> &[NeighbourhoodSignature] {
        &self.signatures
    }

    pub fn inverted(&self) -> &InvertedNeighbourhoodIndex {
        &self.inverted
    }

    pub fn path_filters(&self) -> &PathFilterSet {
        &self.path_filters
    }
}

/// A complete embedding of the query into the data graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    /// Query node id -> data node id.
    pub node_map: Vec<NodeId>,
    /// Query edge index -> data edge id.
    pub edge_map: Vec<EdgeId>,
    /// Number of query edges whose mapped data edge carries a different
    /// label (wildcard edges never mismatch).
    pub distance: u32,
}

impl Answer {
    /// Recounts mismatches from the edge map; always equals `distance`.
    pub fn recompute_distance(&self, g: &DataGraph, q: &QueryGraph) -> u32 {
        recompute_distance(g, q, &self.edge_map)
    }
}

fn recompute_distance(g: &DataGraph, q: &QueryGraph, edge_map: &[EdgeId]) -> u32 {
    q.edges()
        .iter()
        .zip(edge_map)
        .filter(|(qe, &de)| !qe.label.is_wildcard() && g.edge(de).label != qe.label)
        .count() as u32
}

/// Deduplicated answers, keyed by the edge map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnswerSet {
    map: BTreeMap<Vec<EdgeId>, Answer>,
}

impl AnswerSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, answer: Answer) -> bool {
        match self.map.entry(answer.edge_map.clone()) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(answer);
                true
            }
            alloc::collections::btree_map::Entry::Occupied(existing) => {
                debug_assert_eq!(existing.get().distance, answer.distance);
                false
            }
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Answer> {
        self.map.values()
    }

    /// Answers ordered by `(distance, edge map)` for stable output.
    pub fn iter_sorted(&self) -> Vec<&Answer> {
        let mut all: Vec<&Answer> = self.map.values().collect();
        all.sort_by(|a, b| (a.distance, &a.edge_map).cmp(&(b.distance, &b.edge_map)));
        all
    }

    /// True when every answer key of `self` also appears in `other`.
    pub fn is_subset_of(&self, other: &AnswerSet) -> bool {
        self.map.keys().all(|k| other.map.contains_key(k))
    }

    pub fn contains_key(&self, edge_map: &[EdgeId]) -> bool {
        self.map.contains_key(edge_map)
    }

    pub fn distance_histogram(&self) -> BTreeMap<u32, usize> {
        let mut hist = BTreeMap::new();
        for a in self.map.values() {
            *hist.entry(a.distance).or_insert(0) += 1;
        }
        hist
    }
}

/// Result of one search run.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub answers: AnswerSet,
    /// Data-edge probes made during verification.
    pub operations: u64,
    pub seed: NodeId,
    /// Seed candidates that entered verification (summed over wildcard
    /// variants for the wildcard expansion).
    pub candidates: usize,
}

/// Connected expansion order over the query edges: every edge after the
/// first touches an already-covered node, and among eligible edges the
/// lowest-selectivity label goes first. Wildcards go last; ties break by
/// edge index.
pub fn edge_order(q: &QueryGraph, seed: NodeId, stats: &LabelStats) -> Vec<usize> {
    let edge_count = q.edge_count();
    let mut covered = alloc::vec![false; q.node_count()];
    covered[seed.index()] = true;
    let mut chosen = alloc::vec![false; edge_count];
    let mut order = Vec::with_capacity(edge_count);
    for _ in 0..edge_count {
        let mut best: Option<(bool, f64, usize)> = None;
        for (i, e) in q.edges().iter().enumerate() {
            if chosen[i] || !(covered[e.src.index()] || covered[e.dst.index()]) {
                continue;
            }
            let wildcard = e.label.is_wildcard();
            let sel = stats.selectivity(e.label).unwrap_or(1.0);
            let better = match best {
                None => true,
                Some((bw, bs, _)) => (wildcard, sel).partial_cmp(&(bw, bs))
                    == Some(core::cmp::Ordering::Less),
            };
            if better {
                best = Some((wildcard, sel, i));
            }
        }
        let (_, _, idx) = best.expect("a connected query always has an eligible frontier edge");
        chosen[idx] = true;
        covered[q.edges()[idx].src.index()] = true;
        covered[q.edges()[idx].dst.index()] = true;
        order.push(idx);
    }
    order
}

#[derive(Debug, Clone, Copy)]
enum StepKind {
    /// `src` is mapped, `dst` gets a fresh node from `src`'s out-edges.
    ExtendFromSrc,
    /// `dst` is mapped, `src` gets a fresh node from `dst`'s in-edges.
    ExtendFromDst,
    /// Both endpoints mapped; pick an unused connecting edge.
    Closing,
}

#[derive(Debug, Clone, Copy)]
struct Step {
    edge_idx: usize,
    kind: StepKind,
}

fn build_plan(q: &QueryGraph, seed: NodeId, order: &[usize]) -> Vec<Step> {
    let mut covered = alloc::vec![false; q.node_count()];
    covered[seed.index()] = true;
    order
        .iter()
        .map(|&edge_idx| {
            let e = q.edges()[edge_idx];
            let kind = match (covered[e.src.index()], covered[e.dst.index()]) {
                (true, true) => StepKind::Closing,
                (true, false) => StepKind::ExtendFromSrc,
                (false, true) => StepKind::ExtendFromDst,
                (false, false) => unreachable!("edge order keeps the expansion connected"),
            };
            covered[e.src.index()] = true;
            covered[e.dst.index()] = true;
            Step { edge_idx, kind }
        })
        .collect()
}

#[inline]
fn label_cost(query_label: LabelId, data_label: LabelId) -> u32 {
    if query_label.is_wildcard() || query_label == data_label {
        0
    } else {
        1
    }
}

struct Search<'a, F: FnMut(EdgeId)> {
    g: &'a DataGraph,
    q: &'a QueryGraph,
    plan: &'a [Step],
    t: u32,
    node_map: Vec<Option<NodeId>>,
    used_nodes: Vec<bool>,
    edge_map: Vec<Option<EdgeId>>,
    used_edges: Vec<bool>,
    edits: u32,
    operations: u64,
    answers: AnswerSet,
    trace: F,
}

impl<'a, F: FnMut(EdgeId)> Search<'a, F> {
    fn new(g: &'a DataGraph, q: &'a QueryGraph, plan: &'a [Step], t: u32, trace: F) -> Self {
        Search {
            g,
            q,
            plan,
            t,
            node_map: alloc::vec![None; q.node_count()],
            used_nodes: alloc::vec![false; g.node_count()],
            edge_map: alloc::vec![None; q.edge_count()],
            used_edges: alloc::vec![false; g.edge_count()],
            edits: 0,
            operations: 0,
            answers: AnswerSet::new(),
            trace,
        }
    }

    fn run(&mut self, seed: NodeId, cand: NodeId) {
        debug_assert!(self.node_map.iter().all(Option::is_none));
        self.node_map[seed.index()] = Some(cand);
        self.used_nodes[cand.index()] = true;
        self.dfs(0);
        self.used_nodes[cand.index()] = false;
        self.node_map[seed.index()] = None;
    }

    fn emit(&mut self) {
        let node_map: Vec<NodeId> = self.node_map.iter().map(|n| n.unwrap()).collect();
        let edge_map: Vec<EdgeId> = self.edge_map.iter().map(|e| e.unwrap()).collect();
        debug_assert_eq!(recompute_distance(self.g, self.q, &edge_map), self.edits);
        self.answers.insert(Answer {
            node_map,
            edge_map,
            distance: self.edits,
        });
    }

    fn try_edge(&mut self, step: usize, edge_idx: usize, eid: EdgeId, fresh: Option<NodeId>) {
        let qe = self.q.edges()[edge_idx];
        let e = self.g.edge(eid);
        let cost = label_cost(qe.label, e.label);
        if self.edits + cost > self.t {
            return;
        }
        self.edge_map[edge_idx] = Some(eid);
        self.used_edges[eid.index()] = true;
        self.edits += cost;
        if let Some(w) = fresh {
            let fresh_q = if matches!(self.plan[step].kind, StepKind::ExtendFromSrc) {
                qe.dst
            } else {
                qe.src
            };
            self.node_map[fresh_q.index()] = Some(w);
            self.used_nodes[w.index()] = true;
            self.dfs(step + 1);
            self.used_nodes[w.index()] = false;
            self.node_map[fresh_q.index()] = None;
        } else {
            self.dfs(step + 1);
        }
        self.edits -= cost;
        self.used_edges[eid.index()] = false;
        self.edge_map[edge_idx] = None;
    }

    fn dfs(&mut self, step: usize) {
        if step == self.plan.len() {
            self.emit();
            return;
        }
        let Step { edge_idx, kind } = self.plan[step];
        let qe = self.q.edges()[edge_idx];
        match kind {
            StepKind::Closing => {
                let ms = self.node_map[qe.src.index()].unwrap();
                let md = self.node_map[qe.dst.index()].unwrap();
                for i in 0..self.g.out_edges(ms).len() {
                    let eid = self.g.out_edges(ms)[i];
                    self.operations += 1;
                    (self.trace)(eid);
                    let e = self.g.edge(eid);
                    if e.dst != md || self.used_edges[eid.index()] {
                        continue;
                    }
                    self.try_edge(step, edge_idx, eid, None);
                }
            }
            StepKind::ExtendFromSrc => {
                let ms = self.node_map[qe.src.index()].unwrap();
                for i in 0..self.g.out_edges(ms).len() {
                    let eid = self.g.out_edges(ms)[i];
                    self.operations += 1;
                    (self.trace)(eid);
                    let w = self.g.edge(eid).dst;
                    if self.used_nodes[w.index()] {
                        continue;
                    }
                    self.try_edge(step, edge_idx, eid, Some(w));
                }
            }
            StepKind::ExtendFromDst => {
                let md = self.node_map[qe.dst.index()].unwrap();
                for i in 0..self.g.in_edges(md).len() {
                    let eid = self.g.in_edges(md)[i];
                    self.operations += 1;
                    (self.trace)(eid);
                    let w = self.g.edge(eid).src;
                    if self.used_nodes[w.index()] {
                        continue;
                    }
                    self.try_edge(step, edge_idx, eid, Some(w));
                }
            }
        }
    }
}

/// All answers rooted at one seed candidate, appended to `answers`.
/// Returns the number of data-edge probes spent.
pub fn verify_candidate(
    g: &DataGraph,
    q: &QueryGraph,
    seed: NodeId,
    cand: NodeId,
    t: EditThreshold,
    order: &[usize],
) -> (AnswerSet, u64) {
    verify_candidate_traced(g, q, seed, cand, t, order, |_| {})
}

/// Like [`verify_candidate`], invoking `trace` once per data-edge probe.
pub fn verify_candidate_traced<F: FnMut(EdgeId)>(
    g: &DataGraph,
    q: &QueryGraph,
    seed: NodeId,
    cand: NodeId,
    t: EditThreshold,
    order: &[usize],
    trace: F,
) -> (AnswerSet, u64) {
    let plan = build_plan(q, seed, order);
    let mut search = Search::new(g, q, &plan, t.0, trace);
    search.run(seed, cand);
    (search.answers, search.operations)
}

/// Seed candidates surviving the selected filters.
pub fn seed_candidates(
    g: &DataGraph,
    q: &QueryGraph,
    t: EditThreshold,
    seed: NodeId,
    filters: FilterConfig,
    indexes: &FilterIndexes,
) -> Vec<NodeId> {
    match filters {
        FilterConfig::None => (0..g.node_count()).map(|i| NodeId(i as u32)).collect(),
        FilterConfig::Neighbour => {
            neighbourhood_pruning(g, q, t, seed, &indexes.inverted).nodes(seed)
        }
        FilterConfig::Path => indexes.path_filters.candidates(q, seed, t, g),
        FilterConfig::Both => {
            let neigh = neighbourhood_pruning(g, q, t, seed, &indexes.inverted).nodes(seed);
            let path = indexes.path_filters.candidates(q, seed, t, g);
            combine_filters(&neigh, &path)
        }
    }
}

/// Edit-budget search over the whole graph, seeded at the estimated
/// lowest-selectivity query node.
pub fn exed(
    g: &DataGraph,
    q: &QueryGraph,
    t: EditThreshold,
    filters: FilterConfig,
    indexes: &FilterIndexes,
) -> Result<SearchOutcome> {
    let seed = select_seed(q, g.stats(), indexes.depth);
    exed_seeded(g, q, t, filters, indexes, seed)
}

/// Edit-budget search from an explicit seed node.
pub fn exed_seeded(
    g: &DataGraph,
    q: &QueryGraph,
    t: EditThreshold,
    filters: FilterConfig,
    indexes: &FilterIndexes,
    seed: NodeId,
) -> Result<SearchOutcome> {
    q.validate(t)?;
    let stats = g.stats();
    let candidates = seed_candidates(g, q, t, seed, filters, indexes);
    let order = edge_order(q, seed, stats);
    let plan = build_plan(q, seed, &order);
    let mut search = Search::new(g, q, &plan, t.0, |_| {});
    for &cand in &candidates {
        search.run(seed, cand);
    }
    Ok(SearchOutcome {
        answers: core::mem::take(&mut search.answers),
        operations: search.operations,
        seed,
        candidates: candidates.len(),
    })
}

/// Wildcard-expansion search: one zero-threshold search per wildcard
/// variant, merged. Produces exactly the answers of [`exed`].
pub fn wced(
    g: &DataGraph,
    q: &QueryGraph,
    t: EditThreshold,
    filters: FilterConfig,
    indexes: &FilterIndexes,
) -> Result<SearchOutcome> {
    wced_impl(g, q, t, filters, indexes, None)
}

/// Wildcard-expansion search with every variant forced onto one seed.
pub fn wced_seeded(
    g: &DataGraph,
    q: &QueryGraph,
    t: EditThreshold,
    filters: FilterConfig,
    indexes: &FilterIndexes,
    seed: NodeId,
) -> Result<SearchOutcome> {
    wced_impl(g, q, t, filters, indexes, Some(seed))
}

fn wced_impl(
    g: &DataGraph,
    q: &QueryGraph,
    t: EditThreshold,
    filters: FilterConfig,
    indexes: &FilterIndexes,
    seed_override: Option<NodeId>,
) -> Result<SearchOutcome> {
    q.validate(t)?;
    let variants = generate_wildcard_queries(q, t)?;
    let mut answers = AnswerSet::new();
    let mut operations = 0;
    let mut candidates = 0;
    for wq in &variants {
        let seed = seed_override.unwrap_or_else(|| select_seed(wq, g.stats(), indexes.depth));
        let outcome = exed_seeded(g, wq, EditThreshold(0), filters, indexes, seed)?;
        operations += outcome.operations;
        candidates += outcome.candidates;
        for a in outcome.answers.iter() {
            let distance = recompute_distance(g, q, &a.edge_map);
            debug_assert!(distance <= t.0);
            answers.insert(Answer {
                node_map: a.node_map.clone(),
                edge_map: a.edge_map.clone(),
                distance,
            });
        }
    }
    Ok(SearchOutcome {
        answers,
        operations,
        seed: seed_override.unwrap_or_else(|| select_seed(q, g.stats(), indexes.depth)),
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_triples;
    use crate::query::parse_query;

    fn indexes_for(g: &DataGraph) -> FilterIndexes {
        FilterIndexes::build(g, 2, 0.01)
    }

    #[test]
    fn single_edge_exact_match() {
        let g = parse_triples("ruby\tinfluenced\tswift\nother\tforked\tswift\n").unwrap();
        let q = parse_query("a\tinfluenced\tb\n", &g).unwrap();
        let idx = indexes_for(&g);
        let out = exed(&g, &q, EditThreshold(0), FilterConfig::None, &idx).unwrap();
        assert_eq!(out.answers.len(), 1);
        let a = out.answers.iter().next().unwrap();
        assert_eq!(a.distance, 0);
    }

    #[test]
    fn threshold_one_adds_substituted_match() {
        // single-edge verification with budget: exercised below the
        // validation layer, which requires t < |E_q| for full searches
        let g = parse_triples("a\tl\tb\na\tx\tc\n").unwrap();
        let q = parse_query("u\tl\tv\n", &g).unwrap();
        let order = edge_order(&q, NodeId(0), g.stats());
        let a = g.node_id("a").unwrap();
        let (answers0, _) = verify_candidate(&g, &q, NodeId(0), a, EditThreshold(0), &order);
        assert_eq!(answers0.len(), 1);
        let (answers1, _) = verify_candidate(&g, &q, NodeId(0), a, EditThreshold(1), &order);
        assert_eq!(answers1.len(), 2);
        let distances: alloc::vec::Vec<u32> =
            answers1.iter_sorted().iter().map(|a| a.distance).collect();
        assert_eq!(distances, alloc::vec![0, 1]);
    }

    #[test]
    fn empty_graph_gives_empty_answers() {
        let g = parse_triples("a\tl\tb\n").unwrap();
        let q = parse_query("u\tl\tv\nv\tl\tw\n", &g).unwrap();
        let idx = indexes_for(&g);
        let out = exed(&g, &q, EditThreshold(0), FilterConfig::None, &idx).unwrap();
        assert!(out.answers.is_empty());
    }

    #[test]
    fn answers_are_embeddings_with_direction_respected() {
        let g = parse_triples("a\tl\tb\nb\tl\ta\n").unwrap();
        let q = parse_query("u\tl\tv\n", &g).unwrap();
        let idx = indexes_for(&g);
        let out = exed(&g, &q, EditThreshold(0), FilterConfig::None, &idx).unwrap();
        // both directed edges match the one-edge query separately
        assert_eq!(out.answers.len(), 2);
    }

    #[test]
    fn parallel_labels_yield_distinct_edge_maps() {
        let g = parse_triples("a\tl\tb\na\tm\tb\n").unwrap();
        let q = parse_query("u\tl\tv\n", &g).unwrap();
        let order = edge_order(&q, NodeId(0), g.stats());
        let a = g.node_id("a").unwrap();
        let (answers, _) = verify_candidate(&g, &q, NodeId(0), a, EditThreshold(1), &order);
        assert_eq!(answers.len(), 2);
    }

    #[test]
    fn wced_matches_exed_small() {
        let text = "a\tp\tb\nb\tq\tc\nc\tr\ta\na\tq\td\nd\tp\tb\n";
        let g = parse_triples(text).unwrap();
        let q = parse_query("x\tp\ty\ny\tq\tz\n", &g).unwrap();
        let idx = indexes_for(&g);
        for t in 0..=1u32 {
            let a = exed(&g, &q, EditThreshold(t), FilterConfig::None, &idx).unwrap();
            let b = wced(&g, &q, EditThreshold(t), FilterConfig::None, &idx).unwrap();
            assert_eq!(a.answers, b.answers, "t={t}");
        }
    }

    #[test]
    fn filters_do_not_change_answers() {
        let text = "a\tp\tb\nb\tq\tc\nc\tp\td\nd\tq\ta\nb\tp\td\n";
        let g = parse_triples(text).unwrap();
        let q = parse_query("x\tp\ty\ny\tq\tz\n", &g).unwrap();
        let idx = indexes_for(&g);
        let reference = exed(&g, &q, EditThreshold(1), FilterConfig::None, &idx).unwrap();
        for f in FilterConfig::ALL {
            let out = exed(&g, &q, EditThreshold(1), f, &idx).unwrap();
            assert_eq!(out.answers, reference.answers, "filters={}", f.name());
        }
    }

    #[test]
    fn edge_order_prefers_rare_labels() {
        let mut text = alloc::string::String::new();
        // rare appears once, common five times
        text.push_str("s\trare\tx\n");
        for i in 0..5 {
            text.push_str(&alloc::format!("s\tcommon\ty{i}\n"));
        }
        let g = parse_triples(&text).unwrap();
        let q = parse_query("a\tcommon\tb\na\trare\tc\n", &g).unwrap();
        let order = edge_order(&q, NodeId(0), g.stats());
        assert_eq!(order, alloc::vec![1, 0]);
    }

    #[test]
    fn edge_order_breaks_ties_by_index() {
        let g = parse_triples("s\tp\tx\ns\tp\ty\n").unwrap();
        let q = parse_query("a\tp\tb\na\tp\tc\n", &g).unwrap();
        let order = edge_order(&q, NodeId(0), g.stats());
        assert_eq!(order, alloc::vec![0, 1]);
    }

    #[test]
    fn edge_order_places_wildcards_last() {
        let g = parse_triples("s\tp\tx\nx\tq\ty\n").unwrap();
        let q = parse_query("a\t*\tb\nb\tq\tc\na\tp\td\n", &g).unwrap();
        let order = edge_order(&q, NodeId(0), g.stats());
        // the wildcard edge is eligible first but must wait for a real one
        assert_eq!(order[0], 2);
    }

    #[test]
    fn trace_log_matches_operation_counter() {
        let text = "a\tp\tb\nb\tq\tc\na\tp\tc\nc\tq\ta\n";
        let g = parse_triples(text).unwrap();
        let q = parse_query("x\tp\ty\ny\tq\tz\n", &g).unwrap();
        let stats = g.stats();
        let seed = NodeId(0);
        let order = edge_order(&q, seed, stats);
        let mut log = alloc::vec::Vec::new();
        let (_, ops) = verify_candidate_traced(
            &g,
            &q,
            seed,
            g.node_id("a").unwrap(),
            EditThreshold(1),
            &order,
            |eid| log.push(eid),
        );
        assert_eq!(ops, log.len() as u64);
        assert!(ops > 0);
    }

    #[test]
    fn zero_candidates_means_zero_operations() {
        let g = parse_triples("a\tp\tb\n").unwrap();
        let q = parse_query("x\tp\ty\n", &g).unwrap();
        let idx = indexes_for(&g);
        let seed = select_seed(&q, g.stats(), idx.depth());
        let cands: alloc::vec::Vec<NodeId> = alloc::vec![];
        let order = edge_order(&q, seed, g.stats());
        let mut total = 0;
        for &c in &cands {
            let (_, ops) = verify_candidate(&g, &q, seed, c, EditThreshold(0), &order);
            total += ops;
        }
        assert_eq!(total, 0);
    }

    #[test]
    fn single_candidate_probe_count_bounded_by_degree() {
        let g = parse_triples("a\tp\tb\na\tq\tc\na\tr\td\n").unwrap();
        let q = parse_query("x\tp\ty\n", &g).unwrap();
        let a = g.node_id("a").unwrap();
        let order = edge_order(&q, NodeId(0), g.stats());
        let (_, ops) = verify_candidate(&g, &q, NodeId(0), a, EditThreshold(0), &order);
        assert!(ops <= g.degree(a) as u64);
    }

    #[test]
    fn monotone_in_threshold() {
        let text = "a\tp\tb\nb\tq\tc\nc\tr\td\nd\tp\ta\n";
        let g = parse_triples(text).unwrap();
        let q = parse_query("x\tp\ty\ny\tq\tz\n", &g).unwrap();
        let idx = indexes_for(&g);
        let t0 = exed(&g, &q, EditThreshold(0), FilterConfig::None, &idx).unwrap();
        let t1 = exed(&g, &q, EditThreshold(1), FilterConfig::None, &idx).unwrap();
        assert!(t0.answers.is_subset_of(&t1.answers));
    }
}
