//! Per-node neighbourhood cardinality signatures, the inverted index over
//! them, the signature lower-bound distance, and the budget-propagating
//! candidate pruning pass.
//!
//! A signature records, per depth `k` and label `l`, how many nodes are
//! reached at depth `k` through an edge labeled `l`, ignoring edge
//! direction. The two sides use different reachability semantics:
//!
//! * data nodes count every node reachable by an exact-length-`k` walk
//!   (no immediate reversal of the same edge), so a node showing up at
//!   several depths is counted at each of them;
//! * query nodes count each node once, at its BFS depth, once per label
//!   arriving from the previous level.
//!
//! This asymmetry is what makes the summed per-cell deficit a true lower
//! bound on the number of label substitutions: a query node's witness
//! path maps to a data walk of the same length, and one substitution can
//! only change the last label of one witness, i.e. remove one unit from
//! one cell. Counting data nodes first-visit-only would instead let a
//! shortcut edge drain a deeper cell and reject exact matches.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::graph::{DataGraph, EdgeId, LabelId, NodeId};
use crate::query::{EditThreshold, QueryGraph};
use crate::{Error, Result};

/// Default signature and path depth.
pub const DEFAULT_DEPTH: u8 = 3;

/// One `(depth, label) -> cardinality` cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SigEntry {
    pub depth: u8,
    pub label: LabelId,
    pub count: u32,
}

/// Sparse per-node signature; entries sorted by `(depth, label)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighbourhoodSignature {
    depth: u8,
    entries: Vec<SigEntry>,
}

impl NeighbourhoodSignature {
    pub fn from_entries(depth: u8, mut entries: Vec<SigEntry>) -> Self {
        entries.sort_by_key(|e| (e.depth, e.label));
        NeighbourhoodSignature { depth, entries }
    }

    pub fn depth(&self) -> u8 {
        self.depth
    }

    pub fn entries(&self) -> &[SigEntry] {
        &self.entries
    }

    pub fn count(&self, depth: u8, label: LabelId) -> u32 {
        self.entries
            .binary_search_by_key(&(depth, label), |e| (e.depth, e.label))
            .map(|i| self.entries[i].count)
            .unwrap_or(0)
    }

    /// Sum of all cardinalities across cells.
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.count as u64).sum()
    }

    /// Distinct labels present at `depth`.
    pub fn level_labels(&self, depth: u8) -> impl Iterator<Item = LabelId> + '_ {
        self.entries
            .iter()
            .filter(move |e| e.depth == depth)
            .map(|e| e.label)
    }
}

/// Signature of a data node: exact-length walk reachability.
pub fn data_signature(g: &DataGraph, n: NodeId, d: u8) -> NeighbourhoodSignature {
    debug_assert!(d >= 1);
    // walk states are (node, arriving edge); extending any state may use
    // every incident edge except the one just traversed
    let mut states: BTreeSet<(NodeId, EdgeId)> = BTreeSet::new();
    for eid in g.incident(n) {
        let e = g.edge(eid);
        let other = if e.src == n { e.dst } else { e.src };
        states.insert((other, eid));
    }
    let mut entries = Vec::new();
    let mut cells: BTreeSet<(LabelId, NodeId)> = BTreeSet::new();
    for depth in 1..=d {
        cells.clear();
        for &(m, via) in &states {
            cells.insert((g.edge(via).label, m));
        }
        let mut run: Option<(LabelId, u32)> = None;
        for &(label, _) in &cells {
            match &mut run {
                Some((l, c)) if *l == label => *c += 1,
                _ => {
                    if let Some((l, c)) = run.take() {
                        entries.push(SigEntry {
                            depth,
                            label: l,
                            count: c,
                        });
                    }
                    run = Some((label, 1));
                }
            }
        }
        if let Some((l, c)) = run {
            entries.push(SigEntry {
                depth,
                label: l,
                count: c,
            });
        }
        if depth == d {
            break;
        }
        let mut next = BTreeSet::new();
        for &(m, via) in &states {
            for eid in g.incident(m) {
                if eid == via {
                    continue;
                }
                let e = g.edge(eid);
                let other = if e.src == m { e.dst } else { e.src };
                next.insert((other, eid));
            }
        }
        states = next;
    }
    NeighbourhoodSignature::from_entries(d, entries)
}

/// Signature of a query node: first-visit BFS levels. Wildcard edges are
/// traversed for depth but produce no cells, since a wildcard step
/// constrains nothing.
pub fn query_signature(q: &QueryGraph, n: NodeId, d: u8) -> NeighbourhoodSignature {
    debug_assert!(d >= 1);
    let adj = q.adjacency();
    let mut depth_of: Vec<Option<u8>> = alloc::vec![None; q.node_count()];
    depth_of[n.index()] = Some(0);
    let mut frontier = alloc::vec![n];
    let mut entries = Vec::new();
    for depth in 1..=d {
        let mut next: Vec<NodeId> = Vec::new();
        let mut cells: BTreeSet<(LabelId, NodeId)> = BTreeSet::new();
        for &u in &frontier {
            for &(eidx, other) in &adj[u.index()] {
                if depth_of[other.index()].is_some() && depth_of[other.index()] != Some(depth) {
                    continue;
                }
                if depth_of[other.index()].is_none() {
                    depth_of[other.index()] = Some(depth);
                    next.push(other);
                }
                let label = q.edges()[eidx].label;
                if !label.is_wildcard() {
                    cells.insert((label, other));
                }
            }
        }
        let mut counts: BTreeMap<LabelId, u32> = BTreeMap::new();
        for (label, _) in cells {
            *counts.entry(label).or_insert(0) += 1;
        }
        for (label, count) in counts {
            entries.push(SigEntry {
                depth,
                label,
                count,
            });
        }
        if next.is_empty() {
            break;
        }
        next.sort();
        frontier = next;
    }
    NeighbourhoodSignature::from_entries(d, entries)
}

/// Lower bound on the substitutions any embedding mapping the query node
/// onto the data node must spend: summed per-cell deficits
/// `max(0, query count - data count)`.
pub fn node_distance(
    sig_q: &NeighbourhoodSignature,
    sig_g: &NeighbourhoodSignature,
) -> Result<u32> {
    if sig_q.depth != sig_g.depth {
        return Err(Error::DepthMismatch {
            expected: sig_q.depth,
            got: sig_g.depth,
        });
    }
    let mut dist = 0u32;
    for e in &sig_q.entries {
        let have = sig_g.count(e.depth, e.label);
        dist += e.count.saturating_sub(have);
    }
    Ok(dist)
}

/// Inverted index: for every `(label, depth)` the nodes holding that cell,
/// sorted by descending cardinality (ties by node id).
#[derive(Debug, Clone, PartialEq)]
pub struct InvertedNeighbourhoodIndex {
    depth: u8,
    node_count: u32,
    postings: BTreeMap<(LabelId, u8), Vec<(NodeId, u32)>>,
}

impl InvertedNeighbourhoodIndex {
    pub fn from_signatures(signatures: &[NeighbourhoodSignature], depth: u8) -> Self {
        let mut postings: BTreeMap<(LabelId, u8), Vec<(NodeId, u32)>> = BTreeMap::new();
        for (i, sig) in signatures.iter().enumerate() {
            debug_assert_eq!(sig.depth, depth);
            for e in &sig.entries {
                postings
                    .entry((e.label, e.depth))
                    .or_default()
                    .push((NodeId(i as u32), e.count));
            }
        }
        for list in postings.values_mut() {
            list.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        }
        InvertedNeighbourhoodIndex {
            depth,
            node_count: signatures.len() as u32,
            postings,
        }
    }

    pub fn depth(&self) -> u8 {
        self.depth
    }

    pub fn node_count(&self) -> u32 {
        self.node_count
    }

    pub fn postings(&self) -> &BTreeMap<(LabelId, u8), Vec<(NodeId, u32)>> {
        &self.postings
    }

    pub fn from_parts(
        depth: u8,
        node_count: u32,
        postings: BTreeMap<(LabelId, u8), Vec<(NodeId, u32)>>,
    ) -> Self {
        InvertedNeighbourhoodIndex {
            depth,
            node_count,
            postings,
        }
    }

    /// Nodes whose `(label, depth)` cardinality is at least `min_card`.
    pub fn lookup(&self, label: LabelId, depth: u8, min_card: u32) -> &[(NodeId, u32)] {
        match self.postings.get(&(label, depth)) {
            None => &[],
            Some(list) => {
                let end = list.partition_point(|&(_, c)| c >= min_card);
                &list[..end]
            }
        }
    }
}

/// Build a data signature for every node.
pub fn build_signatures(g: &DataGraph, d: u8) -> Vec<NeighbourhoodSignature> {
    (0..g.node_count())
        .map(|n| data_signature(g, NodeId(n as u32), d))
        .collect()
}

pub fn build_inverted_index(g: &DataGraph, d: u8) -> InvertedNeighbourhoodIndex {
    InvertedNeighbourhoodIndex::from_signatures(&build_signatures(g, d), d)
}

/// All data nodes whose signature distance to `sig_q` is at most `t`,
/// computed from postings only. Equals the exhaustive per-node scan.
pub fn neighbourhood_candidates(
    idx: &InvertedNeighbourhoodIndex,
    sig_q: &NeighbourhoodSignature,
    t: EditThreshold,
) -> Vec<NodeId> {
    let total: u64 = sig_q.total();
    let n = idx.node_count as usize;
    if total <= t.0 as u64 {
        // the bound is met even by a node matching nothing
        return (0..n).map(|i| NodeId(i as u32)).collect();
    }
    // distance(n) = total - sum over cells of min(query count, node count),
    // so accumulate the credited overlap per node and keep the nodes whose
    // credit reaches total - t
    let mut credit = alloc::vec![0u64; n];
    for e in sig_q.entries() {
        if let Some(list) = idx.postings.get(&(e.label, e.depth)) {
            for &(node, card) in list {
                credit[node.index()] += card.min(e.count) as u64;
            }
        }
    }
    let need = total - t.0 as u64;
    (0..n)
        .filter(|&i| credit[i] >= need)
        .map(|i| NodeId(i as u32))
        .collect()
}

/// Candidate data nodes per query node, each with the smallest edit
/// budget it has been reached with.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateMap {
    per_node: Vec<Vec<(NodeId, u32)>>,
}

impl CandidateMap {
    pub fn candidates(&self, query_node: NodeId) -> &[(NodeId, u32)] {
        &self.per_node[query_node.index()]
    }

    pub fn nodes(&self, query_node: NodeId) -> Vec<NodeId> {
        self.per_node[query_node.index()]
            .iter()
            .map(|&(n, _)| n)
            .collect()
    }

    pub fn len(&self, query_node: NodeId) -> usize {
        self.per_node[query_node.index()].len()
    }

    pub fn query_node_count(&self) -> usize {
        self.per_node.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_node.iter().all(|v| v.is_empty())
    }
}

/// Budget-propagating pruning. Every query node starts from its own
/// signature candidates; a breadth-first pass over the query edges from
/// the seed then narrows each set to candidates reachable from the
/// previous set, free across a data edge matching both direction and
/// label and costing one unit of budget otherwise. Final arc-consistency
/// sweeps drop any candidate left without a within-budget partner across
/// some incident query edge.
///
/// Every ingredient keeps genuine answer images: their signature
/// distances are bounded by the answer distance, the propagated budgets
/// count mismatches of distinct query edges (so they stay within `t`),
/// and an image always has its own embedding edge as a partner.
pub fn neighbourhood_pruning(
    g: &DataGraph,
    q: &QueryGraph,
    t: EditThreshold,
    seed: NodeId,
    idx: &InvertedNeighbourhoodIndex,
) -> CandidateMap {
    let d = idx.depth;
    let mut per_node: Vec<BTreeMap<NodeId, u32>> = (0..q.node_count())
        .map(|n| {
            let sig = query_signature(q, NodeId(n as u32), d);
            neighbourhood_candidates(idx, &sig, t)
                .into_iter()
                .map(|c| (c, 0u32))
                .collect()
        })
        .collect();

    let adj = q.adjacency();
    let mut visited = alloc::vec![false; q.node_count()];
    visited[seed.index()] = true;
    let mut processed = alloc::vec![false; q.edge_count()];
    let mut worklist: alloc::collections::VecDeque<NodeId> = alloc::collections::VecDeque::new();
    worklist.push_back(seed);

    while let Some(nq) = worklist.pop_front() {
        for &(eidx, other) in &adj[nq.index()] {
            if processed[eidx] {
                continue;
            }
            processed[eidx] = true;
            let qe = q.edges()[eidx];
            let outward = qe.src == nq; // query edge leaves nq
            let mut contributions: BTreeMap<NodeId, u32> = BTreeMap::new();
            for (&n, &b) in &per_node[nq.index()] {
                let mut offer = |data_edge: EdgeId, matching_dir: bool| {
                    let e = g.edge(data_edge);
                    let (endpoint, dir_ok) = if matching_dir {
                        (if outward { e.dst } else { e.src }, true)
                    } else {
                        (if outward { e.src } else { e.dst }, false)
                    };
                    let label_ok = qe.label.is_wildcard() || e.label == qe.label;
                    let cost = if dir_ok && label_ok { 0 } else { 1 };
                    let nb = b + cost;
                    if nb <= t.0 {
                        contributions
                            .entry(endpoint)
                            .and_modify(|cur| *cur = (*cur).min(nb))
                            .or_insert(nb);
                    }
                };
                let (matching, other_dir) = if outward {
                    (g.out_edges(n), g.in_edges(n))
                } else {
                    (g.in_edges(n), g.out_edges(n))
                };
                for &eid in matching {
                    offer(eid, true);
                }
                for &eid in other_dir {
                    offer(eid, false);
                }
            }
            // intersect with the standing set; both budget accounts stay
            // within t for a genuine answer image, so the larger is safe
            let old = core::mem::take(&mut per_node[other.index()]);
            per_node[other.index()] = old
                .into_iter()
                .filter_map(|(n, b_old)| {
                    contributions.get(&n).map(|&b_new| (n, b_old.max(b_new)))
                })
                .collect();
            if !visited[other.index()] {
                visited[other.index()] = true;
                worklist.push_back(other);
            }
        }
    }

    refine_arcs(g, q, t, &mut per_node);

    CandidateMap {
        per_node: per_node
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect(),
    }
}

/// Repeatedly drops candidates whose incident query edges cannot all be
/// served within budget, until a fixpoint (each sweep only shrinks
/// sets). A candidate's bound is the sum over incident query edges of
/// the cheapest data edge reaching the neighbouring candidate set: 0
/// for a direction-and-label match, 1 for any other edge, unusable
/// otherwise. The true image's own embedding edges serve every arc and
/// their mismatches sum to the answer distance, so it is never dropped.
/// The propagated path budget is deliberately not added on top: an arc
/// back toward the seed may be the very edge that budget was charged
/// for.
fn refine_arcs(
    g: &DataGraph,
    q: &QueryGraph,
    t: EditThreshold,
    per_node: &mut [BTreeMap<NodeId, u32>],
) {
    let adj = q.adjacency();
    for _ in 0..8 {
        let mut changed = false;
        for u in 0..q.node_count() {
            if adj[u].is_empty() {
                continue;
            }
            let before = per_node[u].len();
            let survivors: BTreeMap<NodeId, u32> = per_node[u]
                .iter()
                .filter(|&(&n, _)| {
                    let mut required = 0u32;
                    for &(eidx, other) in &adj[u] {
                        let qe = q.edges()[eidx];
                        let outward = qe.src.index() == u;
                        match arc_min_cost(g, qe.label, outward, n, &per_node[other.index()]) {
                            Some(cost) => required += cost,
                            None => return false,
                        }
                        if required > t.0 {
                            return false;
                        }
                    }
                    true
                })
                .map(|(&n, &b)| (n, b))
                .collect();
            if survivors.len() != before {
                changed = true;
                per_node[u] = survivors;
            }
        }
        if !changed {
            break;
        }
    }
}

/// Cheapest way to serve one query edge from candidate `n`: `Some(0)`
/// with a direction-and-label match into `targets`, `Some(1)` with any
/// other edge into `targets`, `None` if no edge reaches `targets`.
fn arc_min_cost(
    g: &DataGraph,
    label: LabelId,
    outward: bool,
    n: NodeId,
    targets: &BTreeMap<NodeId, u32>,
) -> Option<u32> {
    fn edge_cost(
        g: &DataGraph,
        label: LabelId,
        outward: bool,
        eid: EdgeId,
        matching_dir: bool,
        targets: &BTreeMap<NodeId, u32>,
    ) -> Option<u32> {
        let e = g.edge(eid);
        let endpoint = match (matching_dir, outward) {
            (true, true) => e.dst,
            (true, false) => e.src,
            (false, true) => e.src,
            (false, false) => e.dst,
        };
        if !targets.contains_key(&endpoint) {
            return None;
        }
        let label_ok = label.is_wildcard() || e.label == label;
        Some(if matching_dir && label_ok { 0 } else { 1 })
    }

    let mut best: Option<u32> = None;
    let (matching, other_dir) = if outward {
        (g.out_edges(n), g.in_edges(n))
    } else {
        (g.in_edges(n), g.out_edges(n))
    };
    for &eid in matching {
        if let Some(cost) = edge_cost(g, label, outward, eid, true, targets) {
            best = Some(best.map_or(cost, |b| b.min(cost)));
            if best == Some(0) {
                return best;
            }
        }
    }
    for &eid in other_dir {
        if let Some(cost) = edge_cost(g, label, outward, eid, false, targets) {
            best = Some(best.map_or(cost, |b| b.min(cost)));
        }
    }
    best
}
