//! Data-graph representation: an interned, directed, edge-labeled
//! multigraph with per-node adjacency and label statistics.
//!
//! Nodes are identified by their full entity string; labels are interned
//! into dense ids. Parallel edges between the same ordered node pair are
//! kept as long as their labels differ; exact duplicate triples collapse.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

/// Dense node identifier, contiguous `0..|V|` after ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Dense label identifier. [`LabelId::WILDCARD`] is reserved for query
/// edges that match any label; it never appears in a data graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelId(pub u32);

impl LabelId {
    pub const WILDCARD: LabelId = LabelId(u32::MAX);

    #[inline]
    pub fn is_wildcard(self) -> bool {
        self == LabelId::WILDCARD
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index into [`DataGraph::edges`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A directed labeled edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub label: LabelId,
}

/// Immutable data graph. Construct through [`GraphBuilder`] or
/// [`parse_triples`]; safe to share across threads once built.
#[derive(Debug, Clone)]
pub struct DataGraph {
    node_names: Vec<String>,
    node_index: BTreeMap<String, NodeId>,
    label_names: Vec<String>,
    label_index: BTreeMap<String, LabelId>,
    edges: Vec<Edge>,
    out_adj: Vec<Vec<EdgeId>>,
    in_adj: Vec<Vec<EdgeId>>,
    stats: LabelStats,
}

/// Label frequencies and degree statistics of a data graph.
#[derive(Debug, Clone, Default)]
pub struct LabelStats {
    freq: Vec<u64>,
    edge_count: u64,
    node_count: u64,
    /// `N(l)`: largest number of `l`-labeled edges adjacent (in + out)
    /// to any single node.
    max_under_node: Vec<u32>,
    max_degree: u32,
}

impl LabelStats {
    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn node_count(&self) -> u64 {
        self.node_count
    }

    /// Average number of adjacent edges per node: `2|E| / |V|`.
    pub fn avg_degree(&self) -> f64 {
        if self.node_count == 0 {
            0.0
        } else {
            2.0 * self.edge_count as f64 / self.node_count as f64
        }
    }

    pub fn freq(&self, label: LabelId) -> u64 {
        if label.is_wildcard() {
            self.edge_count
        } else {
            self.freq.get(label.index()).copied().unwrap_or(0)
        }
    }

    /// Fraction of data edges carrying `label`. The wildcard matches any
    /// label and has selectivity 1.
    pub fn selectivity(&self, label: LabelId) -> Result<f64> {
        if label.is_wildcard() {
            return Ok(1.0);
        }
        match self.freq.get(label.index()) {
            Some(&f) if f > 0 && self.edge_count > 0 => Ok(f as f64 / self.edge_count as f64),
            _ => Err(Error::UnknownLabel(alloc::format!("#{}", label.0))),
        }
    }

    /// `N(l)`, the worst-case number of matching adjacent edges for a
    /// label. For the wildcard every adjacent edge matches, so the
    /// maximum node degree is returned.
    pub fn max_under_node(&self, label: LabelId) -> u32 {
        if label.is_wildcard() {
            self.max_degree
        } else {
            self.max_under_node.get(label.index()).copied().unwrap_or(0)
        }
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }
}

impl DataGraph {
    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn label_count(&self) -> usize {
        self.label_names.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id.index()]
    }

    pub fn node_name(&self, n: NodeId) -> &str {
        &self.node_names[n.index()]
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.node_index.get(name).copied()
    }

    pub fn label_name(&self, l: LabelId) -> &str {
        if l.is_wildcard() {
            "*"
        } else {
            &self.label_names[l.index()]
        }
    }

    pub fn label_id(&self, name: &str) -> Option<LabelId> {
        if name == "*" {
            Some(LabelId::WILDCARD)
        } else {
            self.label_index.get(name).copied()
        }
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    #[inline]
    pub fn out_edges(&self, n: NodeId) -> &[EdgeId] {
        &self.out_adj[n.index()]
    }

    #[inline]
    pub fn in_edges(&self, n: NodeId) -> &[EdgeId] {
        &self.in_adj[n.index()]
    }

    /// All adjacent edge ids, outgoing first. A self-loop appears twice.
    pub fn incident(&self, n: NodeId) -> impl Iterator<Item = EdgeId> + '_ {
        self.out_edges(n).iter().chain(self.in_edges(n)).copied()
    }

    /// In-degree plus out-degree.
    pub fn degree(&self, n: NodeId) -> usize {
        self.out_adj[n.index()].len() + self.in_adj[n.index()].len()
    }

    pub fn stats(&self) -> &LabelStats {
        &self.stats
    }

    /// Serializes back to the tab-separated triple format. Triples come
    /// out in edge order; reparsing yields a graph with identical
    /// canonical triples.
    pub fn to_triples(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            out.push_str(self.node_name(e.src));
            out.push('\t');
            out.push_str(self.label_name(e.label));
            out.push('\t');
            out.push_str(self.node_name(e.dst));
            out.push('\n');
        }
        out
    }

    /// Sorted `(subject, predicate, object)` triples, for isomorphism
    /// checks that ignore id assignment.
    pub fn canonical_triples(&self) -> Vec<(String, String, String)> {
        let mut triples: Vec<(String, String, String)> = self
            .edges
            .iter()
            .map(|e| {
                (
                    self.node_name(e.src).to_string(),
                    self.label_name(e.label).to_string(),
                    self.node_name(e.dst).to_string(),
                )
            })
            .collect();
        triples.sort();
        triples
    }
}

/// Incremental construction; ids are assigned in first-seen order so the
/// result is deterministic for a given triple sequence.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    node_names: Vec<String>,
    node_index: BTreeMap<String, NodeId>,
    label_names: Vec<String>,
    label_index: BTreeMap<String, LabelId>,
    edges: Vec<Edge>,
    seen: BTreeSet<(NodeId, NodeId, LabelId)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern_node(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.node_index.get(name) {
            return id;
        }
        let id = NodeId(self.node_names.len() as u32);
        self.node_names.push(name.to_string());
        self.node_index.insert(name.to_string(), id);
        id
    }

    pub fn intern_label(&mut self, name: &str) -> LabelId {
        if let Some(&id) = self.label_index.get(name) {
            return id;
        }
        let id = LabelId(self.label_names.len() as u32);
        self.label_names.push(name.to_string());
        self.label_index.insert(name.to_string(), id);
        id
    }

    /// Adds one directed edge; exact duplicates are collapsed.
    pub fn add_triple(&mut self, subject: &str, predicate: &str, object: &str) {
        let src = self.intern_node(subject);
        let label = self.intern_label(predicate);
        let dst = self.intern_node(object);
        if self.seen.insert((src, dst, label)) {
            self.edges.push(Edge { src, dst, label });
        }
    }

    pub fn finish(self) -> DataGraph {
        let n = self.node_names.len();
        let mut out_adj: Vec<Vec<EdgeId>> = alloc::vec![Vec::new(); n];
        let mut in_adj: Vec<Vec<EdgeId>> = alloc::vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            out_adj[e.src.index()].push(EdgeId(i as u32));
            in_adj[e.dst.index()].push(EdgeId(i as u32));
        }
        let stats = compute_stats(&self.edges, &out_adj, &in_adj, self.label_names.len());
        DataGraph {
            node_names: self.node_names,
            node_index: self.node_index,
            label_names: self.label_names,
            label_index: self.label_index,
            edges: self.edges,
            out_adj,
            in_adj,
            stats,
        }
    }
}

fn compute_stats(
    edges: &[Edge],
    out_adj: &[Vec<EdgeId>],
    in_adj: &[Vec<EdgeId>],
    label_count: usize,
) -> LabelStats {
    let mut freq = alloc::vec![0u64; label_count];
    for e in edges {
        freq[e.label.index()] += 1;
    }
    let mut max_under_node = alloc::vec![0u32; label_count];
    let mut max_degree = 0u32;
    let mut per_node: BTreeMap<LabelId, u32> = BTreeMap::new();
    for n in 0..out_adj.len() {
        per_node.clear();
        for &eid in out_adj[n].iter().chain(in_adj[n].iter()) {
            *per_node.entry(edges[eid.index()].label).or_insert(0) += 1;
        }
        let degree = (out_adj[n].len() + in_adj[n].len()) as u32;
        max_degree = max_degree.max(degree);
        for (&l, &c) in &per_node {
            let slot = &mut max_under_node[l.index()];
            *slot = (*slot).max(c);
        }
    }
    LabelStats {
        freq,
        edge_count: edges.len() as u64,
        node_count: out_adj.len() as u64,
        max_under_node,
        max_degree,
    }
}

/// Parses tab-separated `subject predicate object` lines. Blank lines and
/// lines starting with `#` are ignored; any other line must have exactly
/// three fields.
pub fn parse_triples(text: &str) -> Result<DataGraph> {
    let mut builder = GraphBuilder::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (s, p, o) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
            (Some(s), Some(p), Some(o), None) if !s.is_empty() && !p.is_empty() && !o.is_empty() => {
                (s, p, o)
            }
            _ => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: alloc::format!("expected 3 tab-separated fields, got {line:?}"),
                })
            }
        };
        builder.add_triple(s, p, o);
    }
    Ok(builder.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_stream_gives_empty_graph() {
        let g = parse_triples("").unwrap();
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn parses_and_counts_frequencies() {
        let g = parse_triples("a\tinfluenced\tb\nc\tinfluenced\tb\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        let l = g.label_id("influenced").unwrap();
        assert_eq!(g.stats().freq(l), 2);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_triples("a\tinfluenced\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let g = parse_triples("# header\n\na\tp\tb\n").unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn duplicate_triples_collapse_but_parallel_labels_kept() {
        let g = parse_triples("a\tp\tb\na\tp\tb\na\tq\tb\n").unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn adjacency_totals_match_edge_count() {
        let g = parse_triples("a\tp\tb\nb\tq\tc\nc\tr\ta\n").unwrap();
        let total: usize = (0..g.node_count())
            .map(|n| g.degree(NodeId(n as u32)))
            .sum();
        assert_eq!(total, 2 * g.edge_count());
    }

    #[test]
    fn selectivity_basics() {
        let mut b = GraphBuilder::new();
        for i in 0..5 {
            b.add_triple(&alloc::format!("s{i}"), "rare", &alloc::format!("o{i}"));
        }
        for i in 0..15 {
            b.add_triple(&alloc::format!("x{i}"), "common", &alloc::format!("y{i}"));
        }
        let g = b.finish();
        let stats = g.stats();
        let rare = g.label_id("rare").unwrap();
        assert_eq!(stats.selectivity(rare).unwrap(), 0.25);
        assert_eq!(stats.selectivity(LabelId::WILDCARD).unwrap(), 1.0);
        assert!(stats.selectivity(LabelId(99)).is_err());
        let total: f64 = (0..g.label_count())
            .map(|i| stats.selectivity(LabelId(i as u32)).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_label_graph_selectivity_is_one() {
        let g = parse_triples("a\tp\tb\nb\tp\tc\n").unwrap();
        let l = g.label_id("p").unwrap();
        assert_eq!(g.stats().selectivity(l).unwrap(), 1.0);
    }

    #[test]
    fn max_under_node_counts_incident_labels() {
        // b has three incident p-edges (two in, one out).
        let g = parse_triples("a\tp\tb\nc\tp\tb\nb\tp\td\na\tq\tc\n").unwrap();
        let p = g.label_id("p").unwrap();
        let q = g.label_id("q").unwrap();
        assert_eq!(g.stats().max_under_node(p), 3);
        assert_eq!(g.stats().max_under_node(q), 1);
    }

    #[test]
    fn round_trip_preserves_canonical_triples() {
        let text = "b\tp\ta\na\tq\tc\nc\tp\tb\n";
        let g = parse_triples(text).unwrap();
        let again = parse_triples(&g.to_triples()).unwrap();
        assert_eq!(g.canonical_triples(), again.canonical_triples());
    }
}
