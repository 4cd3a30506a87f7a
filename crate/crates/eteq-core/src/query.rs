//! Query representation, validation, and the wildcard / deletion
//! expansions used by the wildcard-expansion search.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::graph::{DataGraph, LabelId, NodeId};
use crate::{Error, Result};

/// Maximum number of edit operations allowed for a match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct EditThreshold(pub u32);

/// A directed labeled query edge. `label` may be [`LabelId::WILDCARD`],
/// which matches any data label at no edit cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryEdge {
    pub src: NodeId,
    pub dst: NodeId,
    pub label: LabelId,
}

/// A small connected query graph. Node ids are dense and query-local;
/// labels are bound to a data graph's label table. Node entity strings
/// are kept for display only and never constrain matching.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryGraph {
    node_names: Vec<String>,
    edges: Vec<QueryEdge>,
}

impl QueryGraph {
    pub fn new(node_names: Vec<String>, edges: Vec<QueryEdge>) -> Self {
        QueryGraph { node_names, edges }
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[QueryEdge] {
        &self.edges
    }

    pub fn node_name(&self, n: NodeId) -> &str {
        &self.node_names[n.index()]
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    pub fn contains_wildcard(&self) -> bool {
        self.edges.iter().any(|e| e.label.is_wildcard())
    }

    /// Indices of edges carrying a real (non-wildcard) label.
    pub fn real_edge_indices(&self) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&i| !self.edges[i].label.is_wildcard())
            .collect()
    }

    /// Undirected adjacency: for each node, `(edge index, other endpoint)`.
    /// A self-loop contributes one entry.
    pub fn adjacency(&self) -> Vec<Vec<(usize, NodeId)>> {
        let mut adj: Vec<Vec<(usize, NodeId)>> = alloc::vec![Vec::new(); self.node_count()];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.src.index()].push((i, e.dst));
            if e.src != e.dst {
                adj[e.dst.index()].push((i, e.src));
            }
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.node_count() == 0 {
            return false;
        }
        let adj = self.adjacency();
        let mut seen = alloc::vec![false; self.node_count()];
        let mut stack = alloc::vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(n) = stack.pop() {
            for &(_, other) in &adj[n] {
                if !seen[other.index()] {
                    seen[other.index()] = true;
                    count += 1;
                    stack.push(other.index());
                }
            }
        }
        count == self.node_count()
    }

    /// A query is searchable when it is connected, nonempty, and the
    /// threshold leaves at least one label fixed.
    pub fn validate(&self, t: EditThreshold) -> Result<()> {
        if self.edges.is_empty() {
            return Err(Error::EmptyQuery);
        }
        if !self.is_connected() {
            return Err(Error::DisconnectedQuery);
        }
        if t.0 as usize >= self.edge_count() {
            return Err(Error::ThresholdTooLarge {
                threshold: t.0,
                query_edges: self.edge_count(),
            });
        }
        Ok(())
    }

    /// Serializes to the triple format, with `*` for wildcard labels.
    pub fn to_triples(&self, g: &DataGraph) -> String {
        let mut out = String::new();
        for e in &self.edges {
            out.push_str(self.node_name(e.src));
            out.push('\t');
            out.push_str(g.label_name(e.label));
            out.push('\t');
            out.push_str(self.node_name(e.dst));
            out.push('\n');
        }
        out
    }
}

/// Parses a query from the same tab-separated triple format as the data
/// graph. The literal predicate `*` denotes the wildcard; every other
/// predicate must already exist in the data graph.
pub fn parse_query(text: &str, g: &DataGraph) -> Result<QueryGraph> {
    let mut node_names: Vec<String> = Vec::new();
    let mut index: alloc::collections::BTreeMap<String, NodeId> = alloc::collections::BTreeMap::new();
    let mut edges = Vec::new();
    let mut intern = |name: &str, names: &mut Vec<String>| -> NodeId {
        if let Some(&id) = index.get(name) {
            return id;
        }
        let id = NodeId(names.len() as u32);
        names.push(name.to_string());
        index.insert(name.to_string(), id);
        id
    };
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
        let label = g
            .label_id(p)
            .ok_or_else(|| Error::UnknownLabel(p.to_string()))?;
        let src = intern(s, &mut node_names);
        let dst = intern(o, &mut node_names);
        edges.push(QueryEdge { src, dst, label });
    }
    Ok(QueryGraph::new(node_names, edges))
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // advance to the next combination in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Number of wildcard variants: `C(real edges, min(t, real edges))`.
pub fn wildcard_query_count(q: &QueryGraph, t: EditThreshold) -> usize {
    let real = q.real_edge_indices().len();
    let k = (t.0 as usize).min(real);
    binomial(real, k)
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// All variants of `q` with `t` real edge labels replaced by the
/// wildcard, in lexicographic order of the chosen edge-index subsets.
/// With `t = 0` this is just `[q]`. Edges that are already wildcards are
/// never selected; if `t` exceeds the number of real edges, the single
/// all-wildcard variant is produced.
pub fn generate_wildcard_queries(q: &QueryGraph, t: EditThreshold) -> Result<Vec<QueryGraph>> {
    q.validate(t)?;
    let real = q.real_edge_indices();
    let k = (t.0 as usize).min(real.len());
    let mut out = Vec::new();
    for subset in combinations(real.len(), k) {
        let mut variant = q.clone();
        for &pos in &subset {
            variant.edges[real[pos]].label = LabelId::WILDCARD;
        }
        out.push(variant);
    }
    Ok(out)
}

/// All variants of `q` with `t` edges deleted, one entry per edge-index
/// subset in lexicographic order. Isolated nodes are dropped and every
/// connected component of a variant is returned as a separate search
/// unit, so an entry may hold more than one query.
pub fn generate_deletion_queries(
    q: &QueryGraph,
    t: EditThreshold,
) -> Result<Vec<Vec<QueryGraph>>> {
    q.validate(t)?;
    if t.0 as usize >= q.edge_count() {
        return Err(Error::EmptyQuery);
    }
    let mut out = Vec::new();
    for subset in combinations(q.edge_count(), t.0 as usize) {
        let kept: Vec<QueryEdge> = q
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !subset.contains(i))
            .map(|(_, e)| *e)
            .collect();
        out.push(split_components(q, &kept));
    }
    Ok(out)
}

fn split_components(q: &QueryGraph, kept: &[QueryEdge]) -> Vec<QueryGraph> {
    // union-find over the original node ids restricted to kept edges
    let n = q.node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for e in kept {
        let a = find(&mut parent, e.src.index());
        let b = find(&mut parent, e.dst.index());
        parent[a] = b;
    }
    let mut roots: Vec<usize> = Vec::new();
    for e in kept {
        let r = find(&mut parent, e.src.index());
        if !roots.contains(&r) {
            roots.push(r);
        }
    }
    roots
        .into_iter()
        .map(|root| {
            let mut names = Vec::new();
            let mut remap: alloc::collections::BTreeMap<usize, NodeId> =
                alloc::collections::BTreeMap::new();
            let mut edges = Vec::new();
            for e in kept {
                if find(&mut parent, e.src.index()) != root {
                    continue;
                }
                let mut map = |old: NodeId, names: &mut Vec<String>| -> NodeId {
                    *remap.entry(old.index()).or_insert_with(|| {
                        let id = NodeId(names.len() as u32);
                        names.push(q.node_name(old).to_string());
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
            QueryGraph::new(names, edges)
        })
        .collect()
}

/// Picks the query node with the lowest estimated node selectivity as the
/// search seed; ties break toward the smallest node id. `d` is the
/// signature depth used when profiling node neighbourhoods.
pub fn select_seed(q: &QueryGraph, stats: &crate::graph::LabelStats, d: u8) -> NodeId {
    let mut best = NodeId(0);
    let mut best_p = f64::INFINITY;
    for n in 0..q.node_count() {
        let node = NodeId(n as u32);
        let p = crate::cost::node_selectivity(stats, q, node, d)
            .expect("level label sets are distinct, so marginals stay valid");
        if p < best_p {
            best_p = p;
            best = node;
        }
    }
    best
}
