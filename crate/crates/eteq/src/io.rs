//! File formats: tab-separated triples, a binary graph cache, and the
//! index persistence format.
//!
//! Binary layouts are little-endian with length-prefixed strings.
//!
//! `graph.bin`: magic `ETEQGB01`, then node/label/edge counts (u32),
//! node names, label names, and `(src, dst, label)` u32 triples in edge
//! order. Reloading reproduces identical ids.
//!
//! `index.bin`: magic `ETEQIX01`, depth (u8), Bloom target rate (f64),
//! per-node signature entries, inverted postings, and per-node Bloom
//! filters as `(bit count, hash count, estimate, rate, words)`. A loaded
//! index is bit-identical to the one written.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use eteq_core::bloom::BloomFilter;
use eteq_core::graph::{parse_triples, GraphBuilder};
use eteq_core::matcher::FilterIndexes;
use eteq_core::neighbourhood::{
    InvertedNeighbourhoodIndex, NeighbourhoodSignature, SigEntry,
};
use eteq_core::path::PathFilterSet;
use eteq_core::query::{parse_query, QueryGraph};
use eteq_core::{DataGraph, LabelId, NodeId};

use crate::{io_err, Error, Result};

const GRAPH_MAGIC: &[u8; 8] = b"ETEQGB01";
const INDEX_MAGIC: &[u8; 8] = b"ETEQIX01";

pub const GRAPH_FILE: &str = "graph.bin";
pub const INDEX_FILE: &str = "index.bin";

/// Reads a graph from a triple file, a binary cache, or an index
/// directory produced by `build-index`.
pub fn read_graph(path: &Path) -> Result<DataGraph> {
    if path.is_dir() {
        return read_graph_bin(&path.join(GRAPH_FILE));
    }
    let bytes = fs::read(path).map_err(io_err(path))?;
    if bytes.starts_with(GRAPH_MAGIC) {
        decode_graph(&bytes)
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|e| Error::Format(format!("{}: not valid UTF-8: {e}", path.display())))?;
        Ok(parse_triples(&text)?)
    }
}

pub fn write_graph_tsv(path: &Path, g: &DataGraph) -> Result<()> {
    fs::write(path, g.to_triples()).map_err(io_err(path))
}

pub fn read_query(path: &Path, g: &DataGraph) -> Result<QueryGraph> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(parse_query(&text, g)?)
}

pub fn write_query(path: &Path, q: &QueryGraph, g: &DataGraph) -> Result<()> {
    fs::write(path, q.to_triples(g)).map_err(io_err(path))
}

struct Encoder {
    buf: Vec<u8>,
}

impl Encoder {
    fn new(magic: &[u8; 8]) -> Self {
        Encoder {
            buf: magic.to_vec(),
        }
    }

    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.buf.extend_from_slice(s.as_bytes());
    }
}

struct Decoder<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Decoder<'a> {
    fn new(buf: &'a [u8], magic: &[u8; 8]) -> Result<Self> {
        if !buf.starts_with(magic) {
            return Err(Error::Format("bad magic header".into()));
        }
        Ok(Decoder { buf, pos: 8 })
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Format("truncated file".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn str(&mut self) -> Result<String> {
        let len = self.u32()? as usize;
        let bytes = self.take(len)?;
        String::from_utf8(bytes.to_vec()).map_err(|e| Error::Format(format!("bad string: {e}")))
    }
}

fn encode_graph(g: &DataGraph) -> Vec<u8> {
    let mut enc = Encoder::new(GRAPH_MAGIC);
    enc.u32(g.node_count() as u32);
    enc.u32(g.label_count() as u32);
    enc.u32(g.edge_count() as u32);
    for n in 0..g.node_count() {
        enc.str(g.node_name(NodeId(n as u32)));
    }
    for name in g.label_names() {
        enc.str(name);
    }
    for e in g.edges() {
        enc.u32(e.src.0);
        enc.u32(e.dst.0);
        enc.u32(e.label.0);
    }
    enc.buf
}

fn decode_graph(bytes: &[u8]) -> Result<DataGraph> {
    let mut dec = Decoder::new(bytes, GRAPH_MAGIC)?;
    let nodes = dec.u32()? as usize;
    let labels = dec.u32()? as usize;
    let edges = dec.u32()? as usize;
    let mut builder = GraphBuilder::new();
    let mut node_names = Vec::with_capacity(nodes);
    for _ in 0..nodes {
        let name = dec.str()?;
        builder.intern_node(&name);
        node_names.push(name);
    }
    let mut label_names = Vec::with_capacity(labels);
    for _ in 0..labels {
        let name = dec.str()?;
        builder.intern_label(&name);
        label_names.push(name);
    }
    for _ in 0..edges {
        let src = dec.u32()? as usize;
        let dst = dec.u32()? as usize;
        let label = dec.u32()? as usize;
        if src >= nodes || dst >= nodes || label >= labels {
            return Err(Error::Format("edge references out-of-range id".into()));
        }
        builder.add_triple(&node_names[src], &label_names[label], &node_names[dst]);
    }
    Ok(builder.finish())
}

pub fn write_graph_bin(path: &Path, g: &DataGraph) -> Result<()> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(&encode_graph(g)).map_err(io_err(path))
}

pub fn read_graph_bin(path: &Path) -> Result<DataGraph> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .map_err(io_err(path))?
        .read_to_end(&mut bytes)
        .map_err(io_err(path))?;
    decode_graph(&bytes)
}

fn encode_indexes(idx: &FilterIndexes) -> Vec<u8> {
    let mut enc = Encoder::new(INDEX_MAGIC);
    enc.u8(idx.depth());
    enc.f64(idx.path_filters().fpr());
    enc.u32(idx.signatures().len() as u32);
    for sig in idx.signatures() {
        enc.u32(sig.entries().len() as u32);
        for e in sig.entries() {
            enc.u8(e.depth);
            enc.u32(e.label.0);
            enc.u32(e.count);
        }
    }
    let postings = idx.inverted().postings();
    enc.u32(postings.len() as u32);
    for (&(label, depth), list) in postings {
        enc.u32(label.0);
        enc.u8(depth);
        enc.u32(list.len() as u32);
        for &(node, card) in list {
            enc.u32(node.0);
            enc.u32(card);
        }
    }
    for filter in idx.path_filters().filters() {
        enc.u64(filter.bit_count());
        enc.u32(filter.hash_count());
        enc.u64(filter.inserted_estimate());
        enc.f64(filter.fpr_target());
        enc.u32(filter.words().len() as u32);
        for &w in filter.words() {
            enc.u64(w);
        }
    }
    enc.buf
}

fn decode_indexes(bytes: &[u8]) -> Result<FilterIndexes> {
    let mut dec = Decoder::new(bytes, INDEX_MAGIC)?;
    let depth = dec.u8()?;
    let fpr = dec.f64()?;
    let node_count = dec.u32()? as usize;
    let mut signatures = Vec::with_capacity(node_count);
    for _ in 0..node_count {
        let n_entries = dec.u32()? as usize;
        let mut entries = Vec::with_capacity(n_entries);
        for _ in 0..n_entries {
            let d = dec.u8()?;
            let label = LabelId(dec.u32()?);
            let count = dec.u32()?;
            entries.push(SigEntry {
                depth: d,
                label,
                count,
            });
        }
        signatures.push(NeighbourhoodSignature::from_entries(depth, entries));
    }
    let n_postings = dec.u32()? as usize;
    let mut postings: BTreeMap<(LabelId, u8), Vec<(NodeId, u32)>> = BTreeMap::new();
    for _ in 0..n_postings {
        let label = LabelId(dec.u32()?);
        let d = dec.u8()?;
        let len = dec.u32()? as usize;
        let mut list = Vec::with_capacity(len);
        for _ in 0..len {
            let node = NodeId(dec.u32()?);
            let card = dec.u32()?;
            list.push((node, card));
        }
        postings.insert((label, d), list);
    }
    let inverted = InvertedNeighbourhoodIndex::from_parts(depth, node_count as u32, postings);
    let mut filters = Vec::with_capacity(node_count);
    for _ in 0..node_count {
        let m = dec.u64()?;
        let k = dec.u32()?;
        let estimate = dec.u64()?;
        let rate = dec.f64()?;
        let words_len = dec.u32()? as usize;
        let mut words = Vec::with_capacity(words_len);
        for _ in 0..words_len {
            words.push(dec.u64()?);
        }
        filters.push(BloomFilter::from_parts(m, k, estimate, rate, words));
    }
    let path_filters = PathFilterSet::from_parts(depth, fpr, filters);
    Ok(FilterIndexes::from_parts(
        depth,
        signatures,
        inverted,
        path_filters,
    ))
}

/// Writes `graph.bin` and `index.bin` into `dir`.
pub fn write_index_dir(dir: &Path, g: &DataGraph, idx: &FilterIndexes) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_graph_bin(&dir.join(GRAPH_FILE), g)?;
    let path = dir.join(INDEX_FILE);
    fs::write(&path, encode_indexes(idx)).map_err(io_err(&path))
}

pub fn read_index_dir(dir: &Path) -> Result<(DataGraph, FilterIndexes)> {
    let g = read_graph_bin(&dir.join(GRAPH_FILE))?;
    let path = dir.join(INDEX_FILE);
    let bytes = fs::read(&path).map_err(io_err(&path))?;
    let idx = decode_indexes(&bytes)?;
    Ok((g, idx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use eteq_core::generate::{generate_synthetic, LabelDistribution};

    #[test]
    fn graph_binary_round_trip() {
        let g = generate_synthetic(40, 3.0, 5, LabelDistribution::Uniform, 3).unwrap();
        let dir = std::env::temp_dir().join("eteq-io-test-graph");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("g.bin");
        write_graph_bin(&path, &g).unwrap();
        let again = read_graph_bin(&path).unwrap();
        assert_eq!(g.canonical_triples(), again.canonical_triples());
        assert_eq!(g.edge_count(), again.edge_count());
    }

    #[test]
    fn index_round_trip_is_bit_exact() {
        let g = generate_synthetic(30, 3.0, 4, LabelDistribution::Uniform, 9).unwrap();
        let idx = FilterIndexes::build(&g, 2, 0.01);
        let dir = std::env::temp_dir().join("eteq-io-test-index");
        write_index_dir(&dir, &g, &idx).unwrap();
        let (g2, idx2) = read_index_dir(&dir).unwrap();
        assert_eq!(g.canonical_triples(), g2.canonical_triples());
        assert_eq!(idx.signatures(), idx2.signatures());
        assert_eq!(idx.inverted(), idx2.inverted());
        assert_eq!(idx.path_filters(), idx2.path_filters());
    }
}
