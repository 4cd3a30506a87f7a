//! Exact search for error-tolerant exemplar queries on edge-labeled
//! directed graphs.
//!
//! Given a small query graph and an edit threshold `t`, the engine finds
//! every embedding of the query into a data graph that preserves edge
//! directions and matches all edge labels up to `t` label substitutions.
//! Two search strategies are provided: an edit-budget backtracking search
//! ([`matcher::exed`]) and a wildcard-expansion search ([`matcher::wced`])
//! that runs one exact search per wildcard variant and merges the results.
//! Both are exact and return identical answer sets.
//!
//! Candidate seeds are pruned by two complementary per-node indexes: a
//! depth-bounded neighbourhood cardinality signature
//! ([`neighbourhood`]) and a Bloom filter over signed label paths
//! ([`path`]). A selectivity-based cost model ([`cost`]) predicts the
//! work of either algorithm and picks the cheaper one.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats and the
//! command-line surface live in the companion `eteq` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

use alloc::string::String;
use core::fmt;

pub mod bloom;
pub mod cost;
pub mod generate;
pub mod graph;
pub mod matcher;
pub mod neighbourhood;
pub mod oracle;
pub mod path;
pub mod query;
pub mod rng;

pub use graph::{DataGraph, Edge, EdgeId, LabelId, LabelStats, NodeId};
pub use matcher::{Answer, AnswerSet, FilterConfig};
pub use query::{EditThreshold, QueryGraph};

/// Errors shared across the engine.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A triple line did not split into exactly three tab-separated fields.
    Parse { line: usize, message: String },
    /// A label string is not interned in the data graph.
    UnknownLabel(String),
    /// The query graph is not connected as an undirected graph.
    DisconnectedQuery,
    /// The query graph has no edges.
    EmptyQuery,
    /// `t >= |E_q|`: with every label editable the problem degenerates to
    /// unlabeled subgraph isomorphism, which this engine does not support.
    ThresholdTooLarge { threshold: u32, query_edges: usize },
    /// Signatures built at different depths cannot be compared.
    DepthMismatch { expected: u8, got: u8 },
    /// Requested synthetic edges exceed the number of distinct
    /// (source, target, label) placements.
    CapacityExceeded { requested: u64, capacity: u64 },
    /// Query sampling ran out of frontier edges after bounded retries.
    SamplingExhausted,
    /// Selectivities passed to the label-coverage probability must sum
    /// to at most one.
    InvalidMarginals { sum: f64 },
    /// A path key needs at least one step.
    EmptyPath,
    /// Input exceeds a brute-force size cap.
    CapExceeded {
        what: &'static str,
        value: u64,
        cap: u64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::UnknownLabel(l) => write!(f, "unknown label: {l:?}"),
            Error::DisconnectedQuery => write!(f, "query graph is disconnected"),
            Error::EmptyQuery => write!(f, "query graph has no edges"),
            Error::ThresholdTooLarge {
                threshold,
                query_edges,
            } => write!(
                f,
                "edit threshold {threshold} >= {query_edges} query edges: \
                 unlabeled-isomorphism regime unsupported"
            ),
            Error::DepthMismatch { expected, got } => {
                write!(f, "signature depth mismatch: expected {expected}, got {got}")
            }
            Error::CapacityExceeded {
                requested,
                capacity,
            } => write!(
                f,
                "requested {requested} edges exceed multigraph capacity {capacity}"
            ),
            Error::SamplingExhausted => write!(f, "query sampling exhausted after bounded retries"),
            Error::InvalidMarginals { sum } => {
                write!(f, "label selectivities sum to {sum} > 1")
            }
            Error::EmptyPath => write!(f, "path encoding requires at least one step"),
            Error::CapExceeded { what, value, cap } => {
                write!(f, "{what} {value} exceeds cap {cap}")
            }
        }
    }
}

impl core::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
