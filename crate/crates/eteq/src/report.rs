//! Answer serialization, per-query run reports and the benchmark CSV.
//!
//! Answers are emitted as JSON lines ordered by `(distance, edge map)`,
//! so two exact engines over the same instance produce byte-identical
//! output. The CSV schema is fixed:
//!
//! ```text
//! query_id,edges,threshold,algo,filters,candidates_before,
//! cand_neighbour,cand_path,cand_both,examined,answers,answers_hash,
//! distance_hist,operations,est_exact,est_ub_adj,est_ub_path[,wall_ms]
//! ```
//!
//! `wall_ms` appears only on request; everything else is reproducible
//! bit-for-bit under fixed seeds.

use std::collections::BTreeMap;

use eteq_core::cost::{CostEstimate, Lemma2Condition};
use eteq_core::matcher::{Answer, AnswerSet};
use eteq_core::{DataGraph, QueryGraph};
use serde::Serialize;

#[derive(Debug, Serialize)]
struct AnswerEdgeRecord {
    query_edge: usize,
    data_edge: u32,
    subject: String,
    predicate: String,
    object: String,
    matched: bool,
}

#[derive(Debug, Serialize)]
struct AnswerRecord {
    nodes: BTreeMap<String, String>,
    edges: Vec<AnswerEdgeRecord>,
    distance: u32,
}

fn answer_record(g: &DataGraph, q: &QueryGraph, a: &Answer) -> AnswerRecord {
    let nodes = (0..q.node_count())
        .map(|i| {
            (
                q.node_name(eteq_core::NodeId(i as u32)).to_string(),
                g.node_name(a.node_map[i]).to_string(),
            )
        })
        .collect();
    let edges = q
        .edges()
        .iter()
        .zip(&a.edge_map)
        .enumerate()
        .map(|(i, (qe, &de))| {
            let e = g.edge(de);
            AnswerEdgeRecord {
                query_edge: i,
                data_edge: de.0,
                subject: g.node_name(e.src).to_string(),
                predicate: g.label_name(e.label).to_string(),
                object: g.node_name(e.dst).to_string(),
                matched: qe.label.is_wildcard() || qe.label == e.label,
            }
        })
        .collect();
    AnswerRecord {
        nodes,
        edges,
        distance: a.distance,
    }
}

/// One JSON object per answer, ordered by `(distance, edge map)`.
pub fn render_answers(g: &DataGraph, q: &QueryGraph, answers: &AnswerSet) -> String {
    let mut out = String::new();
    for a in answers.iter_sorted() {
        let record = answer_record(g, q, a);
        out.push_str(&serde_json::to_string(&record).expect("answer records always serialize"));
        out.push('\n');
    }
    out
}

/// Stable 64-bit FNV-1a digest of rendered answers, for quick equality
/// checks across runs and algorithms.
pub fn fnv1a_hex(text: &str) -> String {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in text.as_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01B3);
    }
    format!("{h:016x}")
}

#[derive(Debug, Serialize)]
pub struct Lemma2Record {
    pub sel_l1: f64,
    pub threshold_value: f64,
    pub holds: bool,
}

impl From<Lemma2Condition> for Lemma2Record {
    fn from(c: Lemma2Condition) -> Self {
        Lemma2Record {
            sel_l1: c.sel_l1,
            threshold_value: c.threshold_value,
            holds: c.holds,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EstimateRecord {
    pub algorithm: &'static str,
    pub model: &'static str,
    pub candidates: f64,
    pub verify_cost: f64,
    pub total: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma2_condition: Option<Lemma2Record>,
}

impl EstimateRecord {
    pub fn new(estimate: &CostEstimate, lemma2: Option<Lemma2Condition>) -> Self {
        EstimateRecord {
            algorithm: estimate.algorithm.name(),
            model: estimate.model.name(),
            candidates: estimate.candidates,
            verify_cost: estimate.verify_cost,
            total: estimate.total,
            lemma2_condition: lemma2.map(Into::into),
        }
    }
}

/// Everything recorded about one `(query, threshold, algo, filter)` run.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub query_id: usize,
    pub edges: usize,
    pub threshold: u32,
    pub algorithm: &'static str,
    pub filters: &'static str,
    pub candidates_before: usize,
    pub candidates_after_neighbour: usize,
    pub candidates_after_path: usize,
    pub candidates_after_both: usize,
    /// Seed candidates actually verified by this run (summed over
    /// wildcard variants for the wildcard expansion).
    pub examined: usize,
    pub answers: usize,
    pub answers_hash: String,
    pub distance_histogram: BTreeMap<u32, usize>,
    pub operations: u64,
    pub est_exact: f64,
    pub est_ub_adj: f64,
    pub est_ub_path: f64,
    /// Milliseconds; reported but excluded from reproducible output.
    pub wall_ms: f64,
}

impl RunRecord {
    pub fn csv_header(timings: bool) -> String {
        let mut s = "query_id,edges,threshold,algo,filters,candidates_before,cand_neighbour,\
                     cand_path,cand_both,examined,answers,answers_hash,distance_hist,operations,\
                     est_exact,est_ub_adj,est_ub_path"
            .to_string();
        if timings {
            s.push_str(",wall_ms");
        }
        s.push('\n');
        s
    }

    pub fn csv_row(&self, timings: bool) -> String {
        let hist = self
            .distance_histogram
            .iter()
            .map(|(d, c)| format!("{d}:{c}"))
            .collect::<Vec<_>>()
            .join("|");
        let mut s = format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:.6},{:.6},{:.6}",
            self.query_id,
            self.edges,
            self.threshold,
            self.algorithm,
            self.filters,
            self.candidates_before,
            self.candidates_after_neighbour,
            self.candidates_after_path,
            self.candidates_after_both,
            self.examined,
            self.answers,
            self.answers_hash,
            hist,
            self.operations,
            self.est_exact,
            self.est_ub_adj,
            self.est_ub_path,
        );
        if timings {
            s.push_str(&format!(",{:.3}", self.wall_ms));
        }
        s.push('\n');
        s
    }
}

pub fn render_csv(rows: &[RunRecord], timings: bool) -> String {
    let mut out = RunRecord::csv_header(timings);
    for r in rows {
        out.push_str(&r.csv_row(timings));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use eteq_core::graph::parse_triples;
    use eteq_core::matcher::{exed, FilterConfig, FilterIndexes};
    use eteq_core::query::{parse_query, EditThreshold};

    #[test]
    fn rendered_answers_are_sorted_and_stable() {
        let g = parse_triples("a\tp\tb\na\tq\tb\nc\tp\td\n").unwrap();
        let q = parse_query("x\tp\ty\n", &g).unwrap();
        let idx = FilterIndexes::build(&g, 2, 0.01);
        let out = exed(&g, &q, EditThreshold(0), FilterConfig::None, &idx).unwrap();
        let text1 = render_answers(&g, &q, &out.answers);
        let text2 = render_answers(&g, &q, &out.answers);
        assert_eq!(text1, text2);
        assert_eq!(text1.lines().count(), 2);
        let first: serde_json::Value = serde_json::from_str(text1.lines().next().unwrap()).unwrap();
        assert_eq!(first["distance"], 0);
        assert_eq!(first["edges"][0]["matched"], true);
    }

    #[test]
    fn hash_distinguishes_answer_sets() {
        assert_ne!(fnv1a_hex("a"), fnv1a_hex("b"));
        assert_eq!(fnv1a_hex(""), fnv1a_hex(""));
    }
}
