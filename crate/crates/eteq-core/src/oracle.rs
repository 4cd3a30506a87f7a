//! Independent brute-force references for small instances: the answer
//! oracle every search result is checked against, and an exhaustive
//! label-coverage probability.
//!
//! The oracle deliberately shares nothing with the engine beyond the
//! graph, query and answer types: no indexes, no edge ordering, no
//! filtering. It enumerates injective node assignments in plain node-id
//! order and then every injective edge map per assignment.

use alloc::vec::Vec;

use crate::graph::{DataGraph, EdgeId, NodeId};
use crate::matcher::{Answer, AnswerSet};
use crate::query::{EditThreshold, QueryGraph};
use crate::{Error, Result};

/// Size caps; the oracle refuses anything larger.
#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub max_nodes: usize,
    pub max_query_edges: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_nodes: 200,
            max_query_edges: 5,
        }
    }
}

/// Every answer within distance `t`, by exhaustive enumeration.
pub fn brute_force_answers(
    g: &DataGraph,
    q: &QueryGraph,
    t: EditThreshold,
    cfg: OracleConfig,
) -> Result<AnswerSet> {
    if g.node_count() > cfg.max_nodes {
        return Err(Error::CapExceeded {
            what: "data graph nodes",
            value: g.node_count() as u64,
            cap: cfg.max_nodes as u64,
        });
    }
    if q.edge_count() > cfg.max_query_edges {
        return Err(Error::CapExceeded {
            what: "query edges",
            value: q.edge_count() as u64,
            cap: cfg.max_query_edges as u64,
        });
    }
    q.validate(t)?;

    let mut answers = AnswerSet::new();
    let mut assignment: Vec<Option<NodeId>> = alloc::vec![None; q.node_count()];
    let mut used = alloc::vec![false; g.node_count()];
    assign_nodes(g, q, t, &mut assignment, &mut used, 0, &mut answers);
    Ok(answers)
}

/// Candidate data edges for one query edge under a node assignment,
/// direction respected, each with its label-mismatch cost.
fn edge_candidates(
    g: &DataGraph,
    q: &QueryGraph,
    edge_idx: usize,
    assignment: &[Option<NodeId>],
) -> Option<Vec<(EdgeId, u32)>> {
    let qe = q.edges()[edge_idx];
    let (src, dst) = match (assignment[qe.src.index()], assignment[qe.dst.index()]) {
        (Some(s), Some(d)) => (s, d),
        _ => return None,
    };
    let mut out = Vec::new();
    for &eid in g.out_edges(src) {
        let e = g.edge(eid);
        if e.dst != dst {
            continue;
        }
        let cost = if qe.label.is_wildcard() || e.label == qe.label {
            0
        } else {
            1
        };
        out.push((eid, cost));
    }
    Some(out)
}

fn assign_nodes(
    g: &DataGraph,
    q: &QueryGraph,
    t: EditThreshold,
    assignment: &mut Vec<Option<NodeId>>,
    used: &mut Vec<bool>,
    next: usize,
    answers: &mut AnswerSet,
) {
    if next == q.node_count() {
        enumerate_edge_maps(g, q, t, assignment, answers);
        return;
    }
    for cand in 0..g.node_count() {
        if used[cand] {
            continue;
        }
        assignment[next] = Some(NodeId(cand as u32));
        used[cand] = true;
        // a fully assigned query edge with no direction-respecting image,
        // or a summed minimum cost beyond the budget, cannot be completed
        let mut feasible = true;
        let mut min_cost = 0u32;
        for i in 0..q.edge_count() {
            if let Some(cands) = edge_candidates(g, q, i, assignment) {
                match cands.iter().map(|&(_, c)| c).min() {
                    None => {
                        feasible = false;
                        break;
                    }
                    Some(c) => min_cost += c,
                }
            }
        }
        if feasible && min_cost <= t.0 {
            assign_nodes(g, q, t, assignment, used, next + 1, answers);
        }
        used[cand] = false;
        assignment[next] = None;
    }
}

fn enumerate_edge_maps(
    g: &DataGraph,
    q: &QueryGraph,
    t: EditThreshold,
    assignment: &[Option<NodeId>],
    answers: &mut AnswerSet,
) {
    let per_edge: Vec<Vec<(EdgeId, u32)>> = (0..q.edge_count())
        .map(|i| edge_candidates(g, q, i, assignment).expect("assignment is total"))
        .collect();
    let mut chosen: Vec<EdgeId> = Vec::with_capacity(q.edge_count());
    let node_map: Vec<NodeId> = assignment.iter().map(|n| n.unwrap()).collect();
    pick_edges(&per_edge, 0, 0, t.0, &mut chosen, &node_map, answers);
}

fn pick_edges(
    per_edge: &[Vec<(EdgeId, u32)>],
    idx: usize,
    cost: u32,
    t: u32,
    chosen: &mut Vec<EdgeId>,
    node_map: &[NodeId],
    answers: &mut AnswerSet,
) {
    if idx == per_edge.len() {
        answers.insert(Answer {
            node_map: node_map.to_vec(),
            edge_map: chosen.clone(),
            distance: cost,
        });
        return;
    }
    for &(eid, c) in &per_edge[idx] {
        if cost + c > t || chosen.contains(&eid) {
            continue;
        }
        chosen.push(eid);
        pick_edges(per_edge, idx + 1, cost + c, t, chosen, node_map, answers);
        chosen.pop();
    }
}

/// Exhaustive coverage probability: enumerate every `draws`-tuple over an
/// alphabet whose first `sels.len()` symbols carry the given marginals
/// and whose remaining symbols share the leftover mass equally, and sum
/// the probability of tuples containing all required symbols.
pub fn exhaustive_label_probability(
    draws: u32,
    sels: &[f64],
    alphabet: usize,
) -> Result<f64> {
    let k = sels.len();
    debug_assert!(alphabet >= k);
    let tuples = (alphabet as u64).checked_pow(draws).unwrap_or(u64::MAX);
    if tuples > 1_000_000 {
        return Err(Error::CapExceeded {
            what: "enumeration size",
            value: tuples,
            cap: 1_000_000,
        });
    }
    let rest: f64 = 1.0 - sels.iter().sum::<f64>();
    if rest < -1e-9 || (alphabet == k && rest > 1e-9) {
        return Err(Error::InvalidMarginals {
            sum: sels.iter().sum(),
        });
    }
    let fillers = alphabet - k;
    let filler_p = if fillers > 0 { rest.max(0.0) / fillers as f64 } else { 0.0 };
    let prob_of = |sym: usize| -> f64 {
        if sym < k {
            sels[sym]
        } else {
            filler_p
        }
    };
    let mut total = 0.0;
    let mut tuple = alloc::vec![0usize; draws as usize];
    loop {
        let mut p = 1.0;
        let mut seen = alloc::vec![false; k];
        for &sym in &tuple {
            p *= prob_of(sym);
            if sym < k {
                seen[sym] = true;
            }
        }
        if seen.iter().all(|&s| s) {
            total += p;
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == tuple.len() {
                return Ok(total);
            }
            tuple[pos] += 1;
            if tuple[pos] < alphabet {
                break;
            }
            tuple[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_triples;
    use crate::query::parse_query;

    #[test]
    fn single_edge_single_match() {
        let g = parse_triples("a\tl\tb\n").unwrap();
        let q = parse_query("x\tl\ty\n", &g).unwrap();
        let answers =
            brute_force_answers(&g, &q, EditThreshold(0), OracleConfig::default()).unwrap();
        assert_eq!(answers.len(), 1);
    }

    #[test]
    fn labeled_triangle_automorphisms() {
        // rotations preserve the uniform directed triangle; reflections
        // reverse direction, so exactly three embeddings survive
        let g = parse_triples("a\tl\tb\nb\tl\tc\nc\tl\ta\n").unwrap();
        let q = parse_query("x\tl\ty\ny\tl\tz\nz\tl\tx\n", &g).unwrap();
        let answers =
            brute_force_answers(&g, &q, EditThreshold(0), OracleConfig::default()).unwrap();
        assert_eq!(answers.len(), 3);
    }

    #[test]
    fn distinctly_labeled_triangle_has_identity_only() {
        let g = parse_triples("a\tl1\tb\nb\tl2\tc\nc\tl3\ta\n").unwrap();
        let q = parse_query("x\tl1\ty\ny\tl2\tz\nz\tl3\tx\n", &g).unwrap();
        let answers =
            brute_force_answers(&g, &q, EditThreshold(0), OracleConfig::default()).unwrap();
        assert_eq!(answers.len(), 1);
    }

    #[test]
    fn node_cap_is_enforced() {
        let g = parse_triples("a\tl\tb\n").unwrap();
        let q = parse_query("x\tl\ty\n", &g).unwrap();
        let cfg = OracleConfig {
            max_nodes: 1,
            max_query_edges: 5,
        };
        assert!(matches!(
            brute_force_answers(&g, &q, EditThreshold(0), cfg),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn monotone_in_threshold() {
        let g = parse_triples("a\tl\tb\nb\tm\tc\na\tx\tc\n").unwrap();
        let q = parse_query("u\tl\tv\nv\tm\tw\n", &g).unwrap();
        let t0 = brute_force_answers(&g, &q, EditThreshold(0), OracleConfig::default()).unwrap();
        let t1 = brute_force_answers(&g, &q, EditThreshold(1), OracleConfig::default()).unwrap();
        assert!(t0.is_subset_of(&t1));
    }

    #[test]
    fn input_order_does_not_change_answers() {
        let fwd = "a\tl\tb\nb\tm\tc\nc\tn\td\n";
        let rev = "c\tn\td\nb\tm\tc\na\tl\tb\n";
        let g1 = parse_triples(fwd).unwrap();
        let g2 = parse_triples(rev).unwrap();
        let q1 = parse_query("x\tl\ty\ny\tm\tz\n", &g1).unwrap();
        let q2 = parse_query("x\tl\ty\ny\tm\tz\n", &g2).unwrap();
        let a1 = brute_force_answers(&g1, &q1, EditThreshold(1), OracleConfig::default()).unwrap();
        let a2 = brute_force_answers(&g2, &q2, EditThreshold(1), OracleConfig::default()).unwrap();
        assert_eq!(a1.len(), a2.len());
        let d1: alloc::vec::Vec<u32> = a1.iter_sorted().iter().map(|a| a.distance).collect();
        let d2: alloc::vec::Vec<u32> = a2.iter_sorted().iter().map(|a| a.distance).collect();
        assert_eq!(d1, d2);
    }

    #[test]
    fn exhaustive_probability_two_thirds_case() {
        let p = exhaustive_label_probability(2, &[1.0 / 3.0, 1.0 / 3.0], 3).unwrap();
        assert!((p - 2.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn exhaustive_probability_edge_cases() {
        assert_eq!(exhaustive_label_probability(3, &[], 2).unwrap(), 1.0);
        let p = exhaustive_label_probability(4, &[0.0], 2).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn enumeration_guard_trips() {
        assert!(matches!(
            exhaustive_label_probability(30, &[0.5], 4),
            Err(Error::CapExceeded { .. })
        ));
    }
}
