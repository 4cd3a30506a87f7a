//! Selectivity-based analytic cost prediction for the two search
//! algorithms, plus the chooser that compares them.
//!
//! The candidate estimate asks: what is the probability that a random
//! data node's neighbourhood carries every label the query node needs at
//! every depth? Per depth `m` the node is assumed to have `avg_degree^m`
//! independently labeled edges, and the coverage probability of a label
//! set is computed by the subtraction recurrence
//! `P(cover {l1..lk}) = P(cover {l2..lk}) - P(avoid l1, cover {l2..lk})`
//! with `P(avoid N) = (1 - sum of avoided selectivities)^D`.
//!
//! Verification cost follows the expected branching of the backtracking
//! search: a label `l` matches `avg_degree * Sel(l)` edges of a node on
//! average, a mismatch consumes one unit of budget and can use any of
//! the `avg_degree * (1 - Sel(l))` remaining edges. The upper-bound
//! variants replace averages by worst cases: per-node maximum label
//! frequency `N(l)` for matching steps, and minimum-selectivity
//! collapses of correlated query labels for the candidate estimate.

use alloc::vec::Vec;

use crate::graph::{LabelId, LabelStats, NodeId};
use crate::matcher::edge_order;
use crate::neighbourhood::query_signature;
use crate::query::{combinations, generate_wildcard_queries, select_seed, EditThreshold, QueryGraph};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Exed,
    Wced,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Exed => "exed",
            Algorithm::Wced => "wced",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostModelKind {
    Exact,
    UbAdj,
    UbPath,
}

impl CostModelKind {
    pub fn name(self) -> &'static str {
        match self {
            CostModelKind::Exact => "exact",
            CostModelKind::UbAdj => "ub-adj",
            CostModelKind::UbPath => "ub-path",
        }
    }
}

/// Predicted work of one algorithm on one query.
#[derive(Debug, Clone)]
pub struct CostEstimate {
    pub algorithm: Algorithm,
    pub model: CostModelKind,
    /// Expected number of seed candidates entering verification.
    pub candidates: f64,
    /// Expected verification operations per candidate.
    pub verify_cost: f64,
    pub total: f64,
}

/// Evaluation of the closed-form comparison condition for `t = 1`:
/// per-candidate verification in the edit-budget search is cheaper than
/// the summed wildcard searches when the smallest query-label
/// selectivity exceeds `avg_degree^(-1/|E_q|)`.
#[derive(Debug, Clone, Copy)]
pub struct Lemma2Condition {
    pub sel_l1: f64,
    pub threshold_value: f64,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct Recommendation {
    pub algorithm: Algorithm,
    pub exed: CostEstimate,
    pub wced: CostEstimate,
    pub lemma2: Option<Lemma2Condition>,
}

fn powf(base: f64, exp: f64) -> f64 {
    libm::pow(base, exp)
}

/// Probability that `draws` independently labeled edges include every
/// label of `sels` at least once. `draws` may be fractional (it is
/// usually a power of the average degree). Errors when the selectivities
/// cannot be marginals of one distribution.
pub fn prob_all_labels(draws: f64, sels: &[f64]) -> Result<f64> {
    let sum: f64 = sels.iter().sum();
    if sum > 1.0 + 1e-9 {
        return Err(Error::InvalidMarginals { sum });
    }
    debug_assert!(sels.iter().all(|&s| s > 0.0 && s <= 1.0));
    debug_assert!(draws >= 0.0);
    let p = cover_rec(draws, sels, 0, 0.0);
    Ok(p.clamp(0.0, 1.0))
}

/// `cover_rec(D, sels, i, f)` = P(avoid mass `f`, cover `sels[i..]`).
fn cover_rec(draws: f64, sels: &[f64], i: usize, forbidden: f64) -> f64 {
    if i == sels.len() {
        return powf((1.0 - forbidden).max(0.0), draws);
    }
    cover_rec(draws, sels, i + 1, forbidden) - cover_rec(draws, sels, i + 1, forbidden + sels[i])
}

/// Per-level label selectivity sets of a query node's neighbourhood,
/// in depth order (`levels[0]` is depth 1). Wildcards are excluded.
pub fn exact_levels(stats: &LabelStats, q: &QueryGraph, node: NodeId, d: u8) -> Vec<Vec<f64>> {
    let sig = query_signature(q, node, d);
    (1..=d)
        .map(|k| {
            sig.level_labels(k)
                .map(|l| stats.selectivity(l).unwrap_or(1.0))
                .collect()
        })
        .collect()
}

/// Probability that a data node hosts the query node: the product over
/// depths of the per-level coverage probabilities, with `avg_degree^m`
/// draws at depth `m`.
pub fn candidate_probability(levels: &[Vec<f64>], avg_degree: f64) -> Result<f64> {
    let mut p = 1.0;
    for (i, sels) in levels.iter().enumerate() {
        let draws = powf(avg_degree, (i + 1) as f64);
        p *= prob_all_labels(draws, sels)?;
    }
    Ok(p)
}

/// Estimated node selectivity under the exact model; drives seed choice.
pub fn node_selectivity(stats: &LabelStats, q: &QueryGraph, node: NodeId, d: u8) -> Result<f64> {
    candidate_probability(&exact_levels(stats, q, node, d), stats.avg_degree())
}

/// Breadth-first tree of the query from `seed`, capped at depth `d`.
/// `arrivals[m]` lists `(parent, node, label)` for every edge from a
/// depth-`m` node to a first-visited depth-`m+1` node; `children` keeps
/// only the first arrival per node (the tree edges).
struct QueryTree {
    arrivals: Vec<Vec<(NodeId, NodeId, LabelId)>>,
    children: Vec<Vec<(NodeId, LabelId)>>,
    root: NodeId,
}

fn bfs_tree(q: &QueryGraph, seed: NodeId, d: u8) -> QueryTree {
    let adj = q.adjacency();
    let mut depth_of: Vec<Option<u8>> = alloc::vec![None; q.node_count()];
    depth_of[seed.index()] = Some(0);
    let mut frontier = alloc::vec![seed];
    let mut arrivals = Vec::new();
    let mut children: Vec<Vec<(NodeId, LabelId)>> = alloc::vec![Vec::new(); q.node_count()];
    let mut has_parent = alloc::vec![false; q.node_count()];
    for depth in 1..=d {
        let mut level = Vec::new();
        let mut next = Vec::new();
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
                level.push((u, other, label));
                if !has_parent[other.index()] {
                    has_parent[other.index()] = true;
                    children[u.index()].push((other, label));
                }
            }
        }
        arrivals.push(level);
        if next.is_empty() {
            break;
        }
        next.sort();
        frontier = next;
    }
    QueryTree {
        arrivals,
        children,
        root: seed,
    }
}

/// Sibling-collapse levels: arrival edges under each parent reduce to
/// the one with the smallest selectivity.
fn ub_adj_levels(stats: &LabelStats, q: &QueryGraph, seed: NodeId, d: u8) -> Vec<Vec<f64>> {
    let tree = bfs_tree(q, seed, d);
    tree.arrivals
        .iter()
        .map(|level| {
            let mut best_per_parent: alloc::collections::BTreeMap<NodeId, LabelId> =
                alloc::collections::BTreeMap::new();
            for &(parent, _, label) in level {
                if label.is_wildcard() {
                    continue;
                }
                let sel = stats.selectivity(label).unwrap_or(1.0);
                best_per_parent
                    .entry(parent)
                    .and_modify(|cur| {
                        let cur_sel = stats.selectivity(*cur).unwrap_or(1.0);
                        if (sel, label) < (cur_sel, *cur) {
                            *cur = label;
                        }
                    })
                    .or_insert(label);
            }
            let labels: alloc::collections::BTreeSet<LabelId> =
                best_per_parent.into_values().collect();
            labels
                .into_iter()
                .map(|l| stats.selectivity(l).unwrap_or(1.0))
                .collect()
        })
        .collect()
}

/// Path-collapse label set: each root-to-leaf path of the query tree
/// reduces to its minimum-selectivity label.
fn ub_path_sels(stats: &LabelStats, q: &QueryGraph, seed: NodeId, d: u8) -> Vec<f64> {
    let tree = bfs_tree(q, seed, d);
    let mut labels: alloc::collections::BTreeSet<LabelId> = alloc::collections::BTreeSet::new();
    let mut stack: Vec<(NodeId, Option<LabelId>)> = alloc::vec![(tree.root, None)];
    while let Some((node, best)) = stack.pop() {
        let kids = &tree.children[node.index()];
        if kids.is_empty() {
            if let Some(l) = best {
                labels.insert(l);
            }
            continue;
        }
        for &(child, label) in kids {
            let next_best = if label.is_wildcard() {
                best
            } else {
                match best {
                    None => Some(label),
                    Some(cur) => {
                        let (s_new, s_cur) = (
                            stats.selectivity(label).unwrap_or(1.0),
                            stats.selectivity(cur).unwrap_or(1.0),
                        );
                        if (s_new, label) < (s_cur, cur) {
                            Some(label)
                        } else {
                            Some(cur)
                        }
                    }
                }
            };
            stack.push((child, next_best));
        }
    }
    labels
        .into_iter()
        .map(|l| stats.selectivity(l).unwrap_or(1.0))
        .collect()
}

/// Candidate probability of `node` in `q` under the chosen model.
pub fn candidate_probability_for(
    stats: &LabelStats,
    q: &QueryGraph,
    node: NodeId,
    d: u8,
    model: CostModelKind,
) -> Result<f64> {
    let d_hat = stats.avg_degree();
    match model {
        CostModelKind::Exact => candidate_probability(&exact_levels(stats, q, node, d), d_hat),
        CostModelKind::UbAdj => candidate_probability(&ub_adj_levels(stats, q, node, d), d_hat),
        CostModelKind::UbPath => {
            let sels = ub_path_sels(stats, q, node, d);
            prob_all_labels(powf(d_hat, d as f64), &sels)
        }
    }
}

/// Everything the cost formulas need about one `(query, seed)` pair.
#[derive(Debug, Clone)]
pub struct QueryProfile {
    /// Exact per-level selectivity sets of the seed neighbourhood.
    pub levels: Vec<Vec<f64>>,
    /// Verification order (query edge indices).
    pub order: Vec<usize>,
    /// Selectivity of each ordered edge (wildcard = 1).
    pub order_sels: Vec<f64>,
    /// Worst-case matching-edge count `N(l)` of each ordered edge.
    pub order_max_freq: Vec<f64>,
    pub avg_degree: f64,
    pub node_count: f64,
}

pub fn query_profile(stats: &LabelStats, q: &QueryGraph, seed: NodeId, d: u8) -> QueryProfile {
    let order = edge_order(q, seed, stats);
    let order_sels = order
        .iter()
        .map(|&i| stats.selectivity(q.edges()[i].label).unwrap_or(1.0))
        .collect();
    let order_max_freq = order
        .iter()
        .map(|&i| stats.max_under_node(q.edges()[i].label) as f64)
        .collect();
    QueryProfile {
        levels: exact_levels(stats, q, seed, d),
        order,
        order_sels,
        order_max_freq,
        avg_degree: stats.avg_degree(),
        node_count: stats.node_count() as f64,
    }
}

fn step_factors(
    stats: &LabelStats,
    q: &QueryGraph,
    order: &[usize],
    model: CostModelKind,
) -> (Vec<f64>, Vec<f64>) {
    let d_hat = stats.avg_degree();
    let mut matching = Vec::with_capacity(order.len());
    let mut mismatching = Vec::with_capacity(order.len());
    for &i in order {
        let label = q.edges()[i].label;
        let sel = stats.selectivity(label).unwrap_or(1.0);
        let m = match model {
            CostModelKind::Exact => d_hat * sel,
            CostModelKind::UbAdj | CostModelKind::UbPath => stats.max_under_node(label) as f64,
        };
        matching.push(m);
        mismatching.push(d_hat * (1.0 - sel));
    }
    (matching, mismatching)
}

fn s_t_general(matching: &[f64], mismatching: &[f64], m: usize, t: u32) -> f64 {
    let t = t as usize;
    if t > m {
        return 0.0;
    }
    if t == 0 {
        return matching[..m].iter().product();
    }
    let mut sum = 0.0;
    for subset in combinations(m, t) {
        let mut term = 1.0;
        let mut s = 0;
        for i in 0..m {
            if s < subset.len() && subset[s] == i {
                term *= mismatching[i];
                s += 1;
            } else {
                term *= matching[i];
            }
        }
        sum += term;
    }
    sum
}

/// Expected number of partial embeddings across the first `m` ordered
/// edges that have spent exactly `t` substitutions.
pub fn s_t(sels: &[f64], m: usize, t: u32, d_hat: f64) -> f64 {
    let matching: Vec<f64> = sels.iter().map(|&s| d_hat * s).collect();
    let mismatching: Vec<f64> = sels.iter().map(|&s| d_hat * (1.0 - s)).collect();
    s_t_general(&matching, &mismatching, m, t)
}

/// The partial-embedding counts stay on the average-case factors; only
/// the per-step extension factor (`step[i]`, the expected or worst-case
/// number of edges matching the next label) is model-dependent.
fn exed_verify_general(
    matching: &[f64],
    mismatching: &[f64],
    step: &[f64],
    t: u32,
    d_hat: f64,
) -> f64 {
    let mut total = 0.0;
    for (i, &step_i) in step.iter().enumerate() {
        total += s_t_general(matching, mismatching, i, t) * step_i;
        for j in 0..t {
            total += s_t_general(matching, mismatching, i, j) * d_hat;
        }
    }
    total
}

/// Expected verification operations per candidate for the edit-budget
/// search, over edges in verification order.
pub fn exed_verify_cost(sels: &[f64], t: u32, d_hat: f64) -> f64 {
    let matching: Vec<f64> = sels.iter().map(|&s| d_hat * s).collect();
    let mismatching: Vec<f64> = sels.iter().map(|&s| d_hat * (1.0 - s)).collect();
    exed_verify_general(&matching, &mismatching, &matching, t, d_hat)
}

fn wced_verify_general(matching: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut prefix = 1.0;
    for &m in matching {
        prefix *= m;
        total += prefix;
    }
    total
}

/// Expected verification operations per candidate for one exact search:
/// the sum of expected partial-embedding counts after each edge.
pub fn wced_verify_cost(sels: &[f64], d_hat: f64) -> f64 {
    let matching: Vec<f64> = sels.iter().map(|&s| d_hat * s).collect();
    wced_verify_general(&matching)
}

/// Expected seed candidates for the edit-budget search: the wildcard
/// variants' candidate counts summed, minus the overlap each pair of
/// variants shares (every variant's set contains the exact-match set).
/// Under the bound models the positive terms use the bound probability
/// while the subtracted overlap keeps the exact one; subtracting an
/// inflated overlap would push the result below the exact estimate.
pub fn exed_candidates(
    stats: &LabelStats,
    q: &QueryGraph,
    t: EditThreshold,
    d: u8,
    model: CostModelKind,
) -> Result<f64> {
    let seed = select_seed(q, stats, d);
    let variants = generate_wildcard_queries(q, t)?;
    let v = stats.node_count() as f64;
    let mut sum = 0.0;
    for w in &variants {
        sum += v * candidate_probability_for(stats, w, seed, d, model)?;
    }
    let overlap = (variants.len().saturating_sub(1)) as f64
        * v
        * candidate_probability_for(stats, q, seed, d, CostModelKind::Exact)?;
    Ok((sum - overlap).max(0.0))
}

/// Full cost estimate for the edit-budget search.
pub fn exed_cost(
    stats: &LabelStats,
    q: &QueryGraph,
    t: EditThreshold,
    d: u8,
    model: CostModelKind,
) -> Result<CostEstimate> {
    q.validate(t)?;
    let seed = select_seed(q, stats, d);
    let candidates = exed_candidates(stats, q, t, d, model)?;
    let order = edge_order(q, seed, stats);
    let (exact_matching, mismatching) = step_factors(stats, q, &order, CostModelKind::Exact);
    let (step, _) = step_factors(stats, q, &order, model);
    let verify_cost =
        exed_verify_general(&exact_matching, &mismatching, &step, t.0, stats.avg_degree());
    Ok(CostEstimate {
        algorithm: Algorithm::Exed,
        model,
        candidates,
        verify_cost,
        total: candidates * verify_cost,
    })
}

/// Full cost estimate for the wildcard expansion: costs of the exact
/// searches over all wildcard variants, summed.
pub fn wced_cost(
    stats: &LabelStats,
    q: &QueryGraph,
    t: EditThreshold,
    d: u8,
    model: CostModelKind,
) -> Result<CostEstimate> {
    q.validate(t)?;
    let variants = generate_wildcard_queries(q, t)?;
    let v = stats.node_count() as f64;
    let mut total = 0.0;
    let mut candidates = 0.0;
    let mut verify_sum = 0.0;
    for w in &variants {
        let seed = select_seed(w, stats, d);
        let cand = v * candidate_probability_for(stats, w, seed, d, model)?;
        let order = edge_order(w, seed, stats);
        let (matching, _) = step_factors(stats, w, &order, model);
        let verify = wced_verify_general(&matching);
        total += cand * verify;
        candidates += cand;
        verify_sum += verify;
    }
    let verify_cost = if candidates > 0.0 {
        total / candidates
    } else {
        verify_sum
    };
    Ok(CostEstimate {
        algorithm: Algorithm::Wced,
        model,
        candidates,
        verify_cost,
        total,
    })
}

pub fn estimate(
    stats: &LabelStats,
    q: &QueryGraph,
    t: EditThreshold,
    d: u8,
    algorithm: Algorithm,
    model: CostModelKind,
) -> Result<CostEstimate> {
    match algorithm {
        Algorithm::Exed => exed_cost(stats, q, t, d, model),
        Algorithm::Wced => wced_cost(stats, q, t, d, model),
    }
}

/// Upper-bound estimate; `variant` must be one of the two bound models.
pub fn upper_bound_cost(
    stats: &LabelStats,
    q: &QueryGraph,
    t: EditThreshold,
    d: u8,
    algorithm: Algorithm,
    variant: CostModelKind,
) -> Result<CostEstimate> {
    debug_assert!(!matches!(variant, CostModelKind::Exact));
    estimate(stats, q, t, d, algorithm, variant)
}

/// Evaluates the `t = 1` comparison condition on the smallest real-label
/// selectivity of the query. `None` when the query has no real labels.
pub fn lemma2_condition(
    stats: &LabelStats,
    q: &QueryGraph,
) -> Option<Lemma2Condition> {
    let sel_l1 = q
        .edges()
        .iter()
        .filter(|e| !e.label.is_wildcard())
        .filter_map(|e| stats.selectivity(e.label).ok())
        .min_by(f64::total_cmp)?;
    let d_hat = stats.avg_degree();
    if d_hat <= 0.0 {
        return None;
    }
    let threshold_value = powf(d_hat, -1.0 / q.edge_count() as f64);
    Some(Lemma2Condition {
        sel_l1,
        threshold_value,
        holds: sel_l1 > threshold_value,
    })
}

/// Picks the algorithm with the lower predicted total; ties go to the
/// edit-budget search (no expansion overhead). The closed-form `t = 1`
/// condition is reported as advisory only.
pub fn choose_algorithm(
    stats: &LabelStats,
    q: &QueryGraph,
    t: EditThreshold,
    d: u8,
    model: CostModelKind,
) -> Result<Recommendation> {
    let exed = exed_cost(stats, q, t, d, model)?;
    let wced = wced_cost(stats, q, t, d, model)?;
    let algorithm = if exed.total <= wced.total {
        Algorithm::Exed
    } else {
        Algorithm::Wced
    };
    let lemma2 = if t.0 == 1 { lemma2_condition(stats, q) } else { None };
    Ok(Recommendation {
        algorithm,
        exed,
        wced,
        lemma2,
    })
}

/// Closed-form upper bound on the cost difference between the two
/// algorithms' per-candidate verification at `t = 1`, as a function of
/// the smallest selectivity `x` and the query edge count `n`:
/// `F_n(x) = D(1 - nx) - (n-1) D^n x^n + sum_{i=2}^{n-1} D^i (i - (n+i-1) x^i)`.
/// Negative values mean the edit-budget search verifies cheaper.
pub fn lemma2_upper_bound(x: f64, n: u32, d_hat: f64) -> f64 {
    debug_assert!(n >= 2);
    let nf = n as f64;
    let mut value = d_hat * (1.0 - nf * x) - (nf - 1.0) * powf(d_hat, nf) * powf(x, nf);
    for i in 2..n {
        let fi = i as f64;
        value += powf(d_hat, fi) * (fi - (nf + fi - 1.0) * powf(x, fi));
    }
    value
}
