//! The experiment harness: engine wrapper, parallel index building,
//! benchmark loop, and the pruning-power and correlation experiments.

use std::time::Instant;

use eteq_core::cost::{self, Algorithm, CostModelKind};
use eteq_core::generate::sample_query;
use eteq_core::matcher::{
    exed, seed_candidates, wced, FilterConfig, FilterIndexes, SearchOutcome,
};
use eteq_core::neighbourhood::InvertedNeighbourhoodIndex;
use eteq_core::path::PathFilterSet;
use eteq_core::query::{select_seed, EditThreshold, QueryGraph};
use eteq_core::{DataGraph, NodeId};

use crate::report::{fnv1a_hex, render_answers, RunRecord};
use crate::Result;

/// Worker count: `ETEQ_THREADS` if set, otherwise the machine's
/// available parallelism.
pub fn thread_count() -> usize {
    if let Ok(v) = std::env::var("ETEQ_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Index-preserving parallel map over `0..n` with scoped threads.
pub fn parallel_map<R, F>(n: usize, threads: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync,
{
    let threads = threads.max(1).min(n.max(1));
    if threads == 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let mut slots: Vec<Option<R>> = (0..n).map(|_| None).collect();
    let chunk = n.div_ceil(threads);
    std::thread::scope(|scope| {
        for (worker, piece) in slots.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (offset, slot) in piece.iter_mut().enumerate() {
                    *slot = Some(f(worker * chunk + offset));
                }
            });
        }
    });
    slots.into_iter().map(|s| s.unwrap()).collect()
}

/// Builds the filter indexes with per-node work spread over `threads`.
/// The result is identical to the single-threaded build.
pub fn build_indexes_parallel(
    g: &DataGraph,
    depth: u8,
    bloom_fpr: f64,
    threads: usize,
) -> FilterIndexes {
    let signatures = parallel_map(g.node_count(), threads, |n| {
        eteq_core::neighbourhood::data_signature(g, NodeId(n as u32), depth)
    });
    let inverted = InvertedNeighbourhoodIndex::from_signatures(&signatures, depth);
    let filters = parallel_map(g.node_count(), threads, |n| {
        eteq_core::path::build_path_filter(g, NodeId(n as u32), depth, bloom_fpr)
    });
    let path_filters = PathFilterSet::from_parts(depth, bloom_fpr, filters);
    FilterIndexes::from_parts(depth, signatures, inverted, path_filters)
}

/// A data graph with its indexes, ready to answer queries.
pub struct Engine {
    pub graph: DataGraph,
    pub indexes: FilterIndexes,
}

impl Engine {
    pub fn new(graph: DataGraph, depth: u8, bloom_fpr: f64) -> Engine {
        let indexes = build_indexes_parallel(&graph, depth, bloom_fpr, thread_count());
        Engine { graph, indexes }
    }

    pub fn from_parts(graph: DataGraph, indexes: FilterIndexes) -> Engine {
        Engine { graph, indexes }
    }

    pub fn run(
        &self,
        q: &QueryGraph,
        t: EditThreshold,
        algorithm: Algorithm,
        filters: FilterConfig,
    ) -> Result<SearchOutcome> {
        Ok(match algorithm {
            Algorithm::Exed => exed(&self.graph, q, t, filters, &self.indexes)?,
            Algorithm::Wced => wced(&self.graph, q, t, filters, &self.indexes)?,
        })
    }

    /// Like [`Engine::run`] with the seed node forced, for experiments.
    pub fn run_seeded(
        &self,
        q: &QueryGraph,
        t: EditThreshold,
        algorithm: Algorithm,
        filters: FilterConfig,
        seed: NodeId,
    ) -> Result<SearchOutcome> {
        Ok(match algorithm {
            Algorithm::Exed => {
                eteq_core::matcher::exed_seeded(&self.graph, q, t, filters, &self.indexes, seed)?
            }
            Algorithm::Wced => {
                eteq_core::matcher::wced_seeded(&self.graph, q, t, filters, &self.indexes, seed)?
            }
        })
    }

    /// Seed-candidate counts of one query under each filter, from the
    /// single-search (edit-budget) viewpoint.
    pub fn candidate_counts(&self, q: &QueryGraph, t: EditThreshold) -> CandidateCounts {
        let seed = select_seed(q, self.graph.stats(), self.indexes.depth());
        let neighbour =
            seed_candidates(&self.graph, q, t, seed, FilterConfig::Neighbour, &self.indexes);
        let path = seed_candidates(&self.graph, q, t, seed, FilterConfig::Path, &self.indexes);
        let both = eteq_core::path::combine_filters(&neighbour, &path);
        CandidateCounts {
            before: self.graph.node_count(),
            neighbour: neighbour.len(),
            path: path.len(),
            both: both.len(),
        }
    }

    pub fn estimate_total(
        &self,
        q: &QueryGraph,
        t: EditThreshold,
        algorithm: Algorithm,
        model: CostModelKind,
    ) -> f64 {
        cost::estimate(self.graph.stats(), q, t, self.indexes.depth(), algorithm, model)
            .map(|e| e.total)
            .unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CandidateCounts {
    pub before: usize,
    pub neighbour: usize,
    pub path: usize,
    pub both: usize,
}

#[derive(Debug, Clone)]
pub struct BenchParams {
    pub queries: usize,
    pub edge_min: usize,
    pub edge_max: usize,
    pub threshold_min: u32,
    pub threshold_max: u32,
    pub algorithms: Vec<Algorithm>,
    pub filters: Vec<FilterConfig>,
    /// Cost models evaluated per row; unselected columns hold NaN.
    pub models: Vec<CostModelKind>,
    pub seed: u64,
    pub threads: usize,
}

impl Default for BenchParams {
    fn default() -> Self {
        BenchParams {
            queries: 20,
            edge_min: 2,
            edge_max: 6,
            threshold_min: 1,
            threshold_max: 1,
            algorithms: vec![Algorithm::Exed, Algorithm::Wced],
            filters: vec![FilterConfig::Both],
            models: vec![
                CostModelKind::Exact,
                CostModelKind::UbAdj,
                CostModelKind::UbPath,
            ],
            seed: 42,
            threads: thread_count(),
        }
    }
}

/// Samples `queries` queries (edge counts cycling through the range) and
/// runs every `(threshold, algorithm, filter)` combination on each.
/// Rows come back grouped by query in sampling order.
pub fn bench(engine: &Engine, params: &BenchParams) -> Result<Vec<RunRecord>> {
    let sampled = sample_bench_queries(
        &engine.graph,
        params.queries,
        params.edge_min,
        params.edge_max,
        params.seed,
    )?;
    let per_query = parallel_map(sampled.len(), params.threads, |qi| {
        let q = &sampled[qi];
        let mut rows = Vec::new();
        for t in params.threshold_min..=params.threshold_max {
            if t as usize >= q.edge_count() {
                continue;
            }
            let t = EditThreshold(t);
            let counts = engine.candidate_counts(q, t);
            let pick = |algo: Algorithm, model: CostModelKind| -> f64 {
                if params.models.contains(&model) {
                    engine.estimate_total(q, t, algo, model)
                } else {
                    f64::NAN
                }
            };
            let estimates: Vec<(Algorithm, [f64; 3])> = params
                .algorithms
                .iter()
                .map(|&algo| {
                    (
                        algo,
                        [
                            pick(algo, CostModelKind::Exact),
                            pick(algo, CostModelKind::UbAdj),
                            pick(algo, CostModelKind::UbPath),
                        ],
                    )
                })
                .collect();
            for &(algo, est) in &estimates {
                for &filters in &params.filters {
                    let start = Instant::now();
                    let outcome = engine
                        .run(q, t, algo, filters)
                        .expect("bench queries are pre-validated");
                    let wall_ms = start.elapsed().as_secs_f64() * 1000.0;
                    let rendered = render_answers(&engine.graph, q, &outcome.answers);
                    rows.push(RunRecord {
                        query_id: qi,
                        edges: q.edge_count(),
                        threshold: t.0,
                        algorithm: algo.name(),
                        filters: filters.name(),
                        candidates_before: counts.before,
                        candidates_after_neighbour: counts.neighbour,
                        candidates_after_path: counts.path,
                        candidates_after_both: counts.both,
                        examined: outcome.candidates,
                        answers: outcome.answers.len(),
                        answers_hash: fnv1a_hex(&rendered),
                        distance_histogram: outcome.answers.distance_histogram(),
                        operations: outcome.operations,
                        est_exact: est[0],
                        est_ub_adj: est[1],
                        est_ub_path: est[2],
                        wall_ms,
                    });
                }
            }
        }
        rows
    });
    Ok(per_query.into_iter().flatten().collect())
}

/// Deterministic query sample for benchmarks: edge counts cycle through
/// `[edge_min, edge_max]`, one sampling seed per query index.
pub fn sample_bench_queries(
    g: &DataGraph,
    queries: usize,
    edge_min: usize,
    edge_max: usize,
    seed: u64,
) -> Result<Vec<QueryGraph>> {
    let span = edge_max.saturating_sub(edge_min) + 1;
    (0..queries)
        .map(|i| {
            let edges = edge_min + i % span;
            Ok(sample_query(g, edges, seed.wrapping_add(i as u64))?)
        })
        .collect()
}

/// Mean pruned fraction per filter across queries at one threshold.
#[derive(Debug, Clone, Copy)]
pub struct PruningPower {
    pub neighbour: f64,
    pub path: f64,
    pub both: f64,
}

pub fn pruning_power_experiment(
    engine: &Engine,
    queries: &[QueryGraph],
    t: EditThreshold,
    threads: usize,
) -> PruningPower {
    let v = engine.graph.node_count() as f64;
    let counts = parallel_map(queries.len(), threads, |i| {
        engine.candidate_counts(&queries[i], t)
    });
    let mut neighbour = 0.0;
    let mut path = 0.0;
    let mut both = 0.0;
    for c in &counts {
        neighbour += 1.0 - c.neighbour as f64 / v;
        path += 1.0 - c.path as f64 / v;
        both += 1.0 - c.both as f64 / v;
    }
    let n = counts.len().max(1) as f64;
    PruningPower {
        neighbour: neighbour / n,
        path: path / n,
        both: both / n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use eteq_core::generate::{generate_synthetic, LabelDistribution};

    fn small_engine() -> Engine {
        let g = generate_synthetic(60, 3.0, 6, LabelDistribution::Uniform, 11).unwrap();
        Engine::new(g, 2, 0.01)
    }

    #[test]
    fn parallel_build_matches_serial() {
        let g = generate_synthetic(40, 3.0, 5, LabelDistribution::Uniform, 5).unwrap();
        let serial = FilterIndexes::build(&g, 2, 0.01);
        let parallel = build_indexes_parallel(&g, 2, 0.01, 4);
        assert_eq!(serial.signatures(), parallel.signatures());
        assert_eq!(serial.inverted(), parallel.inverted());
        assert_eq!(serial.path_filters(), parallel.path_filters());
    }

    #[test]
    fn parallel_map_preserves_order() {
        let out = parallel_map(100, 7, |i| i * 3);
        assert_eq!(out, (0..100).map(|i| i * 3).collect::<Vec<_>>());
    }

    #[test]
    fn candidate_counts_nest() {
        let engine = small_engine();
        for seed in 0..10 {
            let q = sample_query(&engine.graph, 3, seed).unwrap();
            let c = engine.candidate_counts(&q, EditThreshold(1));
            assert!(c.both <= c.neighbour.min(c.path));
            assert!(c.neighbour.max(c.path) <= c.before);
        }
    }

    #[test]
    fn bench_rows_are_reproducible() {
        let engine = small_engine();
        let params = BenchParams {
            queries: 4,
            edge_min: 2,
            edge_max: 3,
            ..BenchParams::default()
        };
        let a = bench(&engine, &params).unwrap();
        let b = bench(&engine, &params).unwrap();
        let strip = |rows: &[RunRecord]| {
            rows.iter().map(|r| r.csv_row(false)).collect::<String>()
        };
        assert_eq!(strip(&a), strip(&b));
        assert!(!a.is_empty());
    }

    #[test]
    fn bench_algorithms_agree_on_answers() {
        let engine = small_engine();
        let params = BenchParams {
            queries: 4,
            edge_min: 2,
            edge_max: 3,
            ..BenchParams::default()
        };
        let rows = bench(&engine, &params).unwrap();
        for pair in rows.chunks(2) {
            if pair.len() == 2 && pair[0].query_id == pair[1].query_id {
                assert_eq!(pair[0].answers, pair[1].answers);
                assert_eq!(pair[0].answers_hash, pair[1].answers_hash);
            }
        }
    }

    #[test]
    fn full_filter_prunes_nothing() {
        let engine = small_engine();
        let q = sample_query(&engine.graph, 2, 3).unwrap();
        let power = pruning_power_experiment(&engine, &[q], EditThreshold(1), 1);
        assert!(power.both >= power.neighbour.max(power.path) - 1e-12);
    }
}
