//! `eteq` — exact error-tolerant exemplar queries on edge-labeled graphs.
//!
//! Exit codes: 0 success, 2 usage error, 3 bad input, 4 cap or limit hit.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use eteq_core::cost::{self, Algorithm, CostModelKind};
use eteq_core::generate::{generate_synthetic, sample_query, LabelDistribution};
use eteq_core::matcher::FilterConfig;
use eteq_core::oracle::{brute_force_answers, OracleConfig};
use eteq_core::query::EditThreshold;
use eteq_core::NodeId;
use eteq::harness::{bench, thread_count, BenchParams, Engine};
use eteq::report::{render_answers, render_csv, EstimateRecord, RunRecord};
use eteq::{io, Error};

#[derive(Parser)]
#[command(
    name = "eteq",
    version,
    about = "Exact error-tolerant exemplar queries on edge-labeled directed graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Exed,
    Wced,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum FilterArg {
    None,
    Neighbour,
    Path,
    Both,
}

impl From<FilterArg> for FilterConfig {
    fn from(f: FilterArg) -> FilterConfig {
        match f {
            FilterArg::None => FilterConfig::None,
            FilterArg::Neighbour => FilterConfig::Neighbour,
            FilterArg::Path => FilterConfig::Path,
            FilterArg::Both => FilterConfig::Both,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Exact,
    #[value(name = "ub-adj")]
    UbAdj,
    #[value(name = "ub-path")]
    UbPath,
}

impl From<ModelArg> for CostModelKind {
    fn from(m: ModelArg) -> CostModelKind {
        match m {
            ModelArg::Exact => CostModelKind::Exact,
            ModelArg::UbAdj => CostModelKind::UbAdj,
            ModelArg::UbPath => CostModelKind::UbPath,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the neighbourhood and path indexes and cache them on disk.
    BuildIndex {
        /// Graph file (tab-separated triples or binary cache).
        graph: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: u8,
        #[arg(long, default_value_t = 0.01)]
        bloom_fpr: f64,
        /// Output directory for graph.bin and index.bin.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a query; answers go to stdout as JSON lines.
    Query {
        /// Graph file or an index directory from build-index.
        graph: PathBuf,
        /// Query file (triples; `*` as predicate is the wildcard).
        query: PathBuf,
        #[arg(long, short = 't')]
        threshold: u32,
        #[arg(long, value_enum, default_value_t = AlgoArg::Exed)]
        algo: AlgoArg,
        #[arg(long, value_enum, default_value_t = FilterArg::Both)]
        filters: FilterArg,
        /// Write a JSON run report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Force the search seed onto this query node id.
        #[arg(long)]
        seed_node: Option<u32>,
        #[arg(long, default_value_t = 3)]
        depth: u8,
        #[arg(long, default_value_t = 0.01)]
        bloom_fpr: f64,
    },
    /// Print cost estimates for both algorithms plus a recommendation.
    Estimate {
        graph: PathBuf,
        query: PathBuf,
        #[arg(long, short = 't')]
        threshold: u32,
        #[arg(long, value_enum, default_value_t = ModelArg::Exact)]
        model: ModelArg,
        #[arg(long, default_value_t = 3)]
        depth: u8,
        #[arg(long, default_value_t = 0.01)]
        bloom_fpr: f64,
    },
    /// Generate a synthetic connected graph as a triple file.
    Generate {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        avg_degree: f64,
        #[arg(long)]
        labels: usize,
        /// `uniform` or `zipf:EXPONENT`.
        #[arg(long, default_value = "uniform")]
        dist: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample a connected subgraph of the data graph as a query file.
    SampleQuery {
        graph: PathBuf,
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a query workload and emit one CSV row per combination.
    Bench {
        graph: PathBuf,
        #[arg(long, default_value_t = 100)]
        queries: usize,
        /// Query sizes, e.g. `8` or `2-6`.
        #[arg(long, default_value = "2-6")]
        edges: String,
        /// Edit thresholds, e.g. `1` or `0-2`.
        #[arg(long, default_value = "1")]
        thresholds: String,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [AlgoArg::Exed, AlgoArg::Wced])]
        algos: Vec<AlgoArg>,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [FilterArg::Both])]
        filters: Vec<FilterArg>,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [ModelArg::Exact, ModelArg::UbAdj, ModelArg::UbPath])]
        models: Vec<ModelArg>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Append wall-clock milliseconds (breaks bit-reproducibility).
        #[arg(long)]
        timings: bool,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: u8,
        #[arg(long, default_value_t = 0.01)]
        bloom_fpr: f64,
    },
    /// Brute-force reference answers (small instances only).
    Oracle {
        graph: PathBuf,
        query: PathBuf,
        #[arg(long, short = 't')]
        threshold: u32,
        #[arg(long, default_value_t = 200)]
        max_nodes: usize,
        #[arg(long, default_value_t = 5)]
        max_query_edges: usize,
    },
}

/// Writes to stdout, treating a closed pipe as a clean stop.
fn emit(text: &str) -> eteq::Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
    }
}

fn load_engine(path: &Path, depth: u8, bloom_fpr: f64) -> eteq::Result<Engine> {
    if path.is_dir() {
        let (graph, indexes) = io::read_index_dir(path)?;
        Ok(Engine::from_parts(graph, indexes))
    } else {
        let graph = io::read_graph(path)?;
        Ok(Engine::new(graph, depth, bloom_fpr))
    }
}

fn parse_range(text: &str) -> eteq::Result<(u64, u64)> {
    let parse_one = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| Error::Format(format!("bad range component {s:?}")))
    };
    match text.split_once('-') {
        Some((lo, hi)) => Ok((parse_one(lo)?, parse_one(hi)?)),
        None => {
            let v = parse_one(text)?;
            Ok((v, v))
        }
    }
}

fn parse_dist(text: &str) -> eteq::Result<LabelDistribution> {
    if text == "uniform" {
        return Ok(LabelDistribution::Uniform);
    }
    if let Some(rest) = text.strip_prefix("zipf:") {
        let exponent = rest
            .parse::<f64>()
            .map_err(|_| Error::Format(format!("bad zipf exponent {rest:?}")))?;
        return Ok(LabelDistribution::Zipf { exponent });
    }
    Err(Error::Format(format!(
        "unknown distribution {text:?}; use `uniform` or `zipf:EXPONENT`"
    )))
}

fn run(cli: Cli) -> eteq::Result<()> {
    match cli.command {
        Command::BuildIndex {
            graph,
            depth,
            bloom_fpr,
            out,
        } => {
            let engine = load_engine(&graph, depth, bloom_fpr)?;
            io::write_index_dir(&out, &engine.graph, &engine.indexes)?;
            eprintln!(
                "indexed {} nodes / {} edges at depth {} into {}",
                engine.graph.node_count(),
                engine.graph.edge_count(),
                depth,
                out.display()
            );
        }
        Command::Query {
            graph,
            query,
            threshold,
            algo,
            filters,
            report,
            seed_node,
            depth,
            bloom_fpr,
        } => {
            let engine = load_engine(&graph, depth, bloom_fpr)?;
            let q = io::read_query(&query, &engine.graph)?;
            let t = EditThreshold(threshold);
            q.validate(t)?;
            let algorithm = match algo {
                AlgoArg::Exed => Algorithm::Exed,
                AlgoArg::Wced => Algorithm::Wced,
                AlgoArg::Auto => {
                    let rec = cost::choose_algorithm(
                        engine.graph.stats(),
                        &q,
                        t,
                        engine.indexes.depth(),
                        CostModelKind::Exact,
                    )?;
                    eprintln!(
                        "{}",
                        serde_json::json!({
                            "recommendation": rec.algorithm.name(),
                            "exed_total": rec.exed.total,
                            "wced_total": rec.wced.total,
                        })
                    );
                    rec.algorithm
                }
            };
            let filters: FilterConfig = filters.into();
            let start = std::time::Instant::now();
            let outcome = match seed_node {
                Some(n) => engine.run_seeded(&q, t, algorithm, filters, NodeId(n))?,
                None => engine.run(&q, t, algorithm, filters)?,
            };
            let wall_ms = start.elapsed().as_secs_f64() * 1000.0;
            let rendered = render_answers(&engine.graph, &q, &outcome.answers);
            emit(&rendered)?;
            if let Some(path) = report {
                let counts = engine.candidate_counts(&q, t);
                let record = RunRecord {
                    query_id: 0,
                    edges: q.edge_count(),
                    threshold: t.0,
                    algorithm: algorithm.name(),
                    filters: filters.name(),
                    candidates_before: counts.before,
                    candidates_after_neighbour: counts.neighbour,
                    candidates_after_path: counts.path,
                    candidates_after_both: counts.both,
                    examined: outcome.candidates,
                    answers: outcome.answers.len(),
                    answers_hash: eteq::report::fnv1a_hex(&rendered),
                    distance_histogram: outcome.answers.distance_histogram(),
                    operations: outcome.operations,
                    est_exact: engine.estimate_total(&q, t, algorithm, CostModelKind::Exact),
                    est_ub_adj: engine.estimate_total(&q, t, algorithm, CostModelKind::UbAdj),
                    est_ub_path: engine.estimate_total(&q, t, algorithm, CostModelKind::UbPath),
                    wall_ms,
                };
                let json = serde_json::to_string_pretty(&record)
                    .expect("run records always serialize");
                std::fs::write(&path, json).map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
            }
        }
        Command::Estimate {
            graph,
            query,
            threshold,
            model,
            depth,
            bloom_fpr,
        } => {
            let engine = load_engine(&graph, depth, bloom_fpr)?;
            let q = io::read_query(&query, &engine.graph)?;
            let t = EditThreshold(threshold);
            q.validate(t)?;
            let stats = engine.graph.stats();
            let d = engine.indexes.depth();
            let rec = cost::choose_algorithm(stats, &q, t, d, model.into())?;
            let lemma2 = rec.lemma2;
            for estimate in [&rec.exed, &rec.wced] {
                let record = EstimateRecord::new(estimate, lemma2);
                let line = serde_json::to_string(&record).expect("estimates always serialize");
                emit(&format!("{line}\n"))?;
            }
            emit(&format!(
                "{}\n",
                serde_json::json!({ "recommendation": rec.algorithm.name() })
            ))?;
        }
        Command::Generate {
            nodes,
            avg_degree,
            labels,
            dist,
            seed,
            out,
        } => {
            let dist = parse_dist(&dist)?;
            let g = generate_synthetic(nodes, avg_degree, labels, dist, seed)?;
            io::write_graph_tsv(&out, &g)?;
            eprintln!(
                "wrote {} nodes / {} edges to {}",
                g.node_count(),
                g.edge_count(),
                out.display()
            );
        }
        Command::SampleQuery {
            graph,
            edges,
            seed,
            out,
        } => {
            let g = io::read_graph(&graph)?;
            let q = sample_query(&g, edges, seed)?;
            io::write_query(&out, &q, &g)?;
        }
        Command::Bench {
            graph,
            queries,
            edges,
            thresholds,
            algos,
            filters,
            models,
            seed,
            timings,
            out,
            depth,
            bloom_fpr,
        } => {
            let engine = load_engine(&graph, depth, bloom_fpr)?;
            let (edge_min, edge_max) = parse_range(&edges)?;
            let (t_min, t_max) = parse_range(&thresholds)?;
            let algorithms = algos
                .iter()
                .map(|a| match a {
                    AlgoArg::Exed => Ok(Algorithm::Exed),
                    AlgoArg::Wced => Ok(Algorithm::Wced),
                    AlgoArg::Auto => Err(Error::Format(
                        "`auto` is not a benchmarkable algorithm".into(),
                    )),
                })
                .collect::<eteq::Result<Vec<_>>>()?;
            let params = BenchParams {
                queries,
                edge_min: edge_min as usize,
                edge_max: edge_max as usize,
                threshold_min: t_min as u32,
                threshold_max: t_max as u32,
                algorithms,
                filters: filters.into_iter().map(Into::into).collect(),
                models: models.into_iter().map(Into::into).collect(),
                seed,
                threads: thread_count(),
            };
            let rows = bench(&engine, &params)?;
            std::fs::write(&out, render_csv(&rows, timings)).map_err(|e| Error::Io {
                path: out.clone(),
                source: e,
            })?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
        }
        Command::Oracle {
            graph,
            query,
            threshold,
            max_nodes,
            max_query_edges,
        } => {
            let g = io::read_graph(&graph)?;
            let q = io::read_query(&query, &g)?;
            let cfg = OracleConfig {
                max_nodes,
                max_query_edges,
            };
            let answers = brute_force_answers(&g, &q, EditThreshold(threshold), cfg)?;
            emit(&render_answers(&g, &q, &answers))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
