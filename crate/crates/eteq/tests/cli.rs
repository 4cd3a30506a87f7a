//! End-to-end checks of the `eteq` binary: output equivalence between
//! the engine and the oracle, index persistence, reproducibility, and
//! exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_eteq")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary launches")
}

fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

struct Workspace {
    dir: PathBuf,
}

impl Workspace {
    fn new(name: &str) -> Workspace {
        let dir = std::env::temp_dir().join(format!("eteq-cli-{name}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).unwrap();
        Workspace { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).display().to_string()
    }
}

fn generate_small(ws: &Workspace) -> String {
    let graph = ws.arg("graph.tsv");
    run_ok(&[
        "generate",
        "--nodes",
        "120",
        "--avg-degree",
        "4",
        "--labels",
        "6",
        "--dist",
        "zipf:1.0",
        "--seed",
        "13",
        "--out",
        &graph,
    ]);
    graph
}

fn sample(ws: &Workspace, graph: &str, edges: &str, seed: &str, name: &str) -> String {
    let query = ws.arg(name);
    run_ok(&[
        "sample-query",
        graph,
        "--edges",
        edges,
        "--seed",
        seed,
        "--out",
        &query,
    ]);
    query
}

#[test]
fn engine_and_oracle_emit_identical_answer_files() {
    let ws = Workspace::new("oracle-diff");
    let graph = generate_small(&ws);
    let query = sample(&ws, &graph, "3", "5", "q.tsv");
    for algo in ["exed", "wced"] {
        for filters in ["none", "neighbour", "path", "both"] {
            let engine_out = run_ok(&[
                "query", &graph, &query, "--threshold", "1", "--algo", algo, "--filters", filters,
            ]);
            let oracle_out = run_ok(&["oracle", &graph, &query, "--threshold", "1"]);
            assert_eq!(
                engine_out.stdout, oracle_out.stdout,
                "{algo}/{filters} output differs from the oracle"
            );
        }
    }
}

#[test]
fn persisted_index_reproduces_fresh_results() {
    let ws = Workspace::new("persist");
    let graph = generate_small(&ws);
    let query = sample(&ws, &graph, "3", "8", "q.tsv");
    let index_dir = ws.arg("idx");
    run_ok(&["build-index", &graph, "--depth", "3", "--out", &index_dir]);
    assert!(Path::new(&index_dir).join("graph.bin").exists());
    assert!(Path::new(&index_dir).join("index.bin").exists());
    let fresh = run_ok(&["query", &graph, &query, "--threshold", "1"]);
    let loaded = run_ok(&["query", &index_dir, &query, "--threshold", "1"]);
    assert_eq!(fresh.stdout, loaded.stdout);
}

#[test]
fn auto_mode_prints_recommendation_and_runs_it() {
    let ws = Workspace::new("auto");
    let graph = generate_small(&ws);
    let query = sample(&ws, &graph, "2", "3", "q.tsv");
    let auto = run_ok(&["query", &graph, &query, "--threshold", "1", "--algo", "auto"]);
    let stderr = String::from_utf8_lossy(&auto.stderr);
    assert!(
        stderr.contains("\"recommendation\""),
        "missing recommendation on stderr: {stderr}"
    );
    let exed = run_ok(&["query", &graph, &query, "--threshold", "1", "--algo", "exed"]);
    assert_eq!(auto.stdout, exed.stdout, "auto must run an exact algorithm");
}

#[test]
fn wildcard_queries_match_any_label() {
    let ws = Workspace::new("wildcard");
    let graph = ws.arg("g.tsv");
    std::fs::write(
        ws.path("g.tsv"),
        "a\tp\tb\nb\tq\tc\nb\tr\td\n",
    )
    .unwrap();
    std::fs::write(ws.path("q.tsv"), "x\tp\ty\ny\t*\tz\n").unwrap();
    let query = ws.arg("q.tsv");
    let out = run_ok(&["query", &graph, &query, "--threshold", "0"]);
    let lines = String::from_utf8_lossy(&out.stdout);
    assert_eq!(lines.lines().count(), 2, "wildcard should match q and r");
}

#[test]
fn estimate_reports_both_algorithms() {
    let ws = Workspace::new("estimate");
    let graph = generate_small(&ws);
    let query = sample(&ws, &graph, "3", "4", "q.tsv");
    let out = run_ok(&["estimate", &graph, &query, "--threshold", "1", "--model", "ub-adj"]);
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    let exed: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    let wced: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
    let rec: serde_json::Value = serde_json::from_str(lines[2]).unwrap();
    assert_eq!(exed["algorithm"], "exed");
    assert_eq!(exed["model"], "ub-adj");
    assert_eq!(wced["algorithm"], "wced");
    assert!(exed["lemma2_condition"]["threshold_value"].is_f64());
    assert!(rec["recommendation"].is_string());
}

#[test]
fn bench_reports_are_reproducible_and_consistent() {
    let ws = Workspace::new("bench");
    let graph = generate_small(&ws);
    let csv_a = ws.arg("a.csv");
    let csv_b = ws.arg("b.csv");
    let args = |out: &str| {
        vec![
            "bench".to_string(),
            graph.clone(),
            "--queries".into(),
            "6".into(),
            "--edges".into(),
            "2-4".into(),
            "--thresholds".into(),
            "0-1".into(),
            "--seed".into(),
            "21".into(),
            "--out".into(),
            out.to_string(),
        ]
    };
    let to_refs = |v: &[String]| -> Vec<String> { v.to_vec() };
    let a_args = to_refs(&args(&csv_a));
    let b_args = to_refs(&args(&csv_b));
    let out_a = Command::new(bin()).args(&a_args).output().unwrap();
    assert!(out_a.status.success());
    let out_b = Command::new(bin()).args(&b_args).output().unwrap();
    assert!(out_b.status.success());
    let a = std::fs::read_to_string(&csv_a).unwrap();
    let b = std::fs::read_to_string(&csv_b).unwrap();
    assert_eq!(a, b, "bench must be bit-reproducible under a fixed seed");

    // per (query, threshold): both algorithms report identical answer
    // counts and hashes, and the candidate columns nest
    let mut by_key: std::collections::BTreeMap<(String, String), Vec<Vec<String>>> =
        Default::default();
    for line in a.lines().skip(1) {
        let cols: Vec<String> = line.split(',').map(|s| s.to_string()).collect();
        assert!(cols.len() >= 17);
        let before: usize = cols[5].parse().unwrap();
        let neigh: usize = cols[6].parse().unwrap();
        let path: usize = cols[7].parse().unwrap();
        let both: usize = cols[8].parse().unwrap();
        assert!(both <= neigh.min(path) && neigh.max(path) <= before);
        by_key
            .entry((cols[0].clone(), cols[2].clone()))
            .or_default()
            .push(cols);
    }
    for rows in by_key.values() {
        let answers: std::collections::BTreeSet<&String> =
            rows.iter().map(|r| &r[10]).collect();
        let hashes: std::collections::BTreeSet<&String> =
            rows.iter().map(|r| &r[11]).collect();
        assert_eq!(answers.len(), 1, "algorithms disagree on answer count");
        assert_eq!(hashes.len(), 1, "algorithms disagree on answer hashes");
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    let ws = Workspace::new("exits");
    let graph = generate_small(&ws);
    let query = sample(&ws, &graph, "2", "3", "q.tsv");

    // 2: usage error (unknown flag), from the argument parser
    let usage = run(&["query", "--definitely-not-a-flag"]);
    assert_eq!(usage.status.code(), Some(2));

    // 3: missing input file
    let missing = run(&["query", &graph, "nope.tsv", "--threshold", "0"]);
    assert_eq!(missing.status.code(), Some(3));

    // 3: invalid threshold regime (t >= |E_q|)
    let invalid = run(&["query", &graph, &query, "--threshold", "2"]);
    assert_eq!(invalid.status.code(), Some(3));

    // 4: oracle cap exceeded
    let capped = run(&["oracle", &graph, &query, "--threshold", "1", "--max-nodes", "5"]);
    assert_eq!(capped.status.code(), Some(4));

    // 0: success
    let ok = run(&["query", &graph, &query, "--threshold", "1"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn thread_cap_env_still_gives_identical_output() {
    let ws = Workspace::new("threads");
    let graph = generate_small(&ws);
    let csv_a = ws.arg("a.csv");
    let csv_b = ws.arg("b.csv");
    for (threads, out) in [("1", &csv_a), ("4", &csv_b)] {
        let status = Command::new(bin())
            .env("ETEQ_THREADS", threads)
            .args([
                "bench", &graph, "--queries", "4", "--edges", "2-3", "--seed", "9", "--out",
                out.as_str(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(
        std::fs::read_to_string(&csv_a).unwrap(),
        std::fs::read_to_string(&csv_b).unwrap(),
        "parallelism must not change results"
    );
}
