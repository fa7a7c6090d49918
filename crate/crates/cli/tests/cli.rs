use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const C4: &str = "# four-cycle\nv 0\nv 1\nv 2\nv 3\ne 0 0 1\ne 1 1 2\ne 2 2 3\ne 3 3 0\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_edgecover"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_str(stdout(out).trim()).unwrap()
}

fn assert_fails_quietly(out: &Output) {
    assert!(!out.status.success());
    assert!(out.stdout.is_empty(), "printed on failure: {}", stdout(out));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
}

#[test]
fn exact_count_of_a_four_cycle() {
    let dir = TempDir::new().unwrap();
    let c4 = write(&dir, "c4.graph", C4);
    let out = run(&["exact", c4.to_str().unwrap()]);
    assert_eq!(stdout(&out).trim(), r#"{"count":"7"}"#);
}

#[test]
fn exact_respects_the_cap() {
    let dir = TempDir::new().unwrap();
    let c4 = write(&dir, "c4.graph", C4);
    assert_fails_quietly(&run(&["exact", c4.to_str().unwrap(), "--cap", "3"]));
}

#[test]
fn count_schema() {
    let dir = TempDir::new().unwrap();
    let single = write(&dir, "single.graph", "v 0\nv 1\ne 0 0 1\n");
    let v = json(&run(&[
        "count",
        single.to_str().unwrap(),
        "--epsilon",
        "0.5",
    ]));
    assert_eq!(v["count"], 1.0);
    assert_eq!(v["log_count"], 0.0);
    assert_eq!(v["epsilon"], 0.5);
    assert_eq!(v["depth"], 4);
    assert_eq!(v["m"], 1);
    assert_eq!(v["n"], 2);
    assert_eq!(v["isolated"], false);

    let c4 = write(&dir, "c4.graph", C4);
    let v = json(&run(&["count", c4.to_str().unwrap(), "--epsilon", "0.1"]));
    let count = v["count"].as_f64().unwrap();
    assert!((count / 7.0 - 1.0).abs() <= 0.1);
}

#[test]
fn isolated_vertex_counts_zero() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "iso.graph", "v 0\nv 1\nv 2\ne 0 0 1\n");
    let v = json(&run(&["count", g.to_str().unwrap(), "--epsilon", "0.2"]));
    assert_eq!(v["count"], 0.0);
    assert!(v["log_count"].is_null());
    assert_eq!(v["isolated"], true);
}

#[test]
fn marginal_of_a_free_edge() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "free.graph", "f 0\n");
    let out = run(&[
        "marginal",
        g.to_str().unwrap(),
        "--edge",
        "0",
        "--depth",
        "4",
    ]);
    assert_eq!(stdout(&out).trim(), r#"{"estimate":0.5,"depth":4}"#);
}

#[test]
fn marginal_with_exact_and_trace() {
    let dir = TempDir::new().unwrap();
    let c4 = write(&dir, "c4.graph", C4);
    let out = run(&[
        "marginal",
        c4.to_str().unwrap(),
        "--edge",
        "0",
        "--depth",
        "2",
        "--exact",
        "--trace",
    ]);
    let v = json(&out);
    assert_eq!(v["exact_num"], "2");
    assert_eq!(v["exact_den"], "7");
    assert_eq!(v["depth"], 2);
    let trace = String::from_utf8(out.stderr).unwrap();
    assert_eq!(
        trace.lines().next(),
        Some("depth=2 edge=0 kind=N branch=normal")
    );
    assert!(trace.lines().all(|l| l.starts_with("depth=")));
}

#[test]
fn marginal_uses_file_labels() {
    let dir = TempDir::new().unwrap();
    // Five covers; only {40, 41} leaves out edge 12.
    let g = write(&dir, "labels.graph", "v 3\nv 7\ne 12 3 7\nd 40 7\nd 41 3\n");
    let v = json(&run(&[
        "marginal",
        g.to_str().unwrap(),
        "--edge",
        "12",
        "--exact",
    ]));
    assert_eq!(v["exact_num"], "1");
    assert_eq!(v["exact_den"], "5");
    assert_fails_quietly(&run(&["marginal", g.to_str().unwrap(), "--edge", "0"]));
}

#[test]
fn cnf_example() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "ex.cnf", "c example\np cnf 3 2\n1 2 0\n2 3 0\n");
    let v = json(&run(&[
        "from-cnf",
        cnf.to_str().unwrap(),
        "--epsilon",
        "0.2",
        "--exact",
    ]));
    assert_eq!(v["vars"], 3);
    assert_eq!(v["clauses"], 2);
    assert_eq!(v["exact"], "5");
    let count = v["count"].as_f64().unwrap();
    assert!((count / 5.0 - 1.0).abs() <= 0.2);
}

#[test]
fn cnf_errors() {
    let dir = TempDir::new().unwrap();
    let neg = write(&dir, "neg.cnf", "p cnf 2 1\n1 -2 0\n");
    assert_fails_quietly(&run(&[
        "from-cnf",
        neg.to_str().unwrap(),
        "--epsilon",
        "0.2",
    ]));
    let thrice = write(&dir, "thrice.cnf", "p cnf 1 3\n1 0\n1 0\n1 0\n");
    assert_fails_quietly(&run(&[
        "from-cnf",
        thrice.to_str().unwrap(),
        "--epsilon",
        "0.2",
    ]));
}

#[test]
fn bad_inputs_fail_with_one_line() {
    let dir = TempDir::new().unwrap();
    let c4 = write(&dir, "c4.graph", C4);
    let c4 = c4.to_str().unwrap();
    assert_fails_quietly(&run(&["count", c4, "--epsilon", "1.5"]));
    assert_fails_quietly(&run(&["count", c4, "--epsilon", "0"]));
    let loop_ = write(&dir, "loop.graph", "v 0\ne 0 0 0\n");
    assert_fails_quietly(&run(&["exact", loop_.to_str().unwrap()]));
    let junk = write(&dir, "junk.graph", "v 0\nx 1\n");
    assert_fails_quietly(&run(&["count", junk.to_str().unwrap(), "--epsilon", "0.2"]));
    assert_fails_quietly(&run(&["exact", "/nonexistent/graph"]));
    let out = bin()
        .args(["exact", c4])
        .env("EC_THREADS", "lots")
        .output()
        .unwrap();
    assert_fails_quietly(&out);
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = TempDir::new().unwrap();
    let mut text = String::new();
    for v in 0..9 {
        text.push_str(&format!("v {v}\n"));
    }
    for (i, (a, b)) in [
        (0, 1),
        (1, 2),
        (2, 3),
        (3, 4),
        (4, 5),
        (5, 6),
        (6, 7),
        (7, 8),
        (8, 0),
        (0, 4),
        (2, 6),
    ]
    .iter()
    .enumerate()
    {
        text.push_str(&format!("e {i} {a} {b}\n"));
    }
    let g = write(&dir, "g.graph", &text);
    let outputs: Vec<String> = ["1", "3", "0"]
        .iter()
        .map(|t| {
            let out = bin()
                .args(["count", g.to_str().unwrap(), "--epsilon", "0.1"])
                .env("EC_THREADS", t)
                .output()
                .unwrap();
            assert!(out.status.success());
            stdout(&out)
        })
        .collect();
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn verify_small_run_is_reproducible() {
    let args = [
        "verify",
        "--max-edges",
        "6",
        "--max-vertices",
        "4",
        "--epsilons",
        "0.5,0.2",
        "--seed",
        "7",
        "--random-graphs",
        "20",
        "--trials",
        "500",
        "--identities",
        "10",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
    assert!(text.contains("fptas eps=0.2"));
}

#[test]
fn bench_csv() {
    let out = run(&[
        "bench",
        "--family",
        "cycle",
        "--sizes",
        "8,16",
        "--epsilon",
        "0.2",
    ]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,m,L,nodes_expanded,wall_ms,estimate"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][..3], &["8", "8", "8"]);
    // C8 has 47 edge covers.
    let est: f64 = rows[0][5].parse().unwrap();
    assert!((est / 47.0 - 1.0).abs() <= 0.2);

    for family in ["star", "random"] {
        let out = run(&[
            "bench",
            "--family",
            family,
            "--sizes",
            "6,12",
            "--epsilon",
            "0.3",
            "--seed",
            "2",
        ]);
        assert!(out.status.success());
        assert_eq!(stdout(&out).lines().count(), 3);
    }
    assert!(!run(&[
        "bench",
        "--family",
        "cycle",
        "--sizes",
        "2",
        "--epsilon",
        "0.2"
    ])
    .status
    .success());
}
