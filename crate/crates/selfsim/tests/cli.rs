//! End-to-end tests of the command-line interface: file round trips and the
//! exit-code contract (0 ok, 2 parse, 3 verification, 4 refusal, 5 I/O).

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn selfsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selfsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(path: &Path, content: &str) {
    fs::write(path, content).unwrap();
}

#[test]
fn gen_is_byte_reproducible_and_labeled() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("a.txt");
    let p2 = dir.path().join("b.txt");
    for p in [&p1, &p2] {
        let out = selfsim(&["gen", "--n", "40", "--p", "0.3", "--seed", "9", "--out",
            p.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let a = fs::read(&p1).unwrap();
    let b = fs::read(&p2).unwrap();
    assert_eq!(a, b, "identical (n, p, seed) must give identical bytes");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with('#'), "header comment expected");
    assert!(text.contains("prng=chacha12-splitmix64"));
}

#[test]
fn gen_extremes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("k.txt");
    let out = selfsim(&["gen", "--n", "7", "--p", "1.0", "--out", p.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("m=21"), "K7 has 21 edges: {}", stdout(&out));
    let out = selfsim(&["gen", "--n", "7", "--p", "0.0", "--out", p.to_str().unwrap()]);
    assert!(stdout(&out).contains("m=0"));
}

#[test]
fn solve_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("k4.txt");
    let cert = dir.path().join("k4.json");
    write(&graph, "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    let out = selfsim(&["solve", "--input", graph.to_str().unwrap(), "--mode", "best",
        "--out-cert", cert.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("s=3"), "K4 has ISO = 3: {}", stdout(&out));
    let out = selfsim(&["verify", "--graph", graph.to_str().unwrap(), "--cert",
        cert.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn solve_single_edge() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("e.txt");
    let cert = dir.path().join("e.json");
    write(&graph, "2 1\n0 1\n");
    let out = selfsim(&["solve", "--input", graph.to_str().unwrap(), "--out-cert",
        cert.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("s=0"));
}

#[test]
fn solve_parse_error_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("bad.txt");
    let cert = dir.path().join("bad.json");
    write(&graph, "3 1\n0 5\n");
    let out = selfsim(&["solve", "--input", graph.to_str().unwrap(), "--out-cert",
        cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("endpoint out of range"), "{}", stderr(&out));
}

#[test]
fn solve_io_error_exit_code() {
    let out = selfsim(&["solve", "--input", "/nonexistent/graph.txt", "--out-cert",
        "/nonexistent/cert.json"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn verify_rejects_tampered_mapping() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("k4.txt");
    let cert = dir.path().join("k4.json");
    write(&graph, "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    let out = selfsim(&["solve", "--input", graph.to_str().unwrap(), "--out-cert",
        cert.to_str().unwrap()]);
    assert!(out.status.success());

    // Swap two mapping targets; the image of e1 no longer matches e2.
    let body = fs::read_to_string(&cert).unwrap();
    let mut js: serde_json::Value = serde_json::from_str(&body).unwrap();
    let mapping = js["mapping"].as_array_mut().unwrap();
    assert!(mapping.len() >= 2);
    let a = mapping[0][1].clone();
    let b = mapping[1][1].clone();
    mapping[0][1] = b;
    mapping[1][1] = a;
    write(&cert, &serde_json::to_string(&js).unwrap());

    let out = selfsim(&["verify", "--graph", graph.to_str().unwrap(), "--cert",
        cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("image mismatch"), "{}", stderr(&out));
}

#[test]
fn verify_rejects_shared_edge() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let cert = dir.path().join("c.json");
    write(&graph, "3 2\n0 1\n1 2\n");
    write(
        &cert,
        r#"{"n":3,"s":1,"e1":[[0,1]],"e2":[[0,1]],"mapping":[[0,0],[1,1]],"method":"tampered","seed":0,"runtime_ms":0}"#,
    );
    let out = selfsim(&["verify", "--graph", graph.to_str().unwrap(), "--cert",
        cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("not edge-disjoint"), "{}", stderr(&out));
}

#[test]
fn verify_rejects_absent_edge() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let cert = dir.path().join("c.json");
    write(&graph, "4 2\n0 1\n2 3\n");
    write(
        &cert,
        r#"{"n":4,"s":1,"e1":[[0,2]],"e2":[[2,3]],"mapping":[[0,2],[2,3]],"method":"tampered","seed":0,"runtime_ms":0}"#,
    );
    let out = selfsim(&["verify", "--graph", graph.to_str().unwrap(), "--cert",
        cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("edge not in graph"), "{}", stderr(&out));
}

#[test]
fn oracle_values_and_cap() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = dir.path().join("c5.txt");
    write(&c5, "5 5\n0 1\n1 2\n2 3\n3 4\n0 4\n");
    let out = selfsim(&["oracle", "--input", c5.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("iso_exact = 2"), "{}", stdout(&out));

    let k3 = dir.path().join("k3.txt");
    write(&k3, "3 3\n0 1\n0 2\n1 2\n");
    let out = selfsim(&["oracle", "--input", k3.to_str().unwrap()]);
    assert!(stdout(&out).contains("iso_exact = 1"));

    let big = dir.path().join("big.txt");
    write(&big, "20 1\n0 1\n");
    let out = selfsim(&["oracle", "--input", big.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4), "cap refusal expected");
}

#[test]
fn bench_smoke_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let csv1 = dir.path().join("a.csv");
    let csv2 = dir.path().join("b.csv");
    for csv in [&csv1, &csv2] {
        let out = selfsim(&["bench", "--n-list", "64,96", "--p-rule", "fixed", "--p", "0.2",
            "--seeds-per-point", "2", "--out", csv.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let a = fs::read_to_string(&csv1).unwrap();
    let b = fs::read_to_string(&csv2).unwrap();
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "n,p,seed,m,method,s_found,normalized,runtime_ms");
    assert_eq!(lines.len(), 5, "header + 4 rows");
    assert!(lines[1].starts_with("64,") && lines[3].starts_with("96,"), "rows in input order");
    // Rows identical up to the runtime column.
    let strip = |text: &str| -> Vec<String> {
        text.lines()
            .map(|l| l.rsplit_once(',').map_or(l.to_string(), |(head, _)| head.to_string()))
            .collect()
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn bench_sparse_rule_uses_star_forest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sparse.csv");
    let out = selfsim(&["bench", "--n-list", "512", "--p-rule", "c-over-n", "--c", "0.5",
        "--seeds-per-point", "3", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&csv).unwrap();
    let star_rows = text
        .lines()
        .skip(1)
        .filter(|l| l.split(',').nth(4) == Some("star-forest"))
        .count();
    assert!(star_rows >= 2, "sparse regime should mostly take the star-forest branch:\n{text}");
}

#[test]
fn bound_prints_logs() {
    let out = selfsim(&["bound", "--n", "4", "--p", "0.5", "--t", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("exact_log = 3.583519"), "{text}");
    assert!(text.contains("simplified_log = "), "{text}");
}

#[test]
fn bound_rejects_bad_t() {
    let out = selfsim(&["bound", "--n", "4", "--p", "0.5", "--t", "0"]);
    assert_eq!(out.status.code(), Some(2));
}
