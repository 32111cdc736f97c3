use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn monodimer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monodimer")).args(args).output().expect("binary runs")
}

fn write_edges(dir: &Path, name: &str, edges: &[(usize, usize)]) -> String {
    let mut text = String::from("u,v\n");
    for (u, v) in edges {
        text.push_str(&format!("{u},{v}\n"));
    }
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

/// `(quantity, object_id, x, value)` rows, config line skipped.
fn exact_rows(stdout: &[u8]) -> Vec<(String, String, f64, f64)> {
    let text = std::str::from_utf8(stdout).unwrap();
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    csv::Reader::from_reader(body.as_bytes())
        .deserialize()
        .map(|r| r.unwrap())
        .collect()
}

fn value(rows: &[(String, String, f64, f64)], quantity: &str, object: &str) -> f64 {
    rows.iter().find(|r| r.0 == quantity && r.1 == object).unwrap().3
}

#[test]
fn exact_matches_small_graph_values() {
    let dir = TempDir::new().unwrap();
    let cases: [(&str, Vec<(usize, usize)>, f64); 3] = [
        ("edge.csv", vec![(0, 1)], 2.0),
        ("triangle.csv", vec![(0, 1), (1, 2), (0, 2)], 4.0),
        ("k4.csv", vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], 10.0),
    ];
    for (name, edges, z) in cases {
        let path = write_edges(dir.path(), name, &edges);
        let out = monodimer(&["exact", "--graph", &path, "--x", "1"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let rows = exact_rows(&out.stdout);
        assert!((value(&rows, "Z", "") - z).abs() < 1e-12, "{name}");
    }
    let path = write_edges(dir.path(), "triangle.csv", &[(0, 1), (1, 2), (0, 2)]);
    let rows = exact_rows(&monodimer(&["exact", "--graph", &path, "--x", "1"]).stdout);
    assert!((value(&rows, "R", "0") - 0.5).abs() < 1e-12);
    assert!((value(&rows, "E", "0-1") - 0.25).abs() < 1e-12);
    assert!((value(&rows, "density", "") - 0.5).abs() < 1e-12);
}

#[test]
fn config_is_embedded_in_both_formats() {
    let dir = TempDir::new().unwrap();
    let path = write_edges(dir.path(), "edge.csv", &[(0, 1)]);
    let out = monodimer(&["exact", "--graph", &path, "--x", "0.5,2", "--seed", "17"]);
    let first = String::from_utf8(out.stdout).unwrap().lines().next().unwrap().to_string();
    let config: serde_json::Value = serde_json::from_str(first.strip_prefix("# config: ").unwrap()).unwrap();
    assert_eq!(config["seed"], 17);
    assert_eq!(config["command"], "exact");
    assert_eq!(config["x_grid"], serde_json::json!([0.5, 2.0]));

    let json_path = dir.path().join("out.json");
    let out = monodimer(&[
        "exact",
        "--graph",
        &path,
        "--x",
        "1",
        "--format",
        "json",
        "--out",
        json_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(doc["config"]["seed"], 0);
    assert!(doc["rows"].as_array().unwrap().len() > 3);
}

#[test]
fn seeded_runs_reproduce_regardless_of_threads() {
    let args = ["fixpoint", "--x", "1.5", "--pop-size", "4000", "--depth", "12", "--seed", "3"];
    let a = monodimer(&[&args[..], &["--threads", "1"]].concat());
    let b = monodimer(&[&args[..], &["--threads", "4"]].concat());
    assert!(a.status.success());
    let rows = |o: &Output| String::from_utf8_lossy(&o.stdout).lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(rows(&a), rows(&b));
}

#[test]
fn curve_emits_every_grid_point() {
    let out = monodimer(&["curve", "--x-grid", "0.5:1.5:0.5", "--r-list", "3,4", "--pop-size", "500"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines = String::from_utf8(out.stdout).unwrap();
    assert_eq!(lines.lines().count(), 2 + 3 * 2);
}

#[test]
fn validate_negative_control_exits_one() {
    let out = monodimer(&["validate", "--suite", "appendix", "--inject-sign-flip"]);
    assert_eq!(out.status.code(), Some(1));
    let out = monodimer(&["validate", "--suite", "appendix"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn usage_and_input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let path = write_edges(dir.path(), "edge.csv", &[(0, 1)]);
    assert_eq!(monodimer(&["exact", "--graph", &path, "--x", "-1"]).status.code(), Some(2));
    assert_eq!(monodimer(&["exact", "--graph", "/nonexistent/graph.csv"]).status.code(), Some(2));
    assert_eq!(monodimer(&["fixpoint", "--offspring", "bogus:1"]).status.code(), Some(2));
    assert_eq!(monodimer(&["validate", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(monodimer(&["no-such-command"]).status.code(), Some(2));
    let big: Vec<(usize, usize)> = (0..30).map(|i| (i, (i + 1) % 30)).collect();
    let cycle = write_edges(dir.path(), "cycle.csv", &big);
    assert_eq!(monodimer(&["exact", "--graph", &cycle]).status.code(), Some(2));
}
