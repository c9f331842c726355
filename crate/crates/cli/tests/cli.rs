use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_c5census"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("c5census-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const C5: &str = "5 5\n0 1\n0 4\n1 2\n2 3\n3 4\n";

fn strip_times(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("wall_time_s");
            map.values_mut().for_each(strip_times);
        }
        Value::Array(xs) => xs.iter_mut().for_each(strip_times),
        _ => {}
    }
}

#[test]
fn census_reports_counts_as_strings() {
    let o = run(&["census", "--n", "5", "--m", "5", "--class", "c5free", "--mode", "exact"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["count_str"], "240");
    assert_eq!(v["result"]["total_str"], "252");
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "census");
    assert_eq!(v["params"]["n"], 5);
    for key in ["tool_version", "seed", "threads", "wall_time_s"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn census_density_flag_rounds_ties_to_even() {
    // C(5,2) * 0.25 = 2.5 -> 2
    let o = run(&["census", "--n", "5", "--c", "0.25", "--class", "all"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["m"], 2);
    assert_eq!(v["result"]["count_str"], "45");
}

#[test]
fn census_payload_is_deterministic_across_threads() {
    let a = run(&["census", "--n", "7", "--m", "10", "--mode", "mc", "--samples", "20000", "--seed", "5", "--threads", "1"]);
    let b = run(&["census", "--n", "7", "--m", "10", "--mode", "mc", "--samples", "20000", "--seed", "5", "--threads", "3"]);
    let mut va: Value = serde_json::from_str(&stdout(&a)).unwrap();
    let mut vb: Value = serde_json::from_str(&stdout(&b)).unwrap();
    strip_times(&mut va);
    strip_times(&mut vb);
    assert_eq!(va["result"], vb["result"]);
    assert_eq!(vb["threads"], 3);
}

#[test]
fn recognize_c5() {
    let path = scratch("c5.txt", C5);
    let o = run(&["recognize", "--class", "c5free", "--in", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("contains induced C5"));
    let o = run(&["recognize", "--class", "cluster", "--in", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = run_with_stdin(&["recognize", "--class", "c5free"], "4 3\n0 1\n1 2\n2 3\n");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["census", "--n", "5", "--m", "5", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["census", "--n", "10", "--m", "20"]).status.code(), Some(3));
    assert_eq!(run(&["hom", "--in", "/nonexistent/graph.txt"]).status.code(), Some(4));
    let bad = scratch("bad.txt", "3 2\n0 1\n");
    assert_eq!(run(&["packing", "--in", bad.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn version_prints_tool_and_schema() {
    let o = run(&["--version"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains(env!("CARGO_PKG_VERSION")) && s.contains("schema 1"), "{s}");
}

#[test]
fn generated_graphs_round_trip_through_consumers() {
    for (kind, m) in [("bipartite", "20"), ("kpartite", "60"), ("high", "100"), ("gnm", "40")] {
        let o = run(&["generate", "--kind", kind, "--n", "16", "--m", m, "--seed", "9", "--count", "3"]);
        assert!(o.status.success(), "{kind}");
        let text = stdout(&o);
        assert_eq!(text.split("\n\n").count(), 3);
        let again = run(&["sample", "--kind", kind, "--n", "16", "--m", m, "--seed", "9", "--count", "3", "--threads", "2"]);
        assert_eq!(stdout(&again), text, "{kind} is reproducible");
        if kind != "gnm" {
            let r = run_with_stdin(&["recognize", "--class", "gensplit"], &text);
            assert_eq!(r.status.code(), Some(0), "{kind}");
        }
        for cmd in ["hom", "packing"] {
            assert!(run_with_stdin(&[cmd], &text).status.success(), "{cmd} reads {kind} output");
        }
    }
}

#[test]
fn packing_json_is_a_certificate() {
    let g = stdout(&run(&["generate", "--kind", "gnp", "--n", "30", "--p", "0.5", "--seed", "1"]));
    let o = run_with_stdin(&["packing", "--json"], &g);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["target"], 5);
    assert!(v["result"]["outcome"].is_string());
}

#[test]
fn hom_of_c5_is_two() {
    let o = run_with_stdin(&["hom", "--json"], C5);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["hom"], 2);
}

#[test]
fn curve_emits_entropy_columns() {
    let o = run(&["curve", "--c", "0.5"]);
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("c,h,r,h_minus_r,subgraph_r3"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row[1], 0.5);
    assert_eq!(row[2], 1.0 / 18432.0);
    assert_eq!(run(&["curve"]).stdout.iter().filter(|&&b| b == b'\n').count(), 100);
}

#[test]
fn census_curve_rows() {
    let o = run(&["curve", "--n", "5,6,7", "--c", "0.5", "--class", "c5free"]);
    let s = stdout(&o);
    let rows: Vec<Vec<String>> = s.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][4], "240");
    for r in &rows {
        assert!(r[7].parse::<f64>().unwrap() > 0.5);
    }
}

#[test]
fn homdist_csv() {
    let path = scratch("homdist.csv", "");
    let o = run(&["homdist", "--n", "5", "--m", "5", "--samples", "300", "--seed", "2", "--csv", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("hom,overall,conditioned\n"));
    let total: u64 = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 300);
}

#[test]
fn typecheck_k44() {
    let edges: Vec<String> = (0..4).flat_map(|u| (4..8).map(move |v| format!("{u} {v}"))).collect();
    let graph = scratch("k44.txt", &format!("8 16\n{}\n", edges.join("\n")));
    let part = scratch("k44.part", "\n0 1 2 3\n4 5 6 7\n");
    let o = run(&["typecheck", "--graph", graph.to_str().unwrap(), "--partition", part.to_str().unwrap(), "--d", "0.1", "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let t = &v["result"]["type"];
    assert_eq!(t["k"], 2);
    assert_eq!(t["edges"][0]["col"], "1");
}

#[test]
fn dangerous_pair_exact() {
    let o = run(&["dangerous-pair", "--kind1", "p3", "--kind2", "p3", "--p", "0.5", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"][0]["q_exact"], "13/128");
    assert_eq!(run(&["dangerous-pair", "--p", "1.5"]).status.code(), Some(2));
}

#[test]
fn config_file_fills_missing_flags() {
    let cfg = scratch("run.cfg", "# census\nn = 5\nm = 4\nclass = all\n");
    let o = run(&["census", "--config", cfg.to_str().unwrap(), "--m", "5"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["m"], 5);
    assert_eq!(v["result"]["count_str"], "252");
}
