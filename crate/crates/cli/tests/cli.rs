use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use vecopt_cli::export::{euler_characteristic, parse_off};

fn vecopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vecopt")).args(args).output().expect("spawn vecopt")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vecopt-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn solve_into(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["solve", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    vecopt(&args)
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn exact_run_exits_zero() {
    let dir = scratch("exact");
    let out = solve_into(&dir, &["--problem", "ex8.1-q2", "--epsilon", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("|X|=3"));
    assert_eq!(report(&dir)["solution_set"].as_array().unwrap().len(), 3);
    for f in ["report.json", "outer.txt", "inner.txt"] {
        assert!(dir.join(f).is_file(), "{f} missing");
    }
    assert!(!dir.join("certificate.json").exists());
}

#[test]
fn usage_errors() {
    assert_eq!(vecopt(&["solve", "--problem", "ex8.1-q2", "--epsilon", "-1"]).status.code(), Some(64));
    assert_eq!(vecopt(&["solve", "--problem", "ex8.1-q2", "--epsilon", "0.1", "--norm", "3"]).status.code(), Some(64));
    assert_eq!(vecopt(&["solve", "--problem", "no-such-problem", "--epsilon", "0.1"]).status.code(), Some(64));
    assert_eq!(vecopt(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(vecopt(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_input_file() {
    let out = vecopt(&["solve", "--problem", "missing.json", "--epsilon", "0.1"]);
    assert_eq!(out.status.code(), Some(66));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));
}

#[test]
fn certify_writes_certificate() {
    let dir = scratch("certify");
    let out = solve_into(&dir, &["--problem", "ex8.1-q2", "--epsilon", "0.05", "--certify", "--samples", "300"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let cert: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["pass"], serde_json::Value::Bool(true));
    assert!(cert["violations"].as_array().unwrap().is_empty());
}

#[test]
fn reports_are_deterministic() {
    let args = ["--problem", "ex8.1-q3", "--epsilon", "0.05", "--norm", "inf", "--algorithm", "2"];
    let (a, b) = (scratch("det-a"), scratch("det-b"));
    assert_eq!(solve_into(&a, &args).status.code(), Some(0));
    assert_eq!(solve_into(&b, &args).status.code(), Some(0));
    let (mut ra, mut rb) = (report(&a), report(&b));
    ra.as_object_mut().unwrap().remove("timings");
    rb.as_object_mut().unwrap().remove("timings");
    assert_eq!(ra, rb);
}

#[test]
fn bench_csv_columns() {
    let dir = scratch("bench");
    let csv = dir.join("t4.csv");
    let out = vecopt(&["bench", "--suite", "table4", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(
        header,
        ["problem", "epsilon", "p", "algorithm", "cardinality", "opt", "en", "t_opt", "t_en", "t_total", "certified_bound", "status"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 16);
    for r in &rows {
        assert_eq!(&r[2], "2");
        assert_eq!(&r[11], "certified");
        let eps: f64 = r[1].parse().unwrap();
        let bound: f64 = r[10].parse().unwrap();
        assert!(bound <= eps + 1e-9, "{r:?}");
        assert!(r[4].parse::<usize>().unwrap() > 0);
    }
    assert_eq!(vecopt(&["bench", "--suite", ""]).status.code(), Some(64));
}

#[test]
fn svg_export_of_two_outer_vertices() {
    let dir = scratch("svg");
    assert_eq!(solve_into(&dir, &["--problem", "ex8.1-q2", "--epsilon", "0.3"]).status.code(), Some(0));
    let svg_path = dir.join("plot.svg");
    let report_path = dir.join("report.json");
    let out = vecopt(&["export", "--report", report_path.to_str().unwrap(), "--format", "svg", "--out", svg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(svg_path).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert_eq!(svg.matches(r#"class="outer-vertex""#).count(), 2);
    assert_eq!(svg.matches(r#"<polygon class="outer""#).count(), 1);
    assert_eq!(svg.matches(r#"<polygon class="inner""#).count(), 1);
    let inner = report(&dir)["inner"]["vertices"].as_array().unwrap().len();
    assert_eq!(svg.matches(r#"class="inner-generator""#).count(), inner);
}

#[test]
fn off_export_is_a_closed_mesh() {
    for alg in ["1", "2"] {
        let dir = scratch(&format!("off{alg}"));
        let out = solve_into(&dir, &["--problem", "ex8.1-q3", "--epsilon", "0.05", "--algorithm", alg]);
        assert_eq!(out.status.code(), Some(0));
        let report_path = dir.join("report.json");
        let out = vecopt(&["export", "--report", report_path.to_str().unwrap(), "--format", "off"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let (nv, faces) = parse_off(&String::from_utf8_lossy(&out.stdout)).expect("parsable OFF");
        assert_eq!(euler_characteristic(nv, &faces), Some(2));
        assert!(faces.iter().all(|f| f.len() >= 3 && f.iter().all(|&i| i < nv)));
        // Every directed edge appears once: consistent orientation.
        let mut edges: Vec<(usize, usize)> =
            faces.iter().flat_map(|f| (0..f.len()).map(move |i| (f[i], f[(i + 1) % f.len()]))).collect();
        let n = edges.len();
        edges.sort_unstable();
        edges.dedup();
        assert_eq!(edges.len(), n);
    }
}

#[test]
fn wrong_dimension_for_export() {
    let dir = scratch("q4");
    assert_eq!(solve_into(&dir, &["--problem", "ex8.1-q4", "--epsilon", "0.5"]).status.code(), Some(0));
    let report_path = dir.join("report.json");
    for format in ["svg", "off"] {
        let out = vecopt(&["export", "--report", report_path.to_str().unwrap(), "--format", format]);
        assert_eq!(out.status.code(), Some(1));
        assert!(String::from_utf8_lossy(&out.stderr).contains("q = 4"));
    }
}
