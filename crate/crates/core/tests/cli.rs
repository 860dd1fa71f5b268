mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::data;
use serde_json::Value;

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pose-weights"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn d(relative: &str) -> String {
    data(relative).to_string_lossy().into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn weights_of(doc: &Value, key: &str) -> Vec<f64> {
    doc[key]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["weight"].as_f64().unwrap())
        .collect()
}

fn assert_failed_without_output(out: &Output, dir: &Path, needle: &str) {
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.trim_end().lines().count(), 1, "{stderr}");
    assert!(stderr.contains(needle), "{stderr}");
    assert_eq!(
        fs::read_dir(dir).unwrap().count(),
        0,
        "no file may be written on failure"
    );
}

#[test]
fn ingest_synthetic_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "ingest",
            "--skeleton",
            &d("skeletons/p3.json"),
            "--annotations",
            &d("annotations/p3_synthetic.json"),
            "--out",
            "stats.json",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(
        String::from_utf8_lossy(&out.stdout).contains("covered 2/2 connections from 5 instances")
    );
    let doc = json(&dir.path().join("stats.json"));
    assert_eq!(doc["instances"], 5);
    for e in doc["edges"].as_array().unwrap() {
        assert_eq!(e["count"], 5);
        assert!(e["mean_length"].as_f64().unwrap() > 20.0);
    }
    assert_eq!(doc["metadata"]["config"]["command"], "ingest");
}

#[test]
fn ingest_uncovered_edge_without_fallback_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "ingest",
            "--skeleton",
            &d("skeletons/p3.json"),
            "--annotations",
            &d("annotations/p3_partial.json"),
            "--out",
            "stats.json",
        ],
        dir.path(),
    );
    assert_failed_without_output(&out, dir.path(), "not covered");
}

#[test]
fn ingest_uncovered_edge_with_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "ingest",
        "--skeleton",
        &d("skeletons/p3.json"),
        "--annotations",
        &d("annotations/p3_partial.json"),
        "--fallback",
        "30",
        "--out",
        "stats.json",
    ];
    let out = run(&args, dir.path());
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("uncovered: b - c"));
    assert_eq!(json(&dir.path().join("stats.json"))["edges"][1]["count"], 0);

    // the stats file feeds the weights step, which applies the same fallback
    let w = run(
        &[
            "weights",
            "--skeleton",
            &d("skeletons/p3.json"),
            "--lengths",
            "stats.json",
            "--fallback",
            "30",
            "--out",
            "w.json",
        ],
        dir.path(),
    );
    assert!(w.status.success(), "{}", String::from_utf8_lossy(&w.stderr));
}

#[test]
fn ingest_empty_corpus_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "ingest",
            "--skeleton",
            &d("skeletons/p3.json"),
            "--annotations",
            &d("annotations/empty.json"),
            "--out",
            "stats.json",
        ],
        dir.path(),
    );
    assert_failed_without_output(&out, dir.path(), "empty");
}

#[test]
fn weights_p3_global() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "weights",
            "--skeleton",
            &d("skeletons/p3.json"),
            "--lengths",
            &d("lengths/p3_unit.json"),
            "--scheme",
            "global",
            "--out",
            "w.json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let doc = json(&dir.path().join("w.json"));
    let v = weights_of(&doc, "keypoints");
    for (a, e) in v.iter().zip([12.0 / 11.0, 9.0 / 11.0, 12.0 / 11.0]) {
        assert!((a - e).abs() < 1e-12);
    }
    assert_eq!(weights_of(&doc, "connections"), vec![1.0, 1.0]);
    assert_eq!(doc["scheme"], "global");
}

#[test]
fn weights_radius_flag() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "weights",
        "--skeleton",
        &d("skeletons/p3.json"),
        "--lengths",
        &d("lengths/p3_unit.json"),
    ];
    let one = run(
        &[&base[..], &["--radius", "1", "--out", "r1.json"]].concat(),
        dir.path(),
    );
    assert!(one.status.success());
    let v = weights_of(&json(&dir.path().join("r1.json")), "keypoints");
    for (a, e) in v.iter().zip([1.2, 0.6, 1.2]) {
        assert!((a - e).abs() < 1e-12);
    }

    let zero = run(
        &[&base[..], &["--radius", "0", "--out", "r0.json"]].concat(),
        dir.path(),
    );
    assert!(zero.status.success());
    assert_eq!(json(&dir.path().join("r0.json"))["scheme"], "global");
}

#[test]
fn weights_equal_scheme_is_all_ones() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "weights",
            "--skeleton",
            &d("skeletons/lollipop.json"),
            "--lengths",
            &d("lengths/lollipop_unit.json"),
            "--scheme",
            "equal",
            "--out",
            "w.json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let doc = json(&dir.path().join("w.json"));
    assert!(weights_of(&doc, "keypoints").iter().all(|&w| w == 1.0));
    assert!(weights_of(&doc, "connections").iter().all(|&w| w == 1.0));
}

#[test]
fn weights_needs_exactly_one_length_source() {
    let dir = tempfile::tempdir().unwrap();
    let both = run(
        &[
            "weights",
            "--skeleton",
            &d("skeletons/p3.json"),
            "--lengths",
            &d("lengths/p3_unit.json"),
            "--annotations",
            &d("annotations/p3_synthetic.json"),
            "--out",
            "w.json",
        ],
        dir.path(),
    );
    assert_failed_without_output(&both, dir.path(), "not both");
    let neither = run(
        &[
            "weights",
            "--skeleton",
            &d("skeletons/p3.json"),
            "--out",
            "w.json",
        ],
        dir.path(),
    );
    assert_failed_without_output(&neither, dir.path(), "--annotations or --lengths");
}

#[test]
fn weights_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| {
        vec![
            "weights".to_owned(),
            "--skeleton".into(),
            d("skeletons/lollipop.json"),
            "--lengths".into(),
            d("lengths/lollipop_unit.json"),
            "--out".into(),
            out.to_owned(),
        ]
    };
    for out in ["a.json", "b.json"] {
        let a = args(out);
        let a: Vec<&str> = a.iter().map(String::as_str).collect();
        assert!(run(&a, dir.path()).status.success());
    }
    let a = fs::read(dir.path().join("a.json")).unwrap();
    let b = fs::read(dir.path().join("b.json")).unwrap();
    // only the output path differs between the two echoed configs
    assert_eq!(
        String::from_utf8(a)
            .unwrap()
            .replace("a.json", "b.json")
            .into_bytes(),
        b
    );
}

#[test]
fn compare_cycle_and_lollipop() {
    let dir = tempfile::tempdir().unwrap();
    let c5: String = {
        let edges: Vec<String> = (0..5)
            .map(|i| {
                format!(
                    "{{\"a\":\"c{i}\",\"b\":\"c{}\",\"length\":2.5}}",
                    (i + 1) % 5
                )
            })
            .collect();
        format!("{{\"edges\":[{}]}}", edges.join(","))
    };
    fs::write(dir.path().join("c5.json"), c5).unwrap();
    let out = run(
        &[
            "compare",
            "--skeleton",
            &d("skeletons/c5.json"),
            "--lengths",
            "c5.json",
            "--out",
            "cmp.json",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = json(&dir.path().join("cmp.json"));
    let schemes = doc["schemes"].as_array().unwrap();
    assert_eq!(schemes.len(), 4);
    for s in schemes {
        assert!((s["summary"]["keypoints"]["ratio"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
    assert!(String::from_utf8_lossy(&out.stdout).contains("local(r=3)"));

    let out = run(
        &[
            "compare",
            "--skeleton",
            &d("skeletons/lollipop.json"),
            "--lengths",
            &d("lengths/lollipop_unit.json"),
            "--out",
            "lol.json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let doc = json(&dir.path().join("lol.json"));
    let ratio = |i: usize| {
        doc["schemes"][i]["summary"]["keypoints"]["ratio"]
            .as_f64()
            .unwrap()
    };
    assert!(ratio(0) > ratio(2));
    assert_eq!(ratio(2), 1.0);
}

#[test]
fn render_writes_two_deterministic_files() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "render",
        "--skeleton",
        &d("skeletons/p3.json"),
        "--lengths",
        &d("lengths/p3_unit.json"),
        "--layout",
        &d("layouts/p3.json"),
        "--scheme",
        "global",
        "--out",
        "p3",
    ];
    assert!(run(&args, dir.path()).status.success());
    let dot = fs::read(dir.path().join("p3.dot")).unwrap();
    let svg = fs::read(dir.path().join("p3.svg")).unwrap();
    assert!(run(&args, dir.path()).status.success());
    assert_eq!(dot, fs::read(dir.path().join("p3.dot")).unwrap());
    assert_eq!(svg, fs::read(dir.path().join("p3.svg")).unwrap());
    assert!(String::from_utf8(svg).unwrap().starts_with("<svg"));
}

#[test]
fn render_missing_layout_file_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "render",
            "--skeleton",
            &d("skeletons/p3.json"),
            "--lengths",
            &d("lengths/p3_unit.json"),
            "--layout",
            "nowhere.json",
            "--out",
            "p3",
        ],
        dir.path(),
    );
    assert_failed_without_output(&out, dir.path(), "nowhere.json");
}

#[test]
fn render_from_weight_table_with_fallback_layout() {
    let dir = tempfile::tempdir().unwrap();
    let w = run(
        &[
            "weights",
            "--skeleton",
            &d("skeletons/p3.json"),
            "--lengths",
            &d("lengths/p3_unit.json"),
            "--scheme",
            "equal",
            "--out",
            "w.json",
        ],
        dir.path(),
    );
    assert!(w.status.success());
    let r = run(
        &[
            "render",
            "--skeleton",
            &d("skeletons/p3.json"),
            "--weights",
            "w.json",
            "--out",
            "eq",
        ],
        dir.path(),
    );
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let svg = fs::read_to_string(dir.path().join("eq.svg")).unwrap();
    assert!(svg.contains("force-directed layout, seed 0"));
    let radii: Vec<&str> = svg
        .lines()
        .filter(|l| l.starts_with("<circle"))
        .map(|l| l.split(" r=\"").nth(1).unwrap())
        .collect();
    assert_eq!(radii.len(), 3);
    assert!(radii.iter().all(|r| r.starts_with("6.000")));
}

#[test]
fn loss_demo_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "loss-demo",
            "--skeleton",
            &d("skeletons/p3.json"),
            "--lengths",
            &d("lengths/p3_unit.json"),
            "--samples",
            &d("samples/p3.json"),
            "--out",
            "loss.json",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = json(&dir.path().join("loss.json"));
    let report = &doc["report"];
    assert_eq!(report["gamma"], 2.0);
    assert_eq!(report["keypoints"].as_array().unwrap().len(), 3);
    let total: f64 = report["keypoints"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["weighted"].as_f64().unwrap())
        .sum();
    assert!((total - report["intensity_total"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(
        "skeleton = {:?}\nlengths = {:?}\nscheme = \"global\"\nout = \"from_file.json\"\n",
        d("skeletons/p3.json"),
        d("lengths/p3_unit.json")
    );
    fs::write(dir.path().join("run.toml"), cfg).unwrap();
    let out = run(
        &["weights", "--config", "run.toml", "--scheme", "equal"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = json(&dir.path().join("from_file.json"));
    assert_eq!(doc["scheme"], "equal");
    assert_eq!(doc["metadata"]["config"]["scheme"], "equal");
    assert_eq!(doc["metadata"]["config"]["radius"], 3);
}

#[test]
fn missing_out_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "weights",
            "--skeleton",
            &d("skeletons/p3.json"),
            "--lengths",
            &d("lengths/p3_unit.json"),
        ],
        dir.path(),
    );
    assert_failed_without_output(&out, dir.path(), "--out");
}
