use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn vr3c(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vr3c")).args(args).output().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_fixture_writes_fair_policy() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("result.json");
    let instance = fixture("instance.json");
    let run = vr3c(&["solve", "--instance", path_str(&instance), "--out", path_str(&out)]);
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));

    let json: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["scheme"], "proposed");
    assert_eq!(json["converged"], true);
    let shares: f64 = json["policy"]["bandwidth"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
    assert!((shares - 1.0).abs() <= 1e-9);
    assert_eq!(json["policy"]["cache"].as_array().unwrap().len(), 2);
}

#[test]
fn greedy_local_is_never_better() {
    let cost = |scheme: &str| {
        let run = vr3c(&["solve", "--sample", "3", "--scheme", scheme]);
        assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
        let json: Value = serde_json::from_slice(&run.stdout).unwrap();
        json["max_cost"].as_f64().unwrap()
    };
    assert!(cost("greedy-local") >= cost("proposed"));
    assert!(cost("cache-zipf:0.8") >= cost("cache-interest"));
}

#[test]
fn solve_output_is_reproducible() {
    let a = vr3c(&["solve", "--sample", "11", "--scheme", "joint-no-cache"]);
    let b = vr3c(&["solve", "--sample", "11", "--scheme", "joint-no-cache"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn malformed_matrix_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("instance.json"))
        .unwrap()
        .replace("interest_matrix.csv", path_str(&fixture("missing_column.csv")));
    let instance = dir.path().join("bad.json");
    std::fs::write(&instance, text).unwrap();

    let run = vr3c(&["solve", "--instance", path_str(&instance)]);
    assert_eq!(run.status.code(), Some(1));
    let msg = stderr(&run);
    assert_eq!(msg.lines().count(), 1, "{msg}");
    assert!(msg.contains("row 2"), "{msg}");
    assert!(run.stdout.is_empty());
}

#[test]
fn unknown_scheme_is_rejected() {
    let run = vr3c(&["solve", "--sample", "0", "--scheme", "fastest"]);
    assert_ne!(run.status.code(), Some(0));
    assert!(stderr(&run).contains("unknown scheme"));
}

#[test]
fn iteration_cap_gives_exit_two() {
    let run = vr3c(&["solve", "--sample", "0", "--max-iterations", "1"]);
    assert_eq!(run.status.code(), Some(2), "{}", stderr(&run));
    let json: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(json["converged"], false);
    assert_eq!(json["iterations"], 1);
}

#[test]
fn gen_matrix_zipf_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("zipf.csv");
    let run = vr3c(&["gen-matrix", "--kind", "zipf", "--gamma", "1.0", "--rows", "2", "--cols", "3", "--out", path_str(&out)]);
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("user_id,c1,c2,c3"));
    let h = 1.0 + 0.5 + 1.0 / 3.0;
    for line in lines {
        let vals: Vec<f64> = line.split(',').skip(1).map(|v| v.parse().unwrap()).collect();
        for (v, k) in vals.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - 1.0 / k / h).abs() < 1e-15);
        }
    }
}

#[test]
fn gen_matrix_from_raw_scores_and_random() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.csv");
    let run = vr3c(&[
        "gen-matrix", "--kind", "file", "--input", path_str(&fixture("raw_scores.csv")),
        "--rows", "2", "--cols", "3", "--out", path_str(&out),
    ]);
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    assert!(std::fs::read_to_string(&out).unwrap().contains("0.45"));

    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let run = vr3c(&["gen-matrix", "--kind", "random", "--seed", "5", "--rows", "3", "--cols", "4", "--out", path_str(p)]);
        assert_eq!(run.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let run = vr3c(&["gen-matrix", "--kind", "file", "--rows", "2", "--cols", "3", "--out", path_str(&out)]);
    assert_ne!(run.status.code(), Some(0));
}

#[test]
fn validate_accepts_sampled_and_rejects_broken() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    vr3c::harness::sample_instance(&Default::default(), 4).save(&good).unwrap();
    let run = vr3c(&["validate", "--instance", path_str(&good)]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stdout));

    let mut broken = vr3c::harness::sample_instance(&Default::default(), 4);
    broken.catalog.stereo_sizes[3] = 1e6;
    let bad = dir.path().join("bad.json");
    broken.save(&bad).unwrap();
    let run = vr3c(&["validate", "--instance", path_str(&bad)]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stdout).contains("stereo"));
}

#[test]
fn validate_accepts_estimator_matrix() {
    let run = vr3c(&["validate", "--instance", path_str(&fixture("instance.json"))]);
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
}

#[test]
fn sweep_writes_tables_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    std::fs::write(
        &config,
        r#"{"parameter": "total_bandwidth", "values": [1e7, 3e7], "seeds": [0, 1], "schemes": ["proposed", "greedy-edge"]}"#,
    )
    .unwrap();
    let one = dir.path().join("one");
    let four = dir.path().join("four");
    for (out, jobs) in [(&one, "1"), (&four, "4")] {
        let run = vr3c(&["sweep", "--config", path_str(&config), "--out", path_str(out), "--jobs", jobs]);
        assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    }
    for file in ["results.csv", "summary.csv"] {
        assert_eq!(std::fs::read(one.join(file)).unwrap(), std::fs::read(four.join(file)).unwrap());
    }
    let results = std::fs::read_to_string(one.join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 1 + 2 * 2 * 2);
}

#[test]
fn sweep_with_empty_values_fails() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    std::fs::write(&config, r#"{"parameter": "edge_compute", "values": [], "seeds": [0]}"#).unwrap();
    let run = vr3c(&["sweep", "--config", path_str(&config), "--out", path_str(&dir.path().join("o"))]);
    assert_eq!(run.status.code(), Some(1));
    assert!(stderr(&run).contains("values"));
}

#[test]
fn trace_csv_for_samples_and_files() {
    let run = vr3c(&["trace", "--sample", "3", "--seed", "10"]);
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(text.starts_with("seed,iteration,delta_cost\n10,1,"));
    assert!(text.contains("\n12,"));

    let run = vr3c(&["trace", "--instance", path_str(&fixture("instance.json"))]);
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    assert!(String::from_utf8(run.stdout).unwrap().contains("\n7,1,"));
}

#[test]
fn inputs_are_not_modified() {
    let path = fixture("instance.json");
    let before = std::fs::read(&path).unwrap();
    vr3c(&["solve", "--instance", path_str(&path)]);
    vr3c(&["validate", "--instance", path_str(&path)]);
    assert_eq!(std::fs::read(&path).unwrap(), before);
}
