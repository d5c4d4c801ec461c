use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn wcr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wcr"))
        .args(args)
        .env_remove("WCR_JOBS")
        .output()
        .expect("run wcr")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn demo_test(extra: &[&str]) -> Output {
    let path = data("demo_single_cluster.csv");
    let mut args = vec![
        "test",
        "--data",
        &path,
        "--outcome",
        "y",
        "--regressor",
        "x",
        "--controls",
        "w",
        "--cluster",
        "cluster",
        "--subcluster",
        "subcluster",
        "--seed",
        "3",
    ];
    args.extend_from_slice(extra);
    wcr(&args)
}

#[test]
fn single_cluster_never_rejects() {
    let o = demo_test(&["--method", "wcr"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("p-value: 1.000"), "{text}");
    assert!(text.contains("fail to reject"), "{text}");
}

#[test]
fn missing_subcluster_is_usage_error() {
    let path = data("demo_single_cluster.csv");
    let o = wcr(&[
        "test",
        "--data",
        &path,
        "--outcome",
        "y",
        "--regressor",
        "x",
        "--cluster",
        "cluster",
        "--method",
        "wcr",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_column_is_data_error() {
    let path = data("demo_single_cluster.csv");
    let o = wcr(&[
        "test",
        "--data",
        &path,
        "--outcome",
        "nope",
        "--regressor",
        "x",
        "--cluster",
        "cluster",
        "--subcluster",
        "subcluster",
        "--method",
        "nr",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope"));
}

#[test]
fn model_two_rejects_rho_above_one() {
    let o = wcr(&[
        "simulate", "--model", "2", "--r", "4", "--qk", "4", "--nj", "25", "--rho", "1.2",
        "--reps", "10", "--seed", "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_rho_grids_are_usage_errors() {
    for grid in ["", "1:0:1", "0:1:0", "a:b:c"] {
        let o = wcr(&[
            "power",
            "--model",
            "1",
            "--r",
            "2",
            "--qk",
            "2",
            "--nj",
            "5",
            "--rho-grid",
            grid,
            "--reps",
            "5",
            "--seed",
            "1",
        ]);
        assert_eq!(o.status.code(), Some(2), "grid {grid:?}");
    }
}

#[test]
fn mnw_defaults_to_399_draws() {
    let o = demo_test(&["--method", "mnw", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["B"], 399);
    assert_eq!(v["method"], "mnw");
}

#[test]
fn json_report_matches_schema() {
    let schema: Value = serde_json::from_str(
        &std::fs::read_to_string(
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("docs/report.schema.json"),
        )
        .unwrap(),
    )
    .unwrap();
    let props = schema["properties"].as_object().unwrap();
    for method in ["wcr", "nr", "im", "mnw", "cce", "art", "wild"] {
        let o = demo_test(&["--method", method, "--format", "json", "--B", "99"]);
        // a single cluster leaves the cluster-level tests degenerate
        if o.status.code() != Some(0) {
            assert_eq!(o.status.code(), Some(3), "{method}");
            continue;
        }
        let report: Value = serde_json::from_slice(&o.stdout).unwrap();
        let obj = report.as_object().unwrap();
        for key in schema["required"].as_array().unwrap() {
            assert!(
                obj.contains_key(key.as_str().unwrap()),
                "{method}: missing {key}"
            );
        }
        for key in obj.keys() {
            assert!(props.contains_key(key), "{method}: unexpected {key}");
        }
        assert_eq!(report["schema_version"], 1);
        assert_eq!(report["method"], method);
        let p = report["p_value"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&p));
    }
}

#[test]
fn wcr_report_lists_cutoffs_and_naive_pattern() {
    let o = demo_test(&["--method", "wcr", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["per_cutoff"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert_eq!(rows.iter().filter(|r| r["naive"] == true).count(), 1);
    let max = rows
        .iter()
        .map(|r| r["p_value"].as_f64().unwrap())
        .fold(0.0, f64::max);
    assert_eq!(max, v["p_value"].as_f64().unwrap());
    assert_eq!(v["group_size"], 256);
}

#[test]
fn school_tracks_csv_runs_every_level_test() {
    let path = data("school_tracks_synthetic.csv");
    for method in ["wcr", "nr", "im", "mnw"] {
        let o = wcr(&[
            "test",
            "--data",
            &path,
            "--outcome",
            "attempted",
            "--regressor",
            "treatment",
            "--controls",
            "female,question,const",
            "--cluster",
            "school_track",
            "--subcluster",
            "group",
            "--method",
            method,
            "--seed",
            "5",
            "--B",
            "199",
            "--format",
            "json",
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{method}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["r"], 5);
        assert_eq!(v["n"], 11175);
    }
}

fn simulate(jobs: &str) -> Output {
    wcr(&[
        "simulate",
        "--model",
        "2",
        "--r",
        "4",
        "--qk",
        "4",
        "--nj",
        "25",
        "--rho",
        "0.5",
        "--tests",
        "nr,wcr,im,mnw",
        "--reps",
        "100",
        "--seed",
        "9",
        "--jobs",
        jobs,
    ])
}

#[test]
fn simulate_is_identical_across_thread_counts() {
    let a = simulate("1");
    let b = simulate("8");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "model,r,qk,nj,rho,phi,test,reps,rejections,rate,mc_se,errors,seed"
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn single_point_power_curve_equals_simulate() {
    let base = [
        "--model", "1", "--r", "4", "--qk", "4", "--nj", "25", "--tests", "nr,wcr", "--reps",
        "100", "--seed", "4",
    ];
    let mut s = vec!["simulate", "--rho", "0.5"];
    s.extend_from_slice(&base);
    let mut p = vec!["power", "--rho-grid", "0.5:0.5:1"];
    p.extend_from_slice(&base);
    let (s, p) = (wcr(&s), wcr(&p));
    assert!(s.status.success() && p.status.success());
    assert_eq!(s.stdout, p.stdout);
}

#[test]
fn drawn_seed_is_reported() {
    let o = wcr(&[
        "simulate", "--model", "1", "--r", "2", "--qk", "2", "--nj", "5", "--rho", "0", "--reps",
        "3",
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed: "));
}
