//! End-to-end checks of the hyperlab binary: flag handling, CSV/JSON
//! layouts, exit codes, determinism, config files, manifest sidecars.

use std::process::{Command, Output};

fn hyperlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn hitting_n_equals_k_rows() {
    let out = hyperlab(&["hitting", "--n", "3", "--k", "3", "--j", "2", "--trials", "5", "--seed", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "trial,seed,tau_i,tau_c,equal");
    for (t, line) in lines[1..6].iter().enumerate() {
        assert_eq!(*line, format!("{t},{},1,1,1", t as u64 + 1));
    }
    assert!(lines[6].starts_with("# summary trials=5 coincidences=5 point=1"));
}

#[test]
fn hitting_rows_keep_tau_order() {
    let out = hyperlab(&["hitting", "--n", "10", "--k", "3", "--j", "1", "--trials", "30", "--seed", "7"]);
    assert!(out.status.success());
    for line in stdout(&out).lines().skip(1) {
        if line.starts_with('#') {
            continue;
        }
        let fields: Vec<u64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        let (tau_i, tau_c, equal) = (fields[2], fields[3], fields[4]);
        assert!(tau_i <= tau_c);
        assert_eq!(equal == 1, tau_i == tau_c);
    }
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["hitting", "--n", "12", "--k", "3", "--j", "2", "--trials", "10", "--seed", "42"];
    let a = hyperlab(&args);
    let b = hyperlab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let args = [
        "sweep", "--n", "10", "--k", "3", "--j", "1", "--c-from", "-1", "--c-to", "1",
        "--c-step", "1", "--trials", "20", "--seed", "3",
    ];
    let a = hyperlab(&args);
    let b = hyperlab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_2() {
    let out = hyperlab(&["hitting", "--n", "3", "--k", "3", "--j", "2", "--trials", "0", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));

    // j out of range.
    let out = hyperlab(&["hitting", "--n", "6", "--k", "3", "--j", "3", "--trials", "1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));

    // Missing required flag.
    let out = hyperlab(&["hitting", "--n", "6", "--k", "3", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(2));

    // p out of range for this c.
    let out = hyperlab(&[
        "degree-dist", "--n", "30", "--k", "3", "--j", "1", "--s", "0", "--c", "-1000",
        "--trials", "5", "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Empty sweep grid.
    let out = hyperlab(&[
        "sweep", "--n", "10", "--k", "3", "--j", "1", "--c-from", "2", "--c-to", "-2",
        "--c-step", "1", "--trials", "5", "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn resource_errors_exit_3() {
    let out = hyperlab(&["hitting", "--n", "100000", "--k", "3", "--j", "2", "--trials", "1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn degree_dist_summary_matches_library() {
    let out = hyperlab(&[
        "degree-dist", "--n", "20", "--k", "3", "--j", "1", "--s", "0", "--c", "0",
        "--trials", "50", "--seed", "9",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("trial,D_s\n"));
    let summary = text.lines().last().unwrap();
    let exact_field = summary
        .split_whitespace()
        .find(|f| f.starts_with("exact_expectation="))
        .unwrap();
    let got: f64 = exact_field.split('=').nth(1).unwrap().parse().unwrap();
    let params = hyperlab::Params::new(20, 3, 1).unwrap();
    let cp = hyperlab::statistics::CnParameterization::new(0, 0.0).unwrap();
    let p = hyperlab::statistics::p_from_c(&params, cp).unwrap();
    let want = hyperlab::statistics::exact_expected_ds(&params, p, 0).unwrap();
    assert!(((got - want) / want).abs() < 1e-12, "{got} vs {want}");
}

#[test]
fn degree_dist_large_c_drives_d0_to_zero() {
    let out = hyperlab(&[
        "degree-dist", "--n", "30", "--k", "3", "--j", "1", "--s", "0", "--c", "10",
        "--trials", "200", "--seed", "4",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let summary = text.lines().last().unwrap();
    let mean_field = summary
        .split_whitespace()
        .find(|f| f.starts_with("mean="))
        .unwrap();
    let mean: f64 = mean_field.split('=').nth(1).unwrap().parse().unwrap();
    assert!(mean < 0.05, "mean {mean}");
}

#[test]
fn sweep_columns_and_consistency() {
    let multi = hyperlab(&[
        "sweep", "--n", "10", "--k", "3", "--j", "1", "--c-from", "-1", "--c-to", "3",
        "--c-step", "2", "--trials", "25", "--seed", "6",
    ]);
    assert!(multi.status.success());
    let text = stdout(&multi);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "c,trials,frac_no_isolated,frac_connected");
    assert_eq!(lines.len(), 4);
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        let no_iso: f64 = fields[2].parse().unwrap();
        let conn: f64 = fields[3].parse().unwrap();
        assert!(conn <= no_iso + 1e-12);
    }

    // A one-point grid reproduces the first row (same row seed offset).
    let single = hyperlab(&[
        "sweep", "--n", "10", "--k", "3", "--j", "1", "--c-from", "-1", "--c-to", "-1",
        "--c-step", "2", "--trials", "25", "--seed", "6",
    ]);
    assert!(single.status.success());
    assert_eq!(stdout(&single).lines().nth(1), Some(lines[1]));
}

#[test]
fn oracle_check_passes() {
    let out = hyperlab(&["oracle-check", "--instances", "60", "--max-n", "10", "--seed", "0"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("OK"));
}

#[test]
fn enumerate_wc_known_row() {
    let out = hyperlab(&["enumerate-wc", "--k", "3", "--j", "2", "--max-jsize", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text, "jsize,count,bound\n3,1,134217728\n");
}

#[test]
fn component_epsilon_domain_and_json() {
    let out = hyperlab(&["component", "--n", "20", "--k", "3", "--j", "2", "--epsilon", "1.5", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = hyperlab(&["component", "--n", "20", "--k", "3", "--j", "2", "--epsilon", "0.3", "--seed", "1"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report["largest_jsize"].is_u64());
    assert!(report["coverage_mean"].is_f64() || report["coverage_mean"].is_u64());
}

#[test]
fn out_file_gets_manifest_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let out = hyperlab(&[
        "hitting", "--n", "6", "--k", "3", "--j", "1", "--trials", "4", "--seed", "2",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows = std::fs::read_to_string(&path).unwrap();
    assert!(rows.starts_with("trial,seed,tau_i,tau_c,equal\n"));
    let sidecar = format!("{}.manifest.json", path.display());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(sidecar).unwrap()).unwrap();
    assert!(manifest["generator"].as_str().unwrap().contains("ChaCha12"));
    assert_eq!(manifest["parameters"]["n"], 6);
    assert!(manifest["wall_time_secs"].is_f64());
}

#[test]
fn config_file_supplies_defaults_and_cli_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "n=3\nk=3\nj=2\ntrials=2\nseed=1\n").unwrap();

    let out = hyperlab(&["hitting", "--config", conf.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1 + 2 + 1); // header + 2 rows + summary

    // CLI flag beats the config value.
    let out = hyperlab(&["hitting", "--config", conf.to_str().unwrap(), "--trials", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 1 + 3 + 1);
}

#[test]
fn json_format_parses() {
    let out = hyperlab(&[
        "hitting", "--n", "6", "--k", "3", "--j", "1", "--trials", "3", "--seed", "5",
        "--format", "json",
    ]);
    assert!(out.status.success());
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(body["rows"].as_array().unwrap().len(), 3);
    assert_eq!(body["summary"]["trials"], 3);

    let out = hyperlab(&["enumerate-wc", "--k", "3", "--j", "1", "--max-jsize", "4", "--format", "json"]);
    assert!(out.status.success());
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(body.as_array().unwrap().len(), 2);
}
