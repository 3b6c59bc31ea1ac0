//! End-to-end tests of the `artin` binary: exit codes, artifact shapes, and
//! format parity.

use std::path::Path;
use std::process::{Command, Output};

fn artin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_artin"))
        .args(args)
        .env_remove("ARTIN_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "exit {:?}, stderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn predict_reproduces_the_reference_row() {
    let out = stdout_of(&artin(&[
        "predict",
        "--a",
        "5",
        "--stat",
        "omega-quotient",
        "--max-n",
        "5",
    ]));
    assert!(out.contains("0  0.393637"), "{out}");
    assert!(out.contains("1  0.455527"), "{out}");
    assert!(out.contains("5  0.000011"), "{out}");
    assert!(out.contains("E  0.773156"), "{out}");
}

#[test]
fn degree_prints_epsilon_and_degree() {
    let out = stdout_of(&artin(&["degree", "--a", "5", "--ell", "2", "--m", "5"]));
    assert_eq!(out, "epsilon=2 degree=4\n");
    let out = stdout_of(&artin(&["degree", "--a", "-4", "--ell", "2", "--m", "1"]));
    assert_eq!(out, "epsilon=1/2 degree=2\n");
}

#[test]
fn excluded_bases_exit_with_domain_code() {
    for a in ["-1", "0", "1"] {
        let out = artin(&["predict", "--a", a]);
        assert_eq!(out.status.code(), Some(3), "a = {a}");
        assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    }
}

#[test]
fn config_errors_exit_with_two() {
    assert_eq!(
        artin(&["predict", "--a", "5", "--bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(artin(&["predict"]).status.code(), Some(2), "missing --a");
    assert_eq!(
        artin(&["empirical", "--a", "2", "--x", "soon"])
            .status
            .code(),
        Some(2),
        "unparseable --x"
    );
    assert_eq!(
        artin(&["predict", "--a", "2", "--stat", "omega"])
            .status
            .code(),
        Some(2),
        "unknown statistic"
    );
}

#[test]
fn truncation_outside_quotient_statistic_is_a_domain_error() {
    let out = artin(&[
        "empirical",
        "--a",
        "2",
        "--x",
        "1000",
        "--stat",
        "omega-diff",
        "--xi",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn json_and_csv_encode_identical_numbers() {
    let args = ["predict", "--a", "3", "--max-n", "3", "--cutoff", "20000"];
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&artin(
        &[&args[..], &["--format", "json"]].concat(),
    )))
    .unwrap();
    let csv = stdout_of(&artin(&[&args[..], &["--format", "csv"]].concat()));

    assert_eq!(json["schema_version"], 1);
    let rows = json["rows"].as_array().unwrap();
    let csv_rows: Vec<Vec<&str>> = csv
        .lines()
        .skip(1)
        .map(|line| line.split(',').collect())
        .collect();
    assert_eq!(csv_rows.len(), rows.len() + 1, "csv has the extra E row");
    for (row, csv_row) in rows.iter().zip(&csv_rows) {
        assert_eq!(row["n"].to_string(), csv_row[0]);
        assert_eq!(row["density"].as_str().unwrap(), csv_row[1]);
        assert_eq!(row["error"].as_str().unwrap(), csv_row[2]);
        let density: f64 = csv_row[1].parse().unwrap();
        assert!((0.0..=1.0).contains(&density));
    }
    let last = csv_rows.last().unwrap();
    assert_eq!(last[0], "E");
    assert_eq!(json["expectation"]["value"].as_str().unwrap(), last[1]);
}

#[test]
fn empirical_json_round_trips_into_the_library_type() {
    let out = stdout_of(&artin(&[
        "empirical",
        "--a",
        "2",
        "--x",
        "1000",
        "--stat",
        "omega-quotient",
        "--format",
        "json",
    ]));
    let tally: artin_core::EmpiricalTally = serde_json::from_str(&out).unwrap();
    assert_eq!(tally.primes_used, 167);
    assert_eq!(tally.counts.get(&0), Some(&67));
    assert_eq!(tally.counts.get(&1), Some(&83));
    assert_eq!(tally.counts.get(&2), Some(&17));
    let value: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(value["schema_version"], 1);
}

#[test]
fn compare_passes_on_consistent_data() {
    let out = artin(&[
        "compare",
        "--a",
        "2",
        "--x",
        "100000",
        "--stat",
        "omega-quotient",
        "--max-n",
        "2",
        "--cutoff",
        "50000",
        "--threads",
        "2",
    ]);
    let text = stdout_of(&out);
    assert!(text.contains("all rows pass"), "{text}");
}

#[test]
fn compare_flags_corruption_and_mismatches() {
    let dir = tempfile::tempdir().unwrap();
    let tally_path = dir.path().join("tally.json");
    let out = stdout_of(&artin(&[
        "empirical",
        "--a",
        "2",
        "--x",
        "50000",
        "--format",
        "json",
        "--output",
        tally_path.to_str().unwrap(),
    ]));
    assert!(out.is_empty(), "--output diverts stdout");

    // Corrupt one count and compare against the file.
    let mut tally: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&tally_path).unwrap()).unwrap();
    tally["counts"]["1"] = serde_json::json!(1);
    let corrupted = dir.path().join("corrupted.json");
    std::fs::write(&corrupted, tally.to_string()).unwrap();
    let report = stdout_of(&artin(&[
        "compare",
        "--a",
        "2",
        "--max-n",
        "2",
        "--cutoff",
        "20000",
        "--format",
        "json",
        "--tally",
        corrupted.to_str().unwrap(),
    ]));
    let report: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(report["all_pass"], false);

    // A tally for a different base is refused.
    let out = artin(&[
        "compare",
        "--a",
        "3",
        "--max-n",
        "2",
        "--cutoff",
        "20000",
        "--tally",
        tally_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "mismatched tables");
}

#[test]
fn output_flag_writes_the_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("degree.txt");
    let out = artin(&[
        "degree",
        "--a",
        "5",
        "--ell",
        "2",
        "--m",
        "5",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        "epsilon=2 degree=4\n"
    );
}

#[test]
fn threads_come_from_the_environment_when_not_given() {
    let run = |env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_artin"));
        cmd.args(["empirical", "--a", "2", "--x", "10000"]);
        match env {
            Some(v) => cmd.env("ARTIN_THREADS", v),
            None => cmd.env_remove("ARTIN_THREADS"),
        };
        cmd.output().unwrap()
    };
    assert!(run(Some("2")).status.success());
    assert_eq!(run(Some("banana")).status.code(), Some(2));
}

#[test]
fn genfun_prints_canonical_factors() {
    let out = stdout_of(&artin(&["genfun", "--a", "5", "--stat", "omega-quotient"]));
    assert!(
        out.contains("F   = (2z^2 + 18z + 20)/(z^2 + 20z + 19)"),
        "{out}"
    );
    assert!(out.contains("H   = 1"), "{out}");
    let out = stdout_of(&artin(&["genfun", "--a", "4", "--stat", "omega-diff"]));
    assert!(out.contains("(7z + 5)/(4z + 8)"), "{out}");
}

#[test]
fn expectation_prints_all_three_statistics() {
    let out = stdout_of(&artin(&["expectation", "--a", "4", "--cutoff", "200000"]));
    assert!(out.contains("omega-quotient"), "{out}");
    assert!(out.contains("big-omega-quotient"), "{out}");
    assert!(out.contains("omega-diff"), "{out}");
    assert!(out.contains("1.2731"), "{out}");
    assert!(out.contains("1.7133"), "{out}");
    assert!(out.contains("0.8016"), "{out}");
}

#[test]
fn checkpointed_sieve_completes_and_cleans_up() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sieve.checkpoint");
    let out = artin(&[
        "empirical",
        "--a",
        "2",
        "--x",
        "20000",
        "--segment-len",
        "8192",
        "--checkpoint",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(
        !Path::new(&path).exists(),
        "completed runs remove their checkpoint"
    );
}
