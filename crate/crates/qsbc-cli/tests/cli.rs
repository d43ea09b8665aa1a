//! End-to-end behavior of the `qsbc` binary: output formats agree, exit
//! codes follow the documented rules, and reports land where --out says.

use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn qsbc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsbc"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn rows(output: &Output) -> Vec<Value> {
    let report: Value = serde_json::from_slice(&output.stdout).expect("stdout is a JSON report");
    report["rows"].as_array().expect("rows array").clone()
}

fn shipped_code_path() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../codes/hamming8.txt")
        .display()
        .to_string()
}

#[test]
fn json_and_csv_reports_carry_identical_numbers() {
    let base = [
        "conceal",
        "--protocol",
        "p1,p2",
        "--n",
        "1..3",
        "--alpha",
        "pi/4",
        "--trials",
        "200",
        "--seed",
        "5",
    ];
    let json_out = qsbc(&base);
    assert!(json_out.status.success());
    let json_rows = rows(&json_out);

    let mut csv_args = base.to_vec();
    csv_args.extend(["--format", "csv"]);
    let csv_out = qsbc(&csv_args);
    assert!(csv_out.status.success());
    let text = String::from_utf8(csv_out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# version: "));
    let config_line = lines.next().unwrap();
    assert!(config_line.starts_with("# config: "));
    let _: Value = serde_json::from_str(&config_line["# config: ".len()..]).unwrap();

    let body: String = lines.collect::<Vec<_>>().join("\n");
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let columns: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    let records: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(records.len(), json_rows.len());

    for (record, row) in records.iter().zip(&json_rows) {
        for (column, cell) in columns.iter().zip(record.iter()) {
            let expected = match &row[column.as_str()] {
                Value::Null => String::new(),
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            assert_eq!(cell, expected, "column {column} diverges between formats");
        }
    }
}

#[test]
fn conceal_grid_passes_the_gate_and_shrugs_off_unsupported_protocols() {
    let output = qsbc(&[
        "conceal",
        "--protocol",
        "p1,p2,p3,p6",
        "--n",
        "1..3",
        "--alpha",
        "pi/8,pi/4",
        "--trials",
        "100",
        "--seed",
        "2",
    ]);
    assert!(
        output.status.success(),
        "gate tripped: {}",
        String::from_utf8_lossy(&output.stdout)
    );
    let mut checked = 0usize;
    let mut diagnostics = 0usize;
    for row in rows(&output) {
        if row.get("error").is_some_and(|e| !e.is_null()) {
            diagnostics += 1; // p6 has no closed form to audit
            continue;
        }
        let difference = row["abs_difference"].as_f64().unwrap();
        assert!(difference <= 1e-7, "row {row} out of tolerance");
        let advantage = row["helstrom_advantage"].as_f64().unwrap();
        let closed = row["closed_form"].as_f64().unwrap();
        let sigma = row["helstrom_std_error"].as_f64().unwrap();
        assert!((advantage - closed).abs() <= 5.0 * sigma.max(1e-3));
        checked += 1;
    }
    assert_eq!(checked, 12); // p1 at two angles + p2 + p3, three lengths each
    assert_eq!(diagnostics, 3); // p6 at three lengths
}

#[test]
fn run_reports_perfect_honest_acceptance_on_an_ideal_channel() {
    let output = qsbc(&[
        "run",
        "--protocol",
        "p1,p2,p3,p5,p6",
        "--n",
        "2",
        "--m",
        "1,2",
        "--trials",
        "60",
        "--seed",
        "8",
    ]);
    assert!(output.status.success());
    let all = rows(&output);
    assert_eq!(all.len(), 10);
    for row in all {
        assert!(row.get("error").is_none(), "unexpected diagnostic: {row}");
        assert_eq!(row["honest_acceptance"].as_f64(), Some(1.0), "row {row}");
        let protocol = row["protocol"].as_str().unwrap();
        if protocol == "p6" {
            assert!(
                row["cheat_success"].is_null(),
                "p6 has no single-flip cheat"
            );
        } else {
            assert!(row["cheat_success"].is_f64(), "row {row}");
        }
        let transcript: Value =
            serde_json::from_str(row["sample_transcript"].as_str().unwrap()).unwrap();
        assert_eq!(transcript["verdict"]["accepted"], Value::Bool(true));
    }
}

#[test]
fn run_flags_missing_code_as_a_row_diagnostic() {
    let output = qsbc(&["run", "--protocol", "p8", "--n", "8", "--trials", "10"]);
    assert!(output.status.success());
    let all = rows(&output);
    assert_eq!(all.len(), 1);
    assert!(all[0]["error"].as_str().unwrap().contains("--code"));
}

#[test]
fn attack_degrades_to_resource_rows_when_oversized() {
    let output = qsbc(&[
        "attack",
        "--protocol",
        "p1",
        "--n",
        "2,100",
        "--alpha",
        "pi/4",
        "--trials",
        "400",
        "--seed",
        "3",
    ]);
    assert!(output.status.success());
    let all = rows(&output);
    assert_eq!(all.len(), 2);

    let small = &all[0];
    assert_eq!(small["n"].as_u64(), Some(2));
    assert_eq!(small["honest_acceptance"].as_f64(), Some(1.0));
    assert!(small["unitarity_residual"].as_f64().unwrap() <= 1e-8);
    assert!(small["fidelity_margin"].as_f64().unwrap() >= -1e-9);
    assert_eq!(small["feasible"], Value::Bool(true));

    let big = &all[1];
    assert_eq!(big["n"].as_u64(), Some(100));
    assert!(big["error"].as_str().unwrap().contains("100"));
    assert_eq!(big["time_ops"].as_str(), Some("2^300"));
    assert_eq!(big["memory_entries"].as_str(), Some("2^200"));
    assert_eq!(big["feasible"], Value::Bool(false));
    assert!(big.get("fidelity_achieved").is_none());
}

#[test]
fn ecc_summary_matches_hand_checked_values() {
    let code = shipped_code_path();
    let output = qsbc(&["ecc", "--code", &code, "--n", "4", "--m", "1,3"]);
    assert!(output.status.success());
    let all = rows(&output);

    let summary = &all[0];
    assert_eq!(summary["kind"].as_str(), Some("summary"));
    assert_eq!(summary["length"].as_u64(), Some(7));
    assert_eq!(summary["dimension"].as_u64(), Some(4));
    assert_eq!(summary["t_prime"].as_u64(), Some(1));
    assert_eq!(summary["independence"], Value::Bool(true));

    let guess = |m: u64, p_s: f64| {
        all.iter()
            .find(|r| {
                r["kind"].as_str() == Some("guess")
                    && r["m"].as_u64() == Some(m)
                    && r["p_s"].as_f64() == Some(p_s)
            })
            .unwrap_or_else(|| panic!("no guess row for m={m} p_s={p_s}"))
            .clone()
    };
    assert_eq!(guess(1, 0.5)["guess_prob_block"].as_f64(), Some(0.9375));
    assert_eq!(guess(1, 0.0)["guess_prob_session"].as_f64(), Some(0.0));
    assert_eq!(guess(1, 1.0)["guess_prob_session"].as_f64(), Some(1.0));
    assert!(
        guess(3, 0.5)["guess_prob_session"].as_f64().unwrap()
            > guess(1, 0.5)["guess_prob_session"].as_f64().unwrap()
    );

    let binding = |p_ce: f64, p_cv: f64| {
        all.iter()
            .find(|r| {
                r["kind"].as_str() == Some("binding")
                    && r["p_ce"].as_f64() == Some(p_ce)
                    && r["p_cv"].as_f64() == Some(p_cv)
            })
            .unwrap_or_else(|| panic!("no binding row for {p_ce}/{p_cv}"))
            .clone()
    };
    let favorable = binding(0.05, 0.5);
    assert_eq!(favorable["satisfied"], Value::Bool(true));
    assert_eq!(favorable["error_load"].as_f64(), Some(0.15));
    assert_eq!(favorable["cheat_headroom"].as_f64(), Some(-0.6));
    let hostile = binding(0.05, 0.01);
    assert_eq!(hostile["satisfied"], Value::Bool(false));
    assert_eq!(hostile["cheat_headroom"].as_f64(), Some(19.0));
}

#[test]
fn ecc_rejects_a_malformed_base_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("no_all_ones.txt");
    // hamming8 with the all-ones parity-check row zeroed out
    let text = std::fs::read_to_string(shipped_code_path())
        .unwrap()
        .replace("1 1 1 1", "0 0 0 0");
    std::fs::write(&path, text).unwrap();

    let output = qsbc(&["ecc", "--code", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let all = rows(&output);
    assert_eq!(all.len(), 1);
    assert_eq!(all[0]["kind"].as_str(), Some("error"));
    assert!(!all[0]["error"].as_str().unwrap().is_empty());
}

#[test]
fn out_flag_writes_the_report_to_a_file_instead_of_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let args = [
        "conceal",
        "--protocol",
        "p1",
        "--n",
        "1..2",
        "--trials",
        "50",
        "--seed",
        "11",
    ];

    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let filed = qsbc(&with_out);
    assert!(filed.status.success());
    assert!(filed.stdout.is_empty(), "--out should silence stdout");

    let streamed = qsbc(&args);
    assert_eq!(std::fs::read(&path).unwrap(), streamed.stdout);
}

#[test]
fn invalid_flags_fail_fast() {
    let unknown_protocol = qsbc(&["conceal", "--protocol", "p4"]);
    assert_eq!(unknown_protocol.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unknown_protocol.stderr).contains("p4"));

    let bad_channel = qsbc(&["run", "--loss", "1.5"]);
    assert_eq!(bad_channel.status.code(), Some(1));
    assert!(!bad_channel.stderr.is_empty());

    let unknown_subcommand = qsbc(&["frobnicate"]);
    assert_eq!(unknown_subcommand.status.code(), Some(2));
}
