//! End-to-end tests of the `ldps` binary: flags, exit codes, CSV shape
//! and byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ldps"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Parse the data rows of one of our CSV reports (skips comment lines and
/// the header).
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn header(text: &str) -> Vec<String> {
    text.lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect()
}

#[test]
fn ml_eval_exponential_identity() {
    let out = run_ok(&[
        "ml-eval", "--alpha", "1", "--beta", "1", "--gamma", "1", "--u", "1",
    ]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let first = stdout.split_whitespace().next().unwrap();
    let v: f64 = first.parse().unwrap();
    assert!((v - std::f64::consts::E).abs() < 1e-11, "{stdout}");
    assert!(stdout.contains("method=series"), "{stdout}");
}

#[test]
fn ml_eval_log_mode_large_argument() {
    let out = run_ok(&[
        "ml-eval", "--alpha", "0.5", "--beta", "1", "--gamma", "1", "--u", "30", "--log",
    ]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let v: f64 = stdout.split_whitespace().next().unwrap().parse().unwrap();
    assert!((v - (900.0 + 2f64.ln())).abs() < 1e-9, "{stdout}");
    assert!(stdout.contains("method=asymptotic"), "{stdout}");
}

#[test]
fn ml_eval_rejects_alpha_out_of_range() {
    let out = bin()
        .args(["ml-eval", "--alpha", "1.5", "--beta", "1", "--gamma", "1", "--u", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("alpha must lie in (0,1]"), "{stderr}");
}

#[test]
fn missing_config_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("x.csv");
    let out = bin()
        .args(["rate", "--config", "/no/such/file.json", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rate_report_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("rate.csv");
    run_ok(&[
        "rate",
        "--config",
        config("p1.json").to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("# config_hash="), "comment line missing");
    assert_eq!(header(&text), vec!["x", "rate_numeric", "rate_closed_form", "abs_err"]);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 200);
    for row in &rows {
        let err: f64 = row[3].parse().unwrap();
        assert!(err <= 1e-8, "row {row:?}");
    }
}

#[test]
fn cgf_converge_error_column_decreases_in_t() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("cgf.csv");
    run_ok(&[
        "cgf-converge",
        "--config",
        config("p1.json").to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(
        header(&text),
        vec!["theta", "t", "scaled_cgf", "lambda_target", "abs_err"]
    );
    let rows = csv_rows(&text);
    // rows are grouped by theta with t ascending inside each group; check
    // the last three err values of the theta = 1 group
    let errs: Vec<f64> = rows
        .iter()
        .filter(|r| r[0] == "1")
        .map(|r| r[4].parse().unwrap())
        .collect();
    assert_eq!(errs.len(), 4);
    assert!(errs[2] < errs[1] && errs[3] < errs[2], "{errs:?}");
}

#[test]
fn pmf_rows_sum_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("pmf.csv");
    run_ok(&[
        "pmf",
        "--config",
        config("p2.json").to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--t",
        "50",
    ]);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let total: f64 = csv_rows(&text)
        .iter()
        .map(|r| r[3].parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-10, "Σ pmf = {total}");
}

#[test]
fn counterexample_quotient_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("ce.csv");
    run_ok(&[
        "counterexample",
        "--config",
        config("p3.json").to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--h",
        "0.01",
        "--t",
        "10000",
    ]);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let rows = csv_rows(&text);
    let zero_row = rows.iter().find(|r| r[0] == "0").expect("theta = 0 row");
    let right: f64 = zero_row[5].parse().unwrap();
    assert!((right - 1.0).abs() < 0.1, "right quotient {right}");
    // agreement column stays within the finite-t band
    for row in &rows {
        let abs_err: f64 = row[3].parse().unwrap();
        assert!(abs_err <= 0.02, "row {row:?}");
    }
}

#[test]
fn md_check_report_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("md.csv");
    run_ok(&[
        "md-check",
        "--config",
        config("p2.json").to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let h = header(&text);
    assert_eq!(h[0], "rho");
    assert!(h.contains(&"h1".to_string()) && h.contains(&"md_prelimit".to_string()));
    assert!(text.lines().any(|l| l.starts_with("# trend h2=")));
}

#[test]
fn sample_and_tail_rate_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        run_ok(&[
            "sample",
            "--config",
            config("p2.json").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--t",
            "40",
            "--n",
            "500",
            "--stream",
            "3",
        ]);
    }
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "sample output must be byte-identical"
    );

    let c = dir.path().join("c.csv");
    let d = dir.path().join("d.csv");
    for out in [&c, &d] {
        run_ok(&[
            "tail-rate",
            "--config",
            config("p1.json").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--n",
            "20000",
        ]);
    }
    assert_eq!(
        std::fs::read(&c).unwrap(),
        std::fs::read(&d).unwrap(),
        "tail-rate output must be byte-identical"
    );
}

#[test]
fn sample_respects_stream_partition() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("s0.csv");
    let b = dir.path().join("s1.csv");
    for (out, stream) in [(&a, "0"), (&b, "1")] {
        run_ok(&[
            "sample",
            "--config",
            config("p2.json").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--t",
            "40",
            "--n",
            "200",
            "--stream",
            stream,
        ]);
    }
    let va: Vec<String> = csv_rows(&std::fs::read_to_string(&a).unwrap())
        .iter()
        .map(|r| r[2].clone())
        .collect();
    let vb: Vec<String> = csv_rows(&std::fs::read_to_string(&b).unwrap())
        .iter()
        .map(|r| r[2].clone())
        .collect();
    assert_ne!(va, vb, "different streams must decorrelate");
}
