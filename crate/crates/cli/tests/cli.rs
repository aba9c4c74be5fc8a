//! End-to-end tests of the `bsx` binary: exit-code contract, record
//! emission, certificate output and determinism.

use std::process::{Command, Output};

fn bsx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bsx"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn bsx_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bsx"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn eval_majorant_dominates_target_columnwise() {
    let out = bsx(&[
        "eval", "--kind", "M", "--lambda", "1", "--c", "auto", "--delta", "1", "--grid",
        "-5:5:101",
    ]);
    assert_eq!(code(&out), 0);
    let body = stdout(&out);
    let lines: Vec<&str> = body.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    assert_eq!(lines.len(), 101);
    for line in &lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let target = v["target"].as_f64().unwrap();
        let approx = v["approx"].as_f64().unwrap();
        assert!(approx >= target - 1e-9, "{line}");
    }
}

#[test]
fn eval_truncated_log_minorant_on_log_grid() {
    let out = bsx(&[
        "eval", "--kind", "Lnu", "--measure", "power:alpha=1", "--delta", "1", "--grid",
        "0.01:50:200:log",
    ]);
    assert_eq!(code(&out), 0);
    let lines: Vec<String> = stdout(&out).lines().map(|s| s.to_string()).collect();
    assert_eq!(lines.len(), 200);
    for line in &lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let x = v["x"].as_f64().unwrap();
        let target = v["target"].as_f64().unwrap();
        let approx = v["approx"].as_f64().unwrap();
        assert!((target - (-x.ln())).abs() < 1e-12, "target at {x}");
        assert!(approx <= target + 1e-9, "minorant at {x}");
    }
}

#[test]
fn eval_rejects_majorant_shift_above_one() {
    let out = bsx(&[
        "eval", "--kind", "M", "--lambda", "1", "--c", "1.5", "--delta", "1", "--grid",
        "-5:5:11",
    ]);
    assert_eq!(code(&out), 3);
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("c ≤ 1") || err.contains("c <= 1") || err.contains("majorant"), "{err}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&bsx(&["eval", "--kind", "Q", "--grid", "0:1:5"])), 2);
    assert_eq!(
        code(&bsx(&["eval", "--kind", "K", "--lambda", "1", "--grid", "bogus"])),
        2
    );
}

#[test]
fn non_convergence_exits_4() {
    // μ = 1e−9 needs ~5e10 series terms; the evaluator must give up cleanly
    let out = bsx(&[
        "eval", "--kind", "K", "--lambda", "1e-9", "--c", "auto", "--delta", "1", "--grid",
        "0.4:0.6:3",
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn errors_table_matches_reference_rows() {
    let out = bsx(&["errors", "--lambda", "1", "--c", "auto", "--delta", "1", "--all-kinds"]);
    assert_eq!(code(&out), 0);
    let body = stdout(&out);
    let mut lines = body.lines();
    assert_eq!(lines.next().unwrap(), "kind,problem,delta,c,closed_form");
    let expected = [
        ("two-sided", 0.278_177_436_674_288_6),
        ("minorant", 0.234_083_572_544_952_4),
        ("majorant", 0.398_036_986_283_605_26),
    ];
    for (kind, value) in expected {
        let row = lines.next().unwrap();
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[0], kind);
        let got: f64 = cols[4].parse().unwrap();
        assert!((got - value).abs() < 1e-13, "{kind}: {got}");
    }
}

#[test]
fn errors_cartesian_table_shape() {
    let out = bsx(&["errors", "--lambda", "0.1,1,5", "--delta", "1,2", "--all-kinds"]);
    assert_eq!(code(&out), 0);
    // header + 3 λ × 2 δ × 3 kinds
    assert_eq!(stdout(&out).lines().count(), 1 + 18);
}

#[test]
fn point_mass_errors_row_equals_base_row() {
    let base = bsx(&["errors", "--lambda", "1", "--c", "auto", "--delta", "1", "--kind", "minorant"]);
    let atom = bsx(&["errors", "--measure", "atoms:1:1", "--delta", "1", "--kind", "minorant"]);
    assert_eq!(code(&base), 0);
    assert_eq!(code(&atom), 0);
    let val = |out: &Output| -> f64 {
        stdout(out).lines().nth(1).unwrap().split(',').nth(4).unwrap().parse().unwrap()
    };
    assert!((val(&base) - val(&atom)).abs() < 1e-12);
}

#[test]
fn majorant_for_log_measure_exits_3() {
    let out = bsx(&["errors", "--measure", "power:alpha=1", "--kind", "majorant"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn verify_sign_full_grid_exits_0() {
    let out = bsx(&[
        "verify", "sign", "--lambda", "1", "--c", "auto", "--delta", "1", "--grid",
        "-20:20:100000",
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["version"], "bsx-cert/1");
    assert_eq!(v["claim"], "SignTwoSided");
    assert_eq!(v["passed"], true);
    assert!(v["worst_margin"].as_f64().unwrap() >= -1e-9);
}

#[test]
fn verify_nodes_with_derivatives_exits_0() {
    let out = bsx(&[
        "verify", "nodes", "--kind", "L", "--lambda", "2", "--c", "auto", "--delta", "1",
        "--range", "1:20", "--derivatives",
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn verify_type_exits_0_and_wrong_order_fails() {
    let ok = bsx(&[
        "verify", "type", "--kind", "K", "--lambda", "1", "--c", "auto", "--delta", "1",
        "--k", "1", "--ymax", "20",
    ]);
    assert_eq!(code(&ok), 0);
    // expecting type 2π from the type-π function must fail the certificate
    let bad = bsx(&[
        "verify", "type", "--kind", "K", "--lambda", "1", "--c", "auto", "--delta", "1",
        "--k", "2", "--ymax", "20",
    ]);
    assert_eq!(code(&bad), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&bad)).unwrap();
    assert_eq!(v["passed"], false);
}

#[test]
fn verify_identities() {
    for name in ["ev1", "ev2", "poisson"] {
        let out = bsx(&["verify", "identity", "--name", name, "--lambda", "1"]);
        assert_eq!(code(&out), 0, "{name}");
    }
    assert_eq!(code(&bsx(&["verify", "identity", "--name", "nope"])), 2);
}

#[test]
fn certificate_file_output() {
    let dir = std::env::temp_dir().join("bsx_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cert.json");
    let out = bsx(&[
        "verify", "sign", "--lambda", "1", "--c", "auto", "--delta", "1", "--grid",
        "-5:5:501", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let body = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["version"], "bsx-cert/1");
}

#[test]
fn csv_and_jsonl_payloads_are_identical() {
    let args_common = [
        "eval", "--kind", "L", "--lambda", "1", "--c", "auto", "--delta", "1", "--grid",
        "-3:3:25",
    ];
    let jsonl = bsx(&[&args_common[..], &["--format", "jsonl"]].concat());
    let csv = bsx(&[&args_common[..], &["--format", "csv"]].concat());
    // compare the digit strings themselves so the check is exact
    let jl: Vec<Vec<String>> = stdout(&jsonl)
        .lines()
        .map(|l| {
            l.trim_matches(|c| c == '{' || c == '}')
                .split(',')
                .map(|field| field.split_once(':').unwrap().1.to_string())
                .collect()
        })
        .collect();
    let cs: Vec<Vec<String>> = stdout(&csv)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|s| s.to_string()).collect())
        .collect();
    assert_eq!(jl, cs);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "verify", "sign", "--lambda", "0.5", "--c", "auto", "--delta", "2", "--grid",
        "-10:10:2001:chebyshev",
    ];
    let a = bsx(&args);
    let b = bsx(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(out_bytes(&a), out_bytes(&b));
}

fn out_bytes(o: &Output) -> &[u8] {
    &o.stdout
}

#[test]
fn tol_env_override_is_accepted() {
    let out = bsx_env(
        &["eval", "--kind", "K", "--lambda", "1", "--c", "auto", "--delta", "1", "--grid",
          "0:2:5"],
        "BSX_TOL",
        "1e-9",
    );
    assert_eq!(code(&out), 0);
    let bad = bsx_env(
        &["eval", "--kind", "K", "--lambda", "1", "--c", "auto", "--delta", "1", "--grid",
          "0:2:5"],
        "BSX_TOL",
        "not-a-number",
    );
    assert_eq!(code(&bad), 2);
}

#[test]
fn odd_kinds_evaluate() {
    let out = bsx(&[
        "eval", "--kind", "Modd", "--lambda", "1", "--c", "auto", "--delta", "1", "--grid",
        "-4:4:33",
    ]);
    assert_eq!(code(&out), 0);
    for line in stdout(&out).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        // odd majorant dominates the odd target
        assert!(v["margin"].as_f64().unwrap() >= -1e-9, "{line}");
    }
}
