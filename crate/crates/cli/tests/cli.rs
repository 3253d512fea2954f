//! End-to-end tests of the binary: exit codes, determinism, error JSON.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thetarecon"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_recover_verify_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("input.json");
    let result = dir.path().join("result.json");

    let out = run(&[
        "generate",
        "--genus",
        "3",
        "--branch",
        "1,2,3,4,7,8,5,6",
        "--seed",
        "0",
        "--out",
        path_str(&input),
    ]);
    assert!(out.status.success(), "{out:?}");

    let out = run(&[
        "recover",
        "--in",
        path_str(&input),
        "--out",
        path_str(&result),
        "--seed",
        "0",
    ]);
    assert!(out.status.success(), "{out:?}");

    let out = run(&[
        "verify",
        "--in",
        path_str(&input),
        "--result",
        path_str(&result),
    ]);
    assert!(out.status.success(), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("witness vanishing: pass"), "{stdout}");
    assert!(stdout.contains("stored diagnostics: match"), "{stdout}");

    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&result).unwrap()).unwrap();
    assert_eq!(doc["genus"], 3);
    assert_eq!(doc["quadrics"].as_array().unwrap().len(), 6);
    for q in doc["quadrics"].as_array().unwrap() {
        assert_eq!(q["sign"], -1);
    }
    assert_eq!(doc["diagnostics"]["all_vanish"], true);
}

#[test]
fn full_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out_path in [&a, &b] {
        let out = run(&[
            "full",
            "--genus",
            "3",
            "--seed",
            "11",
            "--out",
            path_str(out_path),
        ]);
        assert!(out.status.success(), "{out:?}");
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b);
}

#[test]
fn env_seed_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let out = bin()
        .env("THETARECON_SEED", "7")
        .args(["full", "--genus", "3", "--out", path_str(&a)])
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let out = run(&["full", "--genus", "3", "--seed", "7", "--out", path_str(&b)]);
    assert!(out.status.success(), "{out:?}");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn malformed_input_exits_2_with_json_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    std::fs::write(
        &input,
        r#"{"genus": 3, "field": "rational", "pairs": [{"id": 0, "L": ["1", "2"], "Lp": ["3", "4", "5"]}]}"#,
    )
    .unwrap();
    let result = dir.path().join("out.json");
    let out = run(&[
        "recover",
        "--in",
        path_str(&input),
        "--out",
        path_str(&result),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_slice(&out.stderr).expect("structured error on stderr");
    assert_eq!(err["error"], "MalformedInput");
}

#[test]
fn bad_rational_exits_2_as_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    std::fs::write(
        &input,
        r#"{"genus": 3, "field": "rational", "pairs": [{"id": 0, "L": ["1/0", "2", "3"], "Lp": ["3", "4", "5"]}]}"#,
    )
    .unwrap();
    let out = run(&[
        "recover",
        "--in",
        path_str(&input),
        "--out",
        path_str(&dir.path().join("out.json")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "ParseError");
}

#[test]
fn missing_file_exits_1() {
    let out = run(&[
        "recover",
        "--in",
        "/nonexistent/input.json",
        "--out",
        "/tmp/never.json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "Io");
}

#[test]
fn unwritable_output_exits_1() {
    let out = run(&[
        "generate",
        "--genus",
        "3",
        "--seed",
        "1",
        "--out",
        "/nonexistent/dir/out.json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "Io");
}

#[test]
fn float_backend_full_run() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("f.json");
    let out = run(&[
        "full",
        "--genus",
        "3",
        "--seed",
        "3",
        "--backend",
        "float",
        "--tol",
        "1e-8",
        "--out",
        path_str(&out_path),
    ]);
    assert!(out.status.success(), "{out:?}");
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc["diagnostics"]["all_vanish"], true);
}

#[test]
fn tampered_result_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("input.json");
    let result = dir.path().join("result.json");
    assert!(run(&[
        "generate", "--genus", "3", "--seed", "2", "--out", path_str(&input)
    ])
    .status
    .success());
    assert!(run(&[
        "recover",
        "--in",
        path_str(&input),
        "--out",
        path_str(&result),
    ])
    .status
    .success());

    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&result).unwrap()).unwrap();
    doc["quadrics"][0]["matrix_upper"][0] = serde_json::Value::String("9999".into());
    std::fs::write(&result, serde_json::to_string(&doc).unwrap()).unwrap();

    let out = run(&[
        "verify",
        "--in",
        path_str(&input),
        "--result",
        path_str(&result),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
