//! End-to-end CLI tests: exit-code contract, determinism, no partial files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_otcoh"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn analyze_cubic_succeeds_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let spec = fixture("cubic.json");
    let out = run_in(dir.path(), &["analyze", spec.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let files: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(files.len(), 1);
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&files[0]).unwrap()).unwrap();
    assert_eq!(report["classes"].as_array().unwrap().len(), 7);
    assert_eq!(
        report["hodge_tables"][0]["dims"],
        serde_json::json!([[1, 1, 0], [0, 0, 0], [0, 1, 1]])
    );
    assert!(report["verification"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"].as_bool().unwrap()));
}

#[test]
fn analyze_output_is_byte_identical_across_runs() {
    let spec = fixture("otiman.json");
    let mut bytes = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let out_path = dir.path().join("report.json");
        let out = run_in(
            dir.path(),
            &[
                "analyze",
                spec.to_str().unwrap(),
                "--out",
                out_path.to_str().unwrap(),
            ],
        );
        assert_eq!(code(&out), 0);
        bytes.push(std::fs::read(&out_path).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn malformed_spec_exits_2_with_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["analyze", fixture("malformed.json").to_str().unwrap()],
    );
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed spec"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn nonunimodular_spec_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["analyze", fixture("nonunimodular.json").to_str().unwrap()],
    );
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unimodularity"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn oversized_tolerance_exits_3_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "analyze",
            fixture("cubic.json").to_str().unwrap(),
            "--tol",
            "0.05",
        ],
    );
    assert_eq!(code(&out), 3);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("near-coincident"), "stderr: {err}");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn hodge_command_matches_worked_examples() {
    let dir = tempfile::tempdir().unwrap();
    let spec = fixture("cubic.json");
    let spec = spec.to_str().unwrap();

    let cases = [
        (("sigma(1)", "1", "0"), (1u64, true)),
        (("sigma(1)", "0", "0"), (0, false)),
        (("1", "2", "2"), (1, true)),
    ];
    for ((bundle, p, q), (dim, nonzero)) in cases {
        let out = run_in(
            dir.path(),
            &[
                "hodge", spec, "--bundle", bundle, "--p", p, "--q", q, "--format", "json",
            ],
        );
        assert_eq!(code(&out), 0);
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["dimension"].as_u64().unwrap(), dim, "case {bundle} {p} {q}");
        assert_eq!(v["nonzero"].as_bool().unwrap(), nonzero);
    }

    // witness listing for sigma(1) at (1,0)
    let out = run_in(
        dir.path(),
        &[
            "hodge", spec, "--bundle", "sigma(1)", "--p", "1", "--q", "0", "--format", "json",
        ],
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["witnesses"], serde_json::json!(["I=1;K=;L="]));
    assert_eq!(v["lower_bound"].as_u64().unwrap(), 1);
}

#[test]
fn hodge_rejects_bad_bundle_spec() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "hodge",
            fixture("cubic.json").to_str().unwrap(),
            "--bundle",
            "sigma[1]",
            "--p",
            "0",
            "--q",
            "0",
        ],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn bundles_nonvanishing_lists_expected_classes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "bundles",
            fixture("cubic.json").to_str().unwrap(),
            "--nonvanishing",
            "0",
            "0",
            "--format",
            "json",
        ],
    );
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let arr = v.as_array().unwrap();
    // only the trivial class has sections
    assert_eq!(arr.len(), 1);
    assert_eq!(arr[0]["class"], "trivial");
}

#[test]
fn verify_passes_on_both_models() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["cubic.json", "otiman.json", "t1_generic.json"] {
        let out = run_in(dir.path(), &["verify", fixture(name).to_str().unwrap()]);
        assert_eq!(
            code(&out),
            0,
            "{name}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert!(stdout.contains("hodge_binomial_identity"));
        assert!(!stdout.contains("FAIL"));
    }
}

#[test]
fn markdown_and_csv_formats_render() {
    let dir = tempfile::tempdir().unwrap();
    let spec = fixture("cubic.json");
    for (fmt, needle) in [("md", "# Cohomology report"), ("csv", "kind,class,i,j,value")] {
        let out_path = dir.path().join(format!("r.{fmt}"));
        let out = run_in(
            dir.path(),
            &[
                "analyze",
                spec.to_str().unwrap(),
                "--format",
                fmt,
                "--out",
                out_path.to_str().unwrap(),
            ],
        );
        assert_eq!(code(&out), 0);
        let content = std::fs::read_to_string(&out_path).unwrap();
        assert!(content.starts_with(needle), "{fmt}: {content:.80}");
    }
}
