use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use qbein_core::qm2d::SpectrumResult;
use qbein_core::VerificationReport;

fn qbein(args: &[&str]) -> Output {
    qbein_env(args, None)
}

fn qbein_env(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qbein"));
    cmd.args(args).env_remove("QBEIN_THREADS");
    if let Some(t) = threads {
        cmd.env("QBEIN_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn report(out: &Output) -> VerificationReport {
    VerificationReport::from_json(&String::from_utf8_lossy(&out.stdout))
        .expect("stdout is a report")
}

#[test]
fn passing_checks_exit_zero() {
    for args in [
        &["rmat", "ybe", "--n", "3"][..],
        &[
            "rmat",
            "ybe",
            "--family",
            "D",
            "--n",
            "4",
            "--twisted",
            "true",
        ],
        &["rmat", "push", "--n", "2", "--r", "1/3"],
        &["twist", "coords", "--n", "3"],
        &["twist", "bein", "--series", "C", "--n", "4"],
        &["alg", "check", "--suite", "tilde-dilatations", "--n", "3"],
        &["jackson", "check", "--n", "2", "--trials", "50"],
        &[
            "qm",
            "relations",
            "--boundary",
            "open",
            "--L",
            "5",
            "--M",
            "1",
        ],
        &["qm", "cylinder", "--r", "0.9"],
    ] {
        let out = qbein(args);
        assert_eq!(
            code(&out),
            0,
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(report(&out).pass);
    }
}

#[test]
fn printed_bcd_form_fails_verification() {
    let out = qbein(&[
        "rmat", "ybe", "--family", "C", "--n", "4", "--form", "printed",
    ]);
    assert_eq!(code(&out), 1);
    assert!(!report(&out).pass);
}

#[test]
fn massless_trace_reports_infrared_divergence() {
    let out = qbein(&["qm", "trace", "--mu2", "0"]);
    assert_eq!(code(&out), 1);
    let rep = report(&out);
    assert!(rep.entry("InfraredDivergence").is_some_and(|e| !e.pass));
}

#[test]
fn massive_trace_matches_closed_form() {
    let out = qbein(&["qm", "trace", "--mu2", "0.01", "--M", "10"]);
    assert_eq!(code(&out), 0);
    let rep = report(&out);
    assert_eq!(rep.entries.len(), 22);
    assert!(rep.config.contains_key("tail_bound"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["qm", "warp"][..],
        &["qm", "trace", "--bogus"],
        &["qm", "relations", "--r", "2"],
        &["qm", "relations", "--r", "abc"],
        &["qm", "relations", "--boundary", "twisted"],
        &["qm", "spectrum", "--boundary", "open"],
        &["rmat", "ybe", "--family", "B", "--n", "4"],
        &["jackson", "diff", "--func", "{\"1,2\": \"x\"}"],
        &["jackson", "int", "--n", "2"],
        &["alg", "check", "--suite", "nonsense"],
    ] {
        let out = qbein(args);
        assert_eq!(code(&out), 2, "{args:?}");
    }
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    assert_eq!(code(&qbein_env(&["qm", "cylinder"], Some("zero"))), 2);
    assert_eq!(code(&qbein_env(&["qm", "cylinder"], Some("0"))), 2);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["all", "--n", "2", "--r", "1/2"];
    let one = qbein_env(&args, Some("1"));
    let four = qbein_env(&args, Some("4"));
    assert_eq!(code(&one), 0, "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, four.stdout);
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn config_sections_and_flags_layer() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.toml",
        "r = \"1/2\"\nL = 9\n[qm]\nL = 6\nM = 1\n[jackson]\nn = 3\n",
    );
    let rep = report(&qbein(&["--config", &cfg, "qm", "cylinder"]));
    assert_eq!(rep.config["L"], "6");
    let rep = report(&qbein(&["--config", &cfg, "qm", "cylinder", "--L", "7"]));
    assert_eq!(rep.config["L"], "7");
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("key.toml", "colour = 1\n"),
        ("section.toml", "[physics]\nr = \"1/2\"\n"),
        ("nested.toml", "[qm]\nwarp = 3\n"),
        ("float.toml", "r = 0.5\n"),
        ("syntax.toml", "r = \n"),
    ] {
        let cfg = write(dir.path(), name, text);
        assert_eq!(
            code(&qbein(&["--config", &cfg, "qm", "cylinder"])),
            2,
            "{name}"
        );
    }
    assert_eq!(
        code(&qbein(&["--config", "/nonexistent.toml", "qm", "cylinder"])),
        2
    );
}

#[test]
fn out_writes_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("spectrum.csv");
    let path = out.to_string_lossy().into_owned();
    let run = qbein(&[
        "qm", "spectrum", "--L", "6", "--M", "2", "--r", "1/3", "--out", &path,
    ]);
    assert_eq!(code(&run), 0);
    assert!(run.stdout.is_empty());
    let s = SpectrumResult::from_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(s.rows.len(), 6 * 5);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{path}.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["pass"], true);
    assert_eq!(manifest["format"], "csv");
    assert_eq!(manifest["settings"]["r"], "1/3");
}

#[test]
fn jackson_diff_agrees_with_monomial_action() {
    let out = qbein(&[
        "jackson",
        "diff",
        "--n",
        "2",
        "--func",
        "{\"2,1\": \"3/2\", \"0,3\": \"-1\"}",
        "--axis",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect();
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| r.ends_with(",true")));

    let printed = qbein(&[
        "jackson",
        "diff",
        "--n",
        "1",
        "--func",
        "square",
        "--dir",
        "backward-printed",
    ]);
    assert!(String::from_utf8(printed.stdout)
        .unwrap()
        .contains(",false"));
}

#[test]
fn jackson_int_of_identity() {
    let out = qbein(&[
        "jackson",
        "int",
        "--func",
        "{\"1\": \"1\"}",
        "--r",
        "1/2",
        "--k",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // r^(-2K) / (1 + r)
    assert_eq!(v["exact"], "8/3");
}

#[test]
fn rmat_build_csv_lists_nonzero_entries() {
    let out = qbein(&["rmat", "build", "--n", "2", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("m,n,p,s,value"));
    assert_eq!(text.lines().count(), 6);
}

fn arg() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("qm".to_string()),
        Just("rmat".to_string()),
        Just("jackson".to_string()),
        Just("alg".to_string()),
        Just("twist".to_string()),
        Just("ybe".to_string()),
        Just("trace".to_string()),
        Just("relations".to_string()),
        Just("check".to_string()),
        Just("coords".to_string()),
        Just("--n".to_string()),
        Just("--r".to_string()),
        Just("--L".to_string()),
        Just("--M".to_string()),
        Just("--mu2".to_string()),
        Just("--suite".to_string()),
        Just("--boundary".to_string()),
        Just("--family".to_string()),
        Just("open".to_string()),
        Just("B".to_string()),
        "-?[0-9]{1,2}(/[0-9])?",
        "[a-z]{1,5}",
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Whatever the arguments, the binary never panics.
    #[test]
    fn exit_code_is_always_defined(args in prop::collection::vec(arg(), 0..6)) {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let c = code(&qbein(&args));
        prop_assert!([0, 1, 2].contains(&c), "{args:?} exited {c}");
    }
}
