//! End-to-end command tests: generated fixtures flow through every
//! subcommand, reports parse as JSON with the expected fields, and the
//! documented edge cases exit with the documented codes.

use std::path::Path;
use std::process::Command;

use serde_json::Value;

use mpiso::fileio;
use mpiso::Matrix;

fn run(args: &[&str]) -> (i32, Vec<u8>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_mpiso"))
        .args(args)
        .output()
        .expect("CLI binary runs");
    (out.status.code().unwrap_or(-1), out.stdout, out.stderr)
}

fn json(stdout: &[u8]) -> Value {
    serde_json::from_slice(stdout).expect("report is valid JSON")
}

fn field<'v>(v: &'v Value, path: &[&str]) -> &'v Value {
    let mut cur = v;
    for key in path {
        cur = cur.get(key).unwrap_or_else(|| panic!("report field {path:?} exists"));
    }
    cur
}

fn parse_float(v: &Value) -> f64 {
    match v {
        Value::String(s) => s.parse().expect("scientific-notation float"),
        Value::Number(n) => n.as_f64().unwrap(),
        other => panic!("expected a float field, got {other}"),
    }
}

struct Fixtures {
    _dir: tempfile::TempDir,
    groupoid2: String,
    cyclic2: String,
    cyclic3: String,
    nonunital: String,
    zero: String,
}

fn fixtures() -> Fixtures {
    let dir = tempfile::tempdir().unwrap();
    let make = |name: &str, args: &[&str]| {
        let path = dir.path().join(name).to_str().unwrap().to_string();
        let mut full: Vec<&str> = args.to_vec();
        full.push("--out");
        full.push(&path);
        let (code, _, stderr) = run(&full);
        assert_eq!(code, 0, "generate {name}: {}", String::from_utf8_lossy(&stderr));
        path
    };
    let groupoid2 = make("groupoid2.json", &["generate", "pair-groupoid", "2"]);
    let cyclic2 = make("cyclic2.json", &["generate", "cyclic", "2"]);
    let cyclic3 = make("cyclic3.json", &["generate", "cyclic", "3"]);
    let nonunital = make("nonunital.json", &["generate", "nonunital"]);

    let zero = dir.path().join("zero.json");
    fileio::write_canonical_file(&zero, &fileio::operator2_value(2, &Matrix::zeros(4, 4)))
        .unwrap();
    let zero = zero.to_str().unwrap().to_string();

    Fixtures { _dir: dir, groupoid2, cyclic2, cyclic3, nonunital, zero }
}

#[test]
fn check_mpi_reports_residuals_and_verdict() {
    let fx = fixtures();
    let (code, out, _) = run(&["check-mpi", &fx.groupoid2]);
    assert_eq!(code, 0);
    let rep = json(&out);
    assert_eq!(field(&rep, &["verdict"]), "MPI");
    assert!(parse_float(field(&rep, &["axiom_residuals", "pentagon"])) <= 1e-10);
    assert!(parse_float(field(&rep, &["axiom_residuals", "partial_isometry"])) <= 1e-10);
    assert_eq!(field(&rep, &["command"]), "check-mpi");
    assert!(field(&rep, &["input_digest"]).as_str().unwrap().len() == 64);
}

#[test]
fn classify_reports_the_structure_ladder() {
    let fx = fixtures();

    let (code, out, _) = run(&["classify", &fx.groupoid2]);
    assert_eq!(code, 0);
    let rep = json(&out);
    assert_eq!(field(&rep, &["verdict"]), "regular-unital-MPI/C*-WHA");
    assert_eq!(field(&rep, &["classification", "is_unital"]), &Value::Bool(true));
    assert_eq!(field(&rep, &["classification", "is_regular"]), &Value::Bool(true));
    assert_eq!(field(&rep, &["classification", "is_unitary"]), &Value::Bool(false));
    assert_eq!(field(&rep, &["classification", "dimensions", "rank_v"]), 8);

    let (code, out, _) = run(&["classify", &fx.cyclic3]);
    assert_eq!(code, 0);
    let rep = json(&out);
    assert_eq!(field(&rep, &["verdict"]), "C*-Hopf (multiplicative unitary)");
    assert_eq!(field(&rep, &["classification", "dimensions", "dim_a"]), 3);

    // The zero operator satisfies every defining equation vacuously but has
    // no units to offer.
    let (code, out, _) = run(&["classify", &fx.zero]);
    assert_eq!(code, 0);
    let rep = json(&out);
    assert_eq!(field(&rep, &["verdict"]), "MPI, non-unital");
}

#[test]
fn classify_accepts_presentations_and_text_format() {
    let dir = tempfile::tempdir().unwrap();
    let pres = dir.path().join("groupoid2-pres.json").to_str().unwrap().to_string();
    let (code, _, _) =
        run(&["generate", "pair-groupoid", "2", "--out", &pres, "--presentation"]);
    assert_eq!(code, 0);

    let (code, out, _) = run(&["classify", &pres]);
    assert_eq!(code, 0, "presentation input classifies");
    assert_eq!(field(&json(&out), &["verdict"]), "regular-unital-MPI/C*-WHA");

    let (code, out, _) = run(&["classify", &pres, "--format", "text"]);
    assert_eq!(code, 0);
    let text = String::from_utf8(out).unwrap();
    assert!(text.lines().any(|l| l == "verdict: regular-unital-MPI/C*-WHA"), "{text}");
}

#[test]
fn build_u_restricts_to_the_support_unitary() {
    let fx = fixtures();
    let dir = tempfile::tempdir().unwrap();
    let u_path = dir.path().join("u.json").to_str().unwrap().to_string();

    // Pair groupoid n=2: V has rank 8, so U is the 8×8 unitary between the
    // projected subspaces.
    let (code, out, _) = run(&["build-u", &fx.groupoid2, "--out", &u_path]);
    assert_eq!(code, 0);
    let rep = json(&out);
    assert_eq!(field(&rep, &["rank"]), 8);
    assert!(parse_float(field(&rep, &["unitarity"])) <= 1e-10);
    assert!(parse_float(field(&rep, &["pentagon", "residual"])) <= 1e-9);
    let written = std::fs::read(&u_path).unwrap();
    let u_file: Value = serde_json::from_slice(&written).unwrap();
    assert_eq!(field(&u_file, &["kind"]), "matrix");
    assert_eq!(field(&u_file, &["dim"]), 8);

    // Cyclic group: E = Ê = I, so U is V itself.
    let u2_path = dir.path().join("u2.json").to_str().unwrap().to_string();
    let (code, out, _) = run(&["build-u", &fx.cyclic2, "--out", &u2_path]);
    assert_eq!(code, 0);
    assert_eq!(field(&json(&out), &["rank"]), 4);
    let u2: Value = serde_json::from_slice(&std::fs::read(&u2_path).unwrap()).unwrap();
    let v2: Value = serde_json::from_slice(&std::fs::read(&fx.cyclic2).unwrap()).unwrap();
    let read_entries = |v: &Value| -> Vec<(f64, f64)> {
        field(v, &["data"])
            .as_array()
            .unwrap()
            .iter()
            .map(|pair| {
                let p = pair.as_array().unwrap();
                (parse_float(&p[0]), parse_float(&p[1]))
            })
            .collect()
    };
    let (ue, ve) = (read_entries(&u2), read_entries(&v2));
    assert_eq!(ue.len(), ve.len());
    for ((ur, ui), (vr, vi)) in ue.iter().zip(ve.iter()) {
        assert!((ur - vr).abs() <= 1e-12 && (ui - vi).abs() <= 1e-12, "U = V for a group");
    }

    // Below C*-WHA the conversion is refused with a well-formed failure.
    let (code, out, _) = run(&["build-u", &fx.nonunital]);
    assert_eq!(code, 1);
    let msg = field(&json(&out), &["error"]).as_str().unwrap().to_string();
    assert!(msg.contains("not a C*-WHA"), "{msg}");
}

#[test]
fn roundtrip_rebuilds_the_operator() {
    let fx = fixtures();

    for path in [&fx.groupoid2, &fx.cyclic3] {
        let (code, out, _) = run(&["roundtrip", path]);
        assert_eq!(code, 0);
        let rep = json(&out);
        assert!(parse_float(field(&rep, &["reconstruction_residual"])) <= 1e-12);
        assert_eq!(field(&rep, &["reclassification_identical"]), &Value::Bool(true));
    }

    // Gated below C*-WHA: well-formed input, exit 1.
    for path in [&fx.nonunital, &fx.zero] {
        let (code, out, _) = run(&["roundtrip", path]);
        assert_eq!(code, 1, "roundtrip refuses sub-C*-WHA input");
        assert!(field(&json(&out), &["error"]).as_str().unwrap().contains("not a C*-WHA"));
    }
}

#[test]
fn reports_echo_tolerance_and_respect_the_flag() {
    let fx = fixtures();
    let (code, out, _) = run(&["check-mpi", &fx.cyclic2, "--tol", "1e-6"]);
    assert_eq!(code, 0);
    let rep = json(&out);
    let tol = parse_float(field(&rep, &["tolerance"]));
    assert!((tol - 1e-6).abs() < 1e-18);

    // An absurdly tight tolerance turns round-off into a failing check.
    let (code, out, _) = run(&["check-mpi", &fx.groupoid2, "--tol", "1e-16"]);
    let rep = json(&out);
    if code == 0 {
        // The assembled operator is exact for this fixture; the verdict
        // stands even at 1e-16.
        assert_eq!(field(&rep, &["verdict"]), "MPI");
    } else {
        assert_eq!(code, 1);
        assert!(field(&rep, &["verdict"]).as_str().unwrap().starts_with("not-MPI"));
    }
}

#[test]
fn generate_reports_describe_the_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("cyclic5.json").to_str().unwrap().to_string();
    let (code, out, _) = run(&["generate", "cyclic", "5", "--out", &out_path]);
    assert_eq!(code, 0);
    let rep = json(&out);
    assert_eq!(field(&rep, &["kind"]), "cyclic");
    assert_eq!(field(&rep, &["n"]), 5);
    assert_eq!(field(&rep, &["dim_h"]), 5);
    assert_eq!(field(&rep, &["rank_v"]), 25);
    assert_eq!(field(&rep, &["written"]).as_str().unwrap(), &out_path);
    let digest = field(&rep, &["input_digest"]).as_str().unwrap();
    let bytes = std::fs::read(&out_path).unwrap();
    assert_eq!(digest, fileio::digest_hex(&bytes), "report digest matches the written file");

    // Usage errors in the generate family.
    let missing_n = run(&["generate", "cyclic", "--out", &out_path]);
    assert_eq!(missing_n.0, 2);
    let extra_n = run(&["generate", "nonunital", "3", "--out", &out_path]);
    assert_eq!(extra_n.0, 2);
}

#[test]
fn timings_stay_out_of_the_report_bytes() {
    let fx = fixtures();
    let (_, out, stderr) = run(&["classify", &fx.cyclic2]);
    assert!(!String::from_utf8_lossy(&out).contains("elapsed_ms"));
    assert!(String::from_utf8_lossy(&stderr).contains("elapsed_ms"));
    assert!(out.ends_with(b"\n"), "report ends with a newline");
}

#[test]
fn malformed_inputs_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();

    let truncated = p("truncated.json");
    std::fs::write(&truncated, b"{\"kind\": \"operator2\", \"dim\": 2").unwrap();
    assert_eq!(run(&["check-mpi", &truncated]).0, 2);

    let wrong_len = p("wrong-len.json");
    std::fs::write(
        &wrong_len,
        br#"{"kind":"operator2","dim":2,"data":[[1,0],[0,0]]}"#,
    )
    .unwrap();
    assert_eq!(run(&["check-mpi", &wrong_len]).0, 2);

    let bad_kind = p("bad-kind.json");
    std::fs::write(&bad_kind, br#"{"kind":"mystery","dim":2,"data":[]}"#).unwrap();
    assert_eq!(run(&["classify", &bad_kind]).0, 2);

    let not_square = p("not-square.json");
    fileio::write_canonical_file(
        Path::new(&not_square),
        &fileio::operator2_value(2, &Matrix::zeros(4, 4)),
    )
    .unwrap();
    // Corrupt the dim field so the data length no longer matches.
    let text = std::fs::read_to_string(&not_square).unwrap().replace("\"dim\":2", "\"dim\":3");
    std::fs::write(&not_square, text).unwrap();
    assert_eq!(run(&["classify", &not_square]).0, 2);
}
