use std::process::Command;

use galsum::cli::{
    run, AnnihilatorPayload, DiscoverPayload, EisensteinPayload, GaussSumPayload, OutputRecord, SequencePayload,
    VerifyPayload, EXIT_CHECK_FAILED, EXIT_OK, EXIT_RESOURCE, EXIT_USAGE,
};
use galsum::harness::CriterionReport;
use galsum::numtheory::IrreducibilityVerdict;
use galsum::recurrence::Provenance;
use num_bigint::BigInt;
use serde::de::DeserializeOwned;
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("galsum").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn record<T: DeserializeOwned>(args: &[&str]) -> OutputRecord<T> {
    let (code, out, err) = call(args);
    assert_eq!(code, EXIT_OK, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

/// `Σ_x (-1)^{τ_{n,3}(x)}` by direct enumeration.
fn tau3_f2(n: usize) -> i64 {
    (0u32..1 << n)
        .map(|x| {
            let bit = |i: usize| (x >> i) & 1;
            let v: u32 = (0..n - 2).map(|i| bit(i) & bit(i + 1) & bit(i + 2)).sum();
            if v % 2 == 0 {
                1
            } else {
                -1
            }
        })
        .sum()
}

#[test]
fn expsum_tau3() {
    let rec: OutputRecord<SequencePayload> = record(&["expsum", "--field", "2", "--expr", "tau(3)", "--n", "3..6", "--method", "brute"]);
    assert_eq!(rec.schema_version, 1);
    let got: Vec<BigInt> = rec.payload.values.iter().map(|v| v.as_integer().unwrap()).collect();
    let want: Vec<BigInt> = (3..=6).map(|n| BigInt::from(tau3_f2(n))).collect();
    assert_eq!(got, want);
    assert_eq!(got[0], BigInt::from(8 - 2));
    assert_eq!(rec.payload.n_min, 3);
    assert_eq!(rec.payload.method, Provenance::Brute);
}

#[test]
fn expsum_methods_agree() {
    let args = |m: &'static str| ["expsum", "--field", "3", "--expr", "R(2,3)", "--n", "6..11", "--method", m, "--poly", "18,9,0,-9,-3,0,1"];
    let brute: OutputRecord<SequencePayload> = record(&args("brute"));
    let transfer: OutputRecord<SequencePayload> = record(&args("transfer"));
    let rec: OutputRecord<SequencePayload> = record(&args("recurrence"));
    assert_eq!(brute.payload.values, transfer.payload.values);
    assert_eq!(brute.payload.values, rec.payload.values);
}

#[test]
fn verify_rotation_f3() {
    let rec: OutputRecord<VerifyPayload> =
        record(&["verify", "--field", "3", "--expr", "R(2,3)", "--poly", "18,9,0,-9,-3,0,1", "--n-max", "12"]);
    assert!(rec.payload.satisfied);
    assert_eq!(rec.payload.n_range, (3, 12));
    let fam: OutputRecord<VerifyPayload> = record(&["verify", "--expr", "tau(3)", "--field", "2", "--family", "P_K", "--k", "3", "--n-max", "12"]);
    assert!(fam.payload.satisfied);
    assert_eq!(fam.payload.poly_text, "X^3 - 2X - 2");
}

#[test]
fn verify_failure_exits_one() {
    let (code, out, _) = call(&["verify", "--field", "2", "--expr", "tau(3)", "--poly", "-2,0,1", "--n-max", "12"]);
    assert_eq!(code, EXIT_CHECK_FAILED);
    let rec: OutputRecord<VerifyPayload> = serde_json::from_str(&out).unwrap();
    assert!(!rec.payload.satisfied);
    assert_eq!(rec.payload.first_failure, Some(3));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(call(&["expsum", "--field", "2", "--expr", "tau(3)", "--n", "3..2"]).0, EXIT_USAGE);
    assert_eq!(call(&["expsum", "--field", "6", "--expr", "tau(3)", "--n", "3..4"]).0, EXIT_USAGE);
    assert_eq!(call(&["expsum", "--field", "2", "--expr", "R(2,", "--n", "3..4"]).0, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(call(&["annihilator", "--field", "3", "--expr", "sigma(2) + R(2)"]).0, EXIT_USAGE);
    let (code, _, err) = call(&["expsum", "--field", "2", "--expr", "Q(2)", "--n", "3"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("position 0"), "{err}");
}

#[test]
fn resource_limits_exit_three() {
    assert_eq!(call(&["expsum", "--field", "3", "--expr", "tau(3)", "--n", "10", "--budget", "1000"]).0, EXIT_RESOURCE);
    assert_eq!(call(&["annihilator", "--field", "9", "--expr", "R(2,3)"]).0, EXIT_RESOURCE);
    assert_eq!(call(&["annihilator", "--field", "3", "--expr", "sigma(3)", "--degree-cap", "4"]).0, EXIT_RESOURCE);
}

#[test]
fn discover_and_annihilator() {
    let d: OutputRecord<DiscoverPayload> = record(&["discover", "--field", "2", "--expr", "tau(3)", "--max-order", "6"]);
    assert_eq!(d.payload.poly_text, "X^3 - 2X - 2");
    let a: OutputRecord<AnnihilatorPayload> = record(&["annihilator", "--expr", "R(2,3)", "--field", "3", "--degree-cap", "16", "--scope", "sequence"]);
    assert_eq!(a.payload.poly_text, "X^6 - 3X^4 - 9X^3 + 9X + 18");
    let m: OutputRecord<AnnihilatorPayload> = record(&["annihilator", "--expr", "sigma(3)", "--field", "3", "--dump"]);
    assert_eq!(m.payload.poly_text, "X^9 - 9X^8 + 36X^7 - 81X^6 + 108X^5 - 81X^4 + 81X^2 - 81X + 27");
    let dump = m.payload.system.unwrap();
    assert_eq!(dump.matrix.len(), 9);
    assert_eq!(dump.states[1], "beta=(1,0)");
}

#[test]
fn numtheory_commands() {
    let g: OutputRecord<GaussSumPayload> = record(&["numtheory", "gauss-sum", "--p", "5"]);
    assert!((g.payload.numeric[0] - 5f64.sqrt()).abs() < 1e-9 && g.payload.numeric[1].abs() < 1e-9);
    let e: OutputRecord<EisensteinPayload> = record(&["numtheory", "eisenstein", "--poly", "-4,0,1", "--p", "2"]);
    assert_eq!(e.payload.verdict, IrreducibilityVerdict::NotApplicable);
    let e: OutputRecord<EisensteinPayload> = record(&["numtheory", "eisenstein", "--poly", "-6,-3,0,1", "--p", "3"]);
    assert_eq!(e.payload.verdict, IrreducibilityVerdict::Irreducible);
    let (code, out, _) = call(&["numtheory", "eigen-check", "--p", "11"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["payload"]["predicted"].as_array().unwrap().len(), 6);
    assert_eq!(call(&["numtheory", "eigen-check", "--p", "4"]).0, EXIT_USAGE);
}

#[test]
fn conjecture_command() {
    let (code, out, _) = call(&["conjecture", "--which", "trapezoid", "--k", "3", "--field", "9", "--n-max", "8"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["payload"]["report"]["status"], "proved-case");
    assert_eq!(v["payload"]["conjectured"]["values"][0]["coeffs"][0], "153");
}

#[test]
fn accept_writes_report() {
    let dir = std::env::temp_dir().join(format!("galsum-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let (code, _, err) = call(&["accept", "--profile", "quick", "--only", "1,7", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let reports: Vec<CriterionReport> = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(reports.iter().map(|r| r.id).collect::<Vec<_>>(), vec![1, 7]);
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let keys: Vec<&String> = raw[0].as_object().unwrap().keys().collect();
    assert_eq!(keys, ["id", "status", "expected", "got", "millis"]);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn csv_and_pretty() {
    let (code, out, _) = call(&["expsum", "--field", "3^2", "--expr", "T(2,3)", "--n", "3..5", "--out", "csv"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "n,c0,c1\n3,153,0\n4,1377,0\n5,7209,0\n");
    let (code, out, _) = call(&["expsum", "--field", "2", "--expr", "tau(3)", "--n", "3..4", "--pretty"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("3  6") && out.contains("4  12"), "{out}");
    assert_eq!(call(&["verify", "--field", "2", "--expr", "tau(3)", "--poly", "-2,-2,0,1", "--n-max", "8", "--format", "csv"]).0, EXIT_USAGE);
}

#[test]
fn output_is_deterministic() {
    let args = ["expsum", "--field", "5", "--expr", "R(2,3) + e2*sigma(2)", "--n", "3..7"];
    let a = call(&args).1;
    let b = call(&args).1;
    assert_eq!(a, b);
    let mut one = args.to_vec();
    one.extend(["--workers", "1"]);
    let mut four = args.to_vec();
    four.extend(["--workers", "4"]);
    let p1: OutputRecord<SequencePayload> = record(&one);
    let p4: OutputRecord<SequencePayload> = record(&four);
    assert_eq!(serde_json::to_string(&p1.payload).unwrap(), serde_json::to_string(&p4.payload).unwrap());
}

#[test]
fn payloads_round_trip() {
    let (_, out, _) = call(&["expsum", "--field", "3", "--expr", "sigma(2)", "--n", "2..6"]);
    let rec: OutputRecord<SequencePayload> = serde_json::from_str(&out).unwrap();
    let again = serde_json::to_string_pretty(&rec).unwrap() + "\n";
    assert_eq!(again, out);
}

#[test]
fn bench_checks_equality() {
    let (code, out, _) = call(&["bench", "--expr", "R(2,3)", "--field", "3", "--n", "9"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["payload"]["equal"], true);
    assert!(v["timings"]["brute_ms"].is_number());
}

#[test]
fn binary_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_galsum"))
        .args(["expsum", "--field", "2", "--expr", "tau(3)", "--n", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let rec: OutputRecord<SequencePayload> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rec.payload.values[0].as_integer(), Some(BigInt::from(6)));
    let bad = Command::new(env!("CARGO_BIN_EXE_galsum")).args(["expsum", "--n", "3..2"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    let help = Command::new(env!("CARGO_BIN_EXE_galsum")).arg("--help").output().unwrap();
    assert!(help.status.success());
}
