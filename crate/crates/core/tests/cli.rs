use std::path::Path;
use std::process::Command;

use mmekit::algebra::{Polynomial, RationalMap};
use mmekit::cli::{parse_map_file, run, run_selftest, run_selftest_with};
use mmekit::families::chebyshev_polynomial;
use mmekit::Error;
use serde_json::Value;

/// Runs the CLI in-process; returns (exit code, stdout, stderr).
fn mmekit(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mmekit").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json_of(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("not JSON ({e}): {text}"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const Z2: &str = r#"{"cyclotomic_order":1,"num":[["0/1"],["0/1"],["1/1"]],"den":[["1/1"]]}"#;
const Z: &str = r#"{"cyclotomic_order":1,"num":[["0/1"],["1/1"]],"den":[["1/1"]]}"#;
const MINUS_Z: &str = r#"{"cyclotomic_order":1,"num":[["0/1"],["-1/1"]],"den":[["1/1"]]}"#;
const Z_PLUS_1: &str = r#"{"cyclotomic_order":1,"num":[["1/1"],["1/1"]],"den":[["1/1"]]}"#;

#[test]
fn parse_map_file_examples() {
    let dir = tempfile::tempdir().unwrap();
    let f = parse_map_file(write(dir.path(), "z2.json", Z2)).unwrap();
    assert_eq!(f, RationalMap::polynomial(Polynomial::from_ints(1, &[0, 0, 1])));

    let zero_den = r#"{"cyclotomic_order":1,"num":[["1/1"]],"den":[["0/1"],["0/1"]]}"#;
    assert!(matches!(
        parse_map_file(write(dir.path(), "zd.json", zero_den)),
        Err(Error::ZeroDenominator)
    ));

    // (z² − 1)/(z − 1) normalizes to z + 1, so writing it back changes the file
    let text = r#"{"cyclotomic_order":1,"num":[["-1/1"],["0/1"],["1/1"]],"den":[["-1/1"],["1/1"]]}"#;
    let f = parse_map_file(write(dir.path(), "nn.json", text)).unwrap();
    assert_eq!(f, RationalMap::polynomial(Polynomial::from_ints(1, &[1, 1])));
    assert_ne!(mmekit::algebra::mapfile::to_json(&f).trim(), text);

    let e = parse_map_file(write(dir.path(), "bad.json", "{\n  \"cyclotomic_order\": 1,\n  \"num\": [\n")).unwrap_err();
    assert!(matches!(e, Error::MalformedJson { line: 4, .. }), "{e:?}");

    let text = r#"{"cyclotomic_order":1,"num":[["0/1"],["x/2"]],"den":[["1/1"]]}"#;
    match parse_map_file(write(dir.path(), "coef.json", text)).unwrap_err() {
        Error::InvalidCoefficient { field, .. } => assert_eq!(field, "num[1][0]"),
        e => panic!("{e:?}"),
    }
    assert!(matches!(parse_map_file(dir.path().join("missing.json")), Err(Error::Io(_))));
}

#[test]
fn families_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t4.json");
    let (code, stdout, _) = mmekit(&["families", "map", "chebyshev", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let doc = json_of(&stdout);
    assert_eq!(doc["seed"], 0);
    assert_eq!(doc["precision"], 256);
    let t4 = parse_map_file(&out).unwrap();
    assert_eq!(t4, RationalMap::polynomial(chebyshev_polynomial(4)));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), mmekit::algebra::mapfile::to_json(&t4));

    let ritt = dir.path().join("ritt");
    let (code, _, _) = mmekit(&["families", "ritt", "5", "--out", ritt.to_str().unwrap()]);
    assert_eq!(code, 0);
    let paths: Vec<String> = ["a", "x", "y"].iter().map(|n| ritt.join(format!("{n}.json")).to_str().unwrap().to_string()).collect();
    let (code, stdout, _) = mmekit(&["verify", "--mode", "chain", &paths[0], &paths[1], &paths[2], "--json"]);
    assert_eq!(code, 0);
    assert_eq!(json_of(&stdout)["holds"], true);

    let (code, stdout, _) = mmekit(&["families", "quotient", "D8", "D2"]);
    assert_eq!(code, 0);
    assert_eq!(json_of(&stdout)["display"], RationalMap::polynomial(chebyshev_polynomial(4)).to_string());
}

#[test]
fn verify_modes_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let z2 = write(dir.path(), "z2.json", Z2);
    let z = write(dir.path(), "z.json", Z);
    let mz = write(dir.path(), "mz.json", MINUS_Z);
    let zp1 = write(dir.path(), "zp1.json", Z_PLUS_1);

    assert_eq!(mmekit(&["verify", "--mode", "chain", &z2, &z, &mz]).0, 0);
    assert_eq!(mmekit(&["verify", "--mode", "chain", &z2, &z, &zp1]).0, 1);

    let minus_z2 = write(dir.path(), "mz2.json", r#"{"cyclotomic_order":1,"num":[["0/1"],["0/1"],["-1/1"]],"den":[["1/1"]]}"#);
    let z3 = write(dir.path(), "z3.json", r#"{"cyclotomic_order":1,"num":[["0/1"],["0/1"],["0/1"],["1/1"]],"den":[["1/1"]]}"#);
    assert_eq!(mmekit(&["verify", "--mode", "system", &z2, &minus_z2]).0, 0);
    let (code, stdout, _) = mmekit(&["verify", "--mode", "system", &z2, &z3]);
    assert_eq!(code, 1);
    assert_eq!(json_of(&stdout)["failing_pair"], serde_json::json!([1, 2]));

    assert_eq!(mmekit(&["verify", "--mode", "lemma01", &z2, &minus_z2, "--lmax", "3"]).0, 0);
    assert_eq!(mmekit(&["verify", "--mode", "lemma01", &z2, &z3]).0, 2);

    let (code, stdout, _) = mmekit(&["verify", "--mode", "exponents", "4", "2", "16"]);
    assert_eq!(code, 0);
    assert_eq!(json_of(&stdout)["exponents"], serde_json::json!(["2", "4", "1"]));
    assert_eq!(mmekit(&["exponents", "2", "3"]).0, 1);
    assert_eq!(mmekit(&["exponents", "1", "3"]).0, 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(mmekit(&["verify", "--mode", "chain", "--bogus", "x"]).0, 2);
    assert_eq!(mmekit(&["nonsense"]).0, 2);
    assert_eq!(mmekit(&["measure", "--grid", "64by128", "f.json"]).0, 2);
    let (code, _, stderr) = mmekit(&["spectrum", "/nonexistent/map.json"]);
    assert_eq!(code, 2);
    assert!(json_of(&stderr)["error"].as_str().unwrap().contains("No such file"));
}

#[test]
fn numeric_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let quartic = write(
        dir.path(),
        "q.json",
        r#"{"cyclotomic_order":1,"num":[["2/1"],["-1/1"],["0/1"],["3/1"],["1/1"]],"den":[["-3/1"],["1/1"],["5/1"],["0/1"],["2/1"]]}"#,
    );
    let (code, _, stderr) = mmekit(&["curve", &quartic, "--galois", "--bound", "10"]);
    assert_eq!(code, 3);
    assert!(json_of(&stderr)["error"].as_str().unwrap().contains("10"));
    let (code, stdout, _) = mmekit(&["curve", &quartic, "--galois"]);
    assert_eq!(code, 0);
    assert_eq!(json_of(&stdout)["galois_closure_genus"], 13);
}

#[test]
fn spectrum_commands() {
    let dir = tempfile::tempdir().unwrap();
    let z2 = write(dir.path(), "z2.json", Z2);
    let (code, stdout, _) = mmekit(&["spectrum", &z2, "--s", "2", "--json"]);
    assert_eq!(code, 0);
    let doc = json_of(&stdout);
    assert_eq!(doc["total_multiplicity"], 5);

    // U∘V and V∘U for U = z², V = z + 1
    let uv = write(dir.path(), "uv.json", r#"{"cyclotomic_order":1,"num":[["1/1"],["2/1"],["1/1"]],"den":[["1/1"]]}"#);
    let vu = write(dir.path(), "vu.json", r#"{"cyclotomic_order":1,"num":[["1/1"],["0/1"],["1/1"]],"den":[["1/1"]]}"#);
    assert_eq!(mmekit(&["spectrum", &uv, "--compare", &vu, "--smax", "2"]).0, 0);
    let other = write(dir.path(), "o.json", r#"{"cyclotomic_order":1,"num":[["-1/1"],["0/1"],["1/1"]],"den":[["1/1"]]}"#);
    assert_eq!(mmekit(&["spectrum", &uv, "--compare", &other, "--smax", "1"]).0, 1);
}

#[test]
fn measure_commands() {
    let dir = tempfile::tempdir().unwrap();
    let z2 = write(dir.path(), "z2.json", Z2);
    let basilica = write(dir.path(), "b.json", r#"{"cyclotomic_order":1,"num":[["-1/1"],["0/1"],["1/1"]],"den":[["1/1"]]}"#);
    let out = |n: &str| dir.path().join(n).to_str().unwrap().to_string();

    for (seed, name) in [("0", "a.json"), ("1", "b1.json")] {
        let code = mmekit(&["measure", &z2, "--samples", "10000", "--seed", seed, "--out", &out(name)]).0;
        assert_eq!(code, 0);
    }
    assert_eq!(mmekit(&["measure", &basilica, "--samples", "10000", "--out", &out("c.json")]).0, 0);

    let (code, stdout, _) = mmekit(&["measure", "--compare", &out("a.json"), &out("b1.json")]);
    assert_eq!(code, 0, "{stdout}");
    assert!(json_of(&stdout)["distance"].as_f64().unwrap() < 0.15);
    let (code, stdout, _) = mmekit(&["measure", "--compare", &out("a.json"), &out("c.json"), "--threshold", "0.8"]);
    assert_eq!(code, 1);
    assert!(json_of(&stdout)["distance"].as_f64().unwrap() > 0.8);

    for fmt in ["csv", "png"] {
        let path = out(&format!("h.{fmt}"));
        assert_eq!(mmekit(&["measure", &z2, "--samples", "500", "--format", fmt, "--out", &path]).0, 0);
        assert!(std::fs::metadata(&path).unwrap().len() > 0);
    }
    assert_eq!(mmekit(&["measure", &z2, "--samples", "50", "--format", "png"]).0, 2);
    assert_eq!(mmekit(&["measure", "--samples", "50"]).0, 2);
}

#[test]
fn seeded_commands_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let quartic = write(
        dir.path(),
        "q.json",
        r#"{"cyclotomic_order":1,"num":[["2/1"],["-1/1"],["0/1"],["3/1"],["1/1"]],"den":[["-3/1"],["1/1"],["5/1"],["0/1"],["2/1"]]}"#,
    );
    let z2 = write(dir.path(), "z2.json", Z2);
    let commands: Vec<Vec<&str>> = vec![
        vec!["curve", &quartic, "--monodromy", "--galois", "--seed", "11"],
        vec!["spectrum", &quartic, "--s", "2"],
        vec!["measure", &z2, "--samples", "3000", "--seed", "5"],
        vec!["families", "ritt", "4", "--json"],
        vec!["selftest", "--json"],
    ];
    for args in commands {
        let (c1, a, _) = mmekit(&args);
        let (c2, b, _) = mmekit(&args);
        assert_eq!(c1, c2);
        assert_eq!(a, b, "{args:?}");
        let doc = json_of(&a);
        assert!(doc.get("seed").is_some() && doc.get("precision").is_some(), "{args:?}");
    }
}

#[test]
fn selftest_passes_and_matches_schema() {
    let (code, stdout, _) = mmekit(&["selftest", "--json"]);
    assert_eq!(code, 0, "{stdout}");
    let report = json_of(&stdout);
    let schema = json_of(include_str!("../schemas/selftest.schema.json"));
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&report).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
    assert!(!validator.is_valid(&serde_json::json!({"pass": true})));
}

#[test]
fn broken_chebyshev_fails_the_ritt_check() {
    let broken = |k: usize| RationalMap::polynomial(chebyshev_polynomial(k - 1));
    let report = run_selftest_with(&broken, 256, 0);
    assert!(!report.pass);
    assert_eq!(report.first_failure, Some("ritt-identity"));
    assert!(run_selftest(256, 0).pass);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_mmekit");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code().unwrap();
    assert_eq!(status(&["selftest", "--json"]), 0);
    assert_eq!(status(&["exponents", "2", "3"]), 1);
    assert_eq!(status(&["--unknown-flag"]), 2);
    let out = Command::new(bin).args(["exponents", "4", "8", "--json"]).output().unwrap();
    let doc = json_of(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(doc["common_value"], "64");
}
