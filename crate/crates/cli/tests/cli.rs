use std::process::{Command, Output};

use serde_json::Value;

fn krein(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krein")).args(args).env_remove("KREIN_CLIFFORD_SEED").output().unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = krein(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}: {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), v)
}

fn signs(row: &Value) -> [i64; 5] {
    [
        row["j"]["eps"].as_i64().unwrap(),
        row["j"]["eps_dprime"].as_i64().unwrap(),
        row["charge"]["eps_tilde"].as_i64().unwrap(),
        row["j"]["kappa"].as_i64().unwrap(),
        row["charge"]["kappa_tilde"].as_i64().unwrap(),
    ]
}

#[test]
fn ko_table_antilorentz() {
    let (code, v) = json(&["ko-table", "--case", "antilorentz", "--n", "2,4,6,8"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "ok");
    let rows = v["payload"]["rows"].as_array().unwrap();
    let expected = [[1, 1, 1, -1, 1], [1, -1, -1, -1, 1], [-1, 1, -1, -1, 1], [-1, -1, 1, -1, 1]];
    let dims = [0, 6, 4, 2];
    for ((row, want), dim) in rows.iter().zip(expected).zip(dims) {
        assert_eq!(signs(row), want);
        assert_eq!(row["ko_dim"], dim);
    }
}

#[test]
fn ko_table_single_columns() {
    let (_, v) = json(&["ko-table", "--case", "euclidean", "--n", "4"]);
    assert_eq!(v["payload"]["rows"][0]["j"]["eps"], -1);
    let (_, v) = json(&["ko-table", "--case", "lorentz", "--n", "2"]);
    assert_eq!(v["payload"]["rows"][0]["charge"]["kappa_tilde"], 1);
}

#[test]
fn odd_dimension_is_an_error() {
    let out = krein(&["ko-table", "--case", "euclidean", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("even"));
}

#[test]
fn cone_verdicts() {
    for (v, component) in [("1,0,0,0", "future"), ("0,1,0,0", "none"), ("-1,0.5,0,0", "past")] {
        let (code, out) = json(&["cone", "--p", "1", "--q", "3", "--v", v]);
        assert_eq!(code, 0);
        assert_eq!(out["payload"]["component"], component, "{v}");
        assert_eq!(out["payload"]["inertia"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn garling_reports() {
    let (_, v) = json(&["garling", "--p", "2", "--q", "0", "--b", "c"]);
    assert_eq!(v["payload"]["classification"], "positive_definite");
    let (_, v) = json(&["garling", "--p", "1", "--q", "1", "--b", "c"]);
    assert_eq!(v["payload"]["classification"], "neutral");
    assert_eq!(v["payload"]["inertia"], serde_json::json!([2, 2, 0]));
    let (code, v) = json(&["garling", "--p", "1", "--q", "3", "--b", "e_1"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["classification"], "positive_definite");
}

#[test]
fn wick_demo_residuals() {
    let (code, v) = json(&["wick", "--p", "4", "--q", "0", "--sites", "4", "--to", "antilorentz"]);
    assert_eq!(code, 0);
    let r = &v["payload"]["residuals"];
    for key in ["selfadjoint", "anticommute", "direct_compare"] {
        assert!(r[key].as_f64().unwrap() <= 1e-12, "{key}");
    }
    assert!(r["roundtrip"].as_f64().unwrap() <= 1e-13);
    assert_eq!(v["payload"]["target"], serde_json::json!([1, 3]));
}

#[test]
fn wick_default_target_and_pairing() {
    let (code, v) = json(&["wick", "--p", "2", "--q", "0", "--sites", "16"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["target"], serde_json::json!([1, 1]));
    assert!(v["payload"]["spectrum_pairing_residual"].as_f64().unwrap() < 1e-10);
    let (_, v) = json(&["wick", "--p", "1", "--q", "1", "--sites", "16"]);
    assert_eq!(v["payload"]["target"], serde_json::json!([2, 0]));
}

#[test]
fn wick_rejects_tiny_lattice() {
    let out = krein(&["wick", "--p", "2", "--q", "0", "--sites", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csnorm_and_ideal() {
    let (code, v) = json(&["csnorm", "--p", "2", "--q", "0", "--a", "1.0*e_1 + 2.0*e_2"]);
    assert_eq!(code, 0);
    assert!((v["payload"]["norm"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-12);
    assert!(v["payload"]["cstar_identity_residual"].as_f64().unwrap() <= 1e-10);

    let out = krein(&["csnorm", "--p", "1", "--q", "1", "--b", "c", "--a", "e_1"]);
    assert_eq!(out.status.code(), Some(2));

    let (code, v) = json(&["ideal", "--p", "1", "--q", "1", "--e", "0.5 + 0.5*e_12"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["isotropic"], true);
    let (code, v) = json(&["ideal", "--p", "1", "--q", "3", "--b", "e_1"]);
    assert_eq!(code, 0);
    assert!((v["payload"]["tau_f"][0].as_f64().unwrap() - 0.25).abs() < 1e-10);
}

#[test]
fn verify_suite_ok_and_unknown_suite() {
    let (code, v) = json(&["verify", "--suite", "core"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["ok"], true);
    let out = krein(&["verify", "--suite", "everything"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    for args in [&["verify", "--suite", "ideals"][..], &["wick", "--p", "1", "--q", "3", "--sites", "4"], &["gammas", "--p", "3", "--q", "1"]] {
        assert_eq!(krein(args).stdout, krein(args).stdout, "{args:?}");
    }
}

#[test]
fn seed_comes_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_krein"))
        .args(["verify", "--suite", "ideals"])
        .env("KREIN_CLIFFORD_SEED", "7")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["payload"]["seed"], 7);
}

#[test]
fn text_format_renders() {
    let out = krein(&["ko-table", "--case", "euclidean", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("ko-table: ok"));
    assert_eq!(text.matches("match").count(), 4);
}
