use std::process::Command;

use serde_json::Value;

fn ugl(args: &[&str]) -> (Value, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_ugl")).args(args).output().expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(stdout.trim()).unwrap_or_else(|e| panic!("bad json {stdout:?}: {e}"));
    (v, out.status.code().unwrap())
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("ugl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn normalize_desugars_diagonal_unit() {
    let (v, code) = ugl(&["--d", "2", "normalize", "e[1,1]"]);
    assert_eq!(code, 0);
    assert_eq!(v["text"], "1/2*h[1] + 1/2*c");
    assert_eq!(v["element"]["terms"].as_array().unwrap().len(), 2);
}

#[test]
fn moment_via_both_routes() {
    let (v, code) = ugl(&["--d", "2", "moment", "h[1]^2", "--n", "5", "--via", "both"]);
    assert_eq!(code, 0);
    assert_eq!(v, serde_json::json!({"tensor": "5", "viaP": "5", "equal": true}));
}

#[test]
fn member_p1_family() {
    let base = ["--d", "3", "--p", "1", "member", "apply_P(Tr(E^2))", "--family", "p1", "--kmax", "3", "--bound", "2"];
    let (v, code) = ugl(&[&base[..], &["--expect", "in-span"]].concat());
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "in_span");
    assert_eq!(v["certificate_verified"], true);
    let (_, code) = ugl(&[&base[..], &["--expect", "not-in-span"]].concat());
    assert_eq!(code, 3);
}

#[test]
fn member_from_generator_file_in_comm_mode() {
    let path = tmp("gens.json");
    std::fs::write(&path, r#"["Tr(B[1])", "Tr(B[2])", "Tr(B)", "Tr(B[1]^2)", "Tr(B[2]^2)", "Tr(B^2)"]"#).unwrap();
    let p = path.to_str().unwrap();
    let (v, code) =
        ugl(&["--d", "3", "--p", "2", "--mode", "comm", "member", "W(1,3)", "--gens", p, "--bound", "4", "--expect", "not-in-span"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["verdict"], "not_in_span_up_to_bound");
    let (v, code) = ugl(&["--d", "3", "--mode", "comm", "member", "b[1,1]^2", "--gens", p, "--bound", "2", "--expect", "in-span"]);
    assert_eq!(code, 0, "{v}");
}

#[test]
fn error_codes() {
    let (v, code) = ugl(&["--d", "2", "normalize", "e[1,3]"]);
    assert_eq!((code, v["error"]["code"].as_str()), (2, Some("index_out_of_range")));
    let (v, code) = ugl(&["--d", "2", "normalize", "e[1,2] +"]);
    assert_eq!((code, v["error"]["code"].as_str()), (2, Some("parse_error")));
    let (v, code) = ugl(&["--d", "2", "--mode", "comm", "normalize", "h[1]"]);
    assert_eq!((code, v["error"]["code"].as_str()), (2, Some("invalid_argument")));
    let (v, code) = ugl(&["frobnicate"]);
    assert_eq!((code, v["error"]["code"].as_str()), (2, Some("usage")));
    let (_, code) = ugl(&["--d", "3", "mc-run", "--times", "1,0.5"]);
    assert_eq!(code, 2);
}

#[test]
fn walk_clt_second_moment() {
    let (v, code) = ugl(&["--d", "3", "walk-clt", "--word", "1,1;1,1", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["scaled"], serde_json::json!(["2/3", "0"]));
    assert_eq!(v["equal"], true);
}

#[test]
fn mc_export_round_trip_and_determinism() {
    let bin = tmp("ens.bin");
    let b = bin.to_str().unwrap();
    let (first, code) = ugl(&["--d", "3", "mc-run", "--times", "0.5,1", "--paths", "50", "--seed", "9", "--out", b]);
    assert_eq!(code, 0);
    let (again, _) = ugl(&["--d", "3", "mc-run", "--times", "0.5,1", "--paths", "50", "--seed", "9"]);
    assert_eq!(first["checksum"], again["checksum"]);
    let (spec, code) = ugl(&["spectra", "--sizes", "1,2,3", "--input", b]);
    assert_eq!(code, 0);
    assert_eq!(spec["n_paths"], 50);
    assert_eq!(spec["pass_rate"], 1.0);

    let csv = tmp("ens.csv");
    let (_, code) = ugl(&["--d", "2", "mc-run", "--times", "1", "--paths", "3", "--out", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("path,t,stat,value"));
    assert_eq!(text.lines().count(), 1 + 3 * 4);
}

#[test]
fn factor_word_and_closure() {
    let (v, code) = ugl(&["--d", "5", "--p", "3", "factor-word", "--word", "1,2,2,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["factors"].as_array().unwrap().len(), 2);
    assert!(v["validation"]["max_rel_error"].as_f64().unwrap() < 1e-9);
    let (v, code) = ugl(&["--d", "3", "--p", "1", "ito-closure", "--bound", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["all_in_span"], true);
}

#[test]
fn markov_diag_reports_bins() {
    let (v, code) =
        ugl(&["--d", "2", "markov-diag", "--times", "0.5,1,1.5", "--sizes", "2", "--paths", "400", "--bootstrap", "20"]);
    assert_eq!(code, 0);
    let bins = v["bins"].as_array().unwrap();
    assert_eq!(bins.iter().map(|b| b["count"].as_u64().unwrap()).sum::<u64>(), 400);
}

#[test]
fn out_writes_report() {
    let path = tmp("invariant.json");
    let (v, code) = ugl(&["--d", "3", "--p", "1", "invariant", "W(1,2,2,1)", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["invariant"], true);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written, v);
}
