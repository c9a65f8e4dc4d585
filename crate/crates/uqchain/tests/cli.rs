use std::process::Command;

use serde_json::Value;

fn uqchain(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_uqchain")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, stdout, stderr) = uqchain(args);
    assert_eq!(code, 0, "{stderr}");
    serde_json::from_str(&stdout).expect("valid JSON")
}

#[test]
fn verify_ybe_report_schema() {
    let v = json(&["verify", "--suite", "ybe", "--q", "1.2", "--mu", "0.3", "--samples", "4"]);
    assert_eq!(v["pass"], true);
    assert_eq!(v["metadata"]["suite"], "ybe");
    assert_eq!(v["metadata"]["tolerances"]["seed"], 7);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["informative"] == true));
    assert!(checks.iter().all(|c| c["residual"].is_number()));
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--suite", "reflection", "--q", "0.7+0.2i", "--mu", "-0.45", "--omega", "-1", "--samples", "3"];
    let (c1, a, _) = uqchain(&args);
    let (c2, b, _) = uqchain(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
}

#[test]
fn verify_tl_forces_the_tl_point() {
    let v = json(&["verify", "--suite", "tl", "--q", "1.4", "--mu", "0.3"]);
    assert_eq!(v["pass"], true);
    assert_eq!(v["metadata"]["mu"][0], -0.5);
    assert_eq!(v["metadata"]["tl_mode"], true);
}

#[test]
fn verify_rejects_degenerate_q() {
    let (code, _, err) = uqchain(&["verify", "--suite", "ybe", "--q", "1", "--mu", "0.3"]);
    assert_eq!(code, 2);
    assert!(err.contains("degenerate q"), "{err}");
}

#[test]
fn failing_check_exits_one() {
    // an absurdly strict tolerance makes floating-point residuals fail
    let (code, stdout, _) = uqchain(&["verify", "--suite", "algebra", "--identity-tol", "1e-300", "--format", "text"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("OVERALL FAIL"));
}

#[test]
fn build_b_matrix_file() {
    let dir = std::env::temp_dir().join(format!("uqchain-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("b.json");
    let (code, _, err) = uqchain(&["build", "--object", "b", "--q", "1.2", "--mu", "0.3", "--omega", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["dim"], 16);
    assert_eq!(v["sites"], 2);
    assert_eq!(v["format"], "dense-complex-rowmajor");
    assert_eq!(v["data"].as_array().unwrap().len(), 256);
    // |↑↓⟩⊗|↑↓⟩ is an eigenvector of b with eigenvalue qλ² = q^(1+2μ)
    assert!((v["data"][0][0].as_f64().unwrap() - 1.2f64.powf(1.6)).abs() < 1e-12);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn build_kplus_trivial_is_m() {
    let v = json(&["build", "--object", "kplus", "--family", "trivial"]);
    let d = v["data"].as_array().unwrap();
    let diag: Vec<f64> = (0..4).map(|i| d[5 * i][0].as_f64().unwrap()).collect();
    let q2 = 1.2f64 * 1.2;
    let want = [1.0, -1.0, -q2, q2];
    for (a, b) in diag.iter().zip(want) {
        assert!((a - b).abs() < 1e-12, "{diag:?}");
    }
}

#[test]
fn build_open_chain_dimension() {
    let v = json(&["build", "--object", "h-open", "--model", "ferm", "--sites", "3"]);
    assert_eq!(v["dim"], 64);
    assert_eq!(v["params"]["model"], "ferm");
}

#[test]
fn build_selector_errors() {
    assert_eq!(uqchain(&["build", "--object", "nothing"]).0, 2);
    assert_eq!(uqchain(&["build", "--object", "rcheck"]).0, 2);
    assert_eq!(uqchain(&["build", "--object", "casimir"]).0, 2);
    assert_eq!(uqchain(&["build", "--object", "kminus", "--family", "b", "--c", "-1"]).0, 2);
    assert_eq!(uqchain(&["build", "--object", "h-open", "--sites", "7"]).0, 2);
}

#[test]
fn build_rcheck_and_casimir() {
    let v = json(&["build", "--object", "rcheck", "--u", "0"]);
    let d = v["data"].as_array().unwrap();
    for i in 0..16 {
        for j in 0..16 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((d[16 * i + j][0].as_f64().unwrap() - want).abs() < 1e-12);
        }
    }
    let v = json(&["build", "--object", "casimir", "--p", "1", "--sites", "2"]);
    assert_eq!(v["dim"], 16);
}

#[test]
fn spectrum_two_sites_multiplicities() {
    let v = json(&["spectrum", "--model", "dist", "--sites", "2", "--q", "1.2", "--mu", "0.3"]);
    let mut mult: Vec<u64> = v["groups"].as_array().unwrap().iter().map(|g| g["multiplicity"].as_u64().unwrap()).collect();
    mult.sort();
    assert_eq!(mult, vec![4, 4, 8]);
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 16);
}

#[test]
fn spectrum_dist_and_ferm_agree() {
    let d = json(&["spectrum", "--model", "dist", "--sites", "3"]);
    let f = json(&["spectrum", "--model", "ferm", "--sites", "3"]);
    let a = d["eigenvalues"].as_array().unwrap();
    let b = f["eigenvalues"].as_array().unwrap();
    assert_eq!(a.len(), 64);
    for (x, y) in a.iter().zip(b) {
        let dr = x[0].as_f64().unwrap() - y[0].as_f64().unwrap();
        let di = x[1].as_f64().unwrap() - y[1].as_f64().unwrap();
        assert!(dr.hypot(di) <= 1e-8, "{x} vs {y}");
    }
}

#[test]
fn spectrum_size_limit() {
    let (code, _, err) = uqchain(&["spectrum", "--sites", "9"]);
    assert_eq!(code, 2);
    assert!(err.contains("size limit"), "{err}");
}

#[test]
fn text_format_and_help() {
    let (code, out, _) = uqchain(&["spectrum", "--model", "tl", "--sites", "3", "--q", "1.4", "--format", "text"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("model tl sites 3"));
    assert_eq!(uqchain(&["--help"]).0, 0);
    assert_eq!(uqchain(&[]).0, 2);
}
