use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_gibbs");

fn gibbs(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn scan_classifications() {
    let (code, out, _) = gibbs(&["scan", "--kernel", "bspline:2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["classification"], "none-exact");
    assert!(v["right_witness"].is_null());

    let (code, out, _) = gibbs(&["scan", "--kernel", "sinc"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["classification"], "strong");
    assert!(v["right_sum_value"].as_f64().unwrap() < 0.0);
}

#[test]
fn scan_csv_grid() {
    let (code, out, _) = gibbs(&[
        "scan", "--kernel", "bspline:2", "--format", "csv", "--scan-radius", "2",
        "--grid-step", "0.5",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "t,G\n-2,-1\n-1.5,-1\n-1,-1\n-0.5,0\n0,1\n0.5,1\n1,1\n1.5,1\n2,1\n");
}

#[test]
fn exit_codes() {
    let (code, _, err) = gibbs(&["scan", "--kernel", "gaussian-cardinal:1"]);
    assert_eq!(code, 2);
    assert!(err.contains("defect"));
    assert_eq!(gibbs(&["scan", "--kernel", "unknown"]).0, 1);
    assert_eq!(gibbs(&["scan", "--kernel", "sinc", "--grid-step", "-1"]).0, 1);
    assert_eq!(gibbs(&["cardinal", "--generator", "invmq:8"]).0, 3);
    assert_eq!(gibbs(&["converge", "--kernel", "sinc", "--signal", "cosine", "--mode", "continuity"]).0, 2);
}

#[test]
fn cardinal_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let coeffs = dir.path().join("c.csv");
    let diag = dir.path().join("d.json");
    let (code, out, _) = gibbs(&[
        "cardinal",
        "--generator",
        "bspline:4",
        "--output",
        coeffs.to_str().unwrap(),
        "--diagnostics",
        diag.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&coeffs).unwrap();
    assert!(text.starts_with("n,c_n\n"));
    let c0: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("0,"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((c0 - 3f64.sqrt()).abs() < 1e-8);
    let d: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&diag).unwrap()).unwrap();
    let mut keys: Vec<_> = d.as_object().unwrap().keys().cloned().collect();
    keys.sort();
    assert_eq!(keys, ["interpolation_defect", "pou_defect", "symbol_min"]);

    let (code, out, _) = gibbs(&["cardinal", "--generator", "invmq:1", "--format", "json"]);
    assert_eq!(code, 0);
    let d: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(d["symbol_min"].as_f64().unwrap() > 0.0);

    let (code, out, _) = gibbs(&["cardinal", "--generator", "bspline:2"]);
    assert_eq!(code, 0);
    assert!(out.lines().skip(1).all(|l| l == "0,1" || l.ends_with(",0")));
}

#[test]
fn converge_outputs() {
    let (code, out, _) = gibbs(&["converge", "--kernel", "bspline:2", "--signal", "sign"]);
    assert_eq!(code, 0);
    assert_eq!(out, "N,sup_error\n4,0\n16,0\n64,0\n256,0\n");
    let (code, out, _) = gibbs(&[
        "converge", "--kernel", "bspline:4", "--signal", "cosine", "--mode", "continuity",
        "--W", "2,8",
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("W,abs_error\n2,0.0391335854492"));
}

#[test]
fn sweep_rows() {
    let (code, out, _) = gibbs(&["sweep", "--family", "bspline:2"]);
    assert_eq!(code, 0);
    assert_eq!(
        out.lines().nth(1).unwrap(),
        "2,0.5,0.13661977236758138,none-exact,1"
    );
    let (code, out, _) = gibbs(&["sweep", "--family", "invmq:8"]);
    assert_eq!(code, 0);
    assert!(out.contains("error:symbol-not-invertible"));
}

#[test]
fn gibbs_constant_values() {
    let value = |xi: &str| -> f64 { gibbs(&["gibbs-constant", "--xi", xi]).1.trim().parse().unwrap() };
    assert!((value("1") - 1.178980).abs() < 5e-6);
    assert_eq!(value("0"), 0.0);
    assert!(value("2") < value("1"));
    assert!((value("-1") + value("1")).abs() < 1e-15);
}
