use std::process::{Command, Output};

fn solharm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_solharm")).args(args).output().expect("spawn solharm")
}

fn solharm_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_solharm"))
        .args(args)
        .env("SOLHARM_THREADS", threads)
        .output()
        .expect("spawn solharm")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verify_default_passes_with_json_report() {
    let out = solharm(&["verify", "--a", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["passed"], true);
    assert_eq!(v["identity"]["passed"], true);
    assert!(v["residuals"]["analytic"]["max_rel"].as_f64().unwrap() <= 1e-9);
    assert!(v["residuals"]["finite_difference"]["max_rel"].as_f64().unwrap() <= 1e-5);
    assert!(v["lift_max"].as_f64().unwrap() - v["lift_min"].as_f64().unwrap() >= 0.1);
}

#[test]
fn verify_general_a() {
    let out = solharm(&["verify", "--a", "1.5", "--h", "5e-4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["a"], 1.5);
}

#[test]
fn verify_rejects_negative_a() {
    let out = solharm(&["verify", "--a", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(">= 0"), "{err}");
}

#[test]
fn verify_rejects_bad_grid_and_step() {
    for args in [
        ["verify", "--grid", "-1:1:1,-1:1:3,-1:1:3"],
        ["verify", "--grid", "0:1:3"],
        ["verify", "--h", "0"],
        ["verify", "--h", "-1e-3"],
    ] {
        let out = solharm(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn verify_csv_and_text() {
    let out = solharm(&["verify", "--grid", "-1:1:3,-1:1:3,-1:1:3", "--samples", "50", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,z,u,scale,analytic_residual,fd_residual"));
    assert_eq!(lines.count(), 27);
    // the base point row has an empty analytic residual
    assert!(text.lines().any(|l| l.starts_with("0,0,0,1,") && l.contains(",,")));

    let out = solharm(&["verify", "--grid", "-1:1:3,-1:1:3,-1:1:3", "--samples", "50", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.ends_with("verify: PASS\n"), "{text}");
}

#[test]
fn eigenfunction_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.csv");
    let out = solharm(&["eigenfunction", "--rmax", "10", "--points", "1001", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("max oracle deviation"));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1002);
    assert_eq!(lines[0], "r,v,dv,oracle,deviation");
    assert!(lines[1].starts_with("0,1,0,"), "{}", lines[1]);
    let max_dev = lines[1..]
        .iter()
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!(max_dev <= 1e-8, "{max_dev}");
    assert!(lines.last().unwrap().starts_with("10,"));
}

#[test]
fn eigenfunction_rejects_bad_range() {
    assert_eq!(solharm(&["eigenfunction", "--rmax", "-1"]).status.code(), Some(2));
    assert_eq!(solharm(&["eigenfunction", "--points", "1"]).status.code(), Some(2));
}

#[test]
fn bm_is_byte_identical_across_runs_and_threads() {
    let args = ["bm", "--paths", "2000", "--seed", "7", "--T", "10"];
    let a = solharm_env(&args, "1");
    let b = solharm_env(&args, "3");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["paths"], 2000);
    assert!(v["martingale"].is_null());
    let f = v["transience"]["escape_fraction"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&f));
}

#[test]
fn bm_with_martingale_report() {
    let out = solharm(&[
        "bm", "--paths", "10", "--T", "1", "--martingale", "--rho", "1",
        "--martingale-paths", "400", "--martingale-dt", "1e-3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = &json(&out)["martingale"];
    assert_eq!(m["paths"], 400);
    assert_eq!(m["rho"], 1.0);
    assert!(m["std_error"].as_f64().unwrap() > 0.0);
}

#[test]
fn bm_path_dump() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("paths.csv");
    let out = solharm(&[
        "bm", "--paths", "3", "--T", "1", "--dt", "0.01", "--dump-paths", dump.to_str().unwrap(),
        "--dump-stride", "10", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().next(), Some("t,inside_unit_fraction,inside_unit_se"));
    let text = std::fs::read_to_string(&dump).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "path_id,t,x,y,z");
    assert_eq!(lines[1], "0,0,0,0,0");
    assert_eq!(lines.len(), 1 + 3 * 11);
}

#[test]
fn bm_rejects_invalid_config() {
    for args in [
        vec!["bm", "--dt", "0"],
        vec!["bm", "--T", "0.0001", "--dt", "0.001"],
        vec!["bm", "--paths", "0"],
        vec!["bm", "--a", "-0.5"],
        vec!["bm", "--T", "5", "--checkpoints", "10"],
        vec!["bm", "--paths", "1", "--T", "0.01", "--martingale", "--rho", "-1"],
    ] {
        assert_eq!(solharm(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = solharm_env(&["eigenfunction", "--points", "3"], "zero");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(solharm(&["verify", "--bogus"]).status.code(), Some(2));
}
