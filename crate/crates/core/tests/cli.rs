use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn twd(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twd"))
        .current_dir(dir)
        .env_remove("TWD_THREADS")
        .args(args)
        .output()
        .expect("spawn twd")
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn net(dir: &Path) {
    let o = twd(dir, &["gen-net", "--dim", "2", "--lambda", "0.1", "--mu-bar", "0.8", "--seed", "3", "--out", "net.txt"]);
    assert!(json(&o)["n"].as_u64().unwrap() > 50);
}

const NET: [&str; 6] = ["--landmarks", "net.txt", "--lambda", "0.1", "--mu-bar", "0.8"];

#[test]
fn algo1_then_verify_and_plot() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    net(d);
    let mut a = vec!["algo1"];
    a.extend(NET);
    a.extend(["--epsilon", "0.0004", "--practical", "--seed", "1", "--out-points", "p.txt", "--out-complex", "k.txt"]);
    let rep = json(&twd(d, &a));
    assert_eq!(rep["terminated"], true);
    assert_eq!(rep["practical_mode"], true);

    let v = json(&twd(d, &["verify", "--points", "p.txt", "--complex", "k.txt", "--epsilon", "0.0004"]));
    for key in ["equals_delaunay", "good_links", "witness_in_delaunay", "identity_from_protection", "conversions"] {
        assert_eq!(v[key]["pass"], true, "{key}");
    }
    assert_eq!(v["euler_characteristic"], 0);
    assert!(v["quality"]["min_theta"].as_f64().unwrap() > 0.0);

    let svg = twd(d, &["plot", "--points", "p.txt", "--complex", "k.txt"]);
    assert!(svg.status.success());
    let s = String::from_utf8(svg.stdout).unwrap();
    assert!(s.starts_with("<svg") && s.contains("<line"));

    // Same flags, same files.
    let first = std::fs::read(d.join("k.txt")).unwrap();
    let last = a.len() - 1;
    a[last] = "k2.txt";
    json(&twd(d, &a));
    assert_eq!(first, std::fs::read(d.join("k2.txt")).unwrap());
}

#[test]
fn witness_and_grid_commands() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    net(d);
    let mut a = vec!["witness"];
    a.extend(NET);
    a.extend(["--grid-level", "11", "--out-complex", "w.txt"]);
    let r = json(&twd(d, &a));
    assert_eq!(r["simplices_by_dim"].as_array().unwrap().len(), 3);
    assert!(d.join("w.txt").exists());

    let g = json(&twd(d, &["gen-grid", "--dim", "2", "--grid-level", "4", "--out", "g.txt"]));
    assert_eq!(g["points"], 256.0);
    let body = std::fs::read_to_string(d.join("g.txt")).unwrap();
    assert_eq!(body.lines().count(), 257);
}

#[test]
fn algo2_reports_delta_star() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    net(d);
    let mut a = vec!["algo2"];
    a.extend(NET);
    a.extend(["--grid-level", "19", "--delta", "0.004", "--theta0", "0.2", "--rho", "0.01", "--practical", "--seed", "2"]);
    a.extend(["--report", "r.json"]);
    let o = twd(d, &a);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    assert_eq!(r["terminated"], true);
    assert!(r["delta_star"].as_f64().unwrap() > 0.0);
}

#[test]
fn params_keys_are_fixed() {
    let t = tempfile::tempdir().unwrap();
    let v = json(&twd(t.path(), &["params", "--dim", "2", "--lambda", "0.08", "--mu-bar", "0.8", "--epsilon", "0.0003"]));
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
    let want = [
        "d", "lambda", "mu_bar", "rho", "epsilon", "lambda_prime", "mu_bar_prime", "I", "K", "Gamma", "logJ", "alpha",
        "delta", "theta_0", "delta_star", "n0", "feasible_witness", "feasible_rdc",
    ];
    let mut sorted_want = want.to_vec();
    sorted_want.sort();
    let mut sorted_keys = keys.clone();
    sorted_keys.sort();
    assert_eq!(sorted_keys, sorted_want);
    assert_eq!(v["feasible_witness"], false);
}

#[test]
fn ingest_then_plot_rejects_3d() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    std::fs::write(d.join("r.txt"), "0 0\n10 0\n0 10\n5 5\n").unwrap();
    let v = json(&twd(d, &["ingest", "--input", "r.txt", "--margin", "0.25", "--out", "i.txt"]));
    assert!((v["scale"].as_f64().unwrap() - 0.05).abs() < 1e-15);
    let o = twd(d, &["ingest", "--input", "r.txt", "--margin", "0.25", "--out", "i.txt"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("periodic"));

    std::fs::write(d.join("p3.txt"), "3 1 10\n1 2 3\n").unwrap();
    std::fs::write(d.join("k3.txt"), "").unwrap();
    let o = twd(d, &["plot", "--points", "p3.txt", "--complex", "k3.txt"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    net(d);
    assert_eq!(twd(d, &["algo1", "--bogus"]).status.code(), Some(1));
    assert_eq!(twd(d, &["algo1", "--landmarks", "missing.txt", "--epsilon", "0.01"]).status.code(), Some(4));
    std::fs::write(d.join("bad.txt"), "2 1 20\n1\n").unwrap();
    assert_eq!(twd(d, &["verify", "--points", "bad.txt", "--complex", "bad.txt"]).status.code(), Some(4));

    let mut a = vec!["algo1"];
    a.extend(NET);
    a.extend(["--epsilon", "0.0004"]);
    assert_eq!(twd(d, &a).status.code(), Some(2), "theory mode at desk scale is infeasible");

    let mut a = vec!["algo1"];
    a.extend(NET);
    a.extend(["--epsilon", "0.02", "--practical", "--max-rounds", "2", "--out-complex", "k.txt"]);
    assert_eq!(twd(d, &a).status.code(), Some(3));
    assert!(d.join("k.txt").exists(), "outputs are written before reporting non-termination");

    let o = Command::new(env!("CARGO_BIN_EXE_twd"))
        .current_dir(d)
        .env("TWD_THREADS", "zero")
        .args(["params", "--dim", "2", "--lambda", "0.1", "--mu-bar", "0.8", "--epsilon", "0.001"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
