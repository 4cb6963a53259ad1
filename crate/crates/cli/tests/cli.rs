use std::process::{Command, Output};

fn rmt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmt")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn cue_half_circle_gap() {
    let o = rmt(&["gap", "--ensemble", "cue", "--n", "1", "--interval", "0,pi", "--genfn"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("xi,genfn"));
    let v: f64 = lines.next().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - 0.5).abs() < 1e-9);
    // the decimal end point is short of π by 2.7e-6
    let o = rmt(&["gap", "--ensemble", "cue", "--n", "1", "--interval", "0,3.14159", "--genfn"]);
    let v: f64 = stdout(&o).lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - (1.0 - 3.14159 / (2.0 * std::f64::consts::PI))).abs() < 1e-12);
}

#[test]
fn counts_sum_to_one() {
    let o = rmt(&["gap", "--ensemble", "gue", "--n", "4", "--interval", "-1,0.5", "--counts"]);
    assert_eq!(o.status.code(), Some(0));
    let total: f64 = stdout(&o).lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    assert_eq!(rmt(&["verify", "I-2.31a"]).status.code(), Some(0));
    assert_eq!(rmt(&["verify", "NC-exact"]).status.code(), Some(1));
    assert_eq!(rmt(&["verify", "I-none"]).status.code(), Some(2));
    assert_eq!(rmt(&["verify", "I-2.31a", "--param", "bogus=1"]).status.code(), Some(2));
    assert_eq!(rmt(&["gap", "--ensemble", "cue"]).status.code(), Some(2));
    assert_eq!(rmt(&["gap", "--ensemble", "cue", "--n", "2", "--interval", "1,0"]).status.code(), Some(2));
    assert_eq!(rmt(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_output_is_reproducible() {
    let dir = std::env::temp_dir();
    let run = |name: &str| {
        let path = dir.join(name);
        let o = rmt(&["verify", "I-2.0c", "--seed", "42", "--samples", "3000", "--json", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        (stdout(&o), std::fs::read(&path).unwrap())
    };
    let (csv1, json1) = run("rmt_cli_repro_a.json");
    let (csv2, json2) = run("rmt_cli_repro_b.json");
    assert_eq!(csv1, csv2);
    assert_eq!(json1, json2);
    assert!(csv1.starts_with("identity_id,method,pass,abs_err,rel_err,min_p_value,seed,runtime\n"));
    let v: serde_json::Value = serde_json::from_slice(&json1).unwrap();
    let r = &v.as_array().unwrap()[0];
    let mut keys: Vec<&str> = r.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    keys.sort();
    assert_eq!(keys, ["abs_err", "identity_id", "lhs", "method", "parameters", "pass", "rel_err", "rhs", "runtime", "seed"]);
    assert!(r["runtime"].is_null());
    assert_eq!(r["seed"], 42);
    assert_eq!(r["method"], "statistical");
}

#[test]
fn tabulations_have_stable_headers() {
    let o = rmt(&["sff", "--ensemble", "lue", "--n", "2", "--alpha", "0.5", "--kmax", "2", "--steps", "2"]);
    let out = stdout(&o);
    assert!(out.starts_with("k,S_exact,S_oracle,abs_err\n"));
    assert_eq!(out.lines().count(), 4);
    let o = rmt(&["sample", "--ensemble", "o+", "--n", "5", "--count", "3", "--seed", "9"]);
    let out = stdout(&o);
    assert!(out.starts_with("sample,label,value\n"));
    assert_eq!(out.lines().count(), 1 + 3 * 2);
    assert_eq!(out, stdout(&rmt(&["sample", "--ensemble", "o+", "--n", "5", "--count", "3", "--seed", "9"])));
}
