use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smoothsum")).args(args).output().expect("binary runs")
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn roots_of_square_mod_343() {
    let o = run(&["roots", "--h", "x^2", "--p", "7", "--m", "3", "--method", "both"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["count"], 7);
    assert_eq!(v["agree"], true);
    assert_eq!(v["schema"], 1);
    assert!(v["build"].as_str().is_some_and(|s| !s.is_empty()));
}

#[test]
fn malformed_expression_exits_2_with_position() {
    let o = run(&["eval", "--f", "x^^2", "--chi", "q=7;random;seed=1"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "Syntax");
    assert!(err["position"].is_u64());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["eval", "--chi", "q=8;principal"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "--q", "35", "--chi", "q=33;random-primitive;seed=1"]).status.code(), Some(2));
    assert_eq!(run(&["vdc", "--q-split", "3,7", "--chi", "q=33;random-primitive;seed=1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--chi", "q=77;random;seed=1", "--limit-q", "50"]).status.code(), Some(2));
}

#[test]
fn eval_paths_agree() {
    let base = ["eval", "--f", "(x^2+1)/(x-3)", "--g", "x^3/(x+2)", "--chi", "q=1125;random-primitive;seed=3", "--interval", "-7", "500"];
    let a = json_out(&run(&base));
    let mut direct = base.to_vec();
    direct.push("--direct");
    let b = json_out(&run(&direct));
    assert_eq!(a["n_terms"], 500);
    assert!((a["abs"].as_f64().unwrap() - b["abs"].as_f64().unwrap()).abs() < 1e-8);
}

#[test]
fn bound_report_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = run(&["bound", "--q", "33263", "--delta", "1/3", "--epsilon", "0.1", "--f", "x", "--g", "0", "--chi", "q=33263;random-primitive;seed=9", "--json", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["ok"], true);
    assert!(v["abs_mean"].as_f64().unwrap() <= v["certified"].as_f64().unwrap());
    assert!(v["trace"].as_array().is_some_and(|t| !t.is_empty()));
}

#[test]
fn postnikov_checks_pass() {
    let o = run(&["postnikov", "--chi", "q=625;random-primitive;seed=2", "--check-identity", "--bound", "--f", "x^2+1", "--g", "x^3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["ok"], true);
    assert_eq!(v["identity"]["violations"], 0);
}

#[test]
fn scan_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for (p, w) in [(&a, "1"), (&b, "4")] {
        let o = run(&["scan", "--family", "smooth", "--qmax", "1e5", "--delta", "1/3", "--trials", "2", "--seed", "7", "--csv", p.to_str().unwrap(), "--workers", w]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    let text = String::from_utf8(x).unwrap();
    assert_eq!(text.lines().next().unwrap(), "q,y,case,k,Q,N,abs_mean,certified,vacuous,eta_nominal");
    assert!(text.lines().count() > 10);
}

#[test]
fn verify_selected_suites() {
    let o = run(&["verify", "1,10", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json_out(&o);
    assert_eq!(v["suites"].as_array().unwrap().len(), 2);
    assert_eq!(v["failed"].as_array().unwrap().len(), 0);
    assert_eq!(o.stdout, run(&["verify", "1,10", "--seed", "42"]).stdout);
}

#[test]
fn lvalues_report() {
    let o = run(&["lvalues", "--chi", "q=29791;random-primitive;seed=4", "--cutoffs", "100,5000"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    let rows = v["character_sum_bounds"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!(r["abs_mean"].as_f64().unwrap() <= r["certified"].as_f64().unwrap() + 1e-9);
    }
}
