use std::process::{Command, Output};

use serde_json::Value;

fn k2sym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k2sym")).args(args).output().expect("run k2sym")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = k2sym(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}: {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), v)
}

#[test]
fn compute_zmod4_is_order_two() {
    let (code, v) = json(&["compute", "--ring", "zmod:4", "--presentation", "ds"]);
    assert_eq!(code, 0);
    assert_eq!(v["group"], "Z/2");
    assert_eq!(v["trivial"], false);
}

#[test]
fn compute_prime_fields_trivial() {
    for p in ["fp:5", "fp:7"] {
        for pres in ["s", "ds"] {
            let (code, v) = json(&["compute", "--ring", p, "--presentation", pres]);
            assert_eq!(code, 0);
            assert_eq!(v["trivial"], true, "{p} {pres}");
        }
    }
}

#[test]
fn tame_examples() {
    let (_, v) = json(&["tame", "--ring", "q", "--t", "3", "--f", "3", "--g", "5"]);
    assert_eq!(v["residue"], "2");
    let (_, v) = json(&["tame", "--ring", "ratfunc:7:x@invert(x)", "--t", "x", "--f", "2*x", "--g", "3"]);
    assert_eq!(v["c"], "5");
    assert_eq!((v["nu_f"].as_i64(), v["nu_g"].as_i64()), (Some(1), Some(0)));
}

#[test]
fn rho_of_linear_unit() {
    let (code, v) = json(&["rho", "--ring", "ratfunc:7:x", "--t", "x", "--f", "1+3*x"]);
    assert_eq!(code, 0);
    assert!(v.to_string().contains("<3,x>"), "{v}");
}

#[test]
fn failing_stability_exits_one() {
    let (code, v) = json(&["stability", "--ring", "fp:5", "--k", "5"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "fail");
    assert!(!v["failures"].as_array().unwrap().is_empty());
}

#[test]
fn passing_check_exits_zero() {
    let (code, v) = json(&["verify", "skew", "--ring", "ratfunc:7:x", "--a", "1+x"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["status"], "pass");
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(k2sym(&["verify", "no-such-check"]).status.code(), Some(64));
    assert_eq!(k2sym(&["compute", "--ring", "banana", "--presentation", "s"]).status.code(), Some(64));
    assert_eq!(k2sym(&["tame", "--ring", "q", "--t", "3", "--f", "3+", "--g", "5"]).status.code(), Some(64));
    assert_eq!(k2sym(&[]).status.code(), Some(64));
}

#[test]
fn domain_errors_exit_65() {
    let out = k2sym(&["tame", "--ring", "q", "--t", "3", "--f", "0", "--g", "5"]);
    assert_eq!(out.status.code(), Some(65));
    assert!(!out.stderr.is_empty());
    let out = k2sym(&["rho", "--ring", "ratfunc:7:x", "--t", "x", "--f", "2+x"]);
    assert_eq!(out.status.code(), Some(65));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(k2sym(&["--help"]).status.code(), Some(0));
    assert_eq!(k2sym(&["--version"]).status.code(), Some(0));
}

#[test]
fn reports_are_deterministic() {
    let args = ["verify", "ses", "--ring", "ratfunc:7:x", "--t", "x", "--max-deg", "1", "--seed", "3", "--budget", "20"];
    let a = k2sym(&args);
    let b = k2sym(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let parallel = k2sym(&[&args[..], &["--jobs", "2"]].concat());
    assert_eq!(a.stdout, parallel.stdout);
}

#[test]
fn text_format() {
    let out = k2sym(&["--format", "text", "stability", "--ring", "fp:7", "--k", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("pass"), "{text}");
    assert!(serde_json::from_str::<Value>(&text).is_err());
}

#[test]
fn window_info_counts() {
    let (_, v) = json(&["window-info", "--ring", "q", "--height", "3", "--show", "0"]);
    assert_eq!(v["units"], 14);
    assert_eq!(v["elements"], 15);
}
