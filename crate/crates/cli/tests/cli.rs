use std::process::{Command, Output};

use serde_json::Value;

fn nilcap(args: &[&str]) -> Output {
    run(args, None)
}

fn run(args: &[&str], format_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nilcap"));
    cmd.args(args).env_remove("NILCAP_FORMAT");
    if let Some(f) = format_env {
        cmd.env("NILCAP_FORMAT", f);
    }
    cmd.output().expect("spawn nilcap")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn dihedral_order_and_product() {
    let out = nilcap(&["order", "--class", "2", "--orders", "2,2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "|G| = 8");

    let out = nilcap(&["mul", "--class", "2", "--orders", "2,2", "--lhs", "x1", "--rhs", "x2", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["exponents"], serde_json::json!([1, 1, 0]));
}

#[test]
fn inverse_of_commutator() {
    let out = nilcap(&["comm", "--class", "2", "--orders", "3,3", "--lhs", "x1", "--rhs", "x2"]);
    assert_eq!(code(&out), 0);
    let c = stdout(&out);
    let out = nilcap(&["comm", "--class", "2", "--orders", "3,3", "--lhs", "x2", "--rhs", "x1"]);
    assert_ne!(stdout(&out), c);
    assert!(c.contains("[x2,x1]"), "{c}");
}

#[test]
fn json_is_byte_stable() {
    for args in [
        vec!["center", "--class", "3", "--orders", "3,9", "--format", "json"],
        vec!["basics", "--gens", "2", "--class", "4", "--format", "json"],
        vec!["capable", "nilprod", "--class", "2", "--prime", "3", "--alphas", "2,2", "--verify", "--format", "json"],
    ] {
        let a = nilcap(&args);
        let b = nilcap(&args);
        assert_eq!(code(&a), 0, "{args:?}");
        json(&a);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn format_from_environment() {
    let args = ["capable", "abelian", "--orders", "2,4"];
    let v = json(&run(&args, Some("json")));
    assert_eq!(v["decision"], "NotCapable");
    let text = run(&args, Some("text"));
    assert!(serde_json::from_slice::<Value>(&text.stdout).is_err());
    // The flag wins over the environment.
    let mut flagged = args.to_vec();
    flagged.extend(["--format", "text"]);
    assert!(serde_json::from_slice::<Value>(&run(&flagged, Some("json")).stdout).is_err());
    assert_eq!(code(&run(&args, Some("yaml"))), 2);
}

#[test]
fn capability_verdicts() {
    let v = json(&nilcap(&["capable", "abelian", "--orders", "2,2", "--verify", "--format", "json"]));
    assert_eq!(v["decision"], "Capable");
    assert_eq!(v["verified"], true);
    let v = json(&nilcap(&["capable", "nilprod", "--class", "2", "--prime", "3", "--alphas", "1,2", "--format", "json"]));
    assert_eq!(v["decision"], "NotCapable");
    let v = json(&nilcap(&["capable", "class2", "--p", "3", "--alpha", "1", "--beta", "1", "--gamma", "1", "--sigma", "1", "--format", "json"]));
    assert_eq!(v["decision"], "Capable");
}

#[test]
fn witness_is_verified() {
    let out = nilcap(&["witness", "nilprod", "--class", "2", "--prime", "2", "--alphas", "1,1", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["verified"], true);
    // Not capable: there is no witness to give.
    let out = nilcap(&["witness", "abelian", "--orders", "2,4"]);
    assert_ne!(code(&out), 0);
}

#[test]
fn center_agrees_with_brute_force() {
    let v = json(&nilcap(&["center", "--class", "3", "--orders", "3,9", "--verify-brute", "--format", "json"]));
    assert_eq!(v["order"], "27");
    assert_eq!(v["verified"], true);
}

#[test]
fn verify_suite() {
    let out = nilcap(&["verify", "--suite", "kummer", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["suite"], "kummer");
    assert!(v["failures"].as_array().unwrap().is_empty());
    assert!(v.get("wall_time").is_none());
    assert_eq!(nilcap(&["verify", "--suite", "kummer", "--format", "json"]).stdout, out.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&nilcap(&["no-such-command"])), 2);
    assert_eq!(code(&nilcap(&["verify", "--suite", "nonsense"])), 2);
    assert_eq!(code(&nilcap(&["mul", "--class", "2", "--orders", "2,2", "--lhs", "x1"])), 2);
    let out = nilcap(&["mul", "--class", "9", "--orders", "4,4", "--lhs", "x1", "--rhs", "x2", "--format", "json"]);
    assert_eq!(code(&out), 3);
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"]["message"].is_string());
    assert_eq!(code(&nilcap(&["mul", "--class", "2", "--orders", "2,2", "--lhs", "x7", "--rhs", "x1"])), 3);
}
