use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const CORPUS: &str = include_str!("../corpus/paper.jb");

fn corpus() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/paper.jb").to_string()
}

fn run(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_jetbracket"));
    cmd.args(args).env_remove("JETBRACKET_SEED");
    if let Some(s) = env_seed {
        cmd.env("JETBRACKET_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("jetbracket-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn compatible_check_exits_zero() {
    let o = run(
        &["check", &corpus(), "--system", "kdv", "--symmetry", "R"],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let agg = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["criterion"] == "Aggregate")
        .unwrap();
    assert_eq!(agg["result"], "compatible");
}

#[test]
fn incompatible_system_exits_ten() {
    let o = run(&["check", &corpus(), "--system", "frob_bad"], None);
    assert_eq!(o.status.code(), Some(10));
}

#[test]
fn failed_verification_exits_eleven() {
    let text = "system lin {\n  independent x;\n  dependent u;\n  equation E: u[x] = u;\n}\n\
                solution wrong for lin {\n  u = x^2;\n}\n";
    let p = scratch("wrong.jb", text);
    let o = run(&["verify", p.to_str().unwrap()], None);
    assert_eq!(
        o.status.code(),
        Some(11),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(json(&o)["checks"][0]["result"], "fail");
}

#[test]
fn usage_errors_exit_two() {
    let broken = CORPUS.replacen("equation", "equation equation", 1);
    let p = scratch("broken.jb", &broken);
    let o = run(&["check", p.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    assert_eq!(
        run(&["check", &corpus(), "--system", "nope"], None)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"], None).status.code(), Some(2));
}

#[test]
fn seed_from_environment_and_flag_precedence() {
    let args = ["charvar", &corpus(), "--system", "noc"];
    assert_eq!(json(&run(&args, None))["seed"], 42);
    assert_eq!(json(&run(&args, Some("7")))["seed"], 7);
    let mut with_flag = args.to_vec();
    with_flag.extend(["--seed", "9"]);
    assert_eq!(json(&run(&with_flag, Some("7")))["seed"], 9);

    let p = scratch("seeded.jb", "option seed = 5;\n");
    let file = p.to_str().unwrap();
    assert_eq!(json(&run(&["check", file], None))["seed"], 5);
    assert_eq!(json(&run(&["check", file], Some("6")))["seed"], 6);
}

#[test]
fn text_format_is_tabular() {
    let o = run(
        &["charvar", &corpus(), "--system", "noc", "--format", "text"],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.lines().nth(1).unwrap().starts_with("subject"));
    assert!(s.contains("CharVariety"));
    assert!(s.contains("codim: 2"));
}

#[test]
fn empty_model_reports_no_checks() {
    let p = scratch("empty.jb", "");
    let o = run(&["check", p.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["checks"], Value::Array(vec![]));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let c = corpus();
    for args in [
        ["flags", &c, "--distribution", "null3"],
        ["syzygy", &c, "--system", "noc"],
    ] {
        let a = run(&args, None);
        let b = run(&args, None);
        assert_eq!(a.stdout, b.stdout);
        assert!(!a.stdout.is_empty());
    }
}
