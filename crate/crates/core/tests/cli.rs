use std::path::PathBuf;
use std::process::{Command, Output};

fn gconv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gconv")).args(args).output().expect("binary runs")
}

fn model(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "models", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn named_suites_pass() {
    for suite in ["hopf-etale", "phi-homomorphism"] {
        let o = gconv(&["check", "--suite", suite]);
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", stdout(&o));
    }
}

#[test]
fn malformed_model_is_an_input_error() {
    let o = gconv(&["check", "--model", &model("broken.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid model"));
    let o = gconv(&["check", "--model", &model("broken.json"), "--output", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["error"].as_str().unwrap().contains("EOF"));
}

#[test]
fn corrupted_table_fails_with_a_witness() {
    let o = gconv(&["check", "--model", &model("h3-corrupted.json"), "--suite", "lie-rinehart", "--output", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let checks = v["suites"][0]["checks"].as_array().unwrap();
    let jacobi = checks.iter().find(|c| c["name"].as_str().unwrap().ends_with("jacobi")).unwrap();
    assert_eq!(jacobi["pass"], false);
    assert_eq!(jacobi["witness"], "J(X, Y, Z) = Z");
}

#[test]
fn model_files_pass() {
    for name in ["pair.json", "kinked.json", "heisenberg.json", "etale.json"] {
        let o = gconv(&["check", "--model", &model(name), "--jobs", "4"]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
    }
}

#[test]
fn eval_examples() {
    let o = gconv(&["eval", "conv_mul(<1|E1>,<1|E2>)"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "<1 | E1·E2>\n"));
    let o = gconv(&["eval", "phi(<t^2 | E1>)"]);
    assert_eq!(stdout(&o), "[[E1, (t^2 - 2*t + 1)]]\n");
    let o = gconv(&["eval", "dist_eval([[T1, 1]], y^2 + x, 3)"]);
    assert_eq!(stdout(&o), "11\n");
    let o = gconv(&["eval", "conv_mul(<1|E1>,<1|Q9>)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown bisection `Q9`"));
}

#[test]
fn eval_uses_the_model_registry() {
    let o = gconv(&["eval", "--model", &model("heisenberg.json"), "conv_mul(<1|kX>,<1|kY>)"]);
    assert_eq!(stdout(&o), "<1 | kX·kY>\n");
    let o = gconv(&["eval", "--model", &model("heisenberg.json"), "conv_mul(<1|kX>,<1|T1>)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn demos() {
    let o = gconv(&["demo", "kernel-example"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("a ≠ 0, Φ(a) = 0"));
    assert!(text.contains("(-inf, 0)  {E00, E01} {E10, E11}"), "{text}");
    for name in ["cartier-gabriel", "etale-iso"] {
        assert_eq!(gconv(&["demo", name]).status.code(), Some(0), "{name}");
    }
    assert_eq!(gconv(&["demo", "nope"]).status.code(), Some(2));
}

#[test]
fn json_output_is_byte_identical() {
    let args = ["check", "--suite", "dist", "--output", "json", "--seed", "7"];
    let a = gconv(&args);
    let b = gconv(&args);
    assert_eq!(a.stdout, b.stdout);
    let args = ["check", "--suite", "conv", "--output", "json", "--jobs", "1"];
    let par = ["check", "--suite", "conv", "--output", "json", "--jobs", "8"];
    assert_eq!(gconv(&args).stdout, gconv(&par).stdout);
    let a = gconv(&["demo", "kernel-example", "--output", "json"]);
    let b = gconv(&["demo", "kernel-example", "--output", "json"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn usage_errors() {
    assert_eq!(gconv(&[]).status.code(), Some(2));
    assert_eq!(gconv(&["check", "--seed", "banana"]).status.code(), Some(2));
    assert_eq!(gconv(&["check", "--output", "xml"]).status.code(), Some(2));
    assert_eq!(gconv(&["--help"]).status.code(), Some(0));
}
