use std::fs;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn modeq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modeq")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn file(dir: &TempDir, name: &str, content: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, content).expect("write fixture");
    path.to_string_lossy().into_owned()
}

#[test]
fn eq_and_normalize_answer_in_the_theory() {
    let o = modeq(&["eq", "--theory", "acu", "f(x,f(y,0))", "f(y,x)"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("equal: yes"));

    let o = modeq(&["eq", "--theory", "empty", "f(x,y)", "f(y,x)"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("equal: no"));

    let o = modeq(&["normalize", "--theory", "acui", "f(f(x,x),f(x,y))"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("normal form: f(x,y)"));
}

#[test]
fn unify_solves_and_checks_the_header() {
    let dir = TempDir::new().unwrap();
    let prob = file(&dir, "pair.prob", "theory: empty\nx = f(y,y)\n");
    let o = modeq(&["unify", "--problem", &prob]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("status: complete"));
    assert!(text.contains("{x := f(y,y)}"));

    let o = modeq(&["unify", "--theory", "ac", "--problem", &prob]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("disagrees"));
}

#[test]
fn probe_reports_two_commutative_classes() {
    let dir = TempDir::new().unwrap();
    let prob = file(&dir, "comm.prob", "theory: c\nf(x,y) = f(u,v)\n");
    let o = modeq(&["probe", "--problem", &prob, "--fresh", "0", "--depth", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("minimal classes: 2"), "{text}");
    assert!(text.contains("finitary-evidence"), "{text}");

    let o = modeq(&["--json", "probe", "--problem", &prob, "--fresh", "0", "--depth", "1"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).expect("valid json");
    assert_eq!(v["verb"], "probe");
    assert_eq!(v["theory"], "c");
    assert_eq!(v["bounds"]["fresh"], 0);
    assert_eq!(v["bounds"]["depth"], 1);
    assert_eq!(v["results"]["restricted"]["minimal_classes"], 2);
    assert!(!v["caveats"].as_array().unwrap().is_empty());
}

#[test]
fn compare_finds_the_inverse_axiom_witness() {
    let dir = TempDir::new().unwrap();
    let s = file(&dir, "sigma.sub", "x := y\ny := f(y)\n");
    let t = file(&dir, "theta.sub", "x := g(y)\n");
    let o = modeq(&["compare", "--theory", "fg", "--sigma", &s, "--theta", &t]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("sigma <= theta: yes"), "{text}");
    assert!(text.contains("{y := g(y)}"), "{text}");
    assert!(text.contains("theta <= sigma: no"), "{text}");
    assert!(text.contains("strictly more general: yes"), "{text}");
}

#[test]
fn hilbert_lists_minimal_solutions() {
    let dir = TempDir::new().unwrap();
    let sys = file(&dir, "sys.dio", "2y = x1 + 2x2\n");
    let o = modeq(&["hilbert", "--system", &sys]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("basis vectors: 2"), "{}", stdout(&o));

    let inhom = file(&dir, "inhom.dio", "2y = x1 + 2x2 + 1\n");
    let o = modeq(&["hilbert", "--system", &inhom]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("minimal solutions: 1"), "{}", stdout(&o));
}

#[test]
fn sigma_z_swaps_stay_equivalent_on_problem_variables() {
    let dir = TempDir::new().unwrap();
    let prob = file(&dir, "join.prob", "theory: acui\nf(x,f(y,z)) = f(u,v)\n");
    let o = modeq(&["sigma-z", "--problem", &prob, "--count", "3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("variant 3:"), "{text}");
    assert!(text.contains("pairwise incomparable under all variables: yes"), "{text}");
    assert!(text.contains("pairwise equivalent on problem variables: yes"), "{text}");
}

#[test]
fn shrink_returns_a_validating_certificate() {
    let dir = TempDir::new().unwrap();
    let s = file(&dir, "sigma.sub", "x := z\nz := x\n");
    let t = file(&dir, "theta.sub", "x := f(y,y)\n");
    let l = file(&dir, "lambda.sub", "x := z\nz := f(y,y)\n");
    let o = modeq(&[
        "shrink", "--theory", "empty", "--sigma", &s, "--theta", &t, "--witness", &l,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("sigma': "), "{text}");
    assert!(text.contains("within theta's footprint: yes"), "{text}");
}

#[test]
fn poset_and_chain_report_the_order() {
    let dir = TempDir::new().unwrap();
    let th = file(&dir, "theta.sub", "x := f(y,y)\n");
    let o = modeq(&["--json", "poset", "--theory", "empty", "--theta", &th, "--depth", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).expect("valid json");
    assert_eq!(v["verb"], "poset");
    assert_eq!(v["bounds"]["depth"], 2);
    assert!(!v["caveats"].as_array().unwrap().is_empty());
    assert!(v["results"]["classes"].as_array().unwrap().len() >= 2);

    let chain = file(&dir, "chain.sub", "x := f(y,y)\n--\nidentity\n");
    let o = modeq(&["chain", "--theory", "empty", "--file", &chain]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("valid: yes"), "{}", stdout(&o));

    let bad = file(&dir, "renamed.sub", "x := y\n--\nx := z\n");
    let o = modeq(&["chain", "--theory", "empty", "--file", &bad]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("valid: no"), "{}", stdout(&o));
}

#[test]
fn vector_and_matrix_follow_the_counting_model() {
    let dir = TempDir::new().unwrap();
    let o = modeq(&["vector", "--theory", "acu", "--basis", "x1,x2", "f(x1,f(x2,x2))"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("coordinates: (1, 2)"), "{}", stdout(&o));

    let s = file(&dir, "sigma.sub", "x1 := x2\nx2 := f(x1,x1)\n");
    let o = modeq(&[
        "matrix", "--theory", "acu", "--sigma", &s, "--dom", "x1,x2", "--apply",
        "f(x1,f(x2,x2))",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("row x1: (0, 1)"), "{text}");
    assert!(text.contains("row x2: (2, 0)"), "{text}");
    assert!(text.contains("image coordinates: (4, 1)"), "{text}");
}

#[test]
fn restrictive_check_passes_live_semirings_and_refuses_integers() {
    let o = modeq(&["restrictive-check", "--semiring", "nat", "--window", "6"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("order violations: 0"), "{text}");
    assert!(text.contains("law violations: 0"), "{text}");

    let o = modeq(&["restrictive-check", "--semiring", "words:2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("order violations: 0"), "{}", stdout(&o));

    let o = modeq(&["restrictive-check", "--semiring", "poly:1", "--window", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("order violations: 0"), "{}", stdout(&o));

    let o = modeq(&["restrictive-check", "--semiring", "int", "--window", "3"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("unsupported"), "{}", stderr(&o));
}

#[test]
fn exit_codes_separate_failure_classes() {
    let dir = TempDir::new().unwrap();
    let o = modeq(&["eq", "--theory", "nosuch", "x", "x"]);
    assert_eq!(code(&o), 2);

    let bad = file(&dir, "bad.prob", "theory: ac\ng(x) = x\n");
    let o = modeq(&["unify", "--problem", &bad]);
    assert_eq!(code(&o), 2);

    let assoc = file(&dir, "assoc.prob", "theory: a\nf(x,y) = f(y,x)\n");
    let o = modeq(&["unify", "--problem", &assoc]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("unsupported"), "{}", stderr(&o));

    let prob = file(&dir, "join.prob", "theory: acui\nf(x,f(y,z)) = f(u,v)\n");
    let o = modeq(&["--timeout", "0", "probe", "--problem", &prob, "--fresh", "1", "--depth", "2"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("timed out"), "{}", stderr(&o));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let prob = file(&dir, "comm.prob", "theory: c\nf(x,y) = f(u,v)\n");
    let args = ["--json", "probe", "--problem", &prob, "--fresh", "0", "--depth", "1"];
    let first = modeq(&args);
    let second = modeq(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}
