mod common;

use std::process::Command;

use common::{bin, check_golden, transcript};

#[test]
fn golden_transcripts() {
    let bad = check_golden();
    assert!(bad.is_empty(), "mismatched: {bad:?}");
}

#[test]
fn both_methods_print_the_same_polynomial() {
    let t = transcript(&["compute", "--p", "3", "--e", "1", "--betas", "1,1", "--method", "both"]);
    assert!(t.contains("exit: 0"));
    assert_eq!(t.matches("] 1 + 2*t0\n").count(), 2, "{t}");
}

#[test]
fn degree_example() {
    let t = transcript(&["degree", "--p", "3", "--e", "1", "--betas", "5"]);
    assert!(t.contains("phi = 1\ncomputed degree = 1"), "{t}");
}

#[test]
fn budget_refusal_names_degree() {
    let t = transcript(&["compute", "--p", "2", "--e", "1", "--betas", "1", "--d-max", "30"]);
    assert!(t.contains("exit: 2"), "{t}");
    assert!(t.contains("d = 24"), "{t}");
}

#[test]
fn usage_errors_name_the_flag() {
    let t = transcript(&["compute", "--p", "3", "--betas", "1,x"]);
    assert!(t.contains("exit: 1") && t.contains("--betas") && t.contains("example:"), "{t}");
    let t = transcript(&["dirichlet", "--p", "3", "--m", "2", "--lambdas", "0,q", "--beta", "1"]);
    assert!(t.contains("exit: 1") && t.contains("--lambdas"), "{t}");
    let t = transcript(&["frobnicate"]);
    assert!(t.contains("exit: 1"), "{t}");
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(bin())
            .args(["compute", "--p", "5", "--betas", "3,7", "--format", "json"])
            .env("ZSPECIAL_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    assert!(first.status.success());
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let second = run();
    assert_eq!(first.stdout, second.stdout);
    let uncached = Command::new(bin())
        .args(["compute", "--p", "5", "--betas", "3,7", "--format", "json"])
        .env_remove("ZSPECIAL_CACHE_DIR")
        .output()
        .unwrap();
    assert_eq!(first.stdout, uncached.stdout);
}

#[test]
fn output_is_deterministic() {
    let args = ["sweep", "--p", "5", "--max-s", "2", "--max-beta", "4", "--format", "json"];
    assert_eq!(transcript(&args), transcript(&args));
}
