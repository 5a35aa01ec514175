#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

/// Golden invocations: file stem and arguments.
pub const GOLDEN: &[(&str, &[&str])] = &[
    ("compute_both_f3", &["compute", "--p", "3", "--e", "1", "--betas", "1,1", "--method", "both"]),
    ("degree_f3_5", &["degree", "--p", "3", "--e", "1", "--betas", "5"]),
    ("compute_budget_refusal", &["compute", "--p", "2", "--e", "1", "--betas", "1", "--d-max", "30"]),
    ("compute_f9_json", &["compute", "--p", "3", "--e", "2", "--betas", "1,2", "--method", "both", "--format", "json"]),
    ("compute_usage_error", &["compute", "--p", "4", "--betas", "1"]),
    ("degree_f5_csv", &["degree", "--p", "5", "--betas", "7,9", "--format", "csv"]),
    ("zeros_f4_json", &["zeros", "--p", "2", "--e", "2", "--betas", "3,3", "--format", "json"]),
    ("permute_f3", &["permute", "--p", "3", "--betas", "2,5", "--perm", "0:1,1:0", "--perm", "id"]),
    ("verify_small", &["verify", "--qs", "2,3", "--max-s", "2", "--max-beta", "3", "--invariance-cases", "5"]),
    ("sweep_f2_csv", &["sweep", "--p", "2", "--max-s", "2", "--max-beta", "3"]),
    ("sweep_f3_json", &["sweep", "--p", "3", "--max-s", "2", "--max-beta", "2", "--format", "json"]),
    ("dirichlet_f9", &["dirichlet", "--p", "3", "--m", "2", "--lambdas", "0,1;1,1", "--betas", "1,1", "--beta", "2", "--format", "json"]),
];

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_zspecial")
}

pub fn golden_path(stem: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{stem}.txt"))
}

/// Exit code, stdout and stderr of one run, in the golden-file layout.
pub fn transcript(args: &[&str]) -> String {
    let out = Command::new(bin())
        .args(args)
        .env_remove("ZSPECIAL_CACHE_DIR")
        .output()
        .expect("binary runs");
    format!(
        "$ zspecial {}\nexit: {}\n--- stdout\n{}--- stderr\n{}",
        args.join(" "),
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    )
}

/// Compares every golden case, rewriting the files when `UPDATE_GOLDEN` is set.
/// Returns the stems that differ.
pub fn check_golden() -> Vec<String> {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut bad = Vec::new();
    for (stem, args) in GOLDEN {
        let got = transcript(args);
        let path = golden_path(stem);
        if update {
            std::fs::write(&path, &got).unwrap();
            continue;
        }
        match std::fs::read_to_string(&path) {
            Ok(want) if want == got => {}
            Ok(want) => {
                eprintln!("golden mismatch {stem}\n--- want\n{want}\n--- got\n{got}");
                bad.push(stem.to_string());
            }
            Err(e) => {
                eprintln!("golden file {} unreadable: {e}", path.display());
                bad.push(stem.to_string());
            }
        }
    }
    bad
}
