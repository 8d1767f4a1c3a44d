//! Acceptance gate: prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::thread;

use cfp_core::bellman::{certify_bellman, Aggregator, BellmanCondition, BellmanProblem};
use cfp_core::selftest::{CLOSED_FORM_TOL, DEFAULT_SEED};
use serde_json::Value;

const SINGLE_STATE: &str = r#"{
  "bellman": {
    "states": ["s"], "decisions": ["a"], "reward": [[1]], "transition": [["s"]],
    "aggregator": {"form": "affine", "params": {"c": [[0]], "beta": 0.5}}
  }
}"#;

struct Line {
    id: u32,
    name: String,
    passed: bool,
    detail: String,
}

fn cfp(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cfp"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
    )
}

/// The report text with the trailing timings block cut off.
fn without_timings(text: &str) -> &str {
    let cut = text
        .find(",\n  \"timings\"")
        .expect("report has a timings block");
    &text[..cut]
}

fn bellman_report(dir: &tempfile::TempDir) -> Value {
    let path = dir.path().join("single.json");
    std::fs::write(&path, SINGLE_STATE).unwrap();
    let (_, text) = cfp(&[
        "--input",
        path.to_str().unwrap(),
        "--tol",
        "1e-10",
        "bellman",
    ]);
    serde_json::from_str(&text).unwrap()
}

fn main() -> ExitCode {
    let seed = DEFAULT_SEED.to_string();
    let runs: Vec<_> = (0..2)
        .map(|_| {
            let seed = seed.clone();
            thread::spawn(move || cfp(&["--seed", &seed, "selftest"]))
        })
        .collect();
    let runs: Vec<(i32, String)> = runs.into_iter().map(|h| h.join().unwrap()).collect();
    let report: Value = serde_json::from_str(&runs[0].1).expect("selftest report is JSON");
    let criteria = report["result"]["criteria"]
        .as_array()
        .expect("criteria list");

    let mut lines = Vec::new();
    for id in 1..=8u32 {
        let c = criteria
            .iter()
            .find(|c| c["id"] == id)
            .unwrap_or_else(|| panic!("criterion {id} missing from the selftest report"));
        let mut passed = c["passed"].as_bool().unwrap() && c["violations"] == 0;
        let mut detail = format!(
            "{} instances, {} checks, {} violations",
            c["instances"], c["checked"], c["violations"]
        );
        if let Some(v) = c["first_violation"].as_str() {
            detail.push_str(&format!("; first: {v}"));
        }
        let dir = tempfile::TempDir::new().unwrap();
        match id {
            7 => {
                let r = bellman_report(&dir);
                let h = r["result"]["solution"][0].as_f64().unwrap_or(f64::NAN);
                let ok = r["exit_code"] == 0 && (h - 2.0).abs() <= CLOSED_FORM_TOL;
                passed &= ok;
                detail.push_str(&format!("; cli single-state h* = {h}"));
            }
            8 => {
                let r = bellman_report(&dir);
                let cert = &r["result"]["certificate"];
                let ok = cert["strict_rho"]["passed"] == false
                    && cert["strict_rho"]["witness"].is_object()
                    && cert["banach_beta"]["passed"] == true
                    && cert["certified"] == "banach-beta";
                let p = BellmanProblem::new(
                    vec!["s".into()],
                    vec!["a".into()],
                    vec![vec![1.0]],
                    vec![vec![0]],
                    Aggregator::Affine {
                        c: vec![vec![0.0]],
                        beta: 0.5,
                    },
                )
                .unwrap();
                let core = certify_bellman(&p, 256, DEFAULT_SEED).unwrap();
                let reproducible = core
                    .strict_rho
                    .witness
                    .as_ref()
                    .is_some_and(|w| w.recheck(&p, BellmanCondition::StrictRho, 0.5));
                passed &= ok && reproducible;
                detail.push_str(&format!(
                    "; cli report distinguishes conditions: {ok}, witness rechecks: {reproducible}"
                ));
            }
            _ => {}
        }
        lines.push(Line {
            id,
            name: c["name"].as_str().unwrap().to_string(),
            passed: passed && c["instances"].as_u64().unwrap() > 0,
            detail,
        });
    }

    let same = without_timings(&runs[0].1) == without_timings(&runs[1].1);
    lines.push(Line {
        id: 9,
        name: "selftest determinism".into(),
        passed: same && runs[0].0 == runs[1].0,
        detail: format!(
            "two runs with seed {seed}: exit codes {} and {}, reports identical modulo timings: {same}",
            runs[0].0, runs[1].0
        ),
    });

    let mut all = true;
    for l in &lines {
        all &= l.passed;
        println!(
            "criterion {} {}: {} ({})",
            l.id,
            l.name,
            if l.passed { "PASS" } else { "FAIL" },
            l.detail
        );
    }
    if all && runs[0].0 == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
