#![allow(dead_code)]

use std::path::PathBuf;

use alma0::runtime::{run_source, Mode, Outcome, RunOptions, RunReport};

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

pub fn corpus(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn run(source: &str, options: &RunOptions) -> (RunReport, String) {
    run_source(source, options).unwrap_or_else(|e| panic!("compile error: {e}"))
}

pub fn first(source: &str) -> (Outcome, String) {
    let (report, out) = run(source, &RunOptions::default());
    (report.outcome, out)
}

pub fn count(source: &str) -> u64 {
    let (report, _) = run(source, &RunOptions { mode: Mode::Count, ..Default::default() });
    assert!(!matches!(report.outcome, Outcome::Error(_)), "{:?}", report.outcome);
    report.solutions
}

/// The output of every solution in all-solutions mode, one string per
/// solution.
pub fn all_outputs(source: &str) -> Vec<String> {
    let (report, out) = run(source, &RunOptions { mode: Mode::All, ..Default::default() });
    assert!(!matches!(report.outcome, Outcome::Error(_)), "{:?}", report.outcome);
    let mut solutions = Vec::new();
    let mut current = String::new();
    for line in out.split_inclusive('\n') {
        if line.starts_with("--- solution ") {
            solutions.push(std::mem::take(&mut current));
        } else {
            current.push_str(line);
        }
    }
    assert_eq!(solutions.len() as u64, report.solutions);
    solutions
}

/// Parses whitespace-separated integers.
pub fn ints(s: &str) -> Vec<i64> {
    s.split_whitespace().map(|t| t.parse().unwrap_or_else(|_| panic!("not an integer: {t}"))).collect()
}
