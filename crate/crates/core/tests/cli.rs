//! The `almac` binary: output streams and exit codes.

mod common;

use std::io::Write;
use std::process::{Command, Output};

fn almac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_almac")).args(args).output().expect("failed to run almac")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Writes `source` to a fresh temporary file.
fn program(source: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".a0").tempfile().unwrap();
    f.write_all(source.as_bytes()).unwrap();
    f
}

fn path(f: &tempfile::NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

#[test]
fn count_mode() {
    let q = common::corpus_path("queens8.a0");
    let o = almac(&["run", q.to_str().unwrap(), "--mode", "count"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("--- solution 92 ---\nsolutions: 92\n"));
}

#[test]
fn first_mode_prints_the_first_schedule() {
    let j = common::corpus_path("jobshop.a0");
    let o = almac(&["run", j.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("1 1 1 1 1 - 2 2 2 2 2 2 - - - 3 3 3 3 -\n"));
    assert_eq!(stderr(&o), "");
}

#[test]
fn exit_codes() {
    let failing = program("MODULE F; BEGIN FALSE END F.");
    let o = almac(&["run", path(&failing)]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "");

    let erroneous = program("MODULE E; VAR x: INTEGER; BEGIN x := x + 1 END E.");
    let o = almac(&["run", path(&erroneous)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("runtime error"), "{}", stderr(&o));

    let ill_typed = program("MODULE B; VAR x: INTEGER; BEGIN x := TRUE END B.");
    let o = almac(&["run", path(&ill_typed)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("1:"), "{}", stderr(&o));
    assert_eq!(almac(&["check", path(&ill_typed)]).status.code(), Some(3));

    let syntax = program("MODULE B; BEGIN x := END B.");
    assert_eq!(almac(&["check", path(&syntax)]).status.code(), Some(3));

    assert_eq!(almac(&["check", path(&failing)]).status.code(), Some(0));
    assert_eq!(almac(&["check", path(&erroneous)]).status.code(), Some(0));
    assert_eq!(almac(&["run", "/nonexistent/file.a0"]).status.code(), Some(3));
    assert_eq!(almac(&["run", path(&failing), "--mode", "sideways"]).status.code(), Some(3));
    assert_eq!(almac(&["run", path(&failing), "--max-solutions", "0"]).status.code(), Some(3));
}

#[test]
fn count_mode_without_solutions() {
    let failing = program("MODULE F; BEGIN FALSE END F.");
    let o = almac(&["run", path(&failing), "--mode", "count"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "solutions: 0\n");
}

#[test]
fn trace_goes_to_stderr() {
    let src = "MODULE T;\nVAR X: ARRAY [1..2] OF CONSTRAINED [1..3];\n    x: INTEGER;\nBEGIN\n  X[1] <= 2;\n  \
               COMMIT EITHER x = 1; FALSE ORELSE x = 2 END END;\n  WRITE(x)\nEND T.";
    let f = program(src);
    let o = almac(&["run", path(&f), "--trace"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2");
    assert_eq!(stderr(&o), "TELL X[1] <= 2 -> ok\nCHOICE 1 @6:10\nBACKTRACK 1\nCOMMIT 1..1\n");
}

#[test]
fn labeling_trace() {
    let src = "MODULE T; VAR C: CONSTRAINED [1..3]; BEGIN C <> 1; INDOMAIN(C); C = 3 END T.";
    let f = program(src);
    let o = almac(&["run", path(&f), "--trace", "--value-order", "descending"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stderr(&o), "TELL C <> 1 -> ok\nCHOICE 1 @1:52\nTELL C = 3 -> ok\nTELL C = 3 -> ok\n");
}

#[test]
fn dump_store() {
    let src = "MODULE D; VAR X: ARRAY [1..2] OF CONSTRAINED [1..5]; BEGIN X[1] < X[2]; X[2] <> 3 END D.";
    let f = program(src);
    let o = almac(&["run", path(&f), "--dump-store"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "X[1] : [1..5] = {1..4}\nX[2] : [1..5] = {2,4,5}\nX[1] - X[2] <= -1\n");
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let f = common::corpus_path("frequency_constraints.a0");
    let args = ["run", f.to_str().unwrap(), "--mode", "all", "--label-order", "first-fail"];
    let a = almac(&args);
    let b = almac(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
}

#[test]
fn library_entry_point() {
    let q = common::corpus_path("queens8.a0");
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = alma0::cli::main(["almac", "run", q.to_str().unwrap(), "--mode", "count"], &mut out, &mut err);
    assert_eq!(code, alma0::cli::EXIT_SUCCEEDED);
    assert!(String::from_utf8(out).unwrap().ends_with("solutions: 92\n"));
    let code = alma0::cli::main(["almac", "--help"], &mut Vec::new(), &mut Vec::new());
    assert_eq!(code, 0);
}
