use crate::syntax;
use super::*;

const DECLS: &str = "CONST N = 8; \
    TYPE Board = ARRAY [1..N] OF CONSTRAINED [1..N]; \
         Colour = (blue, green, red, yellow); \
    VAR x, y, i, j, count: INTEGER; a: ARRAY [1..3] OF INTEGER; \
        b: BOOLEAN; c: Colour; r: REAL; \
        C, D: CONSTRAINED [1..4]; X: Board; R: CONSTRAINED REAL;";

fn run_with(body: &str, extra: &str, options: &RunOptions) -> (Outcome, String) {
    let src = format!("MODULE T; {DECLS} {extra} BEGIN {body} END T.");
    let (report, out) = run_source(&src, options).unwrap_or_else(|e| panic!("{e}\n{src}"));
    (report.outcome, out)
}

fn run(body: &str) -> (Outcome, String) {
    run_with(body, "", &RunOptions::default())
}

fn succeeds(body: &str) -> String {
    match run(body) {
        (Outcome::Succeeded, out) => out,
        (o, out) => panic!("{body}: {o:?}\n{out}"),
    }
}

fn fails(body: &str) {
    let (o, out) = run(body);
    assert_eq!(o, Outcome::Failed, "{body}\n{out}");
}

fn error(body: &str) -> String {
    match run(body) {
        (Outcome::Error(e), _) => e.message,
        (o, _) => panic!("{body}: expected an error, got {o:?}"),
    }
}

fn count(body: &str) -> u64 {
    let options = RunOptions { mode: Mode::Count, ..Default::default() };
    let src = format!("MODULE T; {DECLS} BEGIN {body} END T.");
    run_source(&src, &options).unwrap().0.solutions
}

#[test]
fn boolean_statements() {
    succeeds("x := 5; x = 5");
    fails("x := 5; x = 6");
    succeeds("a[1] := 1; a[2] := 2; a[1] <= a[2]");
    fails("FALSE");
    succeeds("");
}

#[test]
fn generalized_equality() {
    assert_eq!(succeeds("x = 5; WRITE(x)"), "5");
    fails("x := 3; x = 5");
    assert!(error("x = y").contains("uninitialized"));
    // compound values compare component-wise and initialize the
    // uninitialized components
    assert_eq!(succeeds("a[1] := 1; a[2] := 2; a[3] := 3; x = 1; a[1] = x"), "");
}

#[test]
fn orelse() {
    succeeds("EITHER FALSE ORELSE TRUE END");
    assert_eq!(succeeds("EITHER x = 1 ORELSE x = 2 END; x = 2; WRITE(x)"), "2");
    fails("EITHER FALSE ORELSE FALSE END");
    // the state is restored before the next branch
    assert_eq!(succeeds("EITHER x := 1; FALSE ORELSE WRITE(x) END"), "-");
}

#[test]
fn some_keeps_the_smallest_succeeding_value() {
    assert_eq!(succeeds("SOME i := 1 TO 3 DO i = 2 END; WRITE(i)"), "2");
    fails("SOME i := 3 TO 1 DO TRUE END");
    assert_eq!(count("SOME i := 1 TO 4 DO i <> 2 END"), 3);
}

#[test]
fn for_is_universal() {
    succeeds("a[1] := 1; a[2] := 2; a[3] := 3; FOR i := 1 TO 2 DO a[i] <= a[i+1] END");
    fails("a[1] := 2; a[2] := 1; a[3] := 3; FOR i := 1 TO 2 DO a[i] <= a[i+1] END");
    succeeds("FOR i := 5 TO 4 DO FALSE END");
    // a nondeterministic body multiplies the solutions
    assert_eq!(count("FOR i := 1 TO 2 DO EITHER TRUE ORELSE TRUE END END"), 4);
}

#[test]
fn for_some_duality() {
    for (a1, a2, a3) in [(1, 2, 3), (2, 1, 3), (3, 3, 3), (1, 3, 2)] {
        let init = format!("a[1] := {a1}; a[2] := {a2}; a[3] := {a3}; ");
        let forall = run(&format!("{init} FOR i := 1 TO 2 DO a[i] <= a[i+1] END")).0;
        let dual = run(&format!("{init} NOT SOME i := 1 TO 2 DO NOT (a[i] <= a[i+1]) END")).0;
        assert_eq!(forall, dual);
    }
}

#[test]
fn forall() {
    assert_eq!(succeeds("count := 0; FORALL SOME i := 1 TO 3 DO TRUE END DO count := count + 1 END; WRITE(count)"), "3");
    assert_eq!(succeeds("FORALL FALSE DO x := 1 END; WRITE(x)"), "-");
    fails("FORALL SOME i := 1 TO 3 DO TRUE END DO i < 3 END");
    // body effects survive backtracking into the generator and later
    // failures inside the program
    assert_eq!(
        succeeds("count := 0; EITHER FORALL SOME i := 1 TO 4 DO TRUE END DO count := count + i END; FALSE ORELSE WRITE(count) END"),
        "0"
    );
    assert_eq!(
        succeeds("count := 0; FORALL SOME i := 1 TO 4 DO TRUE END DO count := count + i END; EITHER FALSE ORELSE WRITE(count) END"),
        "10"
    );
}

#[test]
fn forall_counts_queens() {
    let body = "FOR i := 1 TO N-1 DO FOR j := i+1 TO N DO \
                  X[i] <> X[j]; X[i] <> X[j]+j-i; X[i] <> X[j]+i-j END END; \
                count := 0; FORALL INDOMAIN(X) DO count := count + 1 END; WRITE(count)";
    assert_eq!(succeeds(body), "92");
}

#[test]
fn commit() {
    fails("COMMIT EITHER TRUE ORELSE TRUE END END; FALSE");
    fails("COMMIT FALSE END");
    assert_eq!(succeeds("COMMIT SOME i := 1 TO 5 DO i > 2 END END; WRITE(i)"), "3");
    assert_eq!(count("COMMIT EITHER x = 1 ORELSE x = 2 END END"), 1);
}

#[test]
fn negation_as_failure() {
    fails("NOT TRUE");
    succeeds("b := FALSE; NOT b");
    fails("NOT (x = 1)");
    assert_eq!(succeeds("NOT (NOT (x = 1)); WRITE(x)"), "-");
    // NOT of a constraint is the negated constraint
    assert_eq!(succeeds("NOT (C = 1); NOT (C >= 3); WRITE(C)"), "2");
}

#[test]
fn conditions_tell_and_retract() {
    assert_eq!(succeeds("IF C > 2 THEN WRITE('then ', C) ELSE WRITE('else') END"), "then {3,4}");
    assert_eq!(succeeds("C = 1; IF C > 2 THEN WRITE('then') ELSE WRITE('else ', C) END"), "else 1");
    assert_eq!(succeeds("IF x = 1 THEN WRITE(x) END"), "1");
}

#[test]
fn backtracking_restores_the_store() {
    let opts = RunOptions { dump_store: true, mode: Mode::All, ..Default::default() };
    let (o, out) = run_with("EITHER C < 3 ORELSE C > 1 END", "", &opts);
    assert_eq!(o, Outcome::Succeeded);
    let dumps: Vec<&str> = out.split("--- solution").collect();
    assert!(dumps[0].contains("C : [1..4] = {1,2}\n"), "{out}");
    assert!(dumps[1].contains("C : [1..4] = {2..4}\n"), "{out}");
    assert!(!dumps[1].contains("C <= 2"), "{out}");
}

#[test]
fn unknowns_read_as_values() {
    assert_eq!(succeeds("C = 4; x := C + 1; WRITE(x)"), "5");
    assert!(error("x := C").contains("not determined"));
    assert_eq!(succeeds("C = 2; D = C + 1; WRITE(D)"), "3");
}

#[test]
fn parameters() {
    let procs = "PROCEDURE V(p: INTEGER; VAR q: INTEGER); BEGIN q := p * 2 END V; \
                 PROCEDURE M(MIX p: INTEGER); BEGIN p = 7 END M; \
                 PROCEDURE U(VAR u: CONSTRAINED [1..4]); BEGIN u <> 1 END U; \
                 PROCEDURE Choose(VAR p: INTEGER); BEGIN EITHER p := 1 ORELSE p := 2 END END Choose;";
    let ok = |body: &str| match run_with(body, procs, &RunOptions::default()) {
        (Outcome::Succeeded, out) => out,
        (o, _) => panic!("{body}: {o:?}"),
    };
    assert_eq!(ok("C = 4; V(C, x); WRITE(x)"), "8");
    assert_eq!(ok("M(x); WRITE(x)"), "7");
    assert_eq!(ok("x := 7; M(x); WRITE(x)"), "7");
    assert_eq!(run_with("x := 6; M(x)", procs, &RunOptions::default()).0, Outcome::Failed);
    assert_eq!(ok("U(C); C < 3; WRITE(C)"), "2");
    // choice points created in a body survive the call
    assert_eq!(ok("Choose(x); x = 2; WRITE(x)"), "2");
    match run_with("V(C, x)", procs, &RunOptions::default()).0 {
        Outcome::Error(e) => assert!(e.message.contains("not determined")),
        o => panic!("{o:?}"),
    }
}

#[test]
fn indomain() {
    assert_eq!(count("INDOMAIN(C)"), 4);
    assert_eq!(count("C <> 2; C <> 3; INDOMAIN(C)"), 2);
    assert_eq!(succeeds("C <> 1; C <> 3; C <> 4; INDOMAIN(C); WRITE(C)"), "2");
    fails("C > 2; C < 3; INDOMAIN(C)");
    assert_eq!(count("INDOMAIN(C); INDOMAIN(D)"), 16);
    assert_eq!(count("C <> D; INDOMAIN(C); INDOMAIN(D)"), 12);
    let desc = RunOptions { value_order: ValueOrder::Descending, ..Default::default() };
    assert_eq!(run_with("INDOMAIN(C); WRITE(C)", "", &desc).1, "4");
}

#[test]
fn labeling_orders_agree() {
    let body = "X[1] < X[2]; X[3] = 2; X[4] + X[5] = 9; ALL_DIFFERENT(X); \
                INDOMAIN(X); FOR i := 1 TO N DO WRITE(X[i], ' ') END; WRITELN";
    let mut sets = Vec::new();
    for label_order in [LabelOrder::Textual, LabelOrder::FirstFail] {
        for value_order in [ValueOrder::Ascending, ValueOrder::Descending] {
            let opts = RunOptions { mode: Mode::All, label_order, value_order, ..Default::default() };
            let out = run_with(body, "", &opts).1;
            let mut lines: Vec<String> = out.lines().filter(|l| !l.starts_with("---")).map(String::from).collect();
            lines.sort();
            sets.push(lines);
        }
    }
    assert!(!sets[0].is_empty());
    assert!(sets.iter().all(|s| *s == sets[0]));
}

#[test]
fn lists() {
    let locals = "VAR L: LIST OF CONSTRAINED [1..N];";
    let ok = |body: &str| match run_with(body, locals, &RunOptions::default()) {
        (Outcome::Succeeded, out) => out,
        (o, _) => panic!("{body}: {o:?}"),
    };
    // labeling follows insertion order
    let opts = RunOptions { trace: true, ..Default::default() };
    let src = format!(
        "MODULE T; {DECLS} {locals} BEGIN Empty(L); Insert(L, X[3]); Insert(L, X[1]); Insert(L, X[2]); INDOMAIN(L) END T."
    );
    let (mut out, mut trace) = (Vec::new(), Vec::new());
    run_program(&syntax::compile(&src).unwrap(), &opts, &mut out, &mut trace);
    let tells: Vec<String> = String::from_utf8(trace).unwrap().lines().filter(|l| l.starts_with("TELL")).map(String::from).collect();
    assert_eq!(tells, ["TELL X[3] = 1 -> ok", "TELL X[1] = 1 -> ok", "TELL X[2] = 1 -> ok"]);
    // an insertion is undone on backtracking
    assert_eq!(
        ok("Empty(L); Insert(L, X[1]); EITHER Insert(L, X[2]); FALSE ORELSE Sum(L, '=', 3); WRITE(X[1]) END"),
        "3"
    );
    assert_eq!(ok("Empty(L); Insert(L, X[1]); Insert(L, X[2]); Sum(L, '=', 16); WRITE(X[1], X[2])"), "88");
    fails_with(locals, "Empty(L); Sum(L, '=', 1)");
    ok("Empty(L); Sum(L, '=', 0)");
}

fn fails_with(extra: &str, body: &str) {
    assert_eq!(run_with(body, extra, &RunOptions::default()).0, Outcome::Failed, "{body}");
}

#[test]
fn global_constraints() {
    fails("C = 2; D = 2; ALL_DIFFERENT(X); X[1] = C; X[2] = D");
    succeeds("ALL_DIFFERENT(X)");
    fails("X[1] = 3; AT_MOST(0, X, 3)");
    fails("X[1] = 3; AT_MOST(1, X, 3); X[2] <> 4; X[2] <= 4; X[2] >= 3");
    assert_eq!(succeeds("X[1] = 3; AT_MOST(1, X, 3); X[2] <= 4; X[2] >= 3; WRITE(X[2])"), "4");
    assert_eq!(count("C = 1; AT_MOST(1, X, 1); FOR i := 1 TO N DO X[i] <= 2 END; INDOMAIN(X)"), 9);
}

#[test]
fn reals() {
    assert_eq!(succeeds("R = 2.0 * R - 1.5; WRITE(R)"), "1.500000");
    assert_eq!(succeeds("r := 1.0 / 4; WRITE(r)"), "0.250000");
    // '/' on integers truncates
    assert_eq!(succeeds("r := 1 / 4; WRITE(r)"), "0.000000");
    assert!(error("NOT (R = 1.0)").contains("real"));
}

#[test]
fn runtime_errors() {
    assert!(error("x := 1; y := 0; x := x DIV y").contains("division by zero"));
    assert!(error("i := 4; a[i] := 1").contains("outside"));
    assert!(error("WRITE(x + 1)").contains("not initialized"));
    // errors are not caught by backtracking
    assert!(error("EITHER x := x + 1 ORELSE TRUE END").contains("not initialized"));
}

#[test]
fn output_formats() {
    assert_eq!(succeeds("b := TRUE; c := red; WRITE(1, ' ', b, ' ', c, ' ', -3)"), "1 TRUE red -3");
    assert_eq!(succeeds("WRITE(x); WRITELN; WRITE(C)"), "-\n{1..4}");
}

#[test]
fn all_mode_separators() {
    let opts = RunOptions { mode: Mode::All, ..Default::default() };
    let (o, out) = run_with("EITHER WRITE('a') ORELSE WRITE('b') END", "", &opts);
    assert_eq!(o, Outcome::Succeeded);
    assert_eq!(out, "a--- solution 1 ---\nb--- solution 2 ---\n");
    let opts = RunOptions { mode: Mode::Count, max_solutions: Some(1), ..Default::default() };
    let (_, out) = run_with("EITHER WRITE('a') ORELSE WRITE('b') END", "", &opts);
    assert_eq!(out, "a--- solution 1 ---\nsolutions: 1\n");
}

#[test]
fn trace_lines() {
    let program = syntax::compile("MODULE T; VAR X: ARRAY [1..2] OF CONSTRAINED [1..4]; x: INTEGER;\nBEGIN\n  X[1] <= 2;\n  EITHER x = 1; FALSE ORELSE TRUE END\nEND T.").unwrap();
    let opts = RunOptions { trace: true, ..Default::default() };
    let (mut out, mut trace) = (Vec::new(), Vec::new());
    run_program(&program, &opts, &mut out, &mut trace);
    assert_eq!(String::from_utf8(trace).unwrap(), "TELL X[1] <= 2 -> ok\nCHOICE 1 @4:3\nBACKTRACK 1\n");
}
