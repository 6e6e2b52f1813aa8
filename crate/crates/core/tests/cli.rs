use std::io::Cursor;
use std::path::{Path, PathBuf};
use std::process::Command;

use prologtheta::cli::{run_cli, run_repl, Format, FreeVars, Groundness, Io, ReplState, SolveFlags, Style, Switch};

const PHONE: &str = "phone(tom, cs, 4450).\n";
const EMP: &str = "module emp.\nunknown X, Y.\nphone(tom, 434433).\nphone(pete, 200312).\nphone(sue, X).\nphone(john, X).\nphone(tim, Y).\n";

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn write_module(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Run {
    let mut stdin = Cursor::new(Vec::new());
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut io = Io { stdin: &mut stdin, stdout: &mut out, stderr: &mut err, style: Style::default() };
    let mut argv = vec!["prologtheta"];
    argv.extend_from_slice(args);
    let code = run_cli(argv, &mut io);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn with_modules(f: impl FnOnce(&str, &str)) {
    let dir = tempfile::tempdir().unwrap();
    let phone = write_module(dir.path(), "phone.plt", PHONE);
    let emp = write_module(dir.path(), "emp.plt", EMP);
    f(phone.to_str().unwrap(), emp.to_str().unwrap());
}

#[test]
fn phone_query_with_trace() {
    with_modules(|phone, _| {
        let r = run(&["--module", phone, "--query", "some X : some* Y : phone(tom, X, Y)", "--trace"]);
        assert_eq!(r.code, 0, "{}", r.err);
        assert_eq!(
            r.out,
            "Y = 4450\nproof:\n  1. bc(phone(tom, cs, 4450), D, phone(tom, cs, 4450), nil)\n  2. pv(D, phone(tom, cs, 4450), nil)\n  3. pv(D, some* Y : phone(tom, cs, Y), <Y, 4450>)\n  4. pv(D, some X : some* Y : phone(tom, X, Y), nil)\n"
        );
    });
}

#[test]
fn free_variable_is_reported() {
    with_modules(|phone, _| {
        let r = run(&["run", "--module", phone, "--query", "phone(tom, _, Y)"]);
        assert_eq!((r.code, r.out.as_str()), (0, "Y = 4450\n"));
    });
}

#[test]
fn free_variables_can_be_silent() {
    with_modules(|phone, _| {
        let r = run(&["-m", phone, "-q", "phone(tom, _, Y)", "--free-vars", "silent"]);
        assert_eq!((r.code, r.out.as_str()), (0, "yes.\n"));
    });
}

#[test]
fn no_solution_exits_one() {
    with_modules(|_, emp| {
        let r = run(&["-m", emp, "-q", "phone(sue, N), phone(tim, N)"]);
        assert_eq!((r.code, r.out.as_str()), (1, "no.\n"));
    });
}

#[test]
fn shared_unknown_answer() {
    with_modules(|_, emp| {
        let r = run(&["-m", emp, "-q", "phone(sue, N), phone(john, N)"]);
        assert_eq!((r.code, r.out.as_str()), (0, "N = ?k1\n"));
    });
}

#[test]
fn all_solutions_in_clause_order() {
    with_modules(|_, emp| {
        let r = run(&["-m", emp, "-q", "some P : phone(P, N)", "--all"]);
        assert_eq!(r.code, 0);
        assert_eq!(r.out, "N = 434433\n\nN = 200312\n\nN = ?k1\n\nN = ?k1\n\nN = ?k2\n");
        let r = run(&["-m", emp, "-q", "some P : phone(P, N)", "--all", "--distinct"]);
        assert_eq!(r.out, "N = 434433\n\nN = 200312\n\nN = ?k1\n\nN = ?k2\n");
        let r = run(&["-m", emp, "-q", "some P : phone(P, N)", "--max-solutions", "2"]);
        assert_eq!(r.out, "N = 434433\n\nN = 200312\n");
    });
}

#[test]
fn load_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_module(dir.path(), "bad.plt", "p(a).\np(a :- q.\n");
    let r = run(&["-m", bad.to_str().unwrap(), "-q", "p(a)"]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("2:5"), "{}", r.err);
    assert!(r.out.is_empty());

    let r = run(&["-m", "/nonexistent/x.plt", "-q", "p"]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("cannot read"));
}

#[test]
fn query_errors_exit_two() {
    with_modules(|phone, _| {
        let r = run(&["-m", phone, "-q", "phone(tom, "]);
        assert_eq!(r.code, 2);
        let r = run(&["-m", phone, "-q", "phone(tom)"]);
        assert_eq!(r.code, 2);
        assert!(r.err.contains("arity"), "{}", r.err);
        let r = run(&["-m", phone]);
        assert_eq!(r.code, 2);
    });
}

#[test]
fn bad_flags_exit_two() {
    let r = run(&["--groundness", "sloppy", "-q", "p"]);
    assert_eq!(r.code, 2);
    assert!(!r.err.is_empty());
}

#[test]
fn depth_limit_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let loop_ = write_module(dir.path(), "loop.plt", "p :- p.\n");
    let r = run(&["-m", loop_.to_str().unwrap(), "-q", "p", "--max-depth", "50"]);
    assert_eq!(r.code, 3);
    assert!(r.out.contains("incomplete"));
}

#[test]
fn lenient_mode_flags_residual_variables() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_module(dir.path(), "any.plt", "all X : p(X).\n");
    let m = m.to_str().unwrap();
    assert_eq!(run(&["-m", m, "-q", "some* Y : p(Y)"]).code, 1);
    let r = run(&["-m", m, "-q", "some* Y : p(Y)", "--groundness", "lenient"]);
    assert_eq!(r.code, 0);
    assert!(r.out.starts_with("Y = _G") && r.out.ends_with("(non-ground)\n"), "{}", r.out);
}

#[test]
fn occurs_check_switch() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_module(dir.path(), "eq.plt", "all X : eq(X, X).\n");
    let m = m.to_str().unwrap();
    assert_eq!(run(&["-m", m, "-q", "eq(Y, f(Y))", "--groundness", "lenient"]).code, 1);
    let r = run(&["-m", m, "-q", "eq(Y, f(Y))", "--groundness", "lenient", "--occurs-check", "off"]);
    assert_eq!(r.code, 0);
}

fn schema() -> jsonschema::Validator {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/trace.schema.json")).unwrap();
    let schema: serde_json::Value = serde_json::from_str(&text).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

#[test]
fn json_output_follows_schema() {
    let v = schema();
    with_modules(|phone, emp| {
        let cases: [(&str, &str, i32); 5] = [
            (phone, "some X : some* Y : phone(tom, X, Y)", 0),
            (phone, "phone(tom, _, Y)", 0),
            (emp, "phone(P, N)", 0),
            (emp, "phone(sue, N), phone(tim, N)", 1),
            (emp, "(some* N : phone(sue, N)), some* N : phone(john, N)", 0),
        ];
        for (m, q, code) in cases {
            let r = run(&["-m", m, "-q", q, "--format", "json", "--all"]);
            assert_eq!(r.code, code, "{q}");
            for line in r.out.lines() {
                let doc: serde_json::Value = serde_json::from_str(line).unwrap();
                assert!(v.is_valid(&doc), "{q}: {line}");
            }
        }
        let r = run(&["-m", phone, "-q", "some X : some* Y : phone(tom, X, Y)", "--format", "json"]);
        let doc: serde_json::Value = serde_json::from_str(r.out.trim()).unwrap();
        assert_eq!(doc["answers"], serde_json::json!([{"var": "Y", "term": "4450", "ground": true}]));
        assert_eq!(doc["trace"].as_array().unwrap().len(), 4);
        assert_eq!(doc["trace"][2]["theta"], serde_json::json!({"var": "Y", "term": "4450"}));
        assert_eq!(doc["trace"][3]["theta"], serde_json::Value::Null);
        assert_eq!(doc["status"], "success");
    });
}

#[test]
fn json_failure_and_incomplete_documents() {
    let v = schema();
    let dir = tempfile::tempdir().unwrap();
    let m = write_module(dir.path(), "loop.plt", "p :- p.\nq(a).\n");
    let m = m.to_str().unwrap();
    let r = run(&["-m", m, "-q", "q(b)", "--format", "json"]);
    assert_eq!(r.out, "{\"answers\":[],\"trace\":[],\"status\":\"fail\"}\n");
    let r = run(&["-m", m, "-q", "p", "--format", "json", "--max-depth", "30"]);
    let doc: serde_json::Value = serde_json::from_str(r.out.trim()).unwrap();
    assert!(v.is_valid(&doc));
    assert_eq!(doc["status"], "incomplete");
}

#[test]
fn check_subcommand() {
    with_modules(|phone, emp| {
        let r = run(&["check", "-m", emp, "-q", "phone(sue, N), phone(john, N)"]);
        assert_eq!(r.code, 0);
        assert!(r.out.starts_with("MATCH\n"), "{}", r.out);
        let r = run(&["check", "-m", emp, "-q", "phone(sue, N), phone(tim, N)"]);
        assert!(r.out.starts_with("MATCH\n"));
        let r = run(&["check", "-m", phone, "-q", "some X : some* Y : phone(tom, X, Y)"]);
        assert!(r.out.contains("oracle: {[Y = 4450]}"));
    });
    let r = run(&["check", "--fuzz", "100", "--seed", "7"]);
    assert_eq!(r.code, 0, "{}", r.out);
    assert!(r.out.ends_with("100/100 MATCH\n"), "{}", r.out);
}

#[test]
fn batch_output_is_deterministic() {
    with_modules(|_, emp| {
        let args = ["-m", emp, "-q", "phone(P, N)", "--all", "--trace"];
        let first = run(&args).out;
        for _ in 0..3 {
            assert_eq!(run(&args).out, first);
        }
        let a = run(&["check", "--fuzz", "30", "--seed", "11"]).out;
        assert_eq!(run(&["check", "--fuzz", "30", "--seed", "11"]).out, a);
    });
}

fn flags() -> SolveFlags {
    SolveFlags {
        max_depth: None,
        groundness: Groundness::Strict,
        occurs_check: Switch::On,
        free_vars: FreeVars::Noisy,
        trace: false,
        format: Format::Text,
    }
}

fn repl(script: &str) -> String {
    let mut state = ReplState::new(flags());
    let mut input = Cursor::new(script.as_bytes().to_vec());
    let mut out = Vec::new();
    run_repl(&mut state, &mut input, &mut out, Style::default()).unwrap();
    String::from_utf8(out).unwrap()
}

#[test]
fn repl_session() {
    let dir = tempfile::tempdir().unwrap();
    let emp = write_module(dir.path(), "emp.plt", EMP);
    let any = write_module(dir.path(), "any.plt", "all X : r(X).\n");
    let script = format!(
        ":load {}\nphone(sue, N), phone(john, N).\n:more\nsome P : phone(P, N).\n:more\n:load {}\nsome* Y : r(Y).\n:set groundness lenient\nsome* Y : r(Y).\n:bogus\nphone(.\n:quit\nphone(tom, N).\n",
        emp.display(),
        any.display()
    );
    let out = repl(&script);
    let lines: Vec<&str> = out.split("?- ").collect();
    assert_eq!(lines[0], "");
    assert_eq!(lines[1], "loaded module emp (5 clauses).\n");
    assert_eq!(lines[2], "N = ?k1\n");
    assert_eq!(lines[3], "no more solutions.\n");
    assert_eq!(lines[4], "N = 434433\n");
    assert_eq!(lines[5], "N = 200312\n");
    assert_eq!(lines[6], "loaded module any (1 clauses).\n");
    assert_eq!(lines[7], "no.\n");
    assert_eq!(lines[8], "groundness = lenient.\n");
    assert!(lines[9].contains("(non-ground)"));
    assert!(lines[10].starts_with("error: unknown command"));
    assert!(lines[11].starts_with("error: "));
    // Nothing after :quit is evaluated.
    assert_eq!(lines.len(), 13);
}

#[test]
fn repl_trace_toggle_and_end_of_input() {
    let dir = tempfile::tempdir().unwrap();
    let phone = write_module(dir.path(), "phone.plt", PHONE);
    let out = repl(&format!(":load {}\n:trace on\nphone(tom, _, Y).\n", phone.display()));
    assert!(out.contains("trace = on."));
    assert!(out.contains("  4. pv(D, "));
    assert!(out.ends_with("?- \n"));
}

#[test]
fn binary_exit_codes_and_color() {
    let bin = env!("CARGO_BIN_EXE_prologtheta");
    let dir = tempfile::tempdir().unwrap();
    let phone = write_module(dir.path(), "phone.plt", PHONE);
    let out = Command::new(bin)
        .args(["--module", phone.to_str().unwrap(), "--query", "phone(tom, _, Y)"])
        .env("PROLOGTHETA_NO_COLOR", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "Y = 4450\n");
    let out =
        Command::new(bin).args(["--module", phone.to_str().unwrap(), "--query", "phone(bob, _, Y)"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "no.\n");
    let out = Command::new(bin).args(["--max-depth", "x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
