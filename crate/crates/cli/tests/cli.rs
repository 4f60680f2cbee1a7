//! End-to-end tests of the `soergel` binary: output, exit codes and determinism.

use std::process::{Command, Output};

fn soergel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soergel")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const TWO_DOTS: &str = "word s s | m@1(s) ; m@0(s)";

#[test]
fn relation_check_passes_on_builtin_graphs() {
    for graph in ["A1", "mixed"] {
        let out = soergel(&["check", graph]);
        assert_eq!(out.status.code(), Some(0), "{graph}");
        assert!(stdout(&out).contains(", failed: 0"), "{graph}");
    }
}

#[test]
fn corrupted_relation_is_reported() {
    let out = soergel(&["check", "A1", "--corrupt", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAIL ") && text.contains(", failed: 1"), "{text}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("counterexample at basis vector"));
}

#[test]
fn graph_files_are_accepted() {
    let path = std::env::temp_dir().join(format!("soergel-cli-{}.graph", std::process::id()));
    std::fs::write(&path, "gens: s r\ninf: s r\n").unwrap();
    let out = soergel(&["check", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn normalize_prints_the_normal_form() {
    let out = soergel(&["normalize", "A1", "word | a@0(s) ; j@0(s) ; m@0(s)"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "0\n");

    let out = soergel(&["normalize", "A1", TWO_DOTS, "--trace"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("1 * [ m@0(s) ; m@0(s) ]\ntrace:\n"), "{text}");
}

#[test]
fn exit_codes_follow_the_failure_kind() {
    assert_eq!(soergel(&["normalize", "A1", "word s | m@0(s) ; m@0(s)"]).status.code(), Some(2));
    assert_eq!(soergel(&["normalize", "A1", "word s | bogus@0(s)"]).status.code(), Some(2));
    assert_eq!(soergel(&["normalize", "nosuchgraph", TWO_DOTS]).status.code(), Some(2));
    let out = soergel(&["--fuel", "0", "normalize", "A1", TWO_DOTS]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fuel exhausted"));
}

#[test]
fn basis_lists_light_leaves() {
    let out = soergel(&["basis", "A1", "s s", "--verify-independence"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("count: 2\n") && text.ends_with("independent: yes\n"), "{text}");
}

#[test]
fn fuzzing_finds_no_failures() {
    for (graph, count) in [("A1", "100"), ("commuting3", "500")] {
        let out = soergel(&["fuzz", graph, "--count", count, "--seed", "0"]);
        assert_eq!(out.status.code(), Some(0), "{graph}: {}", stdout(&out));
        assert_eq!(stdout(&out), format!("cases: {count}, failed: 0\n"));
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    let runs: [&[&str]; 3] = [
        &["normalize", "mixed", "word s r t r | f@0(s,r) ; m@2(t) ; m@1(s) ; m@1(r) ; m@0(r)", "--trace"],
        &["basis", "Iinf", "s r s", "--verify-independence", "--seed", "4"],
        &["fuzz", "Iinf", "--count", "50", "--seed", "9"],
    ];
    for args in runs {
        let a = soergel(args);
        let b = soergel(args);
        assert_eq!(a.status.code(), b.status.code(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
