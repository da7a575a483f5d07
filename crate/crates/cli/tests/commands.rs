//! End-to-end runs of the `pbpo` binary on the shipped examples.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pbpo_core::{are_isomorphic, Workspace};

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/examples").join(format!("{name}.pbpo"))
}

fn pbpo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbpo")).args(args).env_remove("PBPO_CHECK").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_every_example() {
    for name in ["relabel", "rewrite_step", "loopdel", "spiral", "fig1", "sorts", "variables"] {
        let o = pbpo(&["validate", path(&example(name))]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
    }
    // non-monic typing is a PBPO rule but not a PBPO+ rule
    let compact = example("compact");
    assert_eq!(pbpo(&["validate", path(&compact)]).status.code(), Some(2));
    assert_eq!(pbpo(&["validate", path(&compact), "--semantics", "pbpo"]).status.code(), Some(0));
}

#[test]
fn relabel_all_writes_readable_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.pbpo");
    let o = pbpo(&[
        "apply",
        path(&example("relabel")),
        "--rule",
        "relabel",
        "--graph",
        "host",
        "--semantics",
        "pbpo+",
        "--all",
        "--check",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let results = Workspace::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let fixture = Workspace::parse(&std::fs::read_to_string(example("relabel")).unwrap()).unwrap();
    let expected = fixture.graph("expected").unwrap();
    assert_eq!(results.graphs.len(), 2);
    assert!(results.graphs.values().any(|d| are_isomorphic(&d.graph, expected)));
    for d in results.graphs.values() {
        let c = d.graph.vertices().iter().filter(|v| d.graph.lattice().name(v.label) == "c").count();
        assert_eq!(c, 1);
    }
    // deterministic output
    let again = pbpo(&["apply", path(&example("relabel")), "--rule", "relabel", "--graph", "host", "--all"]);
    let twice = pbpo(&["apply", path(&example("relabel")), "--rule", "relabel", "--graph", "host", "--all"]);
    assert_eq!(stdout(&again), stdout(&twice));
}

#[test]
fn derive_empties_the_channel() {
    let o = pbpo(&["derive", path(&example("sorts")), "--rule", "receive", "--graph", "fifo", "--max-steps", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let ws = Workspace::parse(&stdout(&o)).unwrap();
    assert_eq!(ws.graphs.len(), 4);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("normal form after 3 step(s)"), "{err}");
}

#[test]
fn match_counts_depend_on_semantics() {
    let file = example("loopdel");
    let count = |sem: &str| {
        let o = pbpo(&["match", path(&file), "--rule", "loopdel", "--graph", "twoloops", "--semantics", sem]);
        assert_eq!(o.status.code(), Some(0));
        let s = stdout(&o);
        let last = s.lines().last().unwrap().to_string();
        last.split(", ").nth(1).unwrap().split(' ').next().unwrap().parse::<usize>().unwrap()
    };
    assert_eq!(count("pbpo"), 4);
    assert_eq!(count("pbpo+"), 2);
}

#[test]
fn no_match_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let host = dir.path().join("host.pbpo");
    std::fs::write(&host, "graph empty over U { }\n").unwrap();
    let o =
        pbpo(&["apply", path(&example("loopdel")), host.to_str().unwrap(), "--rule", "loopdel", "--graph", "empty"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn parse_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pbpo");
    std::fs::write(&bad, "lattice L flat { a }\ngraph G over L { edge e : x -> y }\n").unwrap();
    let o = pbpo(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stderr).unwrap().contains(":2:"));
    assert_eq!(pbpo(&["validate", "/nonexistent/file.pbpo"]).status.code(), Some(3));
}

#[test]
fn unknown_names_are_validation_errors() {
    let o = pbpo(&["apply", path(&example("relabel")), "--rule", "nope", "--graph", "host"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn translation_output_reads_back() {
    let o = pbpo(&["translate", path(&example("compact")), "--rule", "split"]);
    assert_eq!(o.status.code(), Some(0));
    let ws = Workspace::parse(&stdout(&o)).unwrap();
    assert_eq!(ws.rules.len(), 2);
    for d in ws.rules.values() {
        assert!(d.rule.violations().is_empty());
    }
}

#[test]
fn dot_export_colors_the_match() {
    let o = pbpo(&["export-dot", path(&example("loopdel")), "--graph", "twoloops", "--rule", "loopdel"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("digraph"));
    assert_eq!(s.matches("color=green").count(), 2);
    assert_eq!(s.matches("color=black").count(), 2);
}
