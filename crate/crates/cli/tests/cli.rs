use std::path::PathBuf;
use std::process::{Command, Output};

use gtschr::{ConfluenceReport, OpEqReport};

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"));
    p.to_string_lossy().into_owned()
}

fn gtschr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gtschr")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_project(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn encode_prints_rules_and_host() {
    let o = gtschr(&["encode", &fixture("cyclic-list"), "--host", "cycle3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("unlink @ node(N,2), node(N1,D1), node(N2,D2), edge(E1,N1,N), edge(E2,N,N2) <=>"), "{out}");
    assert!(out.contains("twoloop @"));
    assert!(out.contains("cycle3 = ⟨node(N1,2) ⊎ node(N2,2) ⊎ node(N3,D3)"), "{out}");
}

#[test]
fn run_reaches_the_single_loop() {
    let o = gtschr(&["run", &fixture("cyclic-list"), "--host", "cycle3", "--engine", "both"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("CHR final states: 1\n"), "{out}");
    assert!(out.contains("graph normal forms: 1\n"), "{out}");
    assert!(out.contains("decoded graph classes: 1\n"));
    assert!(out.contains("engines agree"));
    assert!(out.contains(":edge(N3→N3)"), "{out}");
}

#[test]
fn run_on_an_empty_host() {
    let o = gtschr(&["run", &fixture("cyclic-list"), "--host", "empty", "--engine", "both"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("host empty: (empty)"), "{out}");
    assert!(out.contains("engines agree"));
}

#[test]
fn match_reports_dangling_edges() {
    let o = gtschr(&["match", &fixture("dangle"), "--rule", "twoloop", "--host", "dangle"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("2 matches"));
    assert!(out.contains("dangling edges {E3}"));
    assert!(out.contains("gluing ok"));
}

#[test]
fn confluence_summaries() {
    let o = gtschr(&["confluence", &fixture("remove-loop")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("G-CONFLUENT, overlaps: 3 (1 violates G), joinable: 2/2"), "{}", stdout(&o));

    let o = gtschr(&["confluence", &fixture("two-loops")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("NOT_STRONGLY_JOINABLE (confluence not disproved)"));
}

#[test]
fn tiny_limits_are_inconclusive() {
    let o = gtschr(&["confluence", &fixture("remove-loop"), "--max-states", "1"]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("INCONCLUSIVE"));
}

#[test]
fn equivalence_and_redundancy() {
    let o = gtschr(&["opeq", &fixture("opeq-redundancy"), &fixture("opeq-redundancy-reduced")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("EQUIVALENT"), "{}", stdout(&o));

    let o = gtschr(&["redundant", &fixture("opeq-redundancy"), "--spot-check", "20", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("r2 removable\n"), "{out}");
    assert!(out.contains("remaining: r1\n"));
    assert!(out.contains("spot check: 20 random hosts, 0 disagreements"), "{out}");
}

#[test]
fn unmet_precondition_and_attestation() {
    let (a, b) = (fixture("two-loops"), fixture("two-loops-variant"));
    let o = gtschr(&["opeq", &a, &b]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("error:"));
    let o = gtschr(&["opeq", &a, &b, "--assume-terminating"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("NOT_PROVEN"), "{}", stdout(&o));
}

#[test]
fn usage_errors() {
    assert_eq!(gtschr(&["confluence"]).status.code(), Some(1));
    assert_eq!(gtschr(&["--bogus"]).status.code(), Some(1));
    assert_eq!(gtschr(&["run", &fixture("remove-loop"), "--host", "nowhere"]).status.code(), Some(1));
    assert_eq!(gtschr(&["match", &fixture("remove-loop"), "--rule", "nope", "--host", "two-loops"]).status.code(), Some(1));
    assert_eq!(gtschr(&["validate", "/nonexistent/project.json"]).status.code(), Some(1));
    assert_eq!(gtschr(&["--opts", "sideways", "validate", &fixture("remove-loop")]).status.code(), Some(1));
    assert_eq!(gtschr(&["--max-depth", "0", "validate", &fixture("remove-loop")]).status.code(), Some(1));
}

const EMPTY: &str = r#"{
  "type_graph": { "node_types": ["node"], "edge_types": [] },
  "rules": [],
  "hosts": {}
}"#;

const BROKEN: &str = r#"{
  "type_graph": { "node_types": ["node"], "edge_types": [{ "name": "edge", "src": "node", "tgt": "node" }] },
  "rules": [{
    "name": "bad",
    "L": { "nodes": [{ "id": "x", "type": "node" }], "edges": [{ "id": "e", "type": "edge", "src": "x", "tgt": "y" }] },
    "K": { "nodes": [], "edges": [] },
    "R": { "nodes": [], "edges": [] }
  }],
  "hosts": {}
}"#;

#[test]
fn validation() {
    let dir = tempfile::tempdir().unwrap();
    let o = gtschr(&["validate", &write_project(&dir, "empty.json", EMPTY)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "valid: 0 rules, 0 hosts, 0 CHR rules\n");

    let o = gtschr(&["validate", &write_project(&dir, "broken.json", BROKEN)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains('y'), "{}", stderr(&o));

    let o = gtschr(&["validate", &write_project(&dir, "garbage.json", "{ not json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_reports_round_trip() {
    let o = gtschr(&["--format", "json", "confluence", &fixture("two-loops")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let report: ConfluenceReport = serde_json::from_str(&text).unwrap();
    assert_eq!(format!("{}\n", serde_json::to_string_pretty(&report).unwrap()), text);

    let o = gtschr(&["--format", "json", "opeq", &fixture("opeq-redundancy"), &fixture("opeq-redundancy-reduced")]);
    let text = stdout(&o);
    let report: OpEqReport = serde_json::from_str(&text).unwrap();
    assert_eq!(format!("{}\n", serde_json::to_string_pretty(&report).unwrap()), text);
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["confluence".to_string(), fixture("strong-join")],
        vec!["run".to_string(), fixture("cyclic-list"), "--host".into(), "cycle4".into(), "--engine".into(), "both".into()],
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(stdout(&gtschr(&args)), stdout(&gtschr(&args)));
    }
}
