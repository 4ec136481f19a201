//! Shared inputs for the analysis benchmarks.

use std::collections::BTreeSet;
use std::path::PathBuf;

use gtschr::{Project, TypedGraph};

pub fn fixture(name: &str) -> Project {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    Project::parse(&text).expect("fixture parses")
}

/// A directed cycle `c0 → c1 → … → c0` over the cyclic-list type graph,
/// with `c0` strong.
pub fn cycle(p: &Project, n: usize) -> (TypedGraph, BTreeSet<String>) {
    let mut g = TypedGraph::new(p.type_graph().clone());
    for k in 0..n {
        g.try_add_node(format!("c{k}"), "node").unwrap();
    }
    for k in 0..n {
        g.try_add_edge(format!("e{k}"), "edge", format!("c{k}"), format!("c{}", (k + 1) % n)).unwrap();
    }
    (g, BTreeSet::from(["c0".to_string()]))
}
