use std::collections::{BTreeMap, BTreeSet};

use gtschr::graph::json::GraphJson;
use gtschr::{canonical_form, TypedGraph};

/// `v1:node*, v2:node; e1:edge(v1→v2)`, with strong nodes starred.
pub fn graph_line(g: &TypedGraph, strong: &BTreeSet<String>) -> String {
    if g.is_empty() {
        return "(empty)".into();
    }
    let nodes: Vec<String> = g
        .nodes()
        .iter()
        .map(|(v, ty)| format!("{v}:{ty}{}", if strong.contains(v) { "*" } else { "" }))
        .collect();
    let edges: Vec<String> = g.edges().iter().map(|(e, x)| format!("{e}:{}({}→{})", x.ty, x.src, x.tgt)).collect();
    if edges.is_empty() {
        nodes.join(", ")
    } else {
        format!("{}; {}", nodes.join(", "), edges.join(", "))
    }
}

pub fn graph_json(g: &TypedGraph, strong: &BTreeSet<String>) -> GraphJson {
    GraphJson::from_graph(g, strong)
}

pub fn strong_form(g: &TypedGraph, strong: &BTreeSet<String>) -> String {
    let labels: BTreeMap<String, String> = strong.iter().map(|v| (v.clone(), "strong".into())).collect();
    canonical_form(g, &labels)
}
