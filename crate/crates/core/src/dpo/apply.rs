use std::collections::{BTreeMap, BTreeSet};

use super::{DerivationStep, DpoError, DpoRule, GluingReport, Gts, Match};
use crate::graph::{GraphError, GraphMorphism, TypedGraph};

/// Supplies identifiers for created elements: `prefix1`, `prefix2`, ...,
/// skipping any id already present in the graph being extended.
#[derive(Debug, Clone)]
pub struct FreshIds {
    prefix: String,
    next: u64,
}

impl Default for FreshIds {
    fn default() -> Self {
        FreshIds::new("new")
    }
}

impl FreshIds {
    pub fn new(prefix: impl Into<String>) -> Self {
        FreshIds { prefix: prefix.into(), next: 1 }
    }

    pub fn fresh(&mut self, avoid: &TypedGraph) -> String {
        loop {
            let id = format!("{}{}", self.prefix, self.next);
            self.next += 1;
            if !avoid.contains(&id) {
                return id;
            }
        }
    }
}

/// All injective matches of `rule`'s left-hand side into `host`, in a
/// deterministic order. The gluing condition is not checked.
pub fn find_matches(rule: &DpoRule, host: &TypedGraph) -> Result<Vec<Match>, DpoError> {
    if !rule.lhs().same_type_graph(host) {
        return Err(GraphError::TypeGraphMismatch.into());
    }
    Ok(injective_morphisms(rule.lhs(), host)
        .into_iter()
        .map(|morphism| Match { rule: rule.name().to_string(), morphism })
        .collect())
}

/// Every injective type- and structure-preserving morphism `from → to`.
pub(crate) fn injective_morphisms(from: &TypedGraph, to: &TypedGraph) -> Vec<GraphMorphism> {
    let nodes: Vec<&String> = from.nodes().keys().collect();
    let edges: Vec<&String> = from.edges().keys().collect();
    let mut out = Vec::new();
    let mut node_map = BTreeMap::new();
    let mut used_nodes = BTreeSet::new();
    map_nodes(from, to, &nodes, &edges, &mut node_map, &mut used_nodes, &mut out);
    out
}

fn map_nodes<'a>(
    from: &'a TypedGraph,
    to: &'a TypedGraph,
    nodes: &[&'a String],
    edges: &[&'a String],
    node_map: &mut BTreeMap<String, String>,
    used: &mut BTreeSet<&'a str>,
    out: &mut Vec<GraphMorphism>,
) {
    let Some((&n, rest)) = nodes.split_first() else {
        let mut edge_map = BTreeMap::new();
        let mut used_edges = BTreeSet::new();
        map_edges(from, to, edges, node_map, &mut edge_map, &mut used_edges, out);
        return;
    };
    let ty = &from.nodes()[n];
    for (cand, cty) in to.nodes() {
        if cty != ty || used.contains(cand.as_str()) {
            continue;
        }
        node_map.insert(n.clone(), cand.clone());
        used.insert(cand);
        map_nodes(from, to, rest, edges, node_map, used, out);
        used.remove(cand.as_str());
        node_map.remove(n);
    }
}

fn map_edges<'a>(
    from: &'a TypedGraph,
    to: &'a TypedGraph,
    edges: &[&'a String],
    node_map: &BTreeMap<String, String>,
    edge_map: &mut BTreeMap<String, String>,
    used: &mut BTreeSet<&'a str>,
    out: &mut Vec<GraphMorphism>,
) {
    let Some((&e, rest)) = edges.split_first() else {
        out.push(GraphMorphism { node_map: node_map.clone(), edge_map: edge_map.clone() });
        return;
    };
    let edge = &from.edges()[e];
    let (s, t) = (&node_map[&edge.src], &node_map[&edge.tgt]);
    for (cand, ce) in to.edges() {
        if used.contains(cand.as_str()) || ce.ty != edge.ty || &ce.src != s || &ce.tgt != t {
            continue;
        }
        edge_map.insert(e.clone(), cand.clone());
        used.insert(cand);
        map_edges(from, to, rest, node_map, edge_map, used, out);
        used.remove(cand.as_str());
        edge_map.remove(e);
    }
}

/// The dangling-edge part of the gluing condition; identification cannot
/// fail for injective matches.
pub fn check_gluing(rule: &DpoRule, m: &Match, host: &TypedGraph) -> Result<GluingReport, DpoError> {
    if !m.morphism.is_injective() || !m.morphism.is_morphism(rule.lhs(), host) {
        return Err(DpoError::InvalidMatch);
    }
    let deleted: BTreeSet<&str> =
        rule.deleted_nodes().map(|v| m.morphism.map_node(v).expect("total")).collect();
    let image: BTreeSet<&str> = m.morphism.edge_map.values().map(String::as_str).collect();
    let dangling_edges: BTreeSet<String> = host
        .edges()
        .iter()
        .filter(|(id, e)| {
            !image.contains(id.as_str())
                && (deleted.contains(e.src.as_str()) || deleted.contains(e.tgt.as_str()))
        })
        .map(|(id, _)| id.clone())
        .collect();
    Ok(GluingReport { satisfied: dangling_edges.is_empty(), dangling_edges })
}

/// Performs the double-pushout step. Created elements receive ids from
/// `fresh`; retained elements keep their ids.
pub fn apply(
    rule: &DpoRule,
    m: &Match,
    host: &TypedGraph,
    fresh: &mut FreshIds,
) -> Result<DerivationStep, DpoError> {
    let report = check_gluing(rule, m, host)?;
    if !report.satisfied {
        return Err(DpoError::GluingViolated(report));
    }
    let mut after = host.clone();
    for e in rule.deleted_edges() {
        after.remove_edge(m.morphism.map_edge(e).expect("total"));
    }
    for v in rule.deleted_nodes() {
        after.remove_node(m.morphism.map_node(v).expect("total"));
    }
    let track = GraphMorphism {
        node_map: after.nodes().keys().map(|k| (k.clone(), k.clone())).collect(),
        edge_map: after.edges().keys().map(|k| (k.clone(), k.clone())).collect(),
    };

    let mut comatch = GraphMorphism::default();
    for id in rule.kept_ids() {
        if let Some(v) = m.morphism.map_node(id) {
            comatch.node_map.insert(id.clone(), v.to_string());
        } else if let Some(e) = m.morphism.map_edge(id) {
            comatch.edge_map.insert(id.clone(), e.to_string());
        }
    }
    for v in rule.created_nodes() {
        let id = fresh.fresh(&after);
        after.try_add_node(&id, &rule.rhs().nodes()[v]).expect("fresh id");
        comatch.node_map.insert(v.clone(), id);
    }
    for e in rule.created_edges() {
        let edge = &rule.rhs().edges()[e];
        let id = fresh.fresh(&after);
        after
            .try_add_edge(&id, &edge.ty, &comatch.node_map[&edge.src], &comatch.node_map[&edge.tgt])
            .expect("fresh id");
        comatch.edge_map.insert(e.clone(), id);
    }
    Ok(DerivationStep {
        before: host.clone(),
        after,
        rule: rule.name().to_string(),
        matched: m.clone(),
        track,
        comatch,
    })
}

/// Every one-step derivation from `host`, rule by rule in system order.
pub fn derive_all(gts: &Gts, host: &TypedGraph) -> Vec<DerivationStep> {
    let mut out = Vec::new();
    for rule in gts.rules() {
        let Ok(matches) = find_matches(rule, host) else {
            continue;
        };
        for m in matches {
            if check_gluing(rule, &m, host).is_ok_and(|r| r.satisfied) {
                out.push(apply(rule, &m, host, &mut FreshIds::default()).expect("gluing checked"));
            }
        }
    }
    out
}
