use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{check_gluing, DpoRule, Match};
use crate::graph::{GraphMorphism, TypedGraph};

/// A jointly surjective pair of matches `L1 → G ← L2` with a non-empty
/// intersection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GtsOverlap {
    pub graph: TypedGraph,
    pub m1: GraphMorphism,
    pub m2: GraphMorphism,
    pub parallel_dependent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub(crate) struct Identification {
    pub nodes: BTreeMap<String, String>,
    pub edges: BTreeMap<String, String>,
}

/// All partial injective identifications of `l1` elements with same-typed
/// `l2` elements, where identified edges have identified endpoints.
pub(crate) fn identifications(l1: &TypedGraph, l2: &TypedGraph) -> Vec<Identification> {
    let n1: Vec<&String> = l1.nodes().keys().collect();
    let mut out = Vec::new();
    let mut nodes = BTreeMap::new();
    ident_nodes(l1, l2, &n1, &mut nodes, &mut out);
    out
}

fn ident_nodes(
    l1: &TypedGraph,
    l2: &TypedGraph,
    rest: &[&String],
    nodes: &mut BTreeMap<String, String>,
    out: &mut Vec<Identification>,
) {
    let Some((&v, rest)) = rest.split_first() else {
        let e1: Vec<&String> = l1.edges().keys().collect();
        let mut edges = BTreeMap::new();
        ident_edges(l1, l2, &e1, nodes, &mut edges, out);
        return;
    };
    ident_nodes(l1, l2, rest, nodes, out);
    let ty = &l1.nodes()[v];
    for (w, wty) in l2.nodes() {
        if wty == ty && !nodes.values().any(|x| x == w) {
            nodes.insert(v.clone(), w.clone());
            ident_nodes(l1, l2, rest, nodes, out);
            nodes.remove(v);
        }
    }
}

fn ident_edges(
    l1: &TypedGraph,
    l2: &TypedGraph,
    rest: &[&String],
    nodes: &BTreeMap<String, String>,
    edges: &mut BTreeMap<String, String>,
    out: &mut Vec<Identification>,
) {
    let Some((&e, rest)) = rest.split_first() else {
        out.push(Identification { nodes: nodes.clone(), edges: edges.clone() });
        return;
    };
    ident_edges(l1, l2, rest, nodes, edges, out);
    let edge = &l1.edges()[e];
    let (Some(s), Some(t)) = (nodes.get(&edge.src), nodes.get(&edge.tgt)) else {
        return;
    };
    for (f, fe) in l2.edges() {
        if fe.ty == edge.ty && &fe.src == s && &fe.tgt == t && !edges.values().any(|x| x == f) {
            edges.insert(e.clone(), f.clone());
            ident_edges(l1, l2, rest, nodes, edges, out);
            edges.remove(e);
        }
    }
}

/// Glues `l1` and `l2` along `ident`. Elements of `l1` keep their ids;
/// unidentified elements of `l2` are primed until their id is unused.
pub(crate) fn glue(
    l1: &TypedGraph,
    l2: &TypedGraph,
    ident: &Identification,
) -> (TypedGraph, GraphMorphism, GraphMorphism) {
    let mut g = l1.clone();
    let m1 = GraphMorphism::identity(l1);
    let mut m2 = GraphMorphism::default();
    let inverse_nodes: BTreeMap<&String, &String> = ident.nodes.iter().map(|(a, b)| (b, a)).collect();
    let inverse_edges: BTreeMap<&String, &String> = ident.edges.iter().map(|(a, b)| (b, a)).collect();
    let prime = |id: &String, g: &TypedGraph| {
        let mut p = format!("{id}'");
        while g.contains(&p) || l2.contains(&p) {
            p.push('\'');
        }
        p
    };
    for (v, ty) in l2.nodes() {
        let img = match inverse_nodes.get(v) {
            Some(w) => (*w).clone(),
            None => {
                let p = if g.contains(v) { prime(v, &g) } else { v.clone() };
                g.try_add_node(&p, ty).expect("fresh id");
                p
            }
        };
        m2.node_map.insert(v.clone(), img);
    }
    for (e, edge) in l2.edges() {
        let img = match inverse_edges.get(e) {
            Some(f) => (*f).clone(),
            None => {
                let p = if g.contains(e) { prime(e, &g) } else { e.clone() };
                g.try_add_edge(&p, &edge.ty, &m2.node_map[&edge.src], &m2.node_map[&edge.tgt])
                    .expect("fresh id");
                p
            }
        };
        m2.edge_map.insert(e.clone(), img);
    }
    (g, m1, m2)
}

fn images(m: &GraphMorphism, rule: &DpoRule, kept_only: bool) -> BTreeSet<String> {
    m.node_map
        .iter()
        .chain(m.edge_map.iter())
        .filter(|(k, _)| !kept_only || rule.is_kept(k))
        .map(|(_, v)| v.clone())
        .collect()
}

/// Every overlap of the two left-hand sides with a non-empty intersection
/// where both matches satisfy the gluing condition.
pub fn gts_overlaps(r1: &DpoRule, r2: &DpoRule) -> Vec<GtsOverlap> {
    let mut out = Vec::new();
    for ident in identifications(r1.lhs(), r2.lhs()) {
        if ident.nodes.is_empty() {
            continue;
        }
        let (graph, m1, m2) = glue(r1.lhs(), r2.lhs(), &ident);
        let glues = |rule: &DpoRule, m: &GraphMorphism| {
            let mt = Match { rule: rule.name().to_string(), morphism: m.clone() };
            check_gluing(rule, &mt, &graph).is_ok_and(|r| r.satisfied)
        };
        if !glues(r1, &m1) || !glues(r2, &m2) {
            continue;
        }
        let (i1, i2) = (images(&m1, r1, false), images(&m2, r2, false));
        let (k1, k2) = (images(&m1, r1, true), images(&m2, r2, true));
        let kk: BTreeSet<&String> = k1.intersection(&k2).collect();
        let parallel_dependent = i1.intersection(&i2).any(|x| !kk.contains(x));
        out.push(GtsOverlap { graph, m1, m2, parallel_dependent });
    }
    out
}

/// The parallel dependent overlaps: the critical pairs of `r1` and `r2`.
pub fn gts_critical_pairs(r1: &DpoRule, r2: &DpoRule) -> Vec<GtsOverlap> {
    gts_overlaps(r1, r2).into_iter().filter(|o| o.parallel_dependent).collect()
}
