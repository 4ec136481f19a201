use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use super::edge_constraint;
use super::EncoderOptions;
use crate::chr::{normalize, structural_key, BuiltinStore, ChrState, Const, Constraint, Term};
use crate::graph::{canonical_form, TypeGraph, TypedGraph};

/// Why a state is not (recognizably) a graph state.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantViolation {
    #[error("the built-in store is inconsistent")]
    Failed,
    #[error("constraint `{0}` does not encode a node or edge of the type graph")]
    UnknownSymbol(String),
    #[error("constraint `{0}` is not a well-formed node or edge encoding")]
    Malformed(String),
    #[error("edge constraints mix arities 2 and 3")]
    MixedEdgeArity,
    #[error("duplicate node encoding for `{0}`")]
    DuplicateNode(String),
    #[error("duplicate edge identifier `{0}`")]
    DuplicateEdge(String),
    #[error("variable `{0}` is used both as an identifier and elsewhere")]
    IdentifierClash(String),
    #[error("edge `{edge}` has endpoint `{endpoint}` that is not an encoded node")]
    DanglingEdge { edge: String, endpoint: String },
    #[error("edge `{edge}` of type `{ty}` has endpoint `{endpoint}` of type `{found}`")]
    EndpointType { edge: String, ty: String, endpoint: String, found: String },
    #[error("degree inconsistency at `{node}`: encoded {encoded}, incident {actual}")]
    DegreeInconsistency { node: String, encoded: i64, actual: i64 },
    #[error("degree variable of strong node `{node}` is shared")]
    SharedDegree { node: String },
}

/// A decoded graph state. Node ids of `graph` are the identifier variables
/// of the state; edge ids are the edge identifier variables, or generated
/// ids when edge identifiers are off.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphStateView {
    pub graph: TypedGraph,
    /// Nodes whose degree is not a constant.
    pub strong: BTreeSet<String>,
    /// Element id → variable in the state. Generated edge ids are absent.
    pub id_binding: BTreeMap<String, String>,
    /// Degree terms of the strong nodes.
    pub degrees: BTreeMap<String, Term>,
    pub store: BuiltinStore,
    pub globals: BTreeSet<String>,
    pub edge_identifiers: bool,
}

impl GraphStateView {
    /// Re-encodes the view. The result is ≡ to the state it was decoded from.
    pub fn encode(&self) -> ChrState {
        let opts = EncoderOptions { edge_identifiers: self.edge_identifiers, ..EncoderOptions::default() };
        let mut goal = Vec::new();
        for (v, ty) in self.graph.nodes() {
            let d = match self.degrees.get(v) {
                Some(t) => t.clone(),
                None => Term::int(crate::graph::degree_unchecked(&self.graph, v) as i64),
            };
            goal.push(Constraint::new(ty, vec![Term::var(v.clone()), d]));
        }
        for (e, edge) in self.graph.edges() {
            goal.push(edge_constraint(&edge.ty, e.clone(), edge.src.clone(), edge.tgt.clone(), &opts));
        }
        ChrState { goal, store: self.store.clone(), globals: self.globals.clone() }
    }
}

fn plain_var(t: &Term) -> Option<&str> {
    match t {
        Term::Var(v) => Some(v),
        _ => None,
    }
}

/// Decides whether `state` is a graph state over `tg` and decodes it.
///
/// The check is structural: after normalization every goal constraint must
/// be a node or edge encoding, identifiers must be distinct variables, edge
/// endpoints must be encoded nodes of the right type, constant degrees must
/// equal the number of incident edges, and each non-constant degree must be
/// over a variable that occurs nowhere else in the goal.
pub fn check_graph_invariant(state: &ChrState, tg: &Arc<TypeGraph>) -> Result<GraphStateView, InvariantViolation> {
    let s = normalize(state);
    if s.is_failed() {
        return Err(InvariantViolation::Failed);
    }
    let mut nodes: Vec<(&str, &str, &Term)> = Vec::new();
    let mut edges: Vec<(&str, Option<&str>, &str, &str)> = Vec::new();
    let mut arity = None;
    for c in &s.goal {
        let malformed = || InvariantViolation::Malformed(c.to_string());
        if tg.has_node_type(&c.symbol) {
            let [id, d] = c.args.as_slice() else { return Err(malformed()) };
            let id = plain_var(id).ok_or_else(malformed)?;
            if matches!(d, Term::Const(Const::Sym(_))) {
                return Err(malformed());
            }
            nodes.push((id, &c.symbol, d));
        } else if tg.edge_type(&c.symbol).is_some() {
            let vars: Option<Vec<&str>> = c.args.iter().map(plain_var).collect();
            let vars = vars.ok_or_else(malformed)?;
            match *arity.get_or_insert(vars.len()) {
                n if n != vars.len() => return Err(InvariantViolation::MixedEdgeArity),
                _ => {}
            }
            match vars.as_slice() {
                [id, s, t] => edges.push((&c.symbol, Some(id), s, t)),
                [s, t] => edges.push((&c.symbol, None, s, t)),
                _ => return Err(malformed()),
            }
        } else {
            return Err(InvariantViolation::UnknownSymbol(c.to_string()));
        }
    }

    let mut node_type: BTreeMap<&str, &str> = BTreeMap::new();
    for (id, ty, _) in &nodes {
        if node_type.insert(id, ty).is_some() {
            return Err(InvariantViolation::DuplicateNode(id.to_string()));
        }
    }
    let mut edge_ids: BTreeSet<&str> = BTreeSet::new();
    for (_, id, _, _) in &edges {
        if let Some(id) = id {
            if node_type.contains_key(id) {
                return Err(InvariantViolation::IdentifierClash(id.to_string()));
            }
            if !edge_ids.insert(id) {
                return Err(InvariantViolation::DuplicateEdge(id.to_string()));
            }
        }
    }
    let mut incident: BTreeMap<&str, i64> = BTreeMap::new();
    for (ty, id, src, tgt) in &edges {
        let et = tg.edge_type(ty).expect("checked above");
        let name = id.unwrap_or(src);
        for (endpoint, expected) in [(src, &et.src), (tgt, &et.tgt)] {
            match node_type.get(*endpoint) {
                None => {
                    return Err(InvariantViolation::DanglingEdge {
                        edge: name.to_string(),
                        endpoint: endpoint.to_string(),
                    })
                }
                Some(found) if *found != expected => {
                    return Err(InvariantViolation::EndpointType {
                        edge: name.to_string(),
                        ty: ty.to_string(),
                        endpoint: endpoint.to_string(),
                        found: found.to_string(),
                    })
                }
                _ => *incident.entry(endpoint).or_default() += 1,
            }
        }
    }

    let mut occurrences: BTreeMap<&str, usize> = BTreeMap::new();
    for c in &s.goal {
        for v in c.vars() {
            *occurrences.entry(v).or_default() += 1;
        }
    }
    let mut strong = BTreeSet::new();
    let mut degrees = BTreeMap::new();
    for (id, _, d) in &nodes {
        let actual = incident.get(id).copied().unwrap_or(0);
        match d {
            Term::Const(Const::Int(k)) => {
                if *k != actual {
                    return Err(InvariantViolation::DegreeInconsistency {
                        node: id.to_string(),
                        encoded: *k,
                        actual,
                    });
                }
            }
            _ => {
                let base = d.base().expect("variable degree");
                if node_type.contains_key(base) || edge_ids.contains(base) {
                    return Err(InvariantViolation::IdentifierClash(base.to_string()));
                }
                if occurrences[base] != 1 {
                    return Err(InvariantViolation::SharedDegree { node: id.to_string() });
                }
                strong.insert(id.to_string());
                degrees.insert(id.to_string(), (*d).clone());
            }
        }
    }

    let mut graph = TypedGraph::new(tg.clone());
    let mut id_binding = BTreeMap::new();
    for (id, ty, _) in &nodes {
        graph.try_add_node(*id, *ty).expect("distinct node ids");
        id_binding.insert(id.to_string(), id.to_string());
    }
    let mut k = 0usize;
    for (ty, id, src, tgt) in &edges {
        let eid = match id {
            Some(id) => {
                id_binding.insert(id.to_string(), id.to_string());
                id.to_string()
            }
            None => loop {
                k += 1;
                let cand = format!("e{k}");
                if !graph.contains(&cand) {
                    break cand;
                }
            },
        };
        graph.try_add_edge(eid, *ty, *src, *tgt).map_err(|_| InvariantViolation::IdentifierClash(id.unwrap_or(src).to_string()))?;
    }
    Ok(GraphStateView {
        graph,
        strong,
        id_binding,
        degrees,
        store: s.store.clone(),
        globals: s.globals.clone(),
        edge_identifiers: arity != Some(2),
    })
}

/// The decoded graph and its strong nodes.
pub fn decode(state: &ChrState, tg: &Arc<TypeGraph>) -> Result<(TypedGraph, BTreeSet<String>), InvariantViolation> {
    check_graph_invariant(state, tg).map(|v| (v.graph, v.strong))
}

/// A memo key that is equal for ≡-equivalent graph states: the canonical
/// form of the decoded graph with global identifiers and strong degrees as
/// node labels. States outside the invariant fall back to
/// [`structural_key`].
pub fn graph_key(state: &ChrState, tg: &Arc<TypeGraph>) -> String {
    let Ok(view) = check_graph_invariant(state, tg) else {
        return structural_key(state);
    };
    let globals = &view.globals;
    let mut labels = BTreeMap::new();
    for v in view.graph.nodes().keys() {
        let mut l = String::new();
        if globals.contains(v) {
            l.push_str(v);
        }
        if let Some(d) = view.degrees.get(v) {
            match d.base() {
                Some(b) if globals.contains(b) => l.push_str(&format!("/{d}")),
                _ => l.push_str("/_"),
            }
        }
        if !l.is_empty() {
            labels.insert(v.clone(), l);
        }
    }
    let global_edges: Vec<&String> = view.graph.edges().keys().filter(|e| globals.contains(*e)).collect();
    format!(
        "{}|{:?}|{}|{:?}",
        canonical_form(&view.graph, &labels),
        global_edges,
        view.store,
        globals
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chr::term::{c, t};
    use crate::chr::states_equivalent;
    use crate::dpo::fixtures::*;
    use crate::encoding::{encode_graph, EncodeMode, GlobalsPolicy};
    use crate::graph::find_isomorphism;

    #[test]
    fn loop_state_decodes_with_strong_node() {
        let s = ChrState::new(vec![c("node", &["N3", "D3"]), c("edge", &["E'", "N3", "N3"])], &[], ["N3", "D3"]);
        let v = check_graph_invariant(&s, &tg()).unwrap();
        assert_eq!(v.graph.node_count(), 1);
        assert_eq!(v.graph.edge_count(), 1);
        assert_eq!(v.strong, BTreeSet::from(["N3".to_string()]));
        assert!(states_equivalent(&v.encode(), &s));
    }

    #[test]
    fn violations() {
        let dup = ChrState::new(
            vec![c("node", &["N", "D1"]), c("node", &["N", "D2"])],
            &[],
            Vec::<String>::new(),
        );
        let err = check_graph_invariant(&dup, &tg()).unwrap_err();
        assert!(err.to_string().contains("duplicate node encoding"));

        let deg = ChrState::new(
            vec![c("node", &["N", "1"]), c("node", &["M", "1"]), c("edge", &["A", "N", "M"]), c("edge", &["B", "M", "N"])],
            &[],
            Vec::<String>::new(),
        );
        let err = check_graph_invariant(&deg, &tg()).unwrap_err();
        assert!(err.to_string().contains("degree inconsistency"));

        let dangling = ChrState::new(vec![c("node", &["N", "1"]), c("edge", &["A", "N", "M"])], &[], ["N"]);
        assert!(matches!(check_graph_invariant(&dangling, &tg()), Err(InvariantViolation::DanglingEdge { .. })));
        let shared = ChrState::new(vec![c("node", &["N", "D"]), c("node", &["M", "D"])], &[], ["N"]);
        assert!(matches!(check_graph_invariant(&shared, &tg()), Err(InvariantViolation::SharedDegree { .. })));
        assert_eq!(check_graph_invariant(&ChrState::failed(), &tg()), Err(InvariantViolation::Failed));
        let bound = ChrState::new(vec![c("node", &["N", "D"])], &[(t("D"), t("0"))], ["N"]);
        assert!(check_graph_invariant(&bound, &tg()).unwrap().strong.is_empty());
    }

    #[test]
    fn round_trip() {
        for g in [cycle(3), cycle(4), dangle()] {
            let s = encode_graph(&g, EncodeMode::Ground, &BTreeSet::new(), &GlobalsPolicy::AllVars, &EncoderOptions::default()).unwrap();
            let v = check_graph_invariant(&s, &tg()).unwrap();
            assert!(find_isomorphism(&v.graph, &g, &BTreeMap::new()).unwrap().is_some());
            assert!(states_equivalent(&v.encode(), &s));
            let no_ids = EncoderOptions { edge_identifiers: false, ..EncoderOptions::default() };
            let s = encode_graph(&g, EncodeMode::Kept, &BTreeSet::new(), &GlobalsPolicy::None, &no_ids).unwrap();
            let v = check_graph_invariant(&s, &tg()).unwrap();
            assert_eq!(v.strong.len(), g.node_count());
            assert!(states_equivalent(&v.encode(), &s));
        }
    }

    #[test]
    fn key_ignores_local_names() {
        let a = ChrState::new(vec![c("node", &["A", "D"]), c("edge", &["E", "A", "A"])], &[], Vec::<String>::new());
        let b = ChrState::new(vec![c("edge", &["F", "B", "B"]), c("node", &["B", "X+3"])], &[], Vec::<String>::new());
        assert_eq!(graph_key(&a, &tg()), graph_key(&b, &tg()));
        let g = a.clone().with_globals(["A"]);
        assert_ne!(graph_key(&a, &tg()), graph_key(&g, &tg()));
    }
}
