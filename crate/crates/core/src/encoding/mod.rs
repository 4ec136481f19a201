//! Translation of typed graphs and DPO rules into CHR, and the graph
//! invariant that characterizes the states arising from it.

mod invariant;
mod rule;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chr::{BuiltinStore, ChrState, Constraint, Term};
use crate::graph::{degree, validate, GraphError, TypeGraph, TypedGraph};

pub use invariant::{check_graph_invariant, decode, graph_key, GraphStateView, InvariantViolation};
pub use rule::{encode_gts, encode_rule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("unknown strong node `{0}`")]
    UnknownStrongNode(String),
    #[error("rule `{0}` has an empty left-hand side")]
    EmptyHead(String),
    #[error("rule `{0}` removes nothing and would encode as a propagation rule")]
    PropagationRule(String),
    #[error("invalid rule `{rule}`: {reason}")]
    InvalidRule { rule: String, reason: String },
}

/// Whether node degrees are written as constants or as degree variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncodeMode {
    Ground,
    Kept,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderOptions {
    /// Reuse `N`/`D` instead of introducing primed copies for kept nodes.
    pub variable_elimination: bool,
    /// Fold `D' = D - l + r` into one offset; drop it when the offset is zero.
    pub arithmetic_simplification: bool,
    /// Give edge constraints an identifier argument (arity 3 instead of 2).
    pub edge_identifiers: bool,
    /// Keep unchanged kept elements in the kept part of the head.
    pub simpagation: bool,
}

impl Default for EncoderOptions {
    fn default() -> Self {
        EncoderOptions {
            variable_elimination: true,
            arithmetic_simplification: true,
            edge_identifiers: true,
            simpagation: false,
        }
    }
}

impl EncoderOptions {
    /// The literal translation with every simplification switched off.
    pub fn verbose() -> Self {
        EncoderOptions {
            variable_elimination: false,
            arithmetic_simplification: false,
            edge_identifiers: true,
            simpagation: false,
        }
    }

    pub fn edge_arity(&self) -> usize {
        if self.edge_identifiers {
            3
        } else {
            2
        }
    }
}

/// Which variables of an encoded host graph are global.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlobalsPolicy {
    #[default]
    AllVars,
    None,
    Explicit(BTreeSet<String>),
}

/// Variable names for graph elements: `N<id>` for nodes, `E<id>` for edges,
/// `D<id>` for degrees. A leading `n`/`N` (resp. `e`/`E`) of the id is
/// dropped so that node `n1` becomes `N1`, unless that would map two ids to
/// the same name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamingScheme {
    strip: bool,
}

fn strip_prefix(id: &str, p: char) -> &str {
    id.strip_prefix([p, p.to_ascii_uppercase()]).unwrap_or(id)
}

impl NamingScheme {
    pub fn for_ids<'a>(nodes: impl IntoIterator<Item = &'a String>, edges: impl IntoIterator<Item = &'a String>) -> Self {
        let nodes: Vec<&String> = nodes.into_iter().collect();
        let edges: Vec<&String> = edges.into_iter().collect();
        let ns: BTreeSet<&str> = nodes.iter().map(|v| strip_prefix(v, 'n')).collect();
        let es: BTreeSet<&str> = edges.iter().map(|e| strip_prefix(e, 'e')).collect();
        let nodes_set: BTreeSet<&String> = nodes.iter().copied().collect();
        let edges_set: BTreeSet<&String> = edges.iter().copied().collect();
        NamingScheme { strip: ns.len() == nodes_set.len() && es.len() == edges_set.len() }
    }

    pub fn for_graph(g: &TypedGraph) -> Self {
        NamingScheme::for_ids(g.nodes().keys(), g.edges().keys())
    }

    fn key<'a>(&self, id: &'a str, p: char) -> &'a str {
        if self.strip {
            strip_prefix(id, p)
        } else {
            id
        }
    }

    pub fn node_var(&self, id: &str) -> String {
        format!("N{}", self.key(id, 'n'))
    }

    pub fn edge_var(&self, id: &str) -> String {
        format!("E{}", self.key(id, 'e'))
    }

    pub fn degree_var(&self, id: &str) -> String {
        format!("D{}", self.key(id, 'n'))
    }
}

/// The constraint symbols needed for graphs over `tg`.
pub fn constraint_symbols(tg: &TypeGraph, opts: &EncoderOptions) -> BTreeSet<(String, usize)> {
    tg.node_types()
        .iter()
        .map(|n| (n.clone(), 2))
        .chain(tg.edge_types().keys().map(|e| (e.clone(), opts.edge_arity())))
        .collect()
}

pub(crate) fn edge_constraint(ty: &str, id: String, src: String, tgt: String, opts: &EncoderOptions) -> Constraint {
    let mut args = Vec::with_capacity(3);
    if opts.edge_identifiers {
        args.push(Term::Var(id));
    }
    args.push(Term::Var(src));
    args.push(Term::Var(tgt));
    Constraint::new(ty, args)
}

/// Encodes a host graph. Nodes in `strong` get their degree variable instead
/// of the degree constant; in [`EncodeMode::Kept`] every node does.
pub fn encode_graph(
    g: &TypedGraph,
    mode: EncodeMode,
    strong: &BTreeSet<String>,
    globals: &GlobalsPolicy,
    opts: &EncoderOptions,
) -> Result<ChrState, EncodeError> {
    if let Some(v) = validate(g).into_iter().next() {
        return Err(GraphError::Invalid(vec![v]).into());
    }
    if let Some(s) = strong.iter().find(|s| !g.nodes().contains_key(*s)) {
        return Err(EncodeError::UnknownStrongNode(s.clone()));
    }
    let names = NamingScheme::for_graph(g);
    let mut goal = Vec::new();
    let mut vars = BTreeSet::new();
    for (v, ty) in g.nodes() {
        let n = names.node_var(v);
        vars.insert(n.clone());
        let d = if mode == EncodeMode::Kept || strong.contains(v) {
            let d = names.degree_var(v);
            vars.insert(d.clone());
            Term::Var(d)
        } else {
            Term::int(degree(g, v)? as i64)
        };
        goal.push(Constraint::new(ty, vec![Term::Var(n), d]));
    }
    for (e, edge) in g.edges() {
        if opts.edge_identifiers {
            vars.insert(names.edge_var(e));
        }
        goal.push(edge_constraint(
            &edge.ty,
            names.edge_var(e),
            names.node_var(&edge.src),
            names.node_var(&edge.tgt),
            opts,
        ));
    }
    let globals = match globals {
        GlobalsPolicy::AllVars => vars,
        GlobalsPolicy::None => BTreeSet::new(),
        GlobalsPolicy::Explicit(s) => s.clone(),
    };
    Ok(ChrState { goal, store: BuiltinStore::top(), globals })
}

/// Element id → variable, as used by [`encode_graph`].
pub fn id_binding(g: &TypedGraph) -> BTreeMap<String, String> {
    let names = NamingScheme::for_graph(g);
    g.nodes()
        .keys()
        .map(|v| (v.clone(), names.node_var(v)))
        .chain(g.edges().keys().map(|e| (e.clone(), names.edge_var(e))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chr::term::c;
    use crate::dpo::fixtures::*;
    use std::sync::Arc;

    fn two_cycle() -> TypedGraph {
        TypedGraph::new(tg())
            .node("1", "node").node("2", "node")
            .edge("e1", "edge", "1", "2").edge("e2", "edge", "2", "1")
    }

    #[test]
    fn symbols() {
        let o = EncoderOptions::default();
        let expect: BTreeSet<(String, usize)> = [("node".into(), 2), ("edge".into(), 3)].into();
        assert_eq!(constraint_symbols(&TypeGraph::trivial(), &o), expect);
        let tg = TypeGraph::new(["process", "resource"], [("use".into(), "process".into(), "resource".into())]).unwrap();
        assert_eq!(constraint_symbols(&tg, &o).len(), 3);
        assert!(constraint_symbols(&TypeGraph::default(), &o).is_empty());
    }

    #[test]
    fn ground_and_kept() {
        let o = EncoderOptions::default();
        let s = encode_graph(&two_cycle(), EncodeMode::Ground, &BTreeSet::new(), &GlobalsPolicy::AllVars, &o).unwrap();
        assert_eq!(
            s.goal,
            vec![c("node", &["N1", "2"]), c("node", &["N2", "2"]), c("edge", &["E1", "N1", "N2"]), c("edge", &["E2", "N2", "N1"])]
        );
        let k = encode_graph(&two_cycle(), EncodeMode::Kept, &BTreeSet::new(), &GlobalsPolicy::None, &o).unwrap();
        assert_eq!(k.goal[0], c("node", &["N1", "D1"]));
        assert!(k.globals.is_empty());
        let empty = encode_graph(&TypedGraph::new(Arc::new(TypeGraph::trivial())), EncodeMode::Ground, &BTreeSet::new(), &GlobalsPolicy::AllVars, &o).unwrap();
        assert_eq!(empty, ChrState::new(vec![], &[], Vec::<String>::new()));
    }

    #[test]
    fn naming_falls_back_on_collision() {
        let ids = ["n1".to_string(), "1".to_string()];
        let s = NamingScheme::for_ids(ids.iter(), std::iter::empty());
        assert_ne!(s.node_var("n1"), s.node_var("1"));
        let s = NamingScheme::for_ids([ids[0].clone()].iter(), std::iter::empty());
        assert_eq!(s.node_var("n1"), "N1");
        assert_eq!(s.degree_var("n1"), "D1");
    }
}
