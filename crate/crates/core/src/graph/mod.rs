//! Typed graphs, graph morphisms and the structural queries every other
//! module is built on.
//!
//! Identifiers are opaque strings. All collections are ordered maps so that
//! iteration (and therefore every report derived from it) is deterministic.

mod canon;
mod iso;
pub mod json;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use canon::canonical_form;
pub use iso::find_isomorphism;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("graphs are typed over different type graphs")]
    TypeGraphMismatch,
    #[error("invalid type graph: {0}")]
    InvalidTypeGraph(String),
    #[error("invalid graph: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// Source and target node types of an edge type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeType {
    pub src: String,
    pub tgt: String,
}

/// A type graph: node type names and edge type names with their endpoint
/// types. All names are unique across both sets.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TypeGraph {
    node_types: BTreeSet<String>,
    edge_types: BTreeMap<String, EdgeType>,
}

impl TypeGraph {
    pub fn new<N, E>(node_types: N, edge_types: E) -> Result<Self, GraphError>
    where
        N: IntoIterator,
        N::Item: Into<String>,
        E: IntoIterator<Item = (String, String, String)>,
    {
        let mut tg = TypeGraph::default();
        for n in node_types {
            let n = n.into();
            if !tg.node_types.insert(n.clone()) {
                return Err(GraphError::InvalidTypeGraph(format!("duplicate type name `{n}`")));
            }
        }
        for (name, src, tgt) in edge_types {
            if tg.node_types.contains(&name) || tg.edge_types.contains_key(&name) {
                return Err(GraphError::InvalidTypeGraph(format!(
                    "duplicate type name `{name}`"
                )));
            }
            for end in [&src, &tgt] {
                if !tg.node_types.contains(end) {
                    return Err(GraphError::InvalidTypeGraph(format!(
                        "edge type `{name}` refers to unknown node type `{end}`"
                    )));
                }
            }
            tg.edge_types.insert(name, EdgeType { src, tgt });
        }
        Ok(tg)
    }

    /// The type graph with one node type `node` and one loop edge type `edge`.
    pub fn trivial() -> Self {
        TypeGraph::new(["node"], [("edge".into(), "node".into(), "node".into())])
            .expect("trivial type graph is valid")
    }

    pub fn node_types(&self) -> &BTreeSet<String> {
        &self.node_types
    }

    pub fn edge_types(&self) -> &BTreeMap<String, EdgeType> {
        &self.edge_types
    }

    pub fn has_node_type(&self, ty: &str) -> bool {
        self.node_types.contains(ty)
    }

    pub fn edge_type(&self, ty: &str) -> Option<&EdgeType> {
        self.edge_types.get(ty)
    }

    pub fn is_empty(&self) -> bool {
        self.node_types.is_empty() && self.edge_types.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    #[serde(rename = "type")]
    pub ty: String,
    pub src: String,
    pub tgt: String,
}

/// A finite graph typed over a shared [`TypeGraph`].
#[derive(Debug, Clone)]
pub struct TypedGraph {
    type_graph: Arc<TypeGraph>,
    nodes: BTreeMap<String, String>,
    edges: BTreeMap<String, Edge>,
}

impl PartialEq for TypedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.same_type_graph(other) && self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for TypedGraph {}

/// A structural problem found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateId { id: String },
    DanglingEndpoint { edge: String, endpoint: String },
    UnknownNodeType { node: String, ty: String },
    UnknownEdgeType { edge: String, ty: String },
    EndpointTypeMismatch { edge: String, endpoint: String, expected: String, found: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateId { id } => write!(f, "duplicate id `{id}`"),
            Violation::DanglingEndpoint { edge, endpoint } => {
                write!(f, "dangling endpoint: edge `{edge}` refers to missing node `{endpoint}`")
            }
            Violation::UnknownNodeType { node, ty } => {
                write!(f, "node `{node}` has unknown type `{ty}`")
            }
            Violation::UnknownEdgeType { edge, ty } => {
                write!(f, "edge `{edge}` has unknown type `{ty}`")
            }
            Violation::EndpointTypeMismatch { edge, endpoint, expected, found } => write!(
                f,
                "edge `{edge}` endpoint `{endpoint}` has type `{found}`, expected `{expected}`"
            ),
        }
    }
}

impl TypedGraph {
    pub fn new(type_graph: Arc<TypeGraph>) -> Self {
        TypedGraph { type_graph, nodes: BTreeMap::new(), edges: BTreeMap::new() }
    }

    pub fn type_graph(&self) -> &Arc<TypeGraph> {
        &self.type_graph
    }

    pub fn same_type_graph(&self, other: &TypedGraph) -> bool {
        Arc::ptr_eq(&self.type_graph, &other.type_graph) || *self.type_graph == *other.type_graph
    }

    pub fn try_add_node(
        &mut self,
        id: impl Into<String>,
        ty: impl Into<String>,
    ) -> Result<(), GraphError> {
        let id = id.into();
        if self.nodes.contains_key(&id) || self.edges.contains_key(&id) {
            return Err(GraphError::DuplicateId(id));
        }
        self.nodes.insert(id, ty.into());
        Ok(())
    }

    pub fn try_add_edge(
        &mut self,
        id: impl Into<String>,
        ty: impl Into<String>,
        src: impl Into<String>,
        tgt: impl Into<String>,
    ) -> Result<(), GraphError> {
        let id = id.into();
        if self.nodes.contains_key(&id) || self.edges.contains_key(&id) {
            return Err(GraphError::DuplicateId(id));
        }
        self.edges.insert(id, Edge { ty: ty.into(), src: src.into(), tgt: tgt.into() });
        Ok(())
    }

    /// Builder form of [`try_add_node`](Self::try_add_node).
    ///
    /// Panics on a duplicate id; meant for literals in fixtures and tests.
    pub fn node(mut self, id: impl Into<String>, ty: impl Into<String>) -> Self {
        self.try_add_node(id, ty).expect("duplicate id in graph literal");
        self
    }

    /// Builder form of [`try_add_edge`](Self::try_add_edge). Panics on a duplicate id.
    pub fn edge(
        mut self,
        id: impl Into<String>,
        ty: impl Into<String>,
        src: impl Into<String>,
        tgt: impl Into<String>,
    ) -> Self {
        self.try_add_edge(id, ty, src, tgt).expect("duplicate id in graph literal");
        self
    }

    pub fn remove_node(&mut self, id: &str) -> Option<String> {
        self.nodes.remove(id)
    }

    pub fn remove_edge(&mut self, id: &str) -> Option<Edge> {
        self.edges.remove(id)
    }

    pub fn nodes(&self) -> &BTreeMap<String, String> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeMap<String, Edge> {
        &self.edges
    }

    pub fn node_type(&self, id: &str) -> Option<&str> {
        self.nodes.get(id).map(String::as_str)
    }

    pub fn get_edge(&self, id: &str) -> Option<&Edge> {
        self.edges.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains_key(id) || self.edges.contains_key(id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }

    /// Edges with `v` as source or target; a loop is listed once.
    pub fn incident_edges<'a>(&'a self, v: &'a str) -> impl Iterator<Item = (&'a String, &'a Edge)> + 'a {
        self.edges.iter().filter(move |(_, e)| e.src == v || e.tgt == v)
    }

    /// The induced subgraph on a set of ids: the listed nodes plus the listed
    /// edges. Endpoint closure is not enforced here; see [`is_subgraph`].
    pub fn restrict(&self, nodes: &BTreeSet<String>, edges: &BTreeSet<String>) -> TypedGraph {
        TypedGraph {
            type_graph: self.type_graph.clone(),
            nodes: self
                .nodes
                .iter()
                .filter(|(id, _)| nodes.contains(*id))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            edges: self
                .edges
                .iter()
                .filter(|(id, _)| edges.contains(*id))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn node_ids(&self) -> BTreeSet<String> {
        self.nodes.keys().cloned().collect()
    }

    pub fn edge_ids(&self) -> BTreeSet<String> {
        self.edges.keys().cloned().collect()
    }
}

/// Checks every [`TypedGraph`] invariant and lists all violations.
pub fn validate(graph: &TypedGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    let tg = graph.type_graph();
    for (id, ty) in graph.nodes() {
        if graph.edges().contains_key(id) {
            out.push(Violation::DuplicateId { id: id.clone() });
        }
        if !tg.has_node_type(ty) {
            out.push(Violation::UnknownNodeType { node: id.clone(), ty: ty.clone() });
        }
    }
    for (id, e) in graph.edges() {
        let et = tg.edge_type(&e.ty);
        if et.is_none() {
            out.push(Violation::UnknownEdgeType { edge: id.clone(), ty: e.ty.clone() });
        }
        for (end, expected) in [(&e.src, et.map(|t| &t.src)), (&e.tgt, et.map(|t| &t.tgt))] {
            match graph.node_type(end) {
                None => out.push(Violation::DanglingEndpoint {
                    edge: id.clone(),
                    endpoint: end.clone(),
                }),
                Some(found) => {
                    if let Some(expected) = expected {
                        if found != expected {
                            out.push(Violation::EndpointTypeMismatch {
                                edge: id.clone(),
                                endpoint: end.clone(),
                                expected: expected.clone(),
                                found: found.to_string(),
                            });
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Number of outgoing plus incoming edges; a loop counts twice.
pub fn degree(graph: &TypedGraph, node: &str) -> Result<usize, GraphError> {
    if !graph.nodes().contains_key(node) {
        return Err(GraphError::UnknownNode(node.to_string()));
    }
    Ok(degree_unchecked(graph, node))
}

pub(crate) fn degree_unchecked(graph: &TypedGraph, node: &str) -> usize {
    graph
        .edges()
        .values()
        .map(|e| usize::from(e.src == node) + usize::from(e.tgt == node))
        .sum()
}

/// Whether `h` is a subgraph of `g`: same ids with identical types and
/// endpoints, and `h` closed under edge endpoints.
pub fn is_subgraph(h: &TypedGraph, g: &TypedGraph) -> Result<bool, GraphError> {
    if !h.same_type_graph(g) {
        return Err(GraphError::TypeGraphMismatch);
    }
    let nodes_ok = h.nodes().iter().all(|(id, ty)| g.node_type(id) == Some(ty.as_str()));
    let edges_ok = h.edges().iter().all(|(id, e)| {
        g.get_edge(id) == Some(e) && h.nodes().contains_key(&e.src) && h.nodes().contains_key(&e.tgt)
    });
    Ok(nodes_ok && edges_ok)
}

/// A pair of id maps between two graphs. Whether it is a structure- and
/// type-preserving morphism is checked by [`GraphMorphism::is_morphism`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphMorphism {
    pub node_map: BTreeMap<String, String>,
    pub edge_map: BTreeMap<String, String>,
}

impl GraphMorphism {
    pub fn identity(g: &TypedGraph) -> Self {
        GraphMorphism {
            node_map: g.nodes().keys().map(|k| (k.clone(), k.clone())).collect(),
            edge_map: g.edges().keys().map(|k| (k.clone(), k.clone())).collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        let n: BTreeSet<_> = self.node_map.values().collect();
        let e: BTreeSet<_> = self.edge_map.values().collect();
        n.len() == self.node_map.len() && e.len() == self.edge_map.len()
    }

    pub fn map_node(&self, id: &str) -> Option<&str> {
        self.node_map.get(id).map(String::as_str)
    }

    pub fn map_edge(&self, id: &str) -> Option<&str> {
        self.edge_map.get(id).map(String::as_str)
    }

    /// Total on `from`, type preserving, and commuting with source/target.
    pub fn is_morphism(&self, from: &TypedGraph, to: &TypedGraph) -> bool {
        let nodes_ok = from.nodes().iter().all(|(id, ty)| {
            self.map_node(id).and_then(|img| to.node_type(img)) == Some(ty.as_str())
        });
        let edges_ok = from.edges().iter().all(|(id, e)| {
            let Some(img) = self.map_edge(id).and_then(|i| to.get_edge(i)) else {
                return false;
            };
            img.ty == e.ty
                && self.map_node(&e.src) == Some(img.src.as_str())
                && self.map_node(&e.tgt) == Some(img.tgt.as_str())
        });
        nodes_ok && edges_ok
    }

    /// `other ∘ self`, defined where both are defined.
    pub fn then(&self, other: &GraphMorphism) -> GraphMorphism {
        GraphMorphism {
            node_map: self
                .node_map
                .iter()
                .filter_map(|(k, v)| other.node_map.get(v).map(|w| (k.clone(), w.clone())))
                .collect(),
            edge_map: self
                .edge_map
                .iter()
                .filter_map(|(k, v)| other.edge_map.get(v).map(|w| (k.clone(), w.clone())))
                .collect(),
        }
    }
}
