//! JSON interchange for type graphs and typed graphs.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{validate, GraphError, TypeGraph, TypedGraph, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeTypeJson {
    pub name: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TypeGraphJson {
    pub node_types: Vec<String>,
    #[serde(default)]
    pub edge_types: Vec<EdgeTypeJson>,
}

impl TypeGraphJson {
    pub fn to_type_graph(&self) -> Result<TypeGraph, GraphError> {
        TypeGraph::new(
            self.node_types.iter().cloned(),
            self.edge_types.iter().map(|e| (e.name.clone(), e.src.clone(), e.tgt.clone())),
        )
    }
}

impl From<&TypeGraph> for TypeGraphJson {
    fn from(tg: &TypeGraph) -> Self {
        TypeGraphJson {
            node_types: tg.node_types().iter().cloned().collect(),
            edge_types: tg
                .edge_types()
                .iter()
                .map(|(name, t)| EdgeTypeJson {
                    name: name.clone(),
                    src: t.src.clone(),
                    tgt: t.tgt.clone(),
                })
                .collect(),
        }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeJson {
    pub id: String,
    #[serde(rename = "type")]
    pub ty: String,
    /// Marks a node whose degree is left open (a partially defined graph).
    #[serde(default, skip_serializing_if = "is_false")]
    pub strong: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub id: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GraphJson {
    #[serde(default)]
    pub nodes: Vec<NodeJson>,
    #[serde(default)]
    pub edges: Vec<EdgeJson>,
}

impl GraphJson {
    /// Builds the graph, reporting duplicate ids as well as every violation
    /// found by [`validate`].
    pub fn to_graph(&self, type_graph: Arc<TypeGraph>) -> Result<TypedGraph, GraphError> {
        let (g, mut violations) = self.to_graph_unchecked(type_graph);
        violations.extend(validate(&g));
        violations.sort();
        violations.dedup();
        if violations.is_empty() {
            Ok(g)
        } else {
            Err(GraphError::Invalid(violations))
        }
    }

    /// Builds the graph without validating; duplicate ids are returned
    /// separately since the graph cannot hold them.
    pub fn to_graph_unchecked(&self, type_graph: Arc<TypeGraph>) -> (TypedGraph, Vec<Violation>) {
        let mut g = TypedGraph::new(type_graph);
        let mut dups = Vec::new();
        for n in &self.nodes {
            if g.try_add_node(&n.id, &n.ty).is_err() {
                dups.push(Violation::DuplicateId { id: n.id.clone() });
            }
        }
        for e in &self.edges {
            if g.try_add_edge(&e.id, &e.ty, &e.src, &e.tgt).is_err() {
                dups.push(Violation::DuplicateId { id: e.id.clone() });
            }
        }
        (g, dups)
    }

    pub fn strong_nodes(&self) -> BTreeSet<String> {
        self.nodes.iter().filter(|n| n.strong).map(|n| n.id.clone()).collect()
    }

    pub fn from_graph(g: &TypedGraph, strong: &BTreeSet<String>) -> Self {
        GraphJson {
            nodes: g
                .nodes()
                .iter()
                .map(|(id, ty)| NodeJson { id: id.clone(), ty: ty.clone(), strong: strong.contains(id) })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|(id, e)| EdgeJson {
                    id: id.clone(),
                    ty: e.ty.clone(),
                    src: e.src.clone(),
                    tgt: e.tgt.clone(),
                })
                .collect(),
        }
    }

    /// All ids mentioned, for duplicate detection without building a graph.
    pub fn ids(&self) -> HashSet<&str> {
        self.nodes.iter().map(|n| n.id.as_str()).chain(self.edges.iter().map(|e| e.id.as_str())).collect()
    }
}

impl From<&TypedGraph> for GraphJson {
    fn from(g: &TypedGraph) -> Self {
        GraphJson::from_graph(g, &BTreeSet::new())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let src = r#"{"nodes":[{"id":"n1","type":"node"},{"id":"n2","type":"node","strong":true}],
                      "edges":[{"id":"e1","type":"edge","src":"n1","tgt":"n2"}]}"#;
        let j: GraphJson = serde_json::from_str(src).unwrap();
        let g = j.to_graph(Arc::new(TypeGraph::trivial())).unwrap();
        assert_eq!(GraphJson::from_graph(&g, &j.strong_nodes()), j);
    }

    #[test]
    fn duplicates_reported() {
        let j = GraphJson {
            nodes: vec![
                NodeJson { id: "a".into(), ty: "node".into(), strong: false },
                NodeJson { id: "a".into(), ty: "node".into(), strong: false },
            ],
            edges: vec![],
        };
        let err = j.to_graph(Arc::new(TypeGraph::trivial())).unwrap_err();
        assert_eq!(err, GraphError::Invalid(vec![Violation::DuplicateId { id: "a".into() }]));
    }
}
