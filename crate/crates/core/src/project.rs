//! Project files: one JSON document holding a type graph, rules and named
//! host graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dpo::json::RuleJson;
use crate::dpo::{DpoError, Gts};
use crate::graph::json::{GraphJson, TypeGraphJson};
use crate::graph::{GraphError, TypeGraph, TypedGraph};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ProjectJson {
    pub type_graph: TypeGraphJson,
    #[serde(default)]
    pub rules: Vec<RuleJson>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub hosts: BTreeMap<String, GraphJson>,
}

#[derive(Debug, Error)]
pub enum ProjectError {
    #[error("malformed project: {0}")]
    Json(#[from] serde_json::Error),
    #[error("type graph: {0}")]
    TypeGraph(GraphError),
    #[error(transparent)]
    Rule(#[from] DpoError),
    #[error("host `{name}`: {source}")]
    Host { name: String, source: GraphError },
}

/// A host graph together with the nodes marked strong.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Host {
    pub graph: TypedGraph,
    pub strong: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Project {
    pub gts: Gts,
    pub hosts: BTreeMap<String, Host>,
}

impl Project {
    pub fn from_json(json: &ProjectJson) -> Result<Self, ProjectError> {
        let tg = Arc::new(json.type_graph.to_type_graph().map_err(ProjectError::TypeGraph)?);
        let rules = json.rules.iter().map(|r| r.to_rule(tg.clone())).collect::<Result<Vec<_>, _>>()?;
        let gts = Gts::new(tg.clone(), rules)?;
        let mut hosts = BTreeMap::new();
        for (name, h) in &json.hosts {
            let graph = h
                .to_graph(tg.clone())
                .map_err(|source| ProjectError::Host { name: name.clone(), source })?;
            hosts.insert(name.clone(), Host { graph, strong: h.strong_nodes() });
        }
        Ok(Project { gts, hosts })
    }

    pub fn parse(text: &str) -> Result<Self, ProjectError> {
        Project::from_json(&serde_json::from_str(text)?)
    }

    pub fn type_graph(&self) -> &Arc<TypeGraph> {
        self.gts.type_graph()
    }

    pub fn to_json(&self) -> ProjectJson {
        ProjectJson {
            type_graph: self.type_graph().as_ref().into(),
            rules: self.gts.rules().iter().map(RuleJson::from).collect(),
            hosts: self
                .hosts
                .iter()
                .map(|(n, h)| (n.clone(), GraphJson::from_graph(&h.graph, &h.strong)))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpo::fixtures::*;

    #[test]
    fn round_trip() {
        let p = Project {
            gts: cyclic_list(),
            hosts: BTreeMap::from([(
                "cycle3".to_string(),
                Host { graph: cycle(3), strong: BTreeSet::from(["V3".to_string()]) },
            )]),
        };
        let text = serde_json::to_string(&p.to_json()).unwrap();
        assert_eq!(Project::parse(&text).unwrap(), p);
    }

    #[test]
    fn dangling_rule_graph_is_reported() {
        let text = r#"{"type_graph":{"node_types":["node"],"edge_types":[{"name":"edge","src":"node","tgt":"node"}]},
            "rules":[{"name":"bad","L":{"nodes":[{"id":"a","type":"node"}],"edges":[{"id":"e","type":"edge","src":"a","tgt":"b"}]},
            "K":{"nodes":["a"]},"R":{"nodes":[{"id":"a","type":"node"}],"edges":[]}}]}"#;
        let err = Project::parse(text).unwrap_err();
        assert!(err.to_string().contains("dangling endpoint"), "{err}");
    }

    #[test]
    fn empty_project() {
        let p = Project::parse(r#"{"type_graph":{"node_types":[],"edge_types":[]}}"#).unwrap();
        assert!(p.gts.rules().is_empty());
    }
}
