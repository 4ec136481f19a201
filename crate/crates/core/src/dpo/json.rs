//! JSON interchange for rules.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{DpoError, DpoRule};
use crate::graph::json::GraphJson;
use crate::graph::TypeGraph;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct InterfaceJson {
    #[serde(default)]
    pub nodes: Vec<String>,
    #[serde(default)]
    pub edges: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleJson {
    pub name: String,
    #[serde(rename = "L")]
    pub lhs: GraphJson,
    #[serde(rename = "K", default)]
    pub kept: InterfaceJson,
    #[serde(rename = "R")]
    pub rhs: GraphJson,
}

impl RuleJson {
    pub fn to_rule(&self, type_graph: Arc<TypeGraph>) -> Result<DpoRule, DpoError> {
        let wrap = |side: &str, e: &dyn std::fmt::Display| DpoError::InvalidRule {
            rule: self.name.clone(),
            reason: format!("{side}: {e}"),
        };
        let lhs = self.lhs.to_graph(type_graph.clone()).map_err(|e| wrap("L", &e))?;
        let rhs = self.rhs.to_graph(type_graph).map_err(|e| wrap("R", &e))?;
        for id in &self.kept.nodes {
            if !lhs.nodes().contains_key(id) {
                return Err(wrap("K", &format!("`{id}` is not a node of L")));
            }
        }
        for id in &self.kept.edges {
            if !lhs.edges().contains_key(id) {
                return Err(wrap("K", &format!("`{id}` is not an edge of L")));
            }
        }
        DpoRule::new(&self.name, lhs, self.kept.nodes.iter().chain(&self.kept.edges).cloned(), rhs)
    }
}

impl From<&DpoRule> for RuleJson {
    fn from(r: &DpoRule) -> Self {
        let k = r.interface();
        RuleJson {
            name: r.name().to_string(),
            lhs: r.lhs().into(),
            kept: InterfaceJson {
                nodes: k.nodes().keys().cloned().collect(),
                edges: k.edges().keys().cloned().collect(),
            },
            rhs: r.rhs().into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpo::fixtures::*;

    #[test]
    fn round_trip() {
        let j = RuleJson::from(&unlink());
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("\"K\":{\"nodes\":[\"1\",\"3\"]"));
        let back: RuleJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_rule(tg()).unwrap(), unlink());
    }
}
