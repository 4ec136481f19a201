//! Double-pushout rewriting with injective matches.

mod apply;
mod closure;
mod critical;
pub mod json;
mod merge;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{is_subgraph, validate, GraphError, GraphMorphism, TypeGraph, TypedGraph};

pub use apply::{apply, check_gluing, derive_all, find_matches, FreshIds};
pub use closure::{normal_forms_gts, normal_forms_gts_tracked, NormalForms};
pub use critical::{gts_critical_pairs, gts_overlaps, GtsOverlap};
pub use merge::merge_variants;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DpoError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("rule `{rule}`: {reason}")]
    InvalidRule { rule: String, reason: String },
    #[error("duplicate rule name `{0}`")]
    DuplicateRule(String),
    #[error("match is not an injective morphism from the left-hand side into the host")]
    InvalidMatch,
    #[error("gluing condition violated: dangling edges {:?}", .0.dangling_edges)]
    GluingViolated(GluingReport),
}

/// A rule `L ⟵ K ⟶ R` where `K` is given by identifiers shared between
/// `L` and `R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpoRule {
    name: String,
    lhs: TypedGraph,
    kept: BTreeSet<String>,
    rhs: TypedGraph,
}

impl DpoRule {
    pub fn new(
        name: impl Into<String>,
        lhs: TypedGraph,
        kept: impl IntoIterator<Item = impl Into<String>>,
        rhs: TypedGraph,
    ) -> Result<Self, DpoError> {
        let name = name.into();
        let kept: BTreeSet<String> = kept.into_iter().map(Into::into).collect();
        let invalid = |reason: String| DpoError::InvalidRule { rule: name.clone(), reason };
        if !lhs.same_type_graph(&rhs) {
            return Err(invalid("L and R are typed over different type graphs".into()));
        }
        for (side, g) in [("L", &lhs), ("R", &rhs)] {
            if let Some(v) = validate(g).first() {
                return Err(invalid(format!("{side}: {v}")));
            }
        }
        for id in &kept {
            if !lhs.contains(id) || !rhs.contains(id) {
                return Err(invalid(format!("K element `{id}` is not shared by L and R")));
            }
        }
        let kl = lhs.restrict(&kept, &kept);
        let kr = rhs.restrict(&kept, &kept);
        if kl != kr {
            return Err(invalid("K differs between L and R".into()));
        }
        if !is_subgraph(&kl, &lhs)? {
            return Err(invalid("K is not closed under edge endpoints".into()));
        }
        Ok(DpoRule { name, lhs, kept, rhs })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lhs(&self) -> &TypedGraph {
        &self.lhs
    }

    pub fn rhs(&self) -> &TypedGraph {
        &self.rhs
    }

    pub fn kept_ids(&self) -> &BTreeSet<String> {
        &self.kept
    }

    pub fn type_graph(&self) -> &Arc<TypeGraph> {
        self.lhs.type_graph()
    }

    /// The interface graph `K`.
    pub fn interface(&self) -> TypedGraph {
        self.lhs.restrict(&self.kept, &self.kept)
    }

    pub fn is_kept(&self, id: &str) -> bool {
        self.kept.contains(id)
    }

    pub fn deleted_nodes(&self) -> impl Iterator<Item = &String> {
        self.lhs.nodes().keys().filter(|n| !self.kept.contains(*n))
    }

    pub fn deleted_edges(&self) -> impl Iterator<Item = &String> {
        self.lhs.edges().keys().filter(|e| !self.kept.contains(*e))
    }

    pub fn created_nodes(&self) -> impl Iterator<Item = &String> {
        self.rhs.nodes().keys().filter(|n| !self.kept.contains(*n))
    }

    pub fn created_edges(&self) -> impl Iterator<Item = &String> {
        self.rhs.edges().keys().filter(|e| !self.kept.contains(*e))
    }

    /// The rule read right to left.
    pub fn inverse(&self) -> DpoRule {
        DpoRule {
            name: format!("{}^-1", self.name),
            lhs: self.rhs.clone(),
            kept: self.kept.clone(),
            rhs: self.lhs.clone(),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// A graph transformation system: a type graph and an ordered rule list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gts {
    type_graph: Arc<TypeGraph>,
    rules: Vec<DpoRule>,
}

impl Gts {
    pub fn new(type_graph: Arc<TypeGraph>, rules: Vec<DpoRule>) -> Result<Self, DpoError> {
        let mut names = BTreeSet::new();
        for r in &rules {
            if !names.insert(r.name()) {
                return Err(DpoError::DuplicateRule(r.name().to_string()));
            }
            if **r.type_graph() != *type_graph {
                return Err(DpoError::InvalidRule {
                    rule: r.name().to_string(),
                    reason: "typed over a different type graph".into(),
                });
            }
        }
        Ok(Gts { type_graph, rules })
    }

    pub fn type_graph(&self) -> &Arc<TypeGraph> {
        &self.type_graph
    }

    pub fn rules(&self) -> &[DpoRule] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&DpoRule> {
        self.rules.iter().find(|r| r.name() == name)
    }

    /// The same system without the named rule.
    pub fn without(&self, name: &str) -> Gts {
        Gts {
            type_graph: self.type_graph.clone(),
            rules: self.rules.iter().filter(|r| r.name() != name).cloned().collect(),
        }
    }
}

/// An injective match of a rule's left-hand side into a host graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Match {
    pub rule: String,
    pub morphism: GraphMorphism,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GluingReport {
    pub satisfied: bool,
    pub dangling_edges: BTreeSet<String>,
}

/// One rewrite step `before ⇒ after`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationStep {
    pub before: TypedGraph,
    pub after: TypedGraph,
    pub rule: String,
    pub matched: Match,
    /// Partial map `before → after`, defined on the retained elements.
    pub track: GraphMorphism,
    /// Total map `R → after`.
    pub comatch: GraphMorphism,
}

/// Search bounds shared by every closure computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_depth: usize,
    pub max_states: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_depth: 16, max_states: 10_000 }
    }
}

/// Composition of partial track maps along a derivation.
pub fn compose_tracks(steps: &[DerivationStep]) -> GraphMorphism {
    let Some(first) = steps.first() else {
        return GraphMorphism::default();
    };
    steps[1..].iter().fold(first.track.clone(), |acc, s| acc.then(&s.track))
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn tg() -> Arc<TypeGraph> {
        Arc::new(TypeGraph::trivial())
    }

    pub fn unlink() -> DpoRule {
        let l = TypedGraph::new(tg())
            .node("1", "node").node("2", "node").node("3", "node")
            .edge("e1", "edge", "1", "2").edge("e2", "edge", "2", "3");
        let r = TypedGraph::new(tg())
            .node("1", "node").node("3", "node")
            .edge("e3", "edge", "1", "3");
        DpoRule::new("unlink", l, ["1", "3"], r).unwrap()
    }

    pub fn twoloop() -> DpoRule {
        let l = TypedGraph::new(tg())
            .node("1", "node").node("2", "node")
            .edge("e1", "edge", "1", "2").edge("e2", "edge", "2", "1");
        let r = TypedGraph::new(tg()).node("1", "node").edge("e3", "edge", "1", "1");
        DpoRule::new("twoloop", l, ["1"], r).unwrap()
    }

    pub fn cyclic_list() -> Gts {
        Gts::new(tg(), vec![unlink(), twoloop()]).unwrap()
    }

    pub fn cycle(n: usize) -> TypedGraph {
        let mut g = TypedGraph::new(tg());
        for i in 1..=n {
            g = g.node(format!("V{i}"), "node");
        }
        for i in 1..=n {
            g = g.edge(format!("E{i}"), "edge", format!("V{i}"), format!("V{}", i % n + 1));
        }
        g
    }

    /// Nodes V1 (degree 2), V2 (degree 3), V3 (degree 1).
    pub fn dangle() -> TypedGraph {
        TypedGraph::new(tg())
            .node("V1", "node").node("V2", "node").node("V3", "node")
            .edge("E1", "edge", "V1", "V2").edge("E2", "edge", "V2", "V1")
            .edge("E3", "edge", "V2", "V3")
    }
}
