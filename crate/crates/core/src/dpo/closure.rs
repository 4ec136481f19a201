use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use super::{derive_all, Gts, Limits};
use crate::graph::{canonical_form, TypedGraph};

/// Result of exhaustively rewriting a host graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalForms<T> {
    /// Every reachable final state, one representative per class.
    Complete(Vec<T>),
    /// A limit was hit; `found` holds the finals seen so far.
    Exhausted { found: Vec<T>, explored: usize },
}

impl<T> NormalForms<T> {
    pub fn is_complete(&self) -> bool {
        matches!(self, NormalForms::Complete(_))
    }

    pub fn finals(&self) -> &[T] {
        match self {
            NormalForms::Complete(f) => f,
            NormalForms::Exhausted { found, .. } => found,
        }
    }

    pub fn complete(self) -> Option<Vec<T>> {
        match self {
            NormalForms::Complete(f) => Some(f),
            NormalForms::Exhausted { .. } => None,
        }
    }
}

/// Breadth-first closure of `derive_all`, memoized on canonical forms.
/// Returns the isomorphism classes of final graphs.
pub fn normal_forms_gts(gts: &Gts, host: &TypedGraph, limits: Limits) -> NormalForms<TypedGraph> {
    match normal_forms_gts_tracked(gts, host, &BTreeSet::new(), limits) {
        NormalForms::Complete(f) => NormalForms::Complete(f.into_iter().map(|(g, _)| g).collect()),
        NormalForms::Exhausted { found, explored } => {
            NormalForms::Exhausted { found: found.into_iter().map(|(g, _)| g).collect(), explored }
        }
    }
}

/// [`normal_forms_gts`] for a host with protected nodes: steps that delete a
/// protected node are skipped, and isomorphisms must map protected nodes to
/// protected nodes. Each final graph comes with its protected nodes.
pub fn normal_forms_gts_tracked(
    gts: &Gts,
    host: &TypedGraph,
    protected: &BTreeSet<String>,
    limits: Limits,
) -> NormalForms<(TypedGraph, BTreeSet<String>)> {
    let form = |g: &TypedGraph, p: &BTreeSet<String>| {
        let labels: BTreeMap<String, String> = p.iter().map(|v| (v.clone(), "protected".to_string())).collect();
        canonical_form(g, &labels)
    };
    let mut seen: HashSet<String> = HashSet::from([form(host, protected)]);
    let mut finals = Vec::new();
    let mut final_forms: HashSet<String> = HashSet::new();
    let mut queue = VecDeque::from([(host.clone(), protected.clone(), 0usize)]);
    let mut exhausted = false;
    while let Some((g, p, depth)) = queue.pop_front() {
        let steps: Vec<_> = derive_all(gts, &g)
            .into_iter()
            .filter(|s| p.iter().all(|v| s.track.map_node(v).is_some()))
            .collect();
        if steps.is_empty() {
            if final_forms.insert(form(&g, &p)) {
                finals.push((g, p));
            }
            continue;
        }
        if depth >= limits.max_depth {
            exhausted = true;
            continue;
        }
        for s in steps {
            if seen.len() >= limits.max_states {
                exhausted = true;
                break;
            }
            let next: BTreeSet<String> = p.iter().filter_map(|v| s.track.map_node(v)).map(str::to_string).collect();
            if seen.insert(form(&s.after, &next)) {
                queue.push_back((s.after, next, depth + 1));
            }
        }
    }
    if exhausted {
        NormalForms::Exhausted { found: finals, explored: seen.len() }
    } else {
        NormalForms::Complete(finals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpo::fixtures::*;
    use crate::graph::find_isomorphism;

    #[test]
    fn four_cycle_reduces_to_loop() {
        let nf = normal_forms_gts(&cyclic_list(), &cycle(4), Limits::default()).complete().unwrap();
        assert_eq!(nf.len(), 1);
        let single = TypedGraph::new(tg()).node("v", "node").edge("l", "edge", "v", "v");
        assert!(find_isomorphism(&nf[0], &single, &BTreeMap::new()).unwrap().is_some());
    }

    #[test]
    fn no_rules_keeps_host() {
        let gts = Gts::new(tg(), vec![]).unwrap();
        let nf = normal_forms_gts(&gts, &cycle(3), Limits::default()).complete().unwrap();
        assert_eq!(nf, vec![cycle(3)]);
    }

    #[test]
    fn path_is_final() {
        let path = TypedGraph::new(tg()).node("a", "node").node("b", "node").edge("e", "edge", "a", "b");
        let nf = normal_forms_gts(&cyclic_list(), &path, Limits::default()).complete().unwrap();
        assert_eq!(nf, vec![path]);
    }

    #[test]
    fn depth_limit_reports_exhaustion() {
        let nf = normal_forms_gts(&cyclic_list(), &cycle(6), Limits { max_depth: 2, max_states: 100 });
        assert!(!nf.is_complete());
    }
}
