//! Seeded random type graphs, graphs, rules and graph states for property
//! checks.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::chr::{normalize, ChrState, Constraint, Term};
use crate::dpo::{DpoRule, Gts};
use crate::encoding::{encode_graph, EncodeMode, EncoderOptions, GlobalsPolicy};
use crate::graph::{TypeGraph, TypedGraph};

/// One or two node types and one or two edge types between them.
pub fn type_graph(rng: &mut impl Rng) -> Arc<TypeGraph> {
    let nodes: Vec<String> = (0..rng.gen_range(1..=2)).map(|i| format!("t{i}")).collect();
    let edges: Vec<(String, String, String)> = (0..rng.gen_range(1..=2))
        .map(|i| {
            let s = nodes.choose(rng).expect("node type").clone();
            let t = nodes.choose(rng).expect("node type").clone();
            (format!("f{i}"), s, t)
        })
        .collect();
    Arc::new(TypeGraph::new(nodes, edges).expect("generated type graph is valid"))
}

fn add_random_edge(rng: &mut impl Rng, g: &mut TypedGraph, id: String) -> bool {
    let tg = g.type_graph().clone();
    let ets: Vec<_> = tg.edge_types().iter().collect();
    let Some((name, et)) = ets.choose(rng) else { return false };
    let of_type = |ty: &str| -> Vec<String> {
        g.nodes().iter().filter(|(_, t)| t.as_str() == ty).map(|(v, _)| v.clone()).collect()
    };
    let (srcs, tgts) = (of_type(&et.src), of_type(&et.tgt));
    match (srcs.choose(rng), tgts.choose(rng)) {
        (Some(s), Some(t)) => g.try_add_edge(id, name.as_str(), s.as_str(), t.as_str()).is_ok(),
        _ => false,
    }
}

/// A graph with ids `v<i>` for nodes and `x<j>` for edges.
pub fn graph(rng: &mut impl Rng, tg: &Arc<TypeGraph>, max_nodes: usize, max_edges: usize) -> TypedGraph {
    let mut g = TypedGraph::new(tg.clone());
    let types: Vec<&String> = tg.node_types().iter().collect();
    for i in 0..rng.gen_range(0..=max_nodes) {
        g.try_add_node(format!("v{i}"), types.choose(rng).expect("node type").as_str()).expect("fresh id");
    }
    for j in 0..rng.gen_range(0..=max_edges) {
        add_random_edge(rng, &mut g, format!("x{j}"));
    }
    g
}

/// A rule whose left- and right-hand sides have at most `max_elements`
/// nodes and edges each.
pub fn rule(rng: &mut impl Rng, tg: &Arc<TypeGraph>, name: &str, max_elements: usize) -> DpoRule {
    let max_elements = max_elements.max(1);
    let types: Vec<&String> = tg.node_types().iter().collect();
    let mut l = TypedGraph::new(tg.clone());
    let n = rng.gen_range(1..=max_elements.min(3));
    for i in 0..n {
        l.try_add_node(format!("a{i}"), types.choose(rng).expect("node type").as_str()).expect("fresh id");
    }
    for j in 0..rng.gen_range(0..=max_elements - n) {
        add_random_edge(rng, &mut l, format!("ae{j}"));
    }

    let kept_nodes: BTreeSet<String> = l.nodes().keys().filter(|_| rng.gen_bool(0.6)).cloned().collect();
    let kept_edges: BTreeSet<String> = l
        .edges()
        .iter()
        .filter(|(_, e)| kept_nodes.contains(&e.src) && kept_nodes.contains(&e.tgt))
        .map(|(id, _)| id.clone())
        .filter(|_| rng.gen_bool(0.5))
        .collect();
    let mut r = l.restrict(&kept_nodes, &kept_edges);
    let budget = max_elements.saturating_sub(r.node_count() + r.edge_count());
    let new_nodes = rng.gen_range(0..=budget.min(1));
    for i in 0..new_nodes {
        r.try_add_node(format!("b{i}"), types.choose(rng).expect("node type").as_str()).expect("fresh id");
    }
    for j in 0..rng.gen_range(0..=(budget - new_nodes).min(2)) {
        add_random_edge(rng, &mut r, format!("be{j}"));
    }
    DpoRule::new(name, l, kept_nodes.into_iter().chain(kept_edges), r).expect("generated rule is valid")
}

/// Between one and `max_rules` random rules named `p0`, `p1`, ...
pub fn gts(rng: &mut impl Rng, tg: &Arc<TypeGraph>, max_rules: usize, max_elements: usize) -> Gts {
    let rules = (0..rng.gen_range(1..=max_rules.max(1)))
        .map(|i| rule(rng, tg, &format!("p{i}"), max_elements))
        .collect();
    Gts::new(tg.clone(), rules).expect("distinct names")
}

/// A random graph state: a graph, a random set of strong nodes and a random
/// choice of global variables, encoded with `opts`.
#[derive(Debug, Clone)]
pub struct GeneratedState {
    pub graph: TypedGraph,
    pub strong: BTreeSet<String>,
    pub state: ChrState,
}

pub fn g_state(rng: &mut impl Rng, tg: &Arc<TypeGraph>, max_nodes: usize, opts: &EncoderOptions) -> GeneratedState {
    let graph = graph(rng, tg, max_nodes, max_nodes + 2);
    let strong: BTreeSet<String> = graph.nodes().keys().filter(|_| rng.gen_bool(0.3)).cloned().collect();
    let all = encode_graph(&graph, EncodeMode::Ground, &strong, &GlobalsPolicy::AllVars, opts)
        .expect("generated graph is valid");
    let policy = match rng.gen_range(0..3) {
        0 => GlobalsPolicy::AllVars,
        1 => GlobalsPolicy::None,
        _ => GlobalsPolicy::Explicit(all.globals.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()),
    };
    let state = encode_graph(&graph, EncodeMode::Ground, &strong, &policy, opts).expect("generated graph is valid");
    GeneratedState { graph, strong, state }
}

/// A state ≡ to `s`: locals renamed, local degree bases shifted, some
/// local occurrences routed through store aliases, and the goal shuffled.
pub fn scramble(rng: &mut impl Rng, s: &ChrState) -> ChrState {
    let s = &normalize(s);
    if s.is_failed() {
        return s.clone();
    }
    let locals = s.local_vars();
    // identifiers sit in first position; anything never there is a degree and may be shifted
    let ids: BTreeSet<&str> = s.goal.iter().filter_map(|c| c.args.first().and_then(Term::base)).collect();
    let shift: BTreeMap<&str, i64> = locals
        .iter()
        .map(|v| (v.as_str(), if ids.contains(v.as_str()) { 0 } else { rng.gen_range(-2..=2) }))
        .collect();
    let tag: u32 = rng.gen_range(0..1000);
    let rename = |v: &str| if locals.contains(v) { format!("{v}_{tag}") } else { v.to_string() };
    let mut store = s.store.clone();
    let mut aliases = 0;
    let mut goal = Vec::with_capacity(s.goal.len());
    for c in &s.goal {
        let mut args = Vec::with_capacity(c.args.len());
        for a in &c.args {
            let t = match a.base() {
                Some(b) if locals.contains(b) => {
                    let k = shift[b];
                    let base = rename(b);
                    if rng.gen_bool(0.2) {
                        aliases += 1;
                        let alias = format!("{base}_a{aliases}");
                        store.add_eq(&Term::var(alias.clone()), &Term::var(base));
                        Term::offset(alias, a.delta() - k)
                    } else {
                        Term::offset(base, a.delta() - k)
                    }
                }
                _ => a.clone(),
            };
            args.push(t);
        }
        goal.push(Constraint::new(c.symbol.clone(), args));
    }
    goal.shuffle(rng);
    ChrState { goal, store, globals: s.globals.clone() }
}
