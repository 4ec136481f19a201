mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use gtschr::{
    apply, canonical_form, check_gluing, derive_all, find_isomorphism, find_matches, generate, validate, DpoRule,
    FreshIds, TypeGraph, TypedGraph,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::plain_form;

/// Same graph with every id replaced and the insertion order shuffled.
fn relabel(rng: &mut ChaCha8Rng, g: &TypedGraph) -> TypedGraph {
    let mut nodes: Vec<(&String, &String)> = g.nodes().iter().collect();
    nodes.shuffle(rng);
    let names: BTreeMap<&String, String> = nodes.iter().enumerate().map(|(i, (v, _))| (*v, format!("r{i}"))).collect();
    let mut h = TypedGraph::new(g.type_graph().clone());
    for (v, ty) in &nodes {
        h.try_add_node(&names[v], ty.as_str()).unwrap();
    }
    let mut edges: Vec<_> = g.edges().iter().collect();
    edges.shuffle(rng);
    for (k, (_, e)) in edges.iter().enumerate() {
        h.try_add_edge(format!("q{k}"), &e.ty, &names[&e.src], &names[&e.tgt]).unwrap();
    }
    h
}

fn edge_multiset(g: &TypedGraph, map: &BTreeMap<&str, &str>) -> Vec<(String, String, String)> {
    let mut v: Vec<_> = g
        .edges()
        .values()
        .map(|e| (e.ty.clone(), map[e.src.as_str()].to_string(), map[e.tgt.as_str()].to_string()))
        .collect();
    v.sort();
    v
}

/// Isomorphism by trying every node bijection.
fn brute_isomorphic(a: &TypedGraph, b: &TypedGraph) -> bool {
    if a.node_count() != b.node_count() || a.edge_count() != b.edge_count() {
        return false;
    }
    let an: Vec<&str> = a.nodes().keys().map(String::as_str).collect();
    let bn: Vec<&str> = b.nodes().keys().map(String::as_str).collect();
    let identity: BTreeMap<&str, &str> = bn.iter().map(|v| (*v, *v)).collect();
    let target = edge_multiset(b, &identity);
    let mut perm: Vec<usize> = (0..bn.len()).collect();
    loop {
        let map: BTreeMap<&str, &str> = an.iter().zip(&perm).map(|(v, &k)| (*v, bn[k])).collect();
        let typed = map.iter().all(|(v, w)| a.nodes()[*v] == b.nodes()[*w]);
        if typed && edge_multiset(a, &map) == target {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Number of injective morphisms `l → g`, by enumerating node and edge
/// assignments independently and filtering.
fn brute_match_count(l: &TypedGraph, g: &TypedGraph) -> usize {
    fn injective<'a>(from: &[&'a str], to: &[&'a str]) -> Vec<BTreeMap<&'a str, &'a str>> {
        let Some((first, rest)) = from.split_first() else {
            return vec![BTreeMap::new()];
        };
        let mut out = Vec::new();
        for m in injective(rest, to) {
            for t in to {
                if !m.values().any(|x| x == t) {
                    let mut m = m.clone();
                    m.insert(first, t);
                    out.push(m);
                }
            }
        }
        out
    }
    let (ln, gn): (Vec<&str>, Vec<&str>) =
        (l.nodes().keys().map(String::as_str).collect(), g.nodes().keys().map(String::as_str).collect());
    let (le, ge): (Vec<&str>, Vec<&str>) =
        (l.edges().keys().map(String::as_str).collect(), g.edges().keys().map(String::as_str).collect());
    let mut count = 0;
    for nm in injective(&ln, &gn) {
        if nm.iter().any(|(v, w)| l.nodes()[*v] != g.nodes()[*w]) {
            continue;
        }
        for em in injective(&le, &ge) {
            let ok = em.iter().all(|(e, f)| {
                let (x, y) = (&l.edges()[*e], &g.edges()[*f]);
                x.ty == y.ty && nm[x.src.as_str()] == y.src && nm[x.tgt.as_str()] == y.tgt
            });
            count += ok as usize;
        }
    }
    count
}

fn small_setting(seed: u64) -> (ChaCha8Rng, Arc<TypeGraph>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tg = generate::type_graph(&mut rng);
    (rng, tg)
}

#[test]
fn isomorphism_agrees_with_brute_force() {
    let (mut rng, _) = small_setting(11);
    let mut positives = 0;
    for _ in 0..300 {
        let tg = generate::type_graph(&mut rng);
        let a = generate::graph(&mut rng, &tg, 5, 6);
        let b = if rand::Rng::gen_bool(&mut rng, 0.5) { relabel(&mut rng, &a) } else { generate::graph(&mut rng, &tg, 5, 6) };
        let oracle = brute_isomorphic(&a, &b);
        let found = find_isomorphism(&a, &b, &BTreeMap::new()).unwrap();
        assert_eq!(found.is_some(), oracle, "{a:?}\n{b:?}");
        if let Some(m) = found {
            assert!(m.is_morphism(&a, &b) && m.is_injective());
        }
        assert_eq!(plain_form(&a) == plain_form(&b), oracle);
        positives += oracle as usize;
    }
    assert!(positives > 100);
}

#[test]
fn matches_agree_with_brute_force() {
    let (mut rng, tg) = small_setting(12);
    for k in 0..200 {
        let rule = generate::rule(&mut rng, &tg, "p", 5);
        let host = generate::graph(&mut rng, &tg, 5, 6);
        let ms = find_matches(&rule, &host).unwrap();
        assert_eq!(ms.len(), brute_match_count(rule.lhs(), &host), "instance {k}");
        let distinct: BTreeSet<_> = ms.iter().map(|m| format!("{:?}", m.morphism)).collect();
        assert_eq!(distinct.len(), ms.len());
    }
}

#[test]
fn gluing_reports_exactly_the_dangling_edges() {
    let (mut rng, tg) = small_setting(13);
    for _ in 0..200 {
        let rule = generate::rule(&mut rng, &tg, "p", 5);
        let host = generate::graph(&mut rng, &tg, 5, 7);
        for m in find_matches(&rule, &host).unwrap() {
            let deleted: BTreeSet<&str> = rule.deleted_nodes().map(|v| m.morphism.map_node(v).unwrap()).collect();
            let image: BTreeSet<&str> = m.morphism.edge_map.values().map(String::as_str).collect();
            let expected: BTreeSet<String> = host
                .edges()
                .iter()
                .filter(|(id, e)| {
                    !image.contains(id.as_str()) && (deleted.contains(e.src.as_str()) || deleted.contains(e.tgt.as_str()))
                })
                .map(|(id, _)| id.clone())
                .collect();
            let report = check_gluing(&rule, &m, &host).unwrap();
            assert_eq!(report.dangling_edges, expected);
            assert_eq!(report.satisfied, expected.is_empty());
        }
    }
}

fn degree(g: &TypedGraph, v: &str) -> usize {
    g.edges().values().map(|e| (e.src == v) as usize + (e.tgt == v) as usize).sum()
}

#[test]
fn steps_follow_the_double_pushout() {
    let (mut rng, tg) = small_setting(14);
    let mut steps = 0;
    for _ in 0..200 {
        let rule = generate::rule(&mut rng, &tg, "p", 5);
        let host = generate::graph(&mut rng, &tg, 5, 7);
        for m in find_matches(&rule, &host).unwrap() {
            if !check_gluing(&rule, &m, &host).unwrap().satisfied {
                assert!(apply(&rule, &m, &host, &mut FreshIds::default()).is_err());
                continue;
            }
            let step = apply(&rule, &m, &host, &mut FreshIds::default()).unwrap();
            let after = &step.after;
            assert!(validate(after).is_empty());
            let (dn, de) = (rule.deleted_nodes().count(), rule.deleted_edges().count());
            let (cn, ce) = (rule.created_nodes().count(), rule.created_edges().count());
            assert_eq!(after.node_count(), host.node_count() - dn + cn);
            assert_eq!(after.edge_count(), host.edge_count() - de + ce);
            assert!(step.comatch.is_morphism(rule.rhs(), after) && step.comatch.is_injective());
            for v in rule.interface().nodes().keys() {
                let (h, a) = (m.morphism.map_node(v).unwrap(), step.comatch.map_node(v).unwrap());
                let change = degree(rule.rhs(), v) as i64 - degree(rule.lhs(), v) as i64;
                assert_eq!(degree(after, a) as i64, degree(&host, h) as i64 + change);
            }
            steps += 1;
        }
    }
    assert!(steps > 50, "{steps}");
}

#[test]
fn inverse_rule_undoes_a_step() {
    let (mut rng, tg) = small_setting(15);
    for _ in 0..100 {
        let rule = generate::rule(&mut rng, &tg, "p", 5);
        let host = generate::graph(&mut rng, &tg, 5, 6);
        for m in find_matches(&rule, &host).unwrap() {
            let Ok(step) = apply(&rule, &m, &host, &mut FreshIds::default()) else { continue };
            let inv: DpoRule = rule.inverse();
            let back = gtschr::Match { rule: inv.name().to_string(), morphism: step.comatch.clone() };
            let undone = apply(&inv, &back, &step.after, &mut FreshIds::new("u")).unwrap();
            assert!(find_isomorphism(&undone.after, &host, &BTreeMap::new()).unwrap().is_some());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_ignores_ids(seed in any::<u64>()) {
        let (mut rng, tg) = small_setting(seed);
        let g = generate::graph(&mut rng, &tg, 6, 8);
        let h = relabel(&mut rng, &g);
        prop_assert_eq!(canonical_form(&g, &BTreeMap::new()), canonical_form(&h, &BTreeMap::new()));
    }

    #[test]
    fn derivations_stay_valid(seed in any::<u64>()) {
        let (mut rng, tg) = small_setting(seed);
        let gts = generate::gts(&mut rng, &tg, 3, 5);
        let host = generate::graph(&mut rng, &tg, 5, 6);
        for s in derive_all(&gts, &host) {
            prop_assert!(validate(&s.after).is_empty());
            prop_assert!(s.matched.morphism.is_morphism(gts.rule(&s.rule).unwrap().lhs(), &host));
        }
    }
}
