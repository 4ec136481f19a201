use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{degree_unchecked, GraphError, GraphMorphism, TypedGraph};

/// Edge-type multiplicities between ordered node pairs.
pub(crate) struct Adjacency<'g> {
    counts: HashMap<(&'g str, &'g str), BTreeMap<&'g str, usize>>,
}

impl<'g> Adjacency<'g> {
    pub(crate) fn new(g: &'g TypedGraph) -> Self {
        let mut counts: HashMap<(&str, &str), BTreeMap<&str, usize>> = HashMap::new();
        for e in g.edges().values() {
            *counts
                .entry((e.src.as_str(), e.tgt.as_str()))
                .or_default()
                .entry(e.ty.as_str())
                .or_default() += 1;
        }
        Adjacency { counts }
    }

    pub(crate) fn between(&self, a: &'g str, b: &'g str) -> Option<&BTreeMap<&'g str, usize>> {
        self.counts.get(&(a, b))
    }
}

/// Finds a bijective type- and structure-preserving morphism `g1 → g2`
/// extending `pinned`. Search order is by sorted ids so the result is
/// deterministic.
pub fn find_isomorphism(
    g1: &TypedGraph,
    g2: &TypedGraph,
    pinned: &BTreeMap<String, String>,
) -> Result<Option<GraphMorphism>, GraphError> {
    for (a, b) in pinned {
        if !g1.nodes().contains_key(a) {
            return Err(GraphError::UnknownNode(a.clone()));
        }
        if !g2.nodes().contains_key(b) {
            return Err(GraphError::UnknownNode(b.clone()));
        }
    }
    if g1.node_count() != g2.node_count() || g1.edge_count() != g2.edge_count() {
        return Ok(None);
    }
    fn type_hist(g: &TypedGraph) -> BTreeMap<(bool, &str), usize> {
        let mut h: BTreeMap<(bool, &str), usize> = BTreeMap::new();
        for t in g.nodes().values() {
            *h.entry((false, t.as_str())).or_default() += 1;
        }
        for e in g.edges().values() {
            *h.entry((true, e.ty.as_str())).or_default() += 1;
        }
        h
    }
    if type_hist(g1) != type_hist(g2) {
        return Ok(None);
    }

    let search = Search::new(g1, g2);
    let order = search.order(pinned);
    let mut map: Vec<Option<usize>> = vec![None; search.n1.len()];
    let mut used = vec![false; search.n2.len()];
    let pinned_idx: HashMap<usize, usize> = pinned
        .iter()
        .map(|(a, b)| (search.idx1[a.as_str()], search.idx2[b.as_str()]))
        .collect();
    if !search.extend(&order, 0, &pinned_idx, &mut map, &mut used) {
        return Ok(None);
    }

    let node_map: BTreeMap<String, String> = map
        .iter()
        .enumerate()
        .map(|(i, j)| (search.n1[i].to_string(), search.n2[j.expect("total")].to_string()))
        .collect();
    let mut edge_map = BTreeMap::new();
    let mut taken: BTreeSet<&str> = BTreeSet::new();
    for (id, e) in g1.edges() {
        let (s, t) = (&node_map[&e.src], &node_map[&e.tgt]);
        let img = g2
            .edges()
            .iter()
            .find(|(id2, e2)| {
                !taken.contains(id2.as_str()) && e2.ty == e.ty && &e2.src == s && &e2.tgt == t
            })
            .map(|(id2, _)| id2.as_str())
            .expect("adjacency counts agree");
        taken.insert(img);
        edge_map.insert(id.clone(), img.to_string());
    }
    Ok(Some(GraphMorphism { node_map, edge_map }))
}

struct Search<'g> {
    g1: &'g TypedGraph,
    g2: &'g TypedGraph,
    n1: Vec<&'g str>,
    n2: Vec<&'g str>,
    idx1: HashMap<&'g str, usize>,
    idx2: HashMap<&'g str, usize>,
    adj1: Adjacency<'g>,
    adj2: Adjacency<'g>,
    deg1: Vec<usize>,
    deg2: Vec<usize>,
}

impl<'g> Search<'g> {
    fn new(g1: &'g TypedGraph, g2: &'g TypedGraph) -> Self {
        let n1: Vec<&str> = g1.nodes().keys().map(String::as_str).collect();
        let n2: Vec<&str> = g2.nodes().keys().map(String::as_str).collect();
        Search {
            g1,
            g2,
            idx1: n1.iter().enumerate().map(|(i, n)| (*n, i)).collect(),
            idx2: n2.iter().enumerate().map(|(i, n)| (*n, i)).collect(),
            deg1: n1.iter().map(|n| degree_unchecked(g1, n)).collect(),
            deg2: n2.iter().map(|n| degree_unchecked(g2, n)).collect(),
            adj1: Adjacency::new(g1),
            adj2: Adjacency::new(g2),
            n1,
            n2,
        }
    }

    /// Pinned nodes first, then a breadth-first order so that each new node
    /// tends to be adjacent to already-mapped ones.
    fn order(&self, pinned: &BTreeMap<String, String>) -> Vec<usize> {
        let mut order: Vec<usize> = pinned.keys().map(|k| self.idx1[k.as_str()]).collect();
        let mut seen: BTreeSet<usize> = order.iter().copied().collect();
        let mut neighbours: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.n1.len()];
        for e in self.g1.edges().values() {
            if let (Some(&s), Some(&t)) = (self.idx1.get(e.src.as_str()), self.idx1.get(e.tgt.as_str())) {
                neighbours[s].insert(t);
                neighbours[t].insert(s);
            }
        }
        let mut head = 0;
        loop {
            while head < order.len() {
                let v = order[head];
                head += 1;
                for &w in &neighbours[v] {
                    if seen.insert(w) {
                        order.push(w);
                    }
                }
            }
            match (0..self.n1.len()).find(|i| !seen.contains(i)) {
                Some(next) => {
                    seen.insert(next);
                    order.push(next);
                }
                None => break,
            }
        }
        order
    }

    fn compatible(&self, u: usize, v: usize, map: &[Option<usize>]) -> bool {
        let (a, b) = (self.n1[u], self.n2[v]);
        if self.g1.node_type(a) != self.g2.node_type(b) || self.deg1[u] != self.deg2[v] {
            return false;
        }
        if self.adj1.between(a, a) != self.adj2.between(b, b) {
            return false;
        }
        map.iter().enumerate().all(|(u2, img)| match img {
            Some(v2) if u2 != u => {
                let (a2, b2) = (self.n1[u2], self.n2[*v2]);
                self.adj1.between(a, a2) == self.adj2.between(b, b2)
                    && self.adj1.between(a2, a) == self.adj2.between(b2, b)
            }
            _ => true,
        })
    }

    fn extend(
        &self,
        order: &[usize],
        pos: usize,
        pinned: &HashMap<usize, usize>,
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        let Some(&u) = order.get(pos) else {
            return true;
        };
        let candidates: Vec<usize> = match pinned.get(&u) {
            Some(&v) => vec![v],
            None => (0..self.n2.len()).collect(),
        };
        for v in candidates {
            if used[v] || !self.compatible(u, v, map) {
                continue;
            }
            map[u] = Some(v);
            used[v] = true;
            if self.extend(order, pos + 1, pinned, map, used) {
                return true;
            }
            map[u] = None;
            used[v] = false;
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::TypeGraph;
    use std::sync::Arc;

    fn cycle(ids: &[&str]) -> TypedGraph {
        let mut g = TypedGraph::new(Arc::new(TypeGraph::trivial()));
        for id in ids {
            g = g.node(*id, "node");
        }
        for i in 0..ids.len() {
            g = g.edge(format!("e{}", ids[i]), "edge", ids[i], ids[(i + 1) % ids.len()]);
        }
        g
    }

    #[test]
    fn permuted_three_cycles() {
        let g1 = cycle(&["1", "2", "3"]);
        let g2 = cycle(&["c", "a", "b"]);
        let f = find_isomorphism(&g1, &g2, &BTreeMap::new()).unwrap().unwrap();
        assert!(f.is_injective());
        assert!(f.is_morphism(&g1, &g2));
    }

    #[test]
    fn identity_when_pinned() {
        let g = cycle(&["1", "2", "3"]);
        let pinned: BTreeMap<_, _> = g.nodes().keys().map(|k| (k.clone(), k.clone())).collect();
        let f = find_isomorphism(&g, &g, &pinned).unwrap().unwrap();
        assert_eq!(f, GraphMorphism::identity(&g));
    }

    #[test]
    fn different_sizes() {
        let g1 = cycle(&["1", "2"]);
        let g2 = cycle(&["1", "2", "3"]);
        assert_eq!(find_isomorphism(&g1, &g2, &BTreeMap::new()).unwrap(), None);
    }

    #[test]
    fn pin_can_block() {
        let tg = Arc::new(TypeGraph::trivial());
        let g = TypedGraph::new(tg).node("a", "node").node("b", "node").edge("e", "edge", "a", "b");
        let pinned = BTreeMap::from([("a".to_string(), "b".to_string())]);
        assert_eq!(find_isomorphism(&g, &g, &pinned).unwrap(), None);
        let bad = BTreeMap::from([("zz".to_string(), "a".to_string())]);
        assert!(find_isomorphism(&g, &g, &bad).is_err());
    }
}
