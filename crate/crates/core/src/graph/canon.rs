use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use super::TypedGraph;

const EMPTY_FORM: &str = "graph{}";

/// Canonical string of `g` up to isomorphism. Nodes carrying a label in
/// `pinned_labels` may only be matched to nodes with the same label.
///
/// Colour refinement splits nodes by type, label and neighbourhood; residual
/// ties are broken by individualizing each candidate in turn and keeping the
/// lexicographically least encoding.
pub fn canonical_form(g: &TypedGraph, pinned_labels: &BTreeMap<String, String>) -> String {
    if g.is_empty() {
        return EMPTY_FORM.to_string();
    }
    let c = Canon::new(g, pinned_labels);
    let initial: Vec<(String, Option<String>)> = c
        .ids
        .iter()
        .map(|id| (g.nodes()[*id].clone(), pinned_labels.get(*id).cloned()))
        .collect();
    let colours = c.refine(rank(&initial));
    let mut best: Option<String> = None;
    c.search(colours, &mut best);
    best.expect("at least one leaf")
}

/// Sorted (edge type, neighbour colour, direction) triples of a node.
type Neighbourhood<'a> = Vec<(&'a str, usize, u8)>;

struct Canon<'g> {
    g: &'g TypedGraph,
    labels: &'g BTreeMap<String, String>,
    ids: Vec<&'g str>,
    /// (edge type, other endpoint, direction) per node; direction 0 = out, 1 = in, 2 = loop
    incidence: Vec<Vec<(&'g str, usize, u8)>>,
    /// neighbourhood signature used for twin detection
    twin_key: Vec<BTreeMap<(usize, &'g str, u8), usize>>,
}

fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter().map(|k| sorted.binary_search(k).expect("present")).collect()
}

fn class_count(colours: &[usize]) -> usize {
    let mut c = colours.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

impl<'g> Canon<'g> {
    fn new(g: &'g TypedGraph, labels: &'g BTreeMap<String, String>) -> Self {
        let ids: Vec<&str> = g.nodes().keys().map(String::as_str).collect();
        let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut incidence = vec![Vec::new(); ids.len()];
        let mut twin_key: Vec<BTreeMap<(usize, &str, u8), usize>> = vec![BTreeMap::new(); ids.len()];
        for e in g.edges().values() {
            let (s, t) = (index[e.src.as_str()], index[e.tgt.as_str()]);
            if s == t {
                incidence[s].push((e.ty.as_str(), s, 2));
                *twin_key[s].entry((usize::MAX, e.ty.as_str(), 2)).or_default() += 1;
            } else {
                incidence[s].push((e.ty.as_str(), t, 0));
                incidence[t].push((e.ty.as_str(), s, 1));
                *twin_key[s].entry((t, e.ty.as_str(), 0)).or_default() += 1;
                *twin_key[t].entry((s, e.ty.as_str(), 1)).or_default() += 1;
            }
        }
        Canon { g, labels, ids, incidence, twin_key }
    }

    fn refine(&self, mut colours: Vec<usize>) -> Vec<usize> {
        let mut classes = class_count(&colours);
        loop {
            let keys: Vec<(usize, Neighbourhood)> = (0..self.ids.len())
                .map(|v| {
                    let mut nb: Vec<(&str, usize, u8)> = self.incidence[v]
                        .iter()
                        .map(|(ty, w, dir)| (*ty, colours[*w], *dir))
                        .collect();
                    nb.sort_unstable();
                    (colours[v], nb)
                })
                .collect();
            let next = rank(&keys);
            let next_classes = class_count(&next);
            if next_classes == classes {
                return next;
            }
            classes = next_classes;
            colours = next;
        }
    }

    /// Nodes `u` and `v` can be swapped by an automorphism that fixes every
    /// other node.
    fn twins(&self, u: usize, v: usize) -> bool {
        let strip = |x: usize, other: usize| -> BTreeMap<(usize, &str, u8), usize> {
            self.twin_key[x]
                .iter()
                .map(|(&(w, ty, d), &n)| {
                    let w = if w == other || w == x { usize::MAX - 1 } else { w };
                    ((w, ty, d), n)
                })
                .fold(BTreeMap::new(), |mut m, (k, n)| {
                    *m.entry(k).or_default() += n;
                    m
                })
        };
        let (a, b) = (self.ids[u], self.ids[v]);
        if self.g.nodes()[a] != self.g.nodes()[b] || self.labels.get(a) != self.labels.get(b) {
            return false;
        }
        // edges between u and v must look the same from both sides
        let uv: BTreeMap<_, _> =
            self.twin_key[u].iter().filter(|((w, _, _), _)| *w == v).collect();
        let vu: BTreeMap<_, _> =
            self.twin_key[v].iter().filter(|((w, _, _), _)| *w == u).collect();
        let mirrored: BTreeMap<_, _> = uv.iter().map(|((_, ty, d), n)| ((*ty, *d), **n)).collect();
        let mirrored_back: BTreeMap<_, _> = vu.iter().map(|((_, ty, d), n)| ((*ty, *d), **n)).collect();
        mirrored == mirrored_back && strip(u, v) == strip(v, u)
    }

    fn search(&self, colours: Vec<usize>, best: &mut Option<String>) {
        let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (v, c) in colours.iter().enumerate() {
            cells.entry(*c).or_default().push(v);
        }
        let Some((&cell_colour, cell)) = cells.iter().find(|(_, members)| members.len() > 1) else {
            let leaf = self.encode(&colours);
            if best.as_ref().is_none_or(|b| leaf < *b) {
                *best = Some(leaf);
            }
            return;
        };
        let mut tried: Vec<usize> = Vec::new();
        for &v in cell {
            if tried.iter().any(|&t| self.twins(t, v)) {
                continue;
            }
            tried.push(v);
            let keys: Vec<(usize, u8)> = colours
                .iter()
                .enumerate()
                .map(|(w, &c)| (c, u8::from(!(c == cell_colour && w == v))))
                .collect();
            self.search(self.refine(rank(&keys)), best);
        }
    }

    fn encode(&self, colours: &[usize]) -> String {
        let mut position = vec![0usize; colours.len()];
        for (v, &c) in colours.iter().enumerate() {
            position[v] = c;
        }
        let mut order: Vec<usize> = (0..colours.len()).collect();
        order.sort_by_key(|&v| position[v]);
        let mut out = String::from("graph{");
        for v in order {
            let id = self.ids[v];
            write!(out, "n{}:{}", position[v], self.g.nodes()[id]).expect("string write");
            if let Some(l) = self.labels.get(id) {
                write!(out, "@{l}").expect("string write");
            }
            out.push(';');
        }
        let index: HashMap<&str, usize> =
            self.ids.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut edges: Vec<(usize, usize, &str)> = self
            .g
            .edges()
            .values()
            .map(|e| (position[index[e.src.as_str()]], position[index[e.tgt.as_str()]], e.ty.as_str()))
            .collect();
        edges.sort_unstable();
        for (s, t, ty) in edges {
            write!(out, "e{s}>{t}:{ty};").expect("string write");
        }
        out.push('}');
        out
    }
}
