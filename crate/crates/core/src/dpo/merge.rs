use std::collections::BTreeMap;

use super::DpoRule;
use crate::graph::TypedGraph;

/// All partitions of `items` into blocks whose members are pairwise
/// `compatible`. Blocks and partitions come out in a fixed order.
pub(crate) fn set_partitions<T: Clone>(
    items: &[T],
    compatible: &dyn Fn(&T, &T) -> bool,
) -> Vec<Vec<Vec<T>>> {
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<T>> = Vec::new();
    partition_rec(items, compatible, &mut blocks, &mut out);
    out
}

fn partition_rec<T: Clone>(
    items: &[T],
    compatible: &dyn Fn(&T, &T) -> bool,
    blocks: &mut Vec<Vec<T>>,
    out: &mut Vec<Vec<Vec<T>>>,
) {
    let Some((x, rest)) = items.split_first() else {
        out.push(blocks.clone());
        return;
    };
    blocks.push(vec![x.clone()]);
    partition_rec(rest, compatible, blocks, out);
    blocks.pop();
    for i in 0..blocks.len() {
        if blocks[i].iter().all(|y| compatible(x, y)) {
            blocks[i].push(x.clone());
            partition_rec(rest, compatible, blocks, out);
            blocks[i].pop();
        }
    }
}

/// One rule per admissible quotient of the interface `K`: same-typed nodes
/// may be merged, and same-typed edges whose endpoints end up equal. The
/// first entry is the original rule. Applying the variants with injective
/// matches simulates non-injective matching of the original.
pub fn merge_variants(rule: &DpoRule) -> Vec<DpoRule> {
    let k = rule.interface();
    let k_nodes: Vec<String> = k.nodes().keys().cloned().collect();
    let k_edges: Vec<String> = k.edges().keys().cloned().collect();
    let taken: Vec<String> = rule.lhs().nodes().keys()
        .chain(rule.lhs().edges().keys())
        .chain(rule.rhs().nodes().keys())
        .chain(rule.rhs().edges().keys())
        .cloned()
        .collect();

    let mut out = Vec::new();
    let node_type = |a: &String, b: &String| k.nodes()[a] == k.nodes()[b];
    for node_blocks in set_partitions(&k_nodes, &node_type) {
        let node_rename = block_names(&node_blocks, &taken);
        let endpoint = |id: &str| node_rename.get(id).cloned().unwrap_or_else(|| id.to_string());
        let edge_ok = |a: &String, b: &String| {
            let (ea, eb) = (&k.edges()[a], &k.edges()[b]);
            ea.ty == eb.ty
                && endpoint(&ea.src) == endpoint(&eb.src)
                && endpoint(&ea.tgt) == endpoint(&eb.tgt)
        };
        for edge_blocks in set_partitions(&k_edges, &edge_ok) {
            if node_blocks.iter().all(|b| b.len() == 1) && edge_blocks.iter().all(|b| b.len() == 1) {
                out.push(rule.clone());
                continue;
            }
            let edge_rename = block_names(&edge_blocks, &taken);
            let lhs = quotient(rule.lhs(), &node_rename, &edge_rename);
            let rhs = quotient(rule.rhs(), &node_rename, &edge_rename);
            let kept: Vec<String> = rule
                .kept_ids()
                .iter()
                .map(|id| node_rename.get(id).or(edge_rename.get(id)).cloned().unwrap_or(id.clone()))
                .collect();
            let name = format!("{}#{}", rule.name(), out.len());
            out.push(DpoRule::new(name, lhs, kept, rhs).expect("quotient of a valid rule is valid"));
        }
    }
    out
}

fn block_names(blocks: &[Vec<String>], taken: &[String]) -> BTreeMap<String, String> {
    let mut rename = BTreeMap::new();
    for b in blocks {
        let mut sorted = b.clone();
        sorted.sort();
        let mut name = sorted.join("_");
        if sorted.len() > 1 {
            while taken.contains(&name) {
                name.push('\'');
            }
        }
        for id in b {
            rename.insert(id.clone(), name.clone());
        }
    }
    rename
}

fn quotient(
    g: &TypedGraph,
    node_rename: &BTreeMap<String, String>,
    edge_rename: &BTreeMap<String, String>,
) -> TypedGraph {
    let mut out = TypedGraph::new(g.type_graph().clone());
    let nr = |id: &String| node_rename.get(id).cloned().unwrap_or(id.clone());
    for (id, ty) in g.nodes() {
        let id = nr(id);
        if !out.contains(&id) {
            out.try_add_node(id, ty).expect("fresh id");
        }
    }
    for (id, e) in g.edges() {
        let id = edge_rename.get(id).cloned().unwrap_or(id.clone());
        if !out.contains(&id) {
            out.try_add_edge(id, &e.ty, nr(&e.src), nr(&e.tgt)).expect("fresh id");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpo::fixtures::*;

    #[test]
    fn bell_numbers() {
        let items = [1, 2, 3, 4];
        assert_eq!(set_partitions(&items, &|_, _| true).len(), 15);
        assert_eq!(set_partitions(&items, &|a, b| a % 2 == b % 2).len(), 4);
    }

    #[test]
    fn unlink_has_two_variants() {
        let vs = merge_variants(&unlink());
        assert_eq!(vs.len(), 2);
        assert_eq!(vs[0], unlink());
        let merged = &vs[1];
        assert!(merged.lhs().nodes().contains_key("1_3"));
        assert_eq!(merged.lhs().node_count(), 2);
        assert_eq!(merged.rhs().edges().values().next().unwrap().src, "1_3");
    }

    #[test]
    fn empty_interface() {
        let l = TypedGraph::new(tg()).node("a", "node");
        let r = DpoRule::new("del", l, Vec::<String>::new(), TypedGraph::new(tg())).unwrap();
        assert_eq!(merge_variants(&r), vec![r]);
    }

    #[test]
    fn two_isolated_nodes() {
        let g = TypedGraph::new(tg()).node("a", "node").node("b", "node");
        let r = DpoRule::new("keep", g.clone(), ["a", "b"], g).unwrap();
        assert_eq!(merge_variants(&r).len(), 2);
    }
}
