#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;

use gtschr::{
    canonical_form, decode, derive_all, encode_graph, ChrProgram, ChrState, DpoRule, EncodeMode, EncoderOptions,
    GlobalsPolicy, Gts, Project, TypeGraph, TypedGraph,
};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"))
}

pub fn fixture(name: &str) -> Project {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture exists");
    Project::parse(&text).expect("fixture is valid")
}

/// Canonical form where strong nodes may only map to strong nodes.
pub fn strong_form(g: &TypedGraph, strong: &BTreeSet<String>) -> String {
    let labels: BTreeMap<String, String> = strong.iter().map(|v| (v.clone(), "strong".to_string())).collect();
    canonical_form(g, &labels)
}

pub fn plain_form(g: &TypedGraph) -> String {
    canonical_form(g, &BTreeMap::new())
}

/// One-step successors on the graph side, restricted to steps whose track
/// morphism is defined on every strong node.
pub fn gts_successors(gts: &Gts, host: &TypedGraph, strong: &BTreeSet<String>) -> BTreeSet<String> {
    derive_all(gts, host)
        .into_iter()
        .filter(|s| strong.iter().all(|v| s.track.map_node(v).is_some()))
        .map(|s| {
            let kept: BTreeSet<String> = strong.iter().filter_map(|v| s.track.map_node(v)).map(str::to_string).collect();
            strong_form(&s.after, &kept)
        })
        .collect()
}

/// One-step successors on the CHR side, decoded back to graphs.
pub fn chr_successors(program: &ChrProgram, state: &ChrState, tg: &Arc<TypeGraph>) -> Result<BTreeSet<String>, String> {
    gtschr::step_all(program, state)
        .iter()
        .map(|s| {
            let (g, strong) = decode(s, tg).map_err(|e| format!("{e} in {s}"))?;
            Ok(strong_form(&g, &strong))
        })
        .collect()
}

pub fn encode_host(g: &TypedGraph, strong: &BTreeSet<String>, opts: &EncoderOptions) -> ChrState {
    encode_graph(g, EncodeMode::Ground, strong, &GlobalsPolicy::AllVars, opts).expect("valid host")
}

/// Every combination of the four encoder switches.
pub fn option_combinations() -> Vec<EncoderOptions> {
    (0..16u8)
        .map(|bits| EncoderOptions {
            variable_elimination: bits & 1 != 0,
            arithmetic_simplification: bits & 2 != 0,
            edge_identifiers: bits & 4 != 0,
            simpagation: bits & 8 != 0,
        })
        .collect()
}

pub fn rule<'a>(gts: &'a Gts, name: &str) -> &'a DpoRule {
    gts.rule(name).expect("rule exists")
}
