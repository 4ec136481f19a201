//! Analysis of graph transformation systems through their embedding into
//! Constraint Handling Rules.

pub mod graph;

pub use graph::{
    canonical_form, degree, find_isomorphism, is_subgraph, validate, Edge, EdgeType, GraphError,
    GraphMorphism, TypeGraph, TypedGraph, Violation,
};
pub mod dpo;

pub use dpo::{
    apply, check_gluing, derive_all, find_matches, gts_critical_pairs, gts_overlaps,
    merge_variants, normal_forms_gts, normal_forms_gts_tracked, DerivationStep, DpoError, DpoRule, FreshIds, GluingReport,
    Gts, GtsOverlap, Limits, Match, NormalForms,
};
pub mod chr;

pub use chr::{
    apply_chr_rule, normal_forms_chr, normal_forms_chr_with, normalize, states_equivalent, step_all,
    step_all_labelled, BuiltinEq,
    BuiltinStore, ChrError, ChrProgram, ChrRule, ChrState, Const, Constraint, Term,
};
pub mod encoding;

pub use encoding::{
    check_graph_invariant, constraint_symbols, decode, encode_graph, encode_gts, encode_rule,
    graph_key, EncodeError, EncodeMode, EncoderOptions, GlobalsPolicy, GraphStateView,
    InvariantViolation, NamingScheme,
};
pub mod confluence;

pub use confluence::{
    check_confluence, check_confluence_gts, check_joinability, cross_validate_overlaps,
    enumerate_overlaps, filter_g_valid, ConfluenceConfig, ConfluenceReport, ConfluenceVerdict,
    GStatus, JoinStatus, Joinability, Overlap, OverlapResult, PairGlobals,
};
pub mod opeq;

pub use opeq::{
    check_op_equivalence, check_op_equivalence_gts, check_p1p2_joinable, critical_states,
    redundant_rules, CriticalStateResult, CriticalStatus, OpEqConfig, OpEqError, OpEqReport,
    OpEqVerdict, Precondition,
};
pub mod project;

pub use project::{Host, Project, ProjectError, ProjectJson};
pub mod generate;
