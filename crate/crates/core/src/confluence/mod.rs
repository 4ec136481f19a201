//! Critical-pair analysis of GTS-CHR programs restricted to graph states.

mod overlaps;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chr::{equivalent_normalized, normal_forms_chr_with, normalize, ChrProgram, ChrState, Constraint};
use crate::dpo::{gts_critical_pairs, DpoRule, Gts, Limits, NormalForms};
use crate::encoding::{check_graph_invariant, encode_gts, encode_rule, graph_key, EncodeError, EncoderOptions};
use crate::graph::{find_isomorphism, TypeGraph};

pub use overlaps::{enumerate_overlaps, Overlap};

/// Which variables stay global in critical pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairGlobals {
    /// All head variables: strong joinability.
    #[default]
    Full,
    /// None: plain joinability, for diagnostics.
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfluenceConfig {
    pub limits: Limits,
    pub globals: PairGlobals,
    /// Reject overlaps that identify an edge but not both of its endpoint
    /// nodes without running the invariant check.
    pub prune: bool,
}

impl Default for ConfluenceConfig {
    fn default() -> Self {
        ConfluenceConfig { limits: Limits::default(), globals: PairGlobals::Full, prune: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GStatus {
    Valid,
    Violation { reason: String },
}

impl GStatus {
    pub fn is_valid(&self) -> bool {
        matches!(self, GStatus::Valid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JoinStatus {
    Joinable,
    NotJoinable,
    Exhausted,
}

/// Outcome of a joinability check with the final states found on each side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Joinability {
    pub status: JoinStatus,
    pub left: Vec<ChrState>,
    pub right: Vec<ChrState>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapResult {
    pub overlap: Overlap,
    pub g_status: GStatus,
    /// Absent for overlaps that violate the invariant.
    pub join: Option<Joinability>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConfluenceVerdict {
    GConfluent,
    /// Indices into the overlap list of the non-joinable graph overlaps.
    NotStronglyJoinable { witnesses: Vec<usize> },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfluenceReport {
    pub overlaps: Vec<OverlapResult>,
    pub verdict: ConfluenceVerdict,
    pub globals: PairGlobals,
}

impl ConfluenceReport {
    pub fn violations(&self) -> usize {
        self.overlaps.iter().filter(|o| !o.g_status.is_valid()).count()
    }

    pub fn joinable(&self) -> usize {
        self.overlaps
            .iter()
            .filter(|o| o.join.as_ref().is_some_and(|j| j.status == JoinStatus::Joinable))
            .count()
    }

    /// One line: verdict, overlap count, violations, joinable/valid.
    pub fn summary(&self) -> String {
        let head = match &self.verdict {
            ConfluenceVerdict::GConfluent => "G-CONFLUENT",
            ConfluenceVerdict::NotStronglyJoinable { .. } => "NOT_STRONGLY_JOINABLE (confluence not disproved)",
            ConfluenceVerdict::Inconclusive => "INCONCLUSIVE (limits exhausted)",
        };
        let valid = self.overlaps.len() - self.violations();
        format!(
            "{head}, overlaps: {} ({} violates G), joinable: {}/{valid}",
            self.overlaps.len(),
            self.violations(),
            self.joinable()
        )
    }
}

impl fmt::Display for ConfluenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.summary())?;
        for (k, o) in self.overlaps.iter().enumerate() {
            let status = match (&o.g_status, &o.join) {
                (GStatus::Violation { reason }, _) => format!("violates G: {reason}"),
                (_, Some(j)) => format!("{:?}", j.status).to_lowercase(),
                _ => "unchecked".into(),
            };
            writeln!(f, "  [{k}] {} × {}: {}  {status}", o.overlap.r1, o.overlap.r2, o.overlap.sigma_cp)?;
            if let Some(j) = &o.join {
                if j.status != JoinStatus::Joinable {
                    writeln!(f, "      σ1 = {}", o.overlap.pair.0)?;
                    writeln!(f, "      σ2 = {}", o.overlap.pair.1)?;
                }
            }
        }
        if self.verdict == ConfluenceVerdict::GConfluent {
            writeln!(f, "every graph overlap is joinable, so the source GTS is confluent if it terminates")?;
        }
        Ok(())
    }
}

fn endpoint_nodes_paired(o: &Overlap, tg: &TypeGraph) -> bool {
    let side = |head: &[Constraint], paired: &BTreeSet<usize>| {
        paired.iter().all(|&i| {
            let c = &head[i];
            if tg.edge_type(&c.symbol).is_none() || c.args.len() < 2 {
                return true;
            }
            c.args[c.args.len() - 2..].iter().all(|end| {
                head.iter().enumerate().any(|(k, n)| {
                    paired.contains(&k) && tg.has_node_type(&n.symbol) && n.args.first() == Some(end)
                })
            })
        })
    };
    let p1: BTreeSet<usize> = o.pairing.iter().map(|p| p.0).collect();
    let p2: BTreeSet<usize> = o.pairing.iter().map(|p| p.1).collect();
    side(&o.head1, &p1) && side(&o.head2, &p2)
}

/// Tags each overlap with whether its overlap state encodes a graph.
pub fn filter_g_valid(overlaps: Vec<Overlap>, tg: &Arc<TypeGraph>, prune: bool) -> Vec<(Overlap, GStatus)> {
    overlaps
        .into_iter()
        .map(|o| {
            let status = if prune && !endpoint_nodes_paired(&o, tg) {
                GStatus::Violation { reason: "edge identified without both endpoint nodes".into() }
            } else {
                match check_graph_invariant(&o.sigma_cp, tg) {
                    Ok(_) => GStatus::Valid,
                    Err(e) => GStatus::Violation { reason: e.to_string() },
                }
            };
            (o, status)
        })
        .collect()
}

fn closure(p: &ChrProgram, s: &ChrState, limits: Limits, tg: &Arc<TypeGraph>) -> NormalForms<ChrState> {
    normal_forms_chr_with(p, s, limits, &|x: &ChrState| graph_key(x, tg))
}

/// Whether final states of `s1` under `p1` and of `s2` under `p2` meet up to ≡.
pub(crate) fn join_across(
    p1: &ChrProgram,
    s1: &ChrState,
    p2: &ChrProgram,
    s2: &ChrState,
    limits: Limits,
    tg: &Arc<TypeGraph>,
) -> Joinability {
    let a = closure(p1, s1, limits, tg);
    let b = closure(p2, s2, limits, tg);
    let meet = a.finals().iter().any(|x| b.finals().iter().any(|y| equivalent_normalized(x, y)));
    let status = if meet {
        JoinStatus::Joinable
    } else if a.is_complete() && b.is_complete() {
        JoinStatus::NotJoinable
    } else {
        JoinStatus::Exhausted
    };
    Joinability { status, left: a.finals().to_vec(), right: b.finals().to_vec() }
}

/// Decides joinability of a critical pair by comparing final states.
pub fn check_joinability(
    program: &ChrProgram,
    pair: &(ChrState, ChrState),
    limits: Limits,
    tg: &Arc<TypeGraph>,
) -> Joinability {
    let (a, b) = (normalize(&pair.0), normalize(&pair.1));
    if equivalent_normalized(&a, &b) {
        return Joinability { status: JoinStatus::Joinable, left: vec![a], right: vec![b] };
    }
    join_across(program, &pair.0, program, &pair.1, limits, tg)
}

fn with_policy(s: &ChrState, g: PairGlobals) -> ChrState {
    match g {
        PairGlobals::Full => s.clone(),
        PairGlobals::Empty => normalize(&s.clone().with_globals(Vec::<String>::new())),
    }
}

/// Runs the overlap analysis over all rule pairs `(i, j)` with `i <= j`.
pub fn check_confluence(program: &ChrProgram, tg: &Arc<TypeGraph>, config: &ConfluenceConfig) -> ConfluenceReport {
    let rules = program.rules();
    let mut overlaps = Vec::new();
    for i in 0..rules.len() {
        for j in i..rules.len() {
            let found = enumerate_overlaps(&rules[i], &rules[j]);
            for (o, g_status) in filter_g_valid(found, tg, config.prune) {
                let join = g_status.is_valid().then(|| {
                    let pair = (with_policy(&o.pair.0, config.globals), with_policy(&o.pair.1, config.globals));
                    check_joinability(program, &pair, config.limits, tg)
                });
                overlaps.push(OverlapResult { overlap: o, g_status, join });
            }
        }
    }
    let witnesses: Vec<usize> = overlaps
        .iter()
        .enumerate()
        .filter(|(_, o)| o.join.as_ref().is_some_and(|j| j.status == JoinStatus::NotJoinable))
        .map(|(k, _)| k)
        .collect();
    let exhausted = overlaps.iter().any(|o| o.join.as_ref().is_some_and(|j| j.status == JoinStatus::Exhausted));
    let verdict = if !witnesses.is_empty() {
        ConfluenceVerdict::NotStronglyJoinable { witnesses }
    } else if exhausted {
        ConfluenceVerdict::Inconclusive
    } else {
        ConfluenceVerdict::GConfluent
    };
    ConfluenceReport { overlaps, verdict, globals: config.globals }
}

/// Encodes `gts` and runs [`check_confluence`].
pub fn check_confluence_gts(
    gts: &Gts,
    opts: &EncoderOptions,
    config: &ConfluenceConfig,
) -> Result<ConfluenceReport, EncodeError> {
    let program = encode_gts(gts, opts)?;
    Ok(check_confluence(&program, gts.type_graph(), config))
}

/// Checks that every critical GTS pair of `r1` and `r2` has a graph overlap
/// of the encoded rules whose decoded overlap graph is isomorphic to it.
pub fn cross_validate_overlaps(r1: &DpoRule, r2: &DpoRule, opts: &EncoderOptions) -> Result<bool, EncodeError> {
    let tg = r1.type_graph();
    let (c1, c2) = (encode_rule(r1, opts)?, encode_rule(r2, opts)?);
    let decoded: Vec<_> = filter_g_valid(enumerate_overlaps(&c1, &c2), tg, true)
        .into_iter()
        .filter(|(_, s)| s.is_valid())
        .filter_map(|(o, _)| check_graph_invariant(&o.sigma_cp, tg).ok())
        .map(|v| v.graph)
        .collect();
    let none = BTreeMap::new();
    Ok(gts_critical_pairs(r1, r2).iter().all(|cp| {
        decoded.iter().any(|g| find_isomorphism(&cp.graph, g, &none).ok().flatten().is_some())
    }))
}
