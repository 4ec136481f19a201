//! Operational equivalence of GTS-CHR programs via critical states, and
//! redundant-rule removal built on it.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chr::{equivalent_normalized, normal_forms_chr_with, normalize, ChrProgram, ChrState};
use crate::confluence::{check_confluence, ConfluenceConfig, ConfluenceVerdict};
use crate::dpo::{Gts, Limits};
use crate::encoding::{encode_gts, graph_key, EncodeError, EncoderOptions};
use crate::graph::TypeGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpEqError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error("the programs use unrelated constraint symbols")]
    SymbolMismatch,
    #[error("the systems are typed over different type graphs")]
    TypeGraphMismatch,
    #[error("program {program} is not known to be confluent: {summary}")]
    Precondition { program: String, summary: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CriticalStatus {
    Joinable,
    /// The final states reached under each program.
    NotJoinable { left: Vec<ChrState>, right: Vec<ChrState> },
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalStateResult {
    /// Name of the rule whose head gave the state.
    pub source: String,
    pub state: ChrState,
    pub status: CriticalStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precondition {
    /// Confluence and termination asserted by the caller.
    Attested,
    /// Confluence established by the overlap analysis.
    GConfluent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OpEqVerdict {
    Equivalent,
    /// Indices of the critical states that are not joinable. This does not
    /// show that the programs differ.
    NotProven { witnesses: Vec<usize> },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpEqReport {
    pub critical_states: Vec<CriticalStateResult>,
    pub verdict: OpEqVerdict,
    pub preconditions: [Precondition; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OpEqConfig {
    pub confluence: ConfluenceConfig,
    /// Skip the confluence check and take confluence and termination as given.
    pub attest: bool,
}

impl OpEqConfig {
    pub fn limits(&self) -> Limits {
        self.confluence.limits
    }
}

impl fmt::Display for OpEqReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.verdict {
            OpEqVerdict::Equivalent => writeln!(f, "EQUIVALENT")?,
            OpEqVerdict::NotProven { .. } => writeln!(f, "NOT_PROVEN (equivalence not disproved)")?,
            OpEqVerdict::Inconclusive => writeln!(f, "INCONCLUSIVE (limits exhausted)")?,
        }
        for (k, c) in self.critical_states.iter().enumerate() {
            let status = match &c.status {
                CriticalStatus::Joinable => "joinable",
                CriticalStatus::NotJoinable { .. } => "not joinable",
                CriticalStatus::Exhausted => "exhausted",
            };
            writeln!(f, "  [{k}] {}: {}  {status}", c.source, c.state)?;
            if let CriticalStatus::NotJoinable { left, right } = &c.status {
                for s in left {
                    writeln!(f, "      P1 final: {s}")?;
                }
                for s in right {
                    writeln!(f, "      P2 final: {s}")?;
                }
            }
        }
        Ok(())
    }
}

/// One state `⟨H, ⊤, vars(H)⟩` per rule head of either program, without
/// ≡-duplicates. Rejects programs whose symbols have nothing in common.
pub fn critical_states(p1: &ChrProgram, p2: &ChrProgram) -> Result<Vec<(String, ChrState)>, OpEqError> {
    let (s1, s2) = (p1.symbols(), p2.symbols());
    let clash = s1.iter().any(|(n, a)| s2.iter().any(|(m, b)| n == m && a != b));
    if clash || (!s1.is_empty() && !s2.is_empty() && s1.is_disjoint(&s2)) {
        return Err(OpEqError::SymbolMismatch);
    }
    let mut out: Vec<(String, ChrState)> = Vec::new();
    for r in p1.rules().iter().chain(p2.rules()) {
        let s = normalize(&ChrState::new(r.head().cloned().collect(), &[], r.head_vars()));
        if !out.iter().any(|(_, o)| equivalent_normalized(o, &s)) {
            out.push((r.name.clone(), s));
        }
    }
    Ok(out)
}

/// Runs `state` to its final states under both programs. Joinable when each
/// program reaches a single final class and the two classes coincide.
pub fn check_p1p2_joinable(
    p1: &ChrProgram,
    p2: &ChrProgram,
    state: &ChrState,
    limits: Limits,
    tg: &Arc<TypeGraph>,
) -> CriticalStatus {
    let key = |s: &ChrState| graph_key(s, tg);
    let a = normal_forms_chr_with(p1, state, limits, &key);
    let b = normal_forms_chr_with(p2, state, limits, &key);
    if !a.is_complete() || !b.is_complete() {
        return CriticalStatus::Exhausted;
    }
    let (left, right) = (a.finals().to_vec(), b.finals().to_vec());
    if left.len() == 1 && right.len() == 1 && equivalent_normalized(&left[0], &right[0]) {
        CriticalStatus::Joinable
    } else {
        CriticalStatus::NotJoinable { left, right }
    }
}

fn precondition(
    name: &str,
    p: &ChrProgram,
    tg: &Arc<TypeGraph>,
    config: &OpEqConfig,
) -> Result<Precondition, OpEqError> {
    if config.attest {
        return Ok(Precondition::Attested);
    }
    let report = check_confluence(p, tg, &config.confluence);
    match report.verdict {
        ConfluenceVerdict::GConfluent => Ok(Precondition::GConfluent),
        _ => Err(OpEqError::Precondition { program: name.to_string(), summary: report.summary() }),
    }
}

fn compare(
    p1: &ChrProgram,
    p2: &ChrProgram,
    tg: &Arc<TypeGraph>,
    config: &OpEqConfig,
    preconditions: [Precondition; 2],
) -> Result<OpEqReport, OpEqError> {
    let mut results = Vec::new();
    for (source, state) in critical_states(p1, p2)? {
        let status = check_p1p2_joinable(p1, p2, &state, config.limits(), tg);
        results.push(CriticalStateResult { source, state, status });
    }
    let witnesses: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, r)| matches!(r.status, CriticalStatus::NotJoinable { .. }))
        .map(|(k, _)| k)
        .collect();
    let verdict = if !witnesses.is_empty() {
        OpEqVerdict::NotProven { witnesses }
    } else if results.iter().any(|r| r.status == CriticalStatus::Exhausted) {
        OpEqVerdict::Inconclusive
    } else {
        OpEqVerdict::Equivalent
    };
    Ok(OpEqReport { critical_states: results, verdict, preconditions })
}

/// Decides operational equivalence of two GTS-CHR programs over `tg`.
/// Unless attested, both programs must first pass the confluence analysis.
pub fn check_op_equivalence(
    p1: &ChrProgram,
    p2: &ChrProgram,
    tg: &Arc<TypeGraph>,
    config: &OpEqConfig,
) -> Result<OpEqReport, OpEqError> {
    let pre = [precondition("P1", p1, tg, config)?, precondition("P2", p2, tg, config)?];
    compare(p1, p2, tg, config, pre)
}

/// Encodes both systems and runs [`check_op_equivalence`].
pub fn check_op_equivalence_gts(
    s1: &Gts,
    s2: &Gts,
    opts: &EncoderOptions,
    config: &OpEqConfig,
) -> Result<OpEqReport, OpEqError> {
    if s1.type_graph() != s2.type_graph() {
        return Err(OpEqError::TypeGraphMismatch);
    }
    let (p1, p2) = (encode_gts(s1, opts)?, encode_gts(s2, opts)?);
    check_op_equivalence(&p1, &p2, s1.type_graph(), config)
}

/// Greedy removal in rule order: a rule is dropped when the current program
/// without it is operationally equivalent to the current program. The
/// result depends on the rule order.
pub fn redundant_rules(
    gts: &Gts,
    opts: &EncoderOptions,
    config: &OpEqConfig,
) -> Result<Vec<(String, OpEqReport)>, OpEqError> {
    let tg = gts.type_graph();
    let mut current = encode_gts(gts, opts)?;
    let mut pre = precondition("input", &current, tg, config)?;
    let mut dropped = Vec::new();
    for name in gts.rules().iter().map(|r| r.name().to_string()) {
        let reduced = current.without(&name);
        let Ok(reduced_pre) = precondition(&format!("without {name}"), &reduced, tg, config) else {
            continue;
        };
        let report = compare(&current, &reduced, tg, config, [pre, reduced_pre])?;
        if report.verdict == OpEqVerdict::Equivalent {
            current = reduced;
            pre = reduced_pre;
            dropped.push((name, report));
        }
    }
    Ok(dropped)
}
