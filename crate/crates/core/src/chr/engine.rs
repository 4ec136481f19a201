use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::equiv::{equivalent_normalized, structural_key};
use super::rule::{ChrProgram, ChrRule};
use super::state::{normalize, ChrState};
use super::term::{Constraint, Term};
use crate::dpo::{Limits, NormalForms};

/// Hands out suffixes `#1`, `#2`, ... for fresh rule copies.
#[derive(Debug, Clone, Default)]
pub struct FreshVars {
    next: u64,
}

impl FreshVars {
    pub fn new() -> Self {
        FreshVars::default()
    }

    /// A copy of `rule` whose variables do not occur in `avoid`.
    pub fn copy(&mut self, rule: &ChrRule, avoid: &BTreeSet<String>) -> ChrRule {
        let vars = rule.vars();
        loop {
            self.next += 1;
            let k = self.next;
            let clash = vars.iter().any(|v| avoid.contains(&format!("{v}#{k}")));
            if !clash {
                return rule.rename(&|v: &str| format!("{v}#{k}"));
            }
        }
    }
}

type Subst = BTreeMap<String, Term>;

fn match_term(pattern: &Term, actual: &Term, theta: &mut Subst, added: &mut Vec<String>) -> bool {
    let (var, value) = match pattern {
        Term::Const(_) => return pattern == actual,
        Term::Var(x) => (x, actual.clone()),
        Term::Offset(x, d) => match actual.shifted(-d) {
            Some(v) => (x, v),
            None => return false,
        },
    };
    match theta.get(var) {
        Some(bound) => *bound == value,
        None => {
            theta.insert(var.clone(), value);
            added.push(var.clone());
            true
        }
    }
}

fn match_constraint(p: &Constraint, c: &Constraint, theta: &mut Subst) -> Option<Vec<String>> {
    if p.symbol != c.symbol || p.arity() != c.arity() {
        return None;
    }
    let mut added = Vec::new();
    for (x, y) in p.args.iter().zip(&c.args) {
        if !match_term(x, y, theta, &mut added) {
            for v in added {
                theta.remove(&v);
            }
            return None;
        }
    }
    Some(added)
}

/// Every injective assignment of `head` to goal positions, with the
/// substitution it induces. Matching is one-sided: rule variables bind to
/// goal terms, rule constants only match equal goal constants.
pub(crate) fn head_matches(head: &[&Constraint], goal: &[Constraint]) -> Vec<(Vec<usize>, Subst)> {
    let order = match_order(head);
    let reordered: Vec<&Constraint> = order.iter().map(|&k| head[k]).collect();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    let mut theta = Subst::new();
    head_rec(&reordered, goal, &mut chosen, &mut theta, &mut out);
    for (positions, _) in &mut out {
        let mut original = vec![0; positions.len()];
        for (k, &p) in order.iter().zip(positions.iter()) {
            original[*k] = p;
        }
        *positions = original;
    }
    out
}

/// Head positions ordered so that each constraint shares as many variables
/// as possible with the ones before it; wider constraints go first on ties.
fn match_order(head: &[&Constraint]) -> Vec<usize> {
    let mut bound: BTreeSet<&str> = BTreeSet::new();
    let mut left: Vec<usize> = (0..head.len()).collect();
    let mut order = Vec::with_capacity(head.len());
    while !left.is_empty() {
        let score = |k: usize| {
            let c = head[k];
            (c.vars().filter(|v| bound.contains(v)).count(), c.arity(), std::cmp::Reverse(k))
        };
        let (pos, &best) = left.iter().enumerate().max_by_key(|(_, &k)| score(k)).expect("non-empty");
        left.remove(pos);
        bound.extend(head[best].vars());
        order.push(best);
    }
    order
}

fn head_rec(
    head: &[&Constraint],
    goal: &[Constraint],
    chosen: &mut Vec<usize>,
    theta: &mut Subst,
    out: &mut Vec<(Vec<usize>, Subst)>,
) {
    let Some(p) = head.get(chosen.len()) else {
        out.push((chosen.clone(), theta.clone()));
        return;
    };
    for (i, c) in goal.iter().enumerate() {
        if chosen.contains(&i) {
            continue;
        }
        if let Some(added) = match_constraint(p, c, theta) {
            chosen.push(i);
            head_rec(head, goal, chosen, theta, out);
            chosen.pop();
            for v in added {
                theta.remove(&v);
            }
        }
    }
}

fn subst(t: &Term, theta: &Subst) -> Option<Term> {
    match t {
        Term::Const(_) => Some(t.clone()),
        Term::Var(x) => Some(theta.get(x).cloned().unwrap_or_else(|| t.clone())),
        Term::Offset(x, d) => match theta.get(x) {
            Some(v) => v.shifted(*d),
            None => Some(t.clone()),
        },
    }
}

fn subst_constraint(c: &Constraint, theta: &Subst) -> Option<Constraint> {
    let args: Option<Vec<Term>> = c.args.iter().map(|a| subst(a, theta)).collect();
    Some(Constraint::new(c.symbol.clone(), args?))
}

fn push_distinct(out: &mut Vec<ChrState>, s: ChrState) {
    if !out.iter().any(|o| equivalent_normalized(o, &s)) {
        out.push(s);
    }
}

/// Normalized states, one per ≡-class, bucketed by structural key.
#[derive(Default)]
struct Distinct {
    states: Vec<ChrState>,
    buckets: HashMap<String, Vec<usize>>,
}

impl Distinct {
    fn insert(&mut self, s: ChrState) -> bool {
        let bucket = self.buckets.entry(structural_key(&s)).or_default();
        if bucket.iter().any(|&k| equivalent_normalized(&self.states[k], &s)) {
            return false;
        }
        bucket.push(self.states.len());
        self.states.push(s);
        true
    }
}

/// Successors of `state` under one rule, deduplicated up to ≡.
pub fn apply_chr_rule(rule: &ChrRule, state: &ChrState, fresh: &mut FreshVars) -> Vec<ChrState> {
    let state = normalize(state);
    if state.is_failed() || state.goal.is_empty() {
        return Vec::new();
    }
    let rule = fresh.copy(rule, &state.vars());
    let head: Vec<&Constraint> = rule.head().collect();
    let mut out = Distinct::default();
    for (positions, theta) in head_matches(&head, &state.goal) {
        let guard_ok = rule.guard.iter().all(|g| {
            match (subst(&g.lhs, &theta), subst(&g.rhs, &theta)) {
                (Some(l), Some(r)) => g.eval(&l, &r) == Some(true),
                _ => false,
            }
        });
        if !guard_ok {
            continue;
        }
        let removed: BTreeSet<usize> = positions[rule.kept.len()..].iter().copied().collect();
        let mut next = ChrState {
            goal: state
                .goal
                .iter()
                .enumerate()
                .filter(|(i, _)| !removed.contains(i))
                .map(|(_, c)| c.clone())
                .collect(),
            store: state.store.clone(),
            globals: state.globals.clone(),
        };
        let mut ok = true;
        for c in &rule.body_user {
            match subst_constraint(c, &theta) {
                Some(c) => next.goal.push(c),
                None => ok = false,
            }
        }
        for eq in &rule.body_builtin {
            let lhs = subst(&Term::Var(eq.var.clone()), &theta);
            let rhs = eq.rhs().and_then(|r| subst(&r, &theta));
            match (lhs, rhs) {
                (Some(l), Some(r)) => next.store.add_eq(&l, &r),
                _ => ok = false,
            }
        }
        if !ok {
            next = ChrState::failed();
        }
        out.insert(normalize(&next));
    }
    out.states
}

/// Union of [`apply_chr_rule`] over the program, in rule order.
pub fn step_all(program: &ChrProgram, state: &ChrState) -> Vec<ChrState> {
    let mut fresh = FreshVars::new();
    let mut out = Distinct::default();
    for r in program.rules() {
        for s in apply_chr_rule(r, state, &mut fresh) {
            out.insert(s);
        }
    }
    out.states
}

/// Successors paired with the rule that produced them.
pub fn step_all_labelled(program: &ChrProgram, state: &ChrState) -> Vec<(String, ChrState)> {
    let mut fresh = FreshVars::new();
    let mut out: Vec<(String, ChrState)> = Vec::new();
    for r in program.rules() {
        for s in apply_chr_rule(r, state, &mut fresh) {
            if !out.iter().any(|(_, o)| equivalent_normalized(o, &s)) {
                out.push((r.name.clone(), s));
            }
        }
    }
    out
}

/// A memo key that is equal for ≡-equivalent states. Used to bucket states
/// before the exact equivalence check.
pub type StateKeyFn<'a> = &'a dyn Fn(&ChrState) -> String;

/// Final states reachable from `state`, one per ≡-class.
pub fn normal_forms_chr(program: &ChrProgram, state: &ChrState, limits: Limits) -> NormalForms<ChrState> {
    normal_forms_chr_with(program, state, limits, &structural_key)
}

pub fn normal_forms_chr_with(
    program: &ChrProgram,
    state: &ChrState,
    limits: Limits,
    key: StateKeyFn<'_>,
) -> NormalForms<ChrState> {
    let start = normalize(state);
    let mut memo: HashMap<String, Vec<ChrState>> = HashMap::new();
    let mut seen = 1usize;
    memo.entry(key(&start)).or_default().push(start.clone());
    let mut finals: Vec<ChrState> = Vec::new();
    let mut queue = VecDeque::from([(start, 0usize)]);
    let mut exhausted = false;
    while let Some((s, depth)) = queue.pop_front() {
        let succ = step_all(program, &s);
        if succ.is_empty() {
            push_distinct(&mut finals, s);
            continue;
        }
        if depth >= limits.max_depth {
            exhausted = true;
            continue;
        }
        for t in succ {
            if seen >= limits.max_states {
                exhausted = true;
                break;
            }
            let bucket = memo.entry(key(&t)).or_default();
            if bucket.iter().any(|o| equivalent_normalized(o, &t)) {
                continue;
            }
            bucket.push(t.clone());
            seen += 1;
            queue.push_back((t, depth + 1));
        }
    }
    if exhausted {
        NormalForms::Exhausted { found: finals, explored: seen }
    } else {
        NormalForms::Complete(finals)
    }
}
