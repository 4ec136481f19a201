use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::store::{BuiltinEq, BuiltinStore, Resolved};
use super::term::{Const, Constraint, Term};

/// A CHR state `⟨goal; builtins; globals⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChrState {
    pub goal: Vec<Constraint>,
    pub store: BuiltinStore,
    pub globals: BTreeSet<String>,
}

impl ChrState {
    pub fn new(
        goal: Vec<Constraint>,
        eqs: &[(Term, Term)],
        globals: impl IntoIterator<Item = impl Into<String>>,
    ) -> Self {
        let mut store = BuiltinStore::top();
        for (a, b) in eqs {
            store.add_eq(a, b);
        }
        ChrState { goal, store, globals: globals.into_iter().map(Into::into).collect() }
    }

    pub fn failed() -> Self {
        ChrState { goal: Vec::new(), store: BuiltinStore::False, globals: BTreeSet::new() }
    }

    pub fn is_failed(&self) -> bool {
        self.store.is_false()
    }

    pub fn with_globals(mut self, globals: impl IntoIterator<Item = impl Into<String>>) -> Self {
        self.globals = globals.into_iter().map(Into::into).collect();
        self
    }

    pub fn add_eq(&mut self, eq: &BuiltinEq) {
        match eq.rhs() {
            Some(rhs) => self.store.add_eq(&Term::Var(eq.var.clone()), &rhs),
            None => self.store = BuiltinStore::False,
        }
    }

    /// Variables of the goal.
    pub fn goal_vars(&self) -> BTreeSet<String> {
        self.goal.iter().flat_map(|c| c.vars().map(str::to_string)).collect()
    }

    /// All variables mentioned anywhere in the state.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut v = self.goal_vars();
        v.extend(self.store.vars());
        v.extend(self.globals.iter().cloned());
        v
    }

    /// Goal variables that are not global.
    pub fn local_vars(&self) -> BTreeSet<String> {
        self.goal_vars().into_iter().filter(|v| !self.globals.contains(v)).collect()
    }
}

/// Representative of the ≡-class of `state`.
///
/// Solved bindings are substituted into the goal, every variable class is
/// written over one representative (the least global, else a goal variable
/// shifted so its smallest offset is zero), bindings of local variables and
/// globals that no longer occur are dropped, and the goal is sorted.
/// Fresh-copy names (`X#k`) are finally renamed to readable unused names.
pub fn normalize(state: &ChrState) -> ChrState {
    if state.is_failed() {
        return ChrState::failed();
    }
    let store = &state.store;

    let mut goal: Vec<Constraint> = Vec::with_capacity(state.goal.len());
    for c in &state.goal {
        let mut args = Vec::with_capacity(c.args.len());
        for a in &c.args {
            match store.resolve(a) {
                Some(r) => args.push(r),
                None => return ChrState::failed(),
            }
        }
        goal.push(ResolvedConstraint { symbol: c.symbol.clone(), args }.into_plain());
    }

    // classes of variables by root
    let mut members: BTreeMap<String, Vec<(String, i64)>> = BTreeMap::new();
    let mut const_globals: BTreeMap<String, Const> = BTreeMap::new();
    let mut all = state.vars();
    all.extend(goal.iter().flat_map(|c| c.vars().map(str::to_string)));
    for v in &all {
        match store.find(v) {
            Resolved::Root(r, d) => members.entry(r).or_default().push((v.clone(), d)),
            Resolved::Const(c) => {
                if state.globals.contains(v) {
                    const_globals.insert(v.clone(), c);
                }
            }
        }
    }

    // goal occurrences per root, as offsets relative to the root
    let mut occurrences: BTreeMap<String, Vec<i64>> = BTreeMap::new();
    for c in &goal {
        for a in &c.args {
            if let Some(b) = a.base() {
                occurrences.entry(b.to_string()).or_default().push(a.delta());
            }
        }
    }
    let original_goal_vars = state.goal_vars();

    let mut rewrite: BTreeMap<String, (String, i64)> = BTreeMap::new();
    let mut bindings: BTreeMap<String, Term> =
        const_globals.into_iter().map(|(g, c)| (g, Term::Const(c))).collect();
    for (root, ms) in &members {
        let globals: Vec<&(String, i64)> =
            ms.iter().filter(|(m, _)| state.globals.contains(m)).collect();
        if let Some((rep, rep_off)) = globals.iter().min_by(|a, b| a.0.cmp(&b.0)).map(|g| (&g.0, g.1)) {
            rewrite.insert(root.clone(), (rep.clone(), -rep_off));
            for (g, off) in &globals {
                if g != rep {
                    bindings.insert(g.clone(), Term::offset(rep.clone(), off - rep_off));
                }
            }
        } else if let Some(occ) = occurrences.get(root) {
            let min = *occ.iter().min().expect("non-empty");
            let rep = ms
                .iter()
                .filter(|(m, _)| original_goal_vars.contains(m))
                .map(|(m, _)| m)
                .min_by_key(|m| (m.contains('#'), m.as_str()))
                .unwrap_or(root);
            rewrite.insert(root.clone(), (rep.clone(), -min));
        }
    }

    for c in &mut goal {
        for a in &mut c.args {
            if let Some(b) = a.base() {
                let (rep, shift) = &rewrite[b];
                *a = Term::offset(rep.clone(), a.delta() + shift);
            }
        }
    }

    let mut out = ChrState {
        goal,
        store: BuiltinStore::Consistent(bindings),
        globals: BTreeSet::new(),
    };
    let occurring = out.vars();
    out.globals = state.globals.iter().filter(|g| occurring.contains(*g)).cloned().collect();
    rename_fresh(&mut out);
    out.goal.sort();
    out
}

struct ResolvedConstraint {
    symbol: String,
    args: Vec<Resolved>,
}

impl ResolvedConstraint {
    fn into_plain(self) -> Constraint {
        Constraint::new(self.symbol, self.args.iter().map(Resolved::to_term).collect())
    }
}

/// Renames local variables carrying a fresh-copy suffix `#k` to their base
/// name, primed as needed to avoid every name already in the state.
fn rename_fresh(state: &mut ChrState) {
    let mut used: BTreeSet<String> = state.vars();
    let mut sorted = state.goal.clone();
    sorted.sort();
    let mut renaming: BTreeMap<String, String> = BTreeMap::new();
    for c in &sorted {
        for v in c.vars() {
            if renaming.contains_key(v) || state.globals.contains(v) {
                continue;
            }
            let Some((base, _)) = v.split_once('#') else { continue };
            let mut name = base.to_string();
            while used.contains(&name) {
                name.push('\'');
            }
            used.insert(name.clone());
            renaming.insert(v.to_string(), name);
        }
    }
    if renaming.is_empty() {
        return;
    }
    let f = |v: &str| renaming.get(v).cloned().unwrap_or_else(|| v.to_string());
    for c in &mut state.goal {
        *c = c.rename(&f);
    }
}

impl fmt::Display for ChrState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let goal = if self.goal.is_empty() {
            "∅".to_string()
        } else {
            self.goal.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ⊎ ")
        };
        let globals: Vec<&str> = self.globals.iter().map(String::as_str).collect();
        write!(f, "⟨{goal}; {}; {{{}}}⟩", self.store, globals.join(","))
    }
}
