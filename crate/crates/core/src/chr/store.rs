use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::term::{Const, Term};

/// What a variable is known to equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Resolved {
    Const(Const),
    /// `root + offset`, where `root` is unbound.
    Root(String, i64),
}

impl Resolved {
    pub fn to_term(&self) -> Term {
        match self {
            Resolved::Const(c) => Term::Const(c.clone()),
            Resolved::Root(r, d) => Term::offset(r.clone(), *d),
        }
    }
}

/// A conjunction of equations over variables, constants and integer
/// offsets, kept in solved form: every bound variable maps directly to a
/// constant or to an unbound root plus offset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BuiltinStore {
    Consistent(BTreeMap<String, Term>),
    #[serde(rename = "false")]
    False,
}

impl BuiltinStore {
    pub fn top() -> Self {
        BuiltinStore::Consistent(BTreeMap::new())
    }

    pub fn is_false(&self) -> bool {
        matches!(self, BuiltinStore::False)
    }

    pub fn is_top(&self) -> bool {
        matches!(self, BuiltinStore::Consistent(b) if b.is_empty())
    }

    pub fn bindings(&self) -> Option<&BTreeMap<String, Term>> {
        match self {
            BuiltinStore::Consistent(b) => Some(b),
            BuiltinStore::False => None,
        }
    }

    /// Resolves `v` through the solved bindings.
    pub fn find(&self, v: &str) -> Resolved {
        match self.bindings().and_then(|b| b.get(v)) {
            Some(Term::Const(c)) => Resolved::Const(c.clone()),
            Some(Term::Var(r)) => Resolved::Root(r.clone(), 0),
            Some(Term::Offset(r, d)) => Resolved::Root(r.clone(), *d),
            None => Resolved::Root(v.to_string(), 0),
        }
    }

    /// Resolves a term; `None` for a symbolic constant with an offset.
    pub fn resolve(&self, t: &Term) -> Option<Resolved> {
        match t {
            Term::Const(c) => Some(Resolved::Const(c.clone())),
            Term::Var(v) => Some(self.find(v)),
            Term::Offset(v, d) => match self.find(v) {
                Resolved::Const(Const::Int(n)) => Some(Resolved::Const(Const::Int(n + d))),
                Resolved::Const(Const::Sym(_)) => None,
                Resolved::Root(r, e) => Some(Resolved::Root(r, e + d)),
            },
        }
    }

    pub fn resolve_term(&self, t: &Term) -> Option<Term> {
        self.resolve(t).map(|r| r.to_term())
    }

    /// Conjoins `a = b`.
    pub fn add_eq(&mut self, a: &Term, b: &Term) {
        if self.is_false() {
            return;
        }
        let (Some(ra), Some(rb)) = (self.resolve(a), self.resolve(b)) else {
            *self = BuiltinStore::False;
            return;
        };
        match (ra, rb) {
            (Resolved::Const(x), Resolved::Const(y)) => {
                if x != y {
                    *self = BuiltinStore::False;
                }
            }
            (Resolved::Const(c), Resolved::Root(r, d)) | (Resolved::Root(r, d), Resolved::Const(c)) => {
                // r + d = c
                let value = match (c, d) {
                    (Const::Int(n), d) => Const::Int(n - d),
                    (sym, 0) => sym,
                    (Const::Sym(_), _) => {
                        *self = BuiltinStore::False;
                        return;
                    }
                };
                self.bind(&r, Term::Const(value));
            }
            (Resolved::Root(r1, d1), Resolved::Root(r2, d2)) => {
                if r1 == r2 {
                    if d1 != d2 {
                        *self = BuiltinStore::False;
                    }
                    return;
                }
                // r1 + d1 = r2 + d2; bind the larger name to the smaller
                if r1 < r2 {
                    self.bind(&r2, Term::offset(r1, d1 - d2));
                } else {
                    self.bind(&r1, Term::offset(r2, d2 - d1));
                }
            }
        }
    }

    /// Binds the unbound root `r` and rewrites everything pointing at it.
    fn bind(&mut self, r: &str, value: Term) {
        let BuiltinStore::Consistent(b) = self else { return };
        for t in b.values_mut() {
            if t.base() == Some(r) {
                let d = t.delta();
                *t = value.shifted(d).expect("integer offset of a root");
            }
        }
        b.insert(r.to_string(), value);
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        if let Some(b) = self.bindings() {
            for (k, v) in b {
                out.insert(k.clone());
                if let Some(base) = v.base() {
                    out.insert(base.to_string());
                }
            }
        }
        out
    }
}

/// `var = base + plus - minus`; the shape the encoder emits for degrees.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BuiltinEq {
    pub var: String,
    pub base: Term,
    #[serde(default)]
    pub plus: i64,
    #[serde(default)]
    pub minus: i64,
}

impl BuiltinEq {
    pub fn new(var: impl Into<String>, base: Term) -> Self {
        BuiltinEq { var: var.into(), base, plus: 0, minus: 0 }
    }

    pub fn with_delta(var: impl Into<String>, base: Term, minus: i64, plus: i64) -> Self {
        BuiltinEq { var: var.into(), base, plus, minus }
    }

    pub fn rhs(&self) -> Option<Term> {
        self.base.shifted(self.plus - self.minus)
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.var.as_str()).chain(self.base.base())
    }
}

impl fmt::Display for BuiltinEq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.var, self.base)?;
        match (self.minus, self.plus) {
            (0, 0) => Ok(()),
            (0, p) => write!(f, "+{p}"),
            (m, 0) => write!(f, "-{m}"),
            (m, p) => write!(f, "-{m}+{p}"),
        }
    }
}

impl fmt::Display for BuiltinStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinStore::False => write!(f, "⊥"),
            BuiltinStore::Consistent(b) if b.is_empty() => write!(f, "⊤"),
            BuiltinStore::Consistent(b) => {
                let eqs: Vec<String> = b.iter().map(|(k, v)| format!("{k}={v}")).collect();
                write!(f, "{}", eqs.join(" ∧ "))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chr::term::t;

    #[test]
    fn chains_collapse_to_offsets() {
        let mut s = BuiltinStore::top();
        s.add_eq(&t("D1'"), &t("D1+0"));
        s.add_eq(&t("X"), &t("D1'+2"));
        assert_eq!(s.find("X"), Resolved::Root("D1".into(), 2));
        assert_eq!(s.find("D1'"), Resolved::Root("D1".into(), 0));
    }

    #[test]
    fn inconsistent_degree() {
        let mut s = BuiltinStore::top();
        s.add_eq(&t("D"), &t("0"));
        s.add_eq(&t("X"), &t("1"));
        s.add_eq(&t("D"), &t("X+2"));
        assert!(s.is_false());
    }

    #[test]
    fn solved_form_is_idempotent() {
        let mut s = BuiltinStore::top();
        s.add_eq(&t("C"), &t("B+1"));
        s.add_eq(&t("B"), &t("A+1"));
        s.add_eq(&t("A"), &t("5"));
        let b = s.bindings().unwrap();
        for v in b.values() {
            assert!(v.base().is_none_or(|r| !b.contains_key(r)));
        }
        assert_eq!(s.find("C"), Resolved::Const(Const::Int(7)));
    }

    #[test]
    fn cyclic_equation() {
        let mut s = BuiltinStore::top();
        s.add_eq(&t("A"), &t("A+1"));
        assert!(s.is_false());
        let mut s = BuiltinStore::top();
        s.add_eq(&t("A"), &t("A"));
        assert!(s.is_top());
    }

    #[test]
    fn symbols() {
        let mut s = BuiltinStore::top();
        s.add_eq(&t("X"), &t("a"));
        s.add_eq(&t("Y"), &t("X+1"));
        assert!(s.is_false());
    }
}
