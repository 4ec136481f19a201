use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::store::BuiltinEq;
use super::term::{Const, Constraint, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChrError {
    #[error("rule `{0}` has an empty head")]
    EmptyHead(String),
    #[error("duplicate rule name `{0}`")]
    DuplicateRule(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cmp {
    Le,
    Lt,
    Eq,
    Ne,
}

/// A comparison evaluated on ground integers after head matching.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guard {
    pub op: Cmp,
    pub lhs: Term,
    pub rhs: Term,
}

impl Guard {
    /// `None` when either side is not a ground integer.
    pub fn eval(&self, lhs: &Term, rhs: &Term) -> Option<bool> {
        let (Term::Const(Const::Int(a)), Term::Const(Const::Int(b))) = (lhs, rhs) else {
            return None;
        };
        Some(match self.op {
            Cmp::Le => a <= b,
            Cmp::Lt => a < b,
            Cmp::Eq => a == b,
            Cmp::Ne => a != b,
        })
    }
}

/// `name @ kept \ removed <=> guard | body`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChrRule {
    pub name: String,
    pub kept: Vec<Constraint>,
    pub removed: Vec<Constraint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub guard: Vec<Guard>,
    pub body_user: Vec<Constraint>,
    pub body_builtin: Vec<BuiltinEq>,
}

impl ChrRule {
    pub fn new(
        name: impl Into<String>,
        kept: Vec<Constraint>,
        removed: Vec<Constraint>,
        body_user: Vec<Constraint>,
        body_builtin: Vec<BuiltinEq>,
    ) -> Result<Self, ChrError> {
        let name = name.into();
        if kept.is_empty() && removed.is_empty() {
            return Err(ChrError::EmptyHead(name));
        }
        Ok(ChrRule { name, kept, removed, guard: Vec::new(), body_user, body_builtin })
    }

    pub fn with_guard(mut self, guard: Vec<Guard>) -> Self {
        self.guard = guard;
        self
    }

    /// Kept head followed by removed head.
    pub fn head(&self) -> impl Iterator<Item = &Constraint> {
        self.kept.iter().chain(&self.removed)
    }

    pub fn head_vars(&self) -> BTreeSet<String> {
        self.head().flat_map(|c| c.vars().map(str::to_string)).collect()
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut v = self.head_vars();
        v.extend(self.body_user.iter().flat_map(|c| c.vars().map(str::to_string)));
        v.extend(self.body_builtin.iter().flat_map(|e| e.vars().map(str::to_string)));
        v.extend(self.guard.iter().flat_map(|g| [g.lhs.base(), g.rhs.base()]).flatten().map(str::to_string));
        v
    }

    pub fn symbols(&self) -> BTreeSet<(String, usize)> {
        self.head()
            .chain(&self.body_user)
            .map(|c| (c.symbol.clone(), c.arity()))
            .collect()
    }

    pub fn rename(&self, f: &impl Fn(&str) -> String) -> ChrRule {
        let rt = |t: &Term| t.rename(f);
        ChrRule {
            name: self.name.clone(),
            kept: self.kept.iter().map(|c| c.rename(f)).collect(),
            removed: self.removed.iter().map(|c| c.rename(f)).collect(),
            guard: self
                .guard
                .iter()
                .map(|g| Guard { op: g.op, lhs: rt(&g.lhs), rhs: rt(&g.rhs) })
                .collect(),
            body_user: self.body_user.iter().map(|c| c.rename(f)).collect(),
            body_builtin: self
                .body_builtin
                .iter()
                .map(|e| BuiltinEq { var: f(&e.var), base: rt(&e.base), plus: e.plus, minus: e.minus })
                .collect(),
        }
    }
}

fn join(cs: &[Constraint]) -> String {
    cs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cmp::Le => "=<",
            Cmp::Lt => "<",
            Cmp::Eq => "=:=",
            Cmp::Ne => "=\\=",
        })
    }
}

impl fmt::Display for ChrRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ ", self.name)?;
        if !self.kept.is_empty() {
            write!(f, "{} \\ ", join(&self.kept))?;
        }
        write!(f, "{} <=> ", join(&self.removed))?;
        if !self.guard.is_empty() {
            let gs: Vec<String> =
                self.guard.iter().map(|g| format!("{}{}{}", g.lhs, g.op, g.rhs)).collect();
            write!(f, "{} | ", gs.join(", "))?;
        }
        let mut body: Vec<String> = self.body_user.iter().map(ToString::to_string).collect();
        body.extend(self.body_builtin.iter().map(ToString::to_string));
        if body.is_empty() {
            write!(f, "true")
        } else {
            write!(f, "{}", body.join(", "))
        }
    }
}

/// An ordered list of rules with unique names.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChrProgram {
    rules: Vec<ChrRule>,
}

impl ChrProgram {
    pub fn new(rules: Vec<ChrRule>) -> Result<Self, ChrError> {
        let mut names = BTreeSet::new();
        for r in &rules {
            if !names.insert(r.name.as_str()) {
                return Err(ChrError::DuplicateRule(r.name.clone()));
            }
        }
        Ok(ChrProgram { rules })
    }

    pub fn rules(&self) -> &[ChrRule] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&ChrRule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn without(&self, name: &str) -> ChrProgram {
        ChrProgram { rules: self.rules.iter().filter(|r| r.name != name).cloned().collect() }
    }

    pub fn symbols(&self) -> BTreeSet<(String, usize)> {
        self.rules.iter().flat_map(ChrRule::symbols).collect()
    }
}

impl fmt::Display for ChrProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}.")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chr::term::c;

    #[test]
    fn prints_simpagation() {
        let r = ChrRule::new(
            "twoloop",
            vec![c("node", &["N1", "D1"])],
            vec![c("node", &["N2", "2"]), c("edge", &["E1", "N1", "N2"]), c("edge", &["E2", "N2", "N1"])],
            vec![c("edge", &["E3", "N1", "N1"])],
            vec![],
        )
        .unwrap();
        assert_eq!(
            r.to_string(),
            "twoloop @ node(N1,D1) \\ node(N2,2), edge(E1,N1,N2), edge(E2,N2,N1) <=> edge(E3,N1,N1)"
        );
    }

    #[test]
    fn empty_head_rejected() {
        assert_eq!(
            ChrRule::new("x", vec![], vec![], vec![], vec![]),
            Err(ChrError::EmptyHead("x".into()))
        );
    }
}
