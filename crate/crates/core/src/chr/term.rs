use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Const {
    Int(i64),
    Sym(String),
}

/// A flat term. `Offset(v, d)` stands for `v + d`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    Const(Const),
    Offset(String, i64),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn int(n: i64) -> Term {
        Term::Const(Const::Int(n))
    }

    pub fn sym(s: impl Into<String>) -> Term {
        Term::Const(Const::Sym(s.into()))
    }

    /// `base + delta`, collapsing a zero offset to the bare variable.
    pub fn offset(base: impl Into<String>, delta: i64) -> Term {
        let base = base.into();
        if delta == 0 {
            Term::Var(base)
        } else {
            Term::Offset(base, delta)
        }
    }

    /// The variable this term is built on, if any.
    pub fn base(&self) -> Option<&str> {
        match self {
            Term::Var(v) | Term::Offset(v, _) => Some(v),
            Term::Const(_) => None,
        }
    }

    pub fn delta(&self) -> i64 {
        match self {
            Term::Offset(_, d) => *d,
            _ => 0,
        }
    }

    /// Adds `d` to the term. Fails for a symbolic constant with `d ≠ 0`.
    pub fn shifted(&self, d: i64) -> Option<Term> {
        if d == 0 {
            return Some(self.clone());
        }
        match self {
            Term::Var(v) => Some(Term::Offset(v.clone(), d)),
            Term::Offset(v, e) => Some(Term::offset(v.clone(), e + d)),
            Term::Const(Const::Int(n)) => Some(Term::int(n + d)),
            Term::Const(Const::Sym(_)) => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, Term::Const(_))
    }

    pub fn rename(&self, f: &impl Fn(&str) -> String) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(v)),
            Term::Offset(v, d) => Term::Offset(f(v), *d),
            Term::Const(c) => Term::Const(c.clone()),
        }
    }
}

impl fmt::Display for Const {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const::Int(n) => write!(f, "{n}"),
            Const::Sym(s) => write!(f, "{s}"),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
            Term::Offset(v, d) if *d < 0 => write!(f, "{v}{d}"),
            Term::Offset(v, d) => write!(f, "{v}+{d}"),
        }
    }
}

/// A user-defined constraint `symbol(args...)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Constraint {
    pub symbol: String,
    pub args: Vec<Term>,
}

impl Constraint {
    pub fn new(symbol: impl Into<String>, args: Vec<Term>) -> Self {
        Constraint { symbol: symbol.into(), args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(Term::base)
    }

    pub fn rename(&self, f: &impl Fn(&str) -> String) -> Constraint {
        Constraint { symbol: self.symbol.clone(), args: self.args.iter().map(|t| t.rename(f)).collect() }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol)?;
        if !self.args.is_empty() {
            let args: Vec<String> = self.args.iter().map(ToString::to_string).collect();
            write!(f, "({})", args.join(","))?;
        }
        Ok(())
    }
}

/// Shorthand for building constraints in tests and fixtures:
/// upper-case initial letter means variable, digits mean integers,
/// anything else is a symbol.
pub fn t(s: &str) -> Term {
    if let Ok(n) = s.parse::<i64>() {
        return Term::int(n);
    }
    if let Some(i) = s.rfind(['+', '-']).filter(|&i| i > 0) {
        if let Ok(d) = s[i..].trim_start_matches('+').parse::<i64>() {
            return Term::offset(&s[..i], d);
        }
    }
    if s.starts_with(|c: char| c.is_uppercase() || c == '_') {
        Term::var(s)
    } else {
        Term::sym(s)
    }
}

pub fn c(symbol: &str, args: &[&str]) -> Constraint {
    Constraint::new(symbol, args.iter().map(|a| t(a)).collect())
}
