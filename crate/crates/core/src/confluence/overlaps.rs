use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::chr::{equivalent_normalized, normalize, structural_key, BuiltinEq, BuiltinStore, ChrRule, ChrState, Constraint};

/// An overlap of two rules and the critical pair it gives rise to.
///
/// `head1`/`head2` are the rule heads (kept part first) after renaming
/// apart; `pairing` lists the identified positions `(i, j)` of `head1[i]`
/// and `head2[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Overlap {
    pub r1: String,
    pub r2: String,
    pub head1: Vec<Constraint>,
    pub head2: Vec<Constraint>,
    pub pairing: Vec<(usize, usize)>,
    pub sigma_cp: ChrState,
    pub pair: (ChrState, ChrState),
}

/// Head, body constraints and body equations of a rule read as a
/// simplification rule: kept head constraints are removed and re-added.
fn simplification(r: &ChrRule) -> (Vec<Constraint>, Vec<Constraint>, &[BuiltinEq]) {
    let head: Vec<Constraint> = r.head().cloned().collect();
    let body: Vec<Constraint> = r.kept.iter().chain(&r.body_user).cloned().collect();
    (head, body, &r.body_builtin)
}

/// `r2` with a suffix of primes so that none of its variables occurs in `r1`.
fn rename_apart(r1: &ChrRule, r2: &ChrRule) -> ChrRule {
    let taken = r1.vars();
    let vars = r2.vars();
    let mut suffix = String::from("'");
    while vars.iter().any(|v| taken.contains(&format!("{v}{suffix}"))) {
        suffix.push('\'');
    }
    r2.rename(&|v: &str| format!("{v}{suffix}"))
}

fn pairings(h1: &[Constraint], h2: &[Constraint]) -> Vec<Vec<(usize, usize)>> {
    fn rec(
        i: usize,
        h1: &[Constraint],
        h2: &[Constraint],
        used: &mut Vec<bool>,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if i == h1.len() {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            return;
        }
        rec(i + 1, h1, h2, used, cur, out);
        for j in 0..h2.len() {
            if used[j] || h1[i].symbol != h2[j].symbol || h1[i].arity() != h2[j].arity() {
                continue;
            }
            used[j] = true;
            cur.push((i, j));
            rec(i + 1, h1, h2, used, cur, out);
            cur.pop();
            used[j] = false;
        }
    }
    let mut out = Vec::new();
    rec(0, h1, h2, &mut vec![false; h2.len()], &mut Vec::new(), &mut out);
    out
}

/// All overlaps of `r1` and `r2`, one per choice of identified non-empty
/// head parts whose equations are satisfiable, deduplicated up to variable
/// renaming (and up to swapping the two sides when both rules are the same).
pub fn enumerate_overlaps(r1: &ChrRule, r2: &ChrRule) -> Vec<Overlap> {
    let same = r1 == r2;
    let r2 = rename_apart(r1, r2);
    let (h1, b1, e1) = simplification(r1);
    let (h2, b2, e2) = simplification(&r2);
    let globals: BTreeSet<String> = h1.iter().chain(&h2).flat_map(|c| c.vars().map(str::to_string)).collect();

    let mut out: Vec<Overlap> = Vec::new();
    let mut seen: HashMap<String, Vec<ChrState>> = HashMap::new();
    for pairing in pairings(&h1, &h2) {
        let mut store = BuiltinStore::top();
        for &(i, j) in &pairing {
            for (a, b) in h1[i].args.iter().zip(&h2[j].args) {
                store.add_eq(a, b);
            }
        }
        if store.is_false() {
            continue;
        }
        let paired2: BTreeSet<usize> = pairing.iter().map(|p| p.1).collect();
        let paired1: BTreeSet<usize> = pairing.iter().map(|p| p.0).collect();
        let rest2: Vec<Constraint> =
            h2.iter().enumerate().filter(|(j, _)| !paired2.contains(j)).map(|(_, c)| c.clone()).collect();
        let rest1: Vec<Constraint> =
            h1.iter().enumerate().filter(|(i, _)| !paired1.contains(i)).map(|(_, c)| c.clone()).collect();

        let state = |goal: Vec<Constraint>, eqs: &[BuiltinEq]| {
            let mut s = ChrState { goal, store: store.clone(), globals: globals.clone() };
            for eq in eqs {
                s.add_eq(eq);
            }
            normalize(&s)
        };
        let sigma_cp = state(h1.iter().chain(&rest2).cloned().collect(), &[]);
        let s1 = state(b1.iter().chain(&rest2).cloned().collect(), e1);
        let s2 = state(b2.iter().chain(&rest1).cloned().collect(), e2);

        let mut keys = vec![combined(&sigma_cp, &s1, &s2)];
        if same {
            keys.push(combined(&sigma_cp, &s2, &s1));
        }
        let keyed: Vec<(String, ChrState)> = keys.into_iter().map(|k| (structural_key(&k), k)).collect();
        let dup = keyed
            .iter()
            .any(|(h, k)| seen.get(h).is_some_and(|b| b.iter().any(|o| equivalent_normalized(o, k))));
        if dup {
            continue;
        }
        let (h, k) = keyed.into_iter().next().expect("one key");
        seen.entry(h).or_default().push(k);
        out.push(Overlap {
            r1: r1.name.clone(),
            r2: r2.name.clone(),
            head1: h1.clone(),
            head2: h2.clone(),
            pairing,
            sigma_cp,
            pair: (s1, s2),
        });
    }
    out
}

/// The overlap state and both sides of its critical pair as one state with
/// only local variables, so that ≡ on it means "equal up to one consistent
/// renaming". Store bindings become tagged constraints.
fn combined(cp: &ChrState, s1: &ChrState, s2: &ChrState) -> ChrState {
    let mut goal = Vec::new();
    for (tag, s) in [("cp", cp), ("s1", s1), ("s2", s2)] {
        if s.is_failed() {
            goal.push(Constraint::new(format!("{tag}/false"), vec![]));
            continue;
        }
        let locals = s.local_vars();
        let rename = |v: &str| if locals.contains(v) { format!("{v}@{tag}") } else { v.to_string() };
        for c in &s.goal {
            let c = c.rename(&rename);
            goal.push(Constraint::new(format!("{tag}/{}", c.symbol), c.args));
        }
        for (v, t) in s.store.bindings().into_iter().flatten() {
            goal.push(Constraint::new(format!("{tag}/="), vec![crate::chr::Term::var(v.clone()), t.clone()]));
        }
    }
    normalize(&ChrState { goal, store: BuiltinStore::top(), globals: BTreeSet::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chr::term::c;
    use crate::chr::{states_equivalent, Term};

    /// `R @ node(N,D), edge(E,N,N) <=> node(N,D-2)`.
    pub(crate) fn remove_loop() -> ChrRule {
        ChrRule::new(
            "R",
            vec![],
            vec![c("node", &["N", "D"]), c("edge", &["E", "N", "N"])],
            vec![Constraint::new("node", vec![Term::var("N"), Term::offset("D", -2)])],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn three_self_overlaps() {
        let os = enumerate_overlaps(&remove_loop(), &remove_loop());
        assert_eq!(os.len(), 3);
        let full = os.iter().find(|o| o.pairing.len() == 2).unwrap();
        assert!(states_equivalent(&full.pair.0, &full.pair.1));
        let renamed: BTreeSet<String> = os[0].head2.iter().flat_map(|c| c.vars().map(str::to_string)).collect();
        assert_eq!(renamed, BTreeSet::from(["N'".to_string(), "D'".into(), "E'".into()]));
    }

    #[test]
    fn disjoint_symbols() {
        let other = ChrRule::new("x", vec![], vec![c("p", &["X"])], vec![], vec![]).unwrap();
        assert!(enumerate_overlaps(&remove_loop(), &other).is_empty());
    }

    #[test]
    fn ground_degree_clash_is_not_an_overlap() {
        let a = ChrRule::new("a", vec![], vec![c("node", &["N", "1"])], vec![], vec![]).unwrap();
        let b = ChrRule::new("b", vec![], vec![c("node", &["M", "2"])], vec![], vec![]).unwrap();
        assert!(enumerate_overlaps(&a, &b).is_empty());
        assert_eq!(enumerate_overlaps(&a, &a).len(), 1);
    }
}
