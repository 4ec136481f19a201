use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};

use super::state::{normalize, ChrState};
use super::term::{Constraint, Term};

/// Decides `a ≡ b` for states of the flat offset fragment.
///
/// Both states are normalized; then a bijection between the goal multisets is
/// searched for that is the identity on globals and constants and a
/// bijection on local variables. Normalization shifts every local class to
/// offset zero, so local offsets must agree exactly.
pub fn states_equivalent(a: &ChrState, b: &ChrState) -> bool {
    let (a, b) = (normalize(a), normalize(b));
    equivalent_normalized(&a, &b)
}

/// [`states_equivalent`] for states already in normal form.
pub fn equivalent_normalized(a: &ChrState, b: &ChrState) -> bool {
    if a.is_failed() || b.is_failed() {
        return a.is_failed() && b.is_failed();
    }
    if a.globals != b.globals || a.store != b.store || a.goal.len() != b.goal.len() {
        return false;
    }
    let shape_a = refined_shapes(&a.goal, &a.globals);
    let shape_b = refined_shapes(&b.goal, &b.globals);
    let mut sa = shape_a.clone();
    let mut sb = shape_b.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return false;
    }
    let order = search_order(&a.goal, &shape_a, &a.globals);
    let mut m = Matcher {
        a,
        b,
        shape_a: &shape_a,
        shape_b: &shape_b,
        used: vec![false; b.goal.len()],
        fwd: BTreeMap::new(),
        back: BTreeMap::new(),
    };
    m.extend(&order, 0)
}

/// The constraint with local variable names erased.
fn shape(c: &Constraint, globals: &BTreeSet<String>) -> String {
    let mut s = c.symbol.clone();
    s.push('(');
    for a in &c.args {
        match a.base() {
            Some(v) if !globals.contains(v) => s.push_str(&format!("_{:+}", a.delta())),
            _ => s.push_str(&a.to_string()),
        }
        s.push(',');
    }
    s.push(')');
    s
}

/// Shapes refined by the shapes of the constraints each local variable
/// occurs in, iterated a few rounds. Invariant under renaming of locals.
fn refined_shapes(goal: &[Constraint], globals: &BTreeSet<String>) -> Vec<String> {
    let hash = |x: &dyn Fn(&mut DefaultHasher)| {
        let mut h = DefaultHasher::new();
        x(&mut h);
        h.finish()
    };
    let base: Vec<String> = goal.iter().map(|c| shape(c, globals)).collect();
    let mut colours: Vec<u64> = base.iter().map(|s| hash(&|h| s.hash(h))).collect();
    for _ in 0..3 {
        let mut occ: BTreeMap<&str, Vec<(u64, usize, i64)>> = BTreeMap::new();
        for (i, c) in goal.iter().enumerate() {
            for (p, a) in c.args.iter().enumerate() {
                if let Some(v) = a.base().filter(|v| !globals.contains(*v)) {
                    occ.entry(v).or_default().push((colours[i], p, a.delta()));
                }
            }
        }
        let var_colour: BTreeMap<&str, u64> = occ
            .into_iter()
            .map(|(v, mut list)| {
                list.sort_unstable();
                (v, hash(&|h| list.hash(h)))
            })
            .collect();
        colours = goal
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let vs: Vec<u64> = c
                    .args
                    .iter()
                    .filter_map(|a| a.base().and_then(|v| var_colour.get(v).copied()))
                    .collect();
                hash(&|h| {
                    base[i].hash(h);
                    vs.hash(h);
                })
            })
            .collect();
    }
    colours.iter().map(|c| format!("{c:016x}")).collect()
}

/// Rarest shapes first, then constraints connected through shared locals.
fn search_order(goal: &[Constraint], shapes: &[String], globals: &BTreeSet<String>) -> Vec<usize> {
    let mut freq: BTreeMap<&str, usize> = BTreeMap::new();
    for s in shapes {
        *freq.entry(s).or_default() += 1;
    }
    let locals = |i: usize| -> BTreeSet<&str> {
        goal[i].vars().filter(|v| !globals.contains(*v)).collect()
    };
    let mut order = Vec::with_capacity(goal.len());
    let mut done = vec![false; goal.len()];
    let mut bound: BTreeSet<&str> = BTreeSet::new();
    while order.len() < goal.len() {
        let next = (0..goal.len())
            .filter(|&i| !done[i])
            .min_by_key(|&i| {
                let ls = locals(i);
                let connected = ls.is_empty() || ls.iter().any(|v| bound.contains(v));
                (!connected, freq[shapes[i].as_str()], i)
            })
            .expect("remaining constraint");
        done[next] = true;
        bound.extend(locals(next));
        order.push(next);
    }
    order
}

struct Matcher<'s> {
    a: &'s ChrState,
    b: &'s ChrState,
    shape_a: &'s [String],
    shape_b: &'s [String],
    used: Vec<bool>,
    fwd: BTreeMap<&'s str, &'s str>,
    back: BTreeMap<&'s str, &'s str>,
}

impl<'s> Matcher<'s> {
    fn extend(&mut self, order: &[usize], pos: usize) -> bool {
        let Some(&i) = order.get(pos) else {
            return true;
        };
        let (a, b) = (self.a, self.b);
        for j in 0..b.goal.len() {
            if self.used[j] || self.shape_a[i] != self.shape_b[j] {
                continue;
            }
            let mut added = Vec::new();
            if self.unify(&a.goal[i], &b.goal[j], &mut added) {
                self.used[j] = true;
                if self.extend(order, pos + 1) {
                    return true;
                }
                self.used[j] = false;
            }
            for v in added {
                let w = self.fwd.remove(v).expect("added");
                self.back.remove(w);
            }
        }
        false
    }

    fn unify(&mut self, ca: &'s Constraint, cb: &'s Constraint, added: &mut Vec<&'s str>) -> bool {
        for (x, y) in ca.args.iter().zip(&cb.args) {
            match (x, y) {
                (Term::Const(p), Term::Const(q)) if p == q => {}
                (Term::Const(_), _) | (_, Term::Const(_)) => return false,
                _ => {
                    let (vx, vy) = (x.base().expect("var"), y.base().expect("var"));
                    if x.delta() != y.delta() {
                        return false;
                    }
                    let gx = self.a.globals.contains(vx);
                    let gy = self.b.globals.contains(vy);
                    if gx || gy {
                        if !(gx && gy && vx == vy) {
                            return false;
                        }
                        continue;
                    }
                    match (self.fwd.get(vx), self.back.get(vy)) {
                        (Some(&w), _) if w == vy => {}
                        (None, None) => {
                            self.fwd.insert(vx, vy);
                            self.back.insert(vy, vx);
                            added.push(vx);
                        }
                        _ => return false,
                    }
                }
            }
        }
        true
    }
}

/// A string that is equal for ≡-equivalent states: the normal form with
/// local variable names erased.
pub fn structural_key(state: &ChrState) -> String {
    let n = normalize(state);
    if n.is_failed() {
        return "⊥".to_string();
    }
    let mut shapes = refined_shapes(&n.goal, &n.globals);
    shapes.sort();
    format!("{}|{}|{:?}", shapes.join(" "), n.store, n.globals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chr::term::{c, t};

    fn full(goal: Vec<Constraint>, globals: &[&str]) -> ChrState {
        ChrState::new(goal, &[], globals.iter().copied())
    }

    /// The two final states of the strong-joinability example.
    fn pair(globals: &[&str]) -> (ChrState, ChrState) {
        let s1 = full(
            vec![c("node", &["Nx", "Dx+1"]), c("node", &["Ny", "Dy-1"]), c("b", &["E'", "Nx", "Nx"])],
            globals,
        );
        let s2 = full(
            vec![c("node", &["Nx", "Dx-1"]), c("node", &["Ny", "Dy+1"]), c("b", &["E'", "Ny", "Ny"])],
            globals,
        );
        (s1, s2)
    }

    #[test]
    fn strong_example_depends_on_globals() {
        let (s1, s2) = pair(&["Nx", "Ny", "Dx", "Dy"]);
        assert!(!states_equivalent(&s1, &s2));
        let (s1, s2) = pair(&[]);
        assert!(states_equivalent(&s1, &s2));
    }

    #[test]
    fn local_renaming() {
        let s = full(vec![c("edge", &["E", "A", "B"]), c("node", &["A", "1"]), c("node", &["B", "1"])], &[]);
        let r = full(vec![c("node", &["Q", "1"]), c("edge", &["F", "P", "Q"]), c("node", &["P", "1"])], &[]);
        assert!(states_equivalent(&s, &r));
        let flipped = full(vec![c("node", &["Q", "1"]), c("edge", &["F", "Q", "P"]), c("node", &["P", "2"])], &[]);
        assert!(!states_equivalent(&s, &flipped));
    }

    #[test]
    fn failed_states() {
        let f1 = ChrState::new(vec![c("p", &["X"])], &[(t("X"), t("1")), (t("X"), t("2"))], ["X"]);
        let f2 = ChrState::new(vec![], &[(t("Y"), t("Y+1"))], Vec::<String>::new());
        assert!(states_equivalent(&f1, &f2));
        assert!(!states_equivalent(&f1, &full(vec![], &[])));
    }

    #[test]
    fn ground_does_not_match_local_offset() {
        let g = full(vec![c("node", &["N", "2"])], &[]);
        let l = full(vec![c("node", &["N", "D"])], &[]);
        assert!(!states_equivalent(&g, &l));
        let shifted = full(vec![c("node", &["N", "D+5"])], &[]);
        assert!(states_equivalent(&l, &shifted));
    }

    #[test]
    fn key_agrees() {
        let (s1, s2) = pair(&[]);
        assert_eq!(structural_key(&s1), structural_key(&s2));
    }
}
