use super::{edge_constraint, EncodeError, EncoderOptions, NamingScheme};
use crate::chr::{BuiltinEq, ChrProgram, ChrRule, Constraint, Term};
use crate::dpo::{DpoRule, Gts};
use crate::graph::degree;

fn deg(g: &crate::graph::TypedGraph, v: &str) -> i64 {
    degree(g, v).expect("node of the rule graph") as i64
}

/// Translates one DPO rule.
///
/// The head holds the interface nodes with their degree variables, deleted
/// nodes with their exact degree, and all left-hand edges. The body re-adds
/// interface nodes with adjusted degrees plus everything the rule creates.
pub fn encode_rule(p: &DpoRule, opts: &EncoderOptions) -> Result<ChrRule, EncodeError> {
    let (l, r) = (p.lhs(), p.rhs());
    if l.is_empty() {
        return Err(EncodeError::EmptyHead(p.name().to_string()));
    }
    let names = NamingScheme::for_ids(
        l.nodes().keys().chain(r.nodes().keys().filter(|v| !p.is_kept(v))),
        l.edges().keys().chain(r.edges().keys().filter(|e| !p.is_kept(e))),
    );
    let edge = |g: &crate::graph::TypedGraph, e: &str| {
        let ed = &g.edges()[e];
        edge_constraint(&ed.ty, names.edge_var(e), names.node_var(&ed.src), names.node_var(&ed.tgt), opts)
    };

    let mut kept = Vec::new();
    let mut removed = Vec::new();
    let mut body_user = Vec::new();
    let mut body_builtin = Vec::new();
    let mut body_edges = Vec::new();

    for (v, ty) in l.nodes() {
        let n = names.node_var(v);
        if !p.is_kept(v) {
            removed.push(Constraint::new(ty, vec![Term::Var(n), Term::int(deg(l, v))]));
            continue;
        }
        let d = names.degree_var(v);
        let (dl, dr) = (deg(l, v), deg(r, v));
        let head = Constraint::new(ty, vec![Term::Var(n.clone()), Term::Var(d.clone())]);
        if opts.simpagation && dl == dr {
            kept.push(head);
            continue;
        }
        removed.push(head);

        let id = if opts.variable_elimination {
            n.clone()
        } else {
            let primed = format!("{n}'");
            body_builtin.push(BuiltinEq::new(&primed, Term::Var(n.clone())));
            primed
        };
        let delta = dr - dl;
        let degree_term = match (opts.variable_elimination, opts.arithmetic_simplification) {
            (true, true) => Term::offset(d, delta),
            (false, true) if delta == 0 => {
                body_builtin.push(BuiltinEq::new(format!("{d}'"), Term::Var(d.clone())));
                Term::Var(format!("{d}'"))
            }
            (_, true) => {
                let primed = format!("{d}'");
                body_builtin.push(BuiltinEq::with_delta(&primed, Term::Var(d), (-delta).max(0), delta.max(0)));
                Term::Var(primed)
            }
            (_, false) => {
                let primed = format!("{d}'");
                body_builtin.push(BuiltinEq::with_delta(&primed, Term::Var(d), dl, dr));
                Term::Var(primed)
            }
        };
        body_user.push(Constraint::new(ty, vec![Term::Var(id), degree_term]));
    }
    for (v, ty) in r.nodes().iter().filter(|(v, _)| !p.is_kept(v)) {
        body_user.push(Constraint::new(ty, vec![Term::Var(names.node_var(v)), Term::int(deg(r, v))]));
    }
    for e in l.edges().keys() {
        let c = edge(l, e);
        if p.is_kept(e) {
            if opts.simpagation {
                kept.push(c);
            } else {
                removed.push(c.clone());
                body_edges.push(c);
            }
        } else {
            removed.push(c);
        }
    }
    for e in r.edges().keys().filter(|e| !p.is_kept(e)) {
        body_edges.push(edge(r, e));
    }
    body_user.extend(body_edges);

    if removed.is_empty() {
        return Err(EncodeError::PropagationRule(p.name().to_string()));
    }
    ChrRule::new(p.name(), kept, removed, body_user, body_builtin).map_err(|e| EncodeError::InvalidRule {
        rule: p.name().to_string(),
        reason: e.to_string(),
    })
}

/// One CHR rule per DPO rule, in order.
pub fn encode_gts(gts: &Gts, opts: &EncoderOptions) -> Result<ChrProgram, EncodeError> {
    let rules = gts.rules().iter().map(|r| encode_rule(r, opts)).collect::<Result<Vec<_>, _>>()?;
    ChrProgram::new(rules).map_err(|e| EncodeError::InvalidRule { rule: String::new(), reason: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpo::fixtures::*;
    use crate::graph::TypedGraph;

    fn simpagation() -> EncoderOptions {
        EncoderOptions { simpagation: true, ..EncoderOptions::default() }
    }

    #[test]
    fn twoloop_forms() {
        let r = encode_rule(&twoloop(), &simpagation()).unwrap();
        assert_eq!(
            r.to_string(),
            "twoloop @ node(N1,D1) \\ node(N2,2), edge(E1,N1,N2), edge(E2,N2,N1) <=> edge(E3,N1,N1)"
        );
        let v = encode_rule(&twoloop(), &EncoderOptions::verbose()).unwrap();
        assert_eq!(
            v.to_string(),
            "twoloop @ node(N1,D1), node(N2,2), edge(E1,N1,N2), edge(E2,N2,N1) <=> \
             node(N1',D1'), edge(E3,N1,N1), N1'=N1, D1'=D1-2+2"
        );
        let d = encode_rule(&twoloop(), &EncoderOptions::default()).unwrap();
        assert_eq!(
            d.to_string(),
            "twoloop @ node(N1,D1), node(N2,2), edge(E1,N1,N2), edge(E2,N2,N1) <=> node(N1,D1), edge(E3,N1,N1)"
        );
        let no_ids = EncoderOptions { edge_identifiers: false, ..simpagation() };
        assert_eq!(
            encode_rule(&twoloop(), &no_ids).unwrap().to_string(),
            "twoloop @ node(N1,D1) \\ node(N2,2), edge(N1,N2), edge(N2,N1) <=> edge(N1,N1)"
        );
    }

    #[test]
    fn unlink_form() {
        let r = encode_rule(&unlink(), &EncoderOptions::default()).unwrap();
        assert_eq!(
            r.to_string(),
            "unlink @ node(N1,D1), node(N2,2), node(N3,D3), edge(E1,N1,N2), edge(E2,N2,N3) <=> \
             node(N1,D1), node(N3,D3), edge(E3,N1,N3)"
        );
    }

    #[test]
    fn identity_rule_is_propagation_under_simpagation() {
        let l = TypedGraph::new(tg()).node("a", "node");
        let id = DpoRule::new("id", l.clone(), ["a"], l).unwrap();
        assert_eq!(encode_rule(&id, &simpagation()), Err(EncodeError::PropagationRule("id".into())));
        assert!(encode_rule(&id, &EncoderOptions::default()).is_ok());
    }

    #[test]
    fn nonzero_delta() {
        let l = TypedGraph::new(tg()).node("x", "node");
        let r = TypedGraph::new(tg()).node("x", "node").edge("l", "edge", "x", "x");
        let add = DpoRule::new("add", l, ["x"], r).unwrap();
        let d = encode_rule(&add, &EncoderOptions::default()).unwrap();
        assert_eq!(d.to_string(), "add @ node(Nx,Dx) <=> node(Nx,Dx+2), edge(El,Nx,Nx)");
        let a = encode_rule(&add, &EncoderOptions { variable_elimination: false, ..EncoderOptions::default() }).unwrap();
        assert_eq!(a.to_string(), "add @ node(Nx,Dx) <=> node(Nx',Dx'), edge(El,Nx,Nx), Nx'=Nx, Dx'=Dx+2");
    }
}
