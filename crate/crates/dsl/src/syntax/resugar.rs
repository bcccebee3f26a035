//! Structural inverse of [`desugar`](super::desugar), for display: folds the
//! core implication encodings back into `!`, `/\`, `\/`, `<->`, `exists`,
//! and the derived heap atoms. Purely syntactic, no simplification; the
//! result denotes the same set of states as the input.

use super::ast::{Assertion, BExpr, Expr, Stmt};

fn is_false(p: &Assertion) -> bool {
    matches!(p, Assertion::Bool(BExpr::False))
}

// exists v (e ~> v), already folded to PointsWeakAny by the bottom-up pass.
fn as_allocated(p: &Assertion) -> Option<&Expr> {
    match p {
        Assertion::PointsWeakAny(e) => Some(e),
        _ => None,
    }
}

// forall u ((u ~> -) -> u = e): the heap has no cell outside e.
fn as_only_cell(p: &Assertion) -> Option<&Expr> {
    match p {
        Assertion::Forall(u, body) => match body.as_ref() {
            Assertion::Imp(l, r) => match (as_allocated(l), r.as_ref()) {
                (Some(Expr::Var(u2)), Assertion::Bool(BExpr::Eq(Expr::Var(u3), e)))
                    if u2 == u && u3 == u && !e.vars().contains(u) =>
                {
                    Some(e)
                }
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

fn rebuild_and(l: Assertion, r: Assertion) -> Assertion {
    // (e ~> e') /\ "only cell e" is the strong points-to.
    if let Some(e2) = as_only_cell(&r) {
        match &l {
            Assertion::PointsWeak(e, v) if e == e2 => {
                return Assertion::PointsStrong(e.clone(), v.clone());
            }
            Assertion::PointsWeakAny(e) if e == e2 => {
                return Assertion::PointsStrongAny(e.clone());
            }
            _ => {}
        }
    }
    // (p -> q) /\ (q -> p) reads better as an equivalence.
    if let (Assertion::Imp(a, b), Assertion::Imp(b2, a2)) = (&l, &r) {
        if a == a2 && b == b2 {
            return Assertion::iff(a.as_ref().clone(), b.as_ref().clone());
        }
    }
    Assertion::and(l, r)
}

/// Folds core encodings back into derived forms, bottom-up.
pub fn resugar(p: &Assertion) -> Assertion {
    match p {
        Assertion::Imp(l, r) => {
            let l = resugar(l);
            let r = resugar(r);
            if is_false(&r) {
                // !forall v !q is the existential.
                if let Assertion::Forall(v, body) = &l {
                    if let Assertion::Not(q) = body.as_ref() {
                        let ex = Assertion::exists(v.clone(), q.as_ref().clone());
                        // exists v (e ~> v) is the allocation atom.
                        if let Assertion::Exists(v2, inner) = &ex {
                            if let Assertion::PointsWeak(e, Expr::Var(w)) = inner.as_ref() {
                                if w == v2 && !e.vars().contains(v2) {
                                    return Assertion::PointsWeakAny(e.clone());
                                }
                            }
                        }
                        return ex;
                    }
                }
                // !(a -> !b) is the conjunction.
                if let Assertion::Imp(a, b) = &l {
                    if let Assertion::Not(b2) = b.as_ref() {
                        return rebuild_and(a.as_ref().clone(), b2.as_ref().clone());
                    }
                }
                return Assertion::not(l);
            }
            // !a -> b is the disjunction.
            if let Assertion::Not(a) = &l {
                return Assertion::or(a.as_ref().clone(), r);
            }
            Assertion::imp(l, r)
        }
        Assertion::Forall(x, body) => {
            let body = resugar(body);
            // forall u !(u ~> -) is the empty heap.
            if let Assertion::Not(inner) = &body {
                if let Assertion::PointsWeakAny(Expr::Var(u)) = inner.as_ref() {
                    if u == x {
                        return Assertion::Emp;
                    }
                }
            }
            Assertion::Forall(x.clone(), Box::new(body))
        }
        Assertion::Exists(x, body) => {
            let body = resugar(body);
            if let Assertion::PointsWeak(e, Expr::Var(w)) = &body {
                if w == x && !e.vars().contains(x) {
                    return Assertion::PointsWeakAny(e.clone());
                }
            }
            Assertion::Exists(x.clone(), Box::new(body))
        }
        Assertion::SepConj(a, b) => Assertion::sep_conj(resugar(a), resugar(b)),
        Assertion::SepImp(a, b) => Assertion::sep_imp(resugar(a), resugar(b)),
        Assertion::And(a, b) => rebuild_and(resugar(a), resugar(b)),
        Assertion::Or(a, b) => Assertion::or(resugar(a), resugar(b)),
        Assertion::Iff(a, b) => Assertion::iff(resugar(a), resugar(b)),
        Assertion::Not(a) => Assertion::not(resugar(a)),
        Assertion::Modal(s, a) => Assertion::modal(resugar_stmt(s), resugar(a)),
        atom => atom.clone(),
    }
}

// Loop invariants are assertions too.
fn resugar_stmt(s: &Stmt) -> Stmt {
    match s {
        Stmt::Seq(a, b) => Stmt::seq(resugar_stmt(a), resugar_stmt(b)),
        Stmt::If(b, s1, s2) => Stmt::If(
            b.clone(),
            Box::new(resugar_stmt(s1)),
            Box::new(resugar_stmt(s2)),
        ),
        Stmt::While(b, inv, body) => Stmt::While(
            b.clone(),
            inv.as_ref().map(|i| Box::new(resugar(i))),
            Box::new(resugar_stmt(body)),
        ),
        other => other.clone(),
    }
}
