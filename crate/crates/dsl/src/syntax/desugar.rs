//! Elimination of derived assertion forms.
//!
//! The core fragment is `b`, `e ~> e'`, `->`, `forall`, `*`, `-*`, and the
//! modality. Everything else abbreviates a core formula:
//!
//! - `!p`        is `p -> false`
//! - `p \/ q`    is `!p -> q`
//! - `p /\ q`    is `!(p -> !q)`
//! - `p <-> q`   is `(p -> q) /\ (q -> p)`
//! - `exists x p` is `!forall x !p`
//! - `e ~> -`    is `exists v (e ~> v)` for a fresh `v`
//! - `emp`       is `forall u !(u ~> -)`
//! - `e |-> e'`  is `(e ~> e') /\ forall u ((u ~> -) -> u = e)`
//! - `e |-> -`   is `(e ~> -) /\ forall u ((u ~> -) -> u = e)`
//!
//! Fresh binders come from the reserved `$` namespace, seeded above any index
//! already present, so expansion can never capture user variables.

use super::ast::{Assertion, BExpr, Expr, Name, Stmt};
use super::subst::FreshNames;

/// `p -> false`
pub(crate) fn not_core(p: Assertion) -> Assertion {
    Assertion::imp(p, Assertion::falsity())
}

/// `!(p -> !q)`
pub(crate) fn and_core(p: Assertion, q: Assertion) -> Assertion {
    not_core(Assertion::imp(p, not_core(q)))
}

/// `!p -> q`
pub(crate) fn or_core(p: Assertion, q: Assertion) -> Assertion {
    Assertion::imp(not_core(p), q)
}

/// `!forall x !p`
pub(crate) fn exists_core(x: impl Into<Name>, p: Assertion) -> Assertion {
    not_core(Assertion::forall(x, not_core(p)))
}

/// `(e ~> -)` in core form: `exists v (e ~> v)`.
pub(crate) fn allocated_core(e: Expr, fresh: &mut FreshNames) -> Assertion {
    let v = fresh.fresh();
    exists_core(v.clone(), Assertion::PointsWeak(e, Expr::Var(v)))
}

/// `!(e ~> -)` in core form.
pub(crate) fn not_allocated_core(e: Expr, fresh: &mut FreshNames) -> Assertion {
    not_core(allocated_core(e, fresh))
}

/// `forall u ((u ~> -) -> u = e)`: nothing outside `e` is allocated.
fn only_cell_core(e: Expr, fresh: &mut FreshNames) -> Assertion {
    let u = fresh.fresh();
    Assertion::forall(
        u.clone(),
        Assertion::imp(
            allocated_core(Expr::Var(u.clone()), fresh),
            Assertion::Bool(BExpr::Eq(Expr::Var(u), e)),
        ),
    )
}

/// Rewrites `p` to the core fragment. Idempotent; core input comes back
/// unchanged.
pub fn desugar(p: &Assertion) -> Assertion {
    let mut fresh = FreshNames::above(p);
    desugar_with(p, &mut fresh)
}

pub(crate) fn desugar_with(p: &Assertion, fresh: &mut FreshNames) -> Assertion {
    match p {
        Assertion::Bool(b) => Assertion::Bool(b.clone()),
        Assertion::PointsWeak(e, e2) => Assertion::PointsWeak(e.clone(), e2.clone()),
        Assertion::Imp(a, b) => {
            Assertion::imp(desugar_with(a, fresh), desugar_with(b, fresh))
        }
        Assertion::Forall(x, a) => Assertion::Forall(x.clone(), Box::new(desugar_with(a, fresh))),
        Assertion::SepConj(a, b) => {
            Assertion::sep_conj(desugar_with(a, fresh), desugar_with(b, fresh))
        }
        Assertion::SepImp(a, b) => {
            Assertion::sep_imp(desugar_with(a, fresh), desugar_with(b, fresh))
        }
        Assertion::Modal(s, a) => {
            Assertion::modal(desugar_stmt(s, fresh), desugar_with(a, fresh))
        }
        Assertion::Not(a) => not_core(desugar_with(a, fresh)),
        Assertion::And(a, b) => and_core(desugar_with(a, fresh), desugar_with(b, fresh)),
        Assertion::Or(a, b) => or_core(desugar_with(a, fresh), desugar_with(b, fresh)),
        Assertion::Iff(a, b) => {
            let da = desugar_with(a, fresh);
            let db = desugar_with(b, fresh);
            and_core(
                Assertion::imp(da.clone(), db.clone()),
                Assertion::imp(db, da),
            )
        }
        Assertion::Exists(x, a) => exists_core(x.clone(), desugar_with(a, fresh)),
        Assertion::Emp => {
            let u = fresh.fresh();
            Assertion::forall(
                u.clone(),
                not_allocated_core(Expr::Var(u), fresh),
            )
        }
        Assertion::PointsWeakAny(e) => allocated_core(e.clone(), fresh),
        Assertion::PointsStrong(e, e2) => and_core(
            Assertion::PointsWeak(e.clone(), e2.clone()),
            only_cell_core(e.clone(), fresh),
        ),
        Assertion::PointsStrongAny(e) => and_core(
            allocated_core(e.clone(), fresh),
            only_cell_core(e.clone(), fresh),
        ),
    }
}

// Invariant annotations are assertions too; keep the whole tree core.
fn desugar_stmt(s: &Stmt, fresh: &mut FreshNames) -> Stmt {
    match s {
        Stmt::Seq(a, b) => Stmt::seq(desugar_stmt(a, fresh), desugar_stmt(b, fresh)),
        Stmt::If(b, s1, s2) => Stmt::If(
            b.clone(),
            Box::new(desugar_stmt(s1, fresh)),
            Box::new(desugar_stmt(s2, fresh)),
        ),
        Stmt::While(b, inv, body) => Stmt::While(
            b.clone(),
            inv.as_ref().map(|i| Box::new(desugar_with(i, fresh))),
            Box::new(desugar_stmt(body, fresh)),
        ),
        other => other.clone(),
    }
}
