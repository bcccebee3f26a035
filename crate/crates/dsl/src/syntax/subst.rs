//! Fresh-name supply, capture-avoiding substitution, and alpha-equivalence.

use thiserror::Error;

use super::ast::{Assertion, BExpr, Expr, Name, Stmt, FRESH_PREFIX};

/// Monotone supply of reserved `$n` names. Seed it above every index already
/// present in the terms at hand and minted names can never collide or
/// capture.
#[derive(Debug, Clone)]
pub struct FreshNames {
    next: u64,
}

impl FreshNames {
    pub fn starting_at(next: u64) -> Self {
        FreshNames { next }
    }

    /// A supply strictly above every `$k` occurring in `p`.
    pub fn above(p: &Assertion) -> Self {
        let mut max = 0;
        scan_assertion(p, &mut max);
        FreshNames { next: max + 1 }
    }

    pub fn above_all<'a>(ps: impl IntoIterator<Item = &'a Assertion>) -> Self {
        let mut max = 0;
        for p in ps {
            scan_assertion(p, &mut max);
        }
        FreshNames { next: max + 1 }
    }

    pub fn fresh(&mut self) -> Name {
        let n = self.next;
        self.next += 1;
        format!("{FRESH_PREFIX}{n}")
    }
}

fn note_name(x: &str, max: &mut u64) {
    if let Some(rest) = x.strip_prefix(FRESH_PREFIX) {
        if let Ok(k) = rest.parse::<u64>() {
            *max = (*max).max(k);
        }
    }
}

fn scan_expr(e: &Expr, max: &mut u64) {
    match e {
        Expr::Int(_) => {}
        Expr::Var(x) => note_name(x, max),
        Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) => {
            scan_expr(l, max);
            scan_expr(r, max);
        }
    }
}

fn scan_bexpr(b: &BExpr, max: &mut u64) {
    match b {
        BExpr::True | BExpr::False => {}
        BExpr::Eq(l, r) | BExpr::Lt(l, r) => {
            scan_expr(l, max);
            scan_expr(r, max);
        }
        BExpr::Not(b) => scan_bexpr(b, max),
        BExpr::And(l, r) => {
            scan_bexpr(l, max);
            scan_bexpr(r, max);
        }
    }
}

fn scan_stmt(s: &Stmt, max: &mut u64) {
    match s {
        Stmt::Assign(x, e)
        | Stmt::Lookup(x, e)
        | Stmt::Mutate(x, e)
        | Stmt::Alloc(x, e)
        | Stmt::HeapUpdate(x, e) => {
            note_name(x, max);
            scan_expr(e, max);
        }
        Stmt::GeneralMutate(e, e2) => {
            scan_expr(e, max);
            scan_expr(e2, max);
        }
        Stmt::AllocMulti(x, es) => {
            note_name(x, max);
            for e in es {
                scan_expr(e, max);
            }
        }
        Stmt::Dispose(x) | Stmt::HeapClear(x) => note_name(x, max),
        Stmt::Seq(a, b) => {
            scan_stmt(a, max);
            scan_stmt(b, max);
        }
        Stmt::If(b, s1, s2) => {
            scan_bexpr(b, max);
            scan_stmt(s1, max);
            scan_stmt(s2, max);
        }
        Stmt::While(b, inv, body) => {
            scan_bexpr(b, max);
            if let Some(inv) = inv {
                scan_assertion(inv, max);
            }
            scan_stmt(body, max);
        }
    }
}

fn scan_assertion(p: &Assertion, max: &mut u64) {
    match p {
        Assertion::Bool(b) => scan_bexpr(b, max),
        Assertion::PointsWeak(e, e2) | Assertion::PointsStrong(e, e2) => {
            scan_expr(e, max);
            scan_expr(e2, max);
        }
        Assertion::PointsWeakAny(e) | Assertion::PointsStrongAny(e) => scan_expr(e, max),
        Assertion::Emp => {}
        Assertion::Imp(p, q)
        | Assertion::SepConj(p, q)
        | Assertion::SepImp(p, q)
        | Assertion::And(p, q)
        | Assertion::Or(p, q)
        | Assertion::Iff(p, q) => {
            scan_assertion(p, max);
            scan_assertion(q, max);
        }
        Assertion::Not(p) => scan_assertion(p, max),
        Assertion::Forall(x, p) | Assertion::Exists(x, p) => {
            note_name(x, max);
            scan_assertion(p, max);
        }
        Assertion::Modal(s, p) => {
            scan_stmt(s, max);
            scan_assertion(p, max);
        }
    }
}

/// Substitution cannot resolve a modality: `[S]p` is not closed under
/// replacing program variables by expressions. The rewrite system handles
/// those instead.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("cannot substitute under a modality; normalize the formula first")]
pub struct ModalityPresent;

/// Replaces every occurrence of `x` in `e'` by `e`.
pub fn subst_expr(e2: &Expr, x: &str, e: &Expr) -> Expr {
    match e2 {
        Expr::Int(n) => Expr::Int(*n),
        Expr::Var(y) => {
            if y == x {
                e.clone()
            } else {
                Expr::Var(y.clone())
            }
        }
        Expr::Add(l, r) => Expr::add(subst_expr(l, x, e), subst_expr(r, x, e)),
        Expr::Sub(l, r) => Expr::sub(subst_expr(l, x, e), subst_expr(r, x, e)),
        Expr::Mul(l, r) => Expr::mul(subst_expr(l, x, e), subst_expr(r, x, e)),
    }
}

/// Replaces every occurrence of `x` in `b` by `e`.
pub fn subst_bexpr(b: &BExpr, x: &str, e: &Expr) -> BExpr {
    match b {
        BExpr::True => BExpr::True,
        BExpr::False => BExpr::False,
        BExpr::Eq(l, r) => BExpr::Eq(subst_expr(l, x, e), subst_expr(r, x, e)),
        BExpr::Lt(l, r) => BExpr::Lt(subst_expr(l, x, e), subst_expr(r, x, e)),
        BExpr::Not(b) => BExpr::not(subst_bexpr(b, x, e)),
        BExpr::And(l, r) => BExpr::and(subst_bexpr(l, x, e), subst_bexpr(r, x, e)),
    }
}

/// Capture-avoiding substitution of `e` for the free occurrences of `x` in
/// `p`. Binders whose name occurs in `e` are renamed into the `$` namespace.
pub fn subst(p: &Assertion, x: &str, e: &Expr) -> Result<Assertion, ModalityPresent> {
    let mut fresh = {
        let mut max = 0;
        scan_assertion(p, &mut max);
        scan_expr(e, &mut max);
        FreshNames { next: max + 1 }
    };
    let evars = e.vars();
    subst_in(p, x, e, &evars, &mut fresh)
}

fn subst_in(
    p: &Assertion,
    x: &str,
    e: &Expr,
    evars: &std::collections::BTreeSet<Name>,
    fresh: &mut FreshNames,
) -> Result<Assertion, ModalityPresent> {
    Ok(match p {
        Assertion::Bool(b) => Assertion::Bool(subst_bexpr(b, x, e)),
        Assertion::PointsWeak(l, r) => {
            Assertion::PointsWeak(subst_expr(l, x, e), subst_expr(r, x, e))
        }
        Assertion::PointsStrong(l, r) => {
            Assertion::PointsStrong(subst_expr(l, x, e), subst_expr(r, x, e))
        }
        Assertion::PointsWeakAny(l) => Assertion::PointsWeakAny(subst_expr(l, x, e)),
        Assertion::PointsStrongAny(l) => Assertion::PointsStrongAny(subst_expr(l, x, e)),
        Assertion::Emp => Assertion::Emp,
        Assertion::Imp(a, b) => Assertion::imp(
            subst_in(a, x, e, evars, fresh)?,
            subst_in(b, x, e, evars, fresh)?,
        ),
        Assertion::SepConj(a, b) => Assertion::sep_conj(
            subst_in(a, x, e, evars, fresh)?,
            subst_in(b, x, e, evars, fresh)?,
        ),
        Assertion::SepImp(a, b) => Assertion::sep_imp(
            subst_in(a, x, e, evars, fresh)?,
            subst_in(b, x, e, evars, fresh)?,
        ),
        Assertion::And(a, b) => Assertion::and(
            subst_in(a, x, e, evars, fresh)?,
            subst_in(b, x, e, evars, fresh)?,
        ),
        Assertion::Or(a, b) => Assertion::or(
            subst_in(a, x, e, evars, fresh)?,
            subst_in(b, x, e, evars, fresh)?,
        ),
        Assertion::Iff(a, b) => Assertion::iff(
            subst_in(a, x, e, evars, fresh)?,
            subst_in(b, x, e, evars, fresh)?,
        ),
        Assertion::Not(a) => Assertion::not(subst_in(a, x, e, evars, fresh)?),
        Assertion::Forall(y, body) | Assertion::Exists(y, body) => {
            let is_forall = matches!(p, Assertion::Forall(..));
            let rebuild = |y: Name, b: Assertion| {
                if is_forall {
                    Assertion::Forall(y, Box::new(b))
                } else {
                    Assertion::Exists(y, Box::new(b))
                }
            };
            if y == x {
                // `x` is bound here; nothing to substitute below.
                rebuild(y.clone(), body.as_ref().clone())
            } else if evars.contains(y) && body.free_vars().contains(x) {
                let y2 = fresh.fresh();
                let renamed = rename_var(body, y, &y2);
                rebuild(y2, subst_in(&renamed, x, e, evars, fresh)?)
            } else {
                rebuild(y.clone(), subst_in(body, x, e, evars, fresh)?)
            }
        }
        Assertion::Modal(..) => return Err(ModalityPresent),
    })
}

/// Renames every occurrence of the variable `from` to `to`, including inside
/// statements under modalities. Only safe when `to` is globally fresh.
pub(crate) fn rename_var(p: &Assertion, from: &str, to: &str) -> Assertion {
    let e = Expr::Var(to.to_string());
    match p {
        Assertion::Bool(b) => Assertion::Bool(subst_bexpr(b, from, &e)),
        Assertion::PointsWeak(l, r) => {
            Assertion::PointsWeak(subst_expr(l, from, &e), subst_expr(r, from, &e))
        }
        Assertion::PointsStrong(l, r) => {
            Assertion::PointsStrong(subst_expr(l, from, &e), subst_expr(r, from, &e))
        }
        Assertion::PointsWeakAny(l) => Assertion::PointsWeakAny(subst_expr(l, from, &e)),
        Assertion::PointsStrongAny(l) => Assertion::PointsStrongAny(subst_expr(l, from, &e)),
        Assertion::Emp => Assertion::Emp,
        Assertion::Imp(a, b) => Assertion::imp(rename_var(a, from, to), rename_var(b, from, to)),
        Assertion::SepConj(a, b) => {
            Assertion::sep_conj(rename_var(a, from, to), rename_var(b, from, to))
        }
        Assertion::SepImp(a, b) => {
            Assertion::sep_imp(rename_var(a, from, to), rename_var(b, from, to))
        }
        Assertion::And(a, b) => Assertion::and(rename_var(a, from, to), rename_var(b, from, to)),
        Assertion::Or(a, b) => Assertion::or(rename_var(a, from, to), rename_var(b, from, to)),
        Assertion::Iff(a, b) => Assertion::iff(rename_var(a, from, to), rename_var(b, from, to)),
        Assertion::Not(a) => Assertion::not(rename_var(a, from, to)),
        Assertion::Forall(y, body) | Assertion::Exists(y, body) => {
            let is_forall = matches!(p, Assertion::Forall(..));
            let (y2, body2) = if y == from {
                // Bound occurrences stay put.
                (y.clone(), body.as_ref().clone())
            } else {
                (y.clone(), rename_var(body, from, to))
            };
            if is_forall {
                Assertion::Forall(y2, Box::new(body2))
            } else {
                Assertion::Exists(y2, Box::new(body2))
            }
        }
        Assertion::Modal(s, body) => {
            Assertion::modal(rename_var_stmt(s, from, to), rename_var(body, from, to))
        }
    }
}

pub(crate) fn rename_var_stmt(s: &Stmt, from: &str, to: &str) -> Stmt {
    let rn = |x: &Name| -> Name {
        if x == from {
            to.to_string()
        } else {
            x.clone()
        }
    };
    let e = Expr::Var(to.to_string());
    match s {
        Stmt::Assign(x, e1) => Stmt::Assign(rn(x), subst_expr(e1, from, &e)),
        Stmt::Lookup(x, e1) => Stmt::Lookup(rn(x), subst_expr(e1, from, &e)),
        Stmt::Mutate(x, e1) => Stmt::Mutate(rn(x), subst_expr(e1, from, &e)),
        Stmt::GeneralMutate(e1, e2) => {
            Stmt::GeneralMutate(subst_expr(e1, from, &e), subst_expr(e2, from, &e))
        }
        Stmt::Alloc(x, e1) => Stmt::Alloc(rn(x), subst_expr(e1, from, &e)),
        Stmt::AllocMulti(x, es) => Stmt::AllocMulti(
            rn(x),
            es.iter().map(|e1| subst_expr(e1, from, &e)).collect(),
        ),
        Stmt::Dispose(x) => Stmt::Dispose(rn(x)),
        Stmt::HeapUpdate(x, e1) => Stmt::HeapUpdate(rn(x), subst_expr(e1, from, &e)),
        Stmt::HeapClear(x) => Stmt::HeapClear(rn(x)),
        Stmt::Seq(a, b) => Stmt::seq(rename_var_stmt(a, from, to), rename_var_stmt(b, from, to)),
        Stmt::If(b, s1, s2) => Stmt::If(
            subst_bexpr(b, from, &e),
            Box::new(rename_var_stmt(s1, from, to)),
            Box::new(rename_var_stmt(s2, from, to)),
        ),
        Stmt::While(b, inv, body) => Stmt::While(
            subst_bexpr(b, from, &e),
            inv.as_ref().map(|i| Box::new(rename_var(i, from, to))),
            Box::new(rename_var_stmt(body, from, to)),
        ),
    }
}

/// Structural equality modulo renaming of quantifier-bound variables.
/// Variables assigned by statements under modalities are treated as ordinary
/// occurrences, not binders.
pub fn alpha_equiv(p: &Assertion, q: &Assertion) -> bool {
    fn var_eq(env: &[(Name, Name)], a: &str, b: &str) -> bool {
        for (l, r) in env.iter().rev() {
            match (l == a, r == b) {
                (true, true) => return true,
                (false, false) => continue,
                _ => return false,
            }
        }
        a == b
    }
    fn expr_eq(env: &[(Name, Name)], a: &Expr, b: &Expr) -> bool {
        match (a, b) {
            (Expr::Int(m), Expr::Int(n)) => m == n,
            (Expr::Var(x), Expr::Var(y)) => var_eq(env, x, y),
            (Expr::Add(l1, r1), Expr::Add(l2, r2))
            | (Expr::Sub(l1, r1), Expr::Sub(l2, r2))
            | (Expr::Mul(l1, r1), Expr::Mul(l2, r2)) => {
                expr_eq(env, l1, l2) && expr_eq(env, r1, r2)
            }
            _ => false,
        }
    }
    fn bexpr_eq(env: &[(Name, Name)], a: &BExpr, b: &BExpr) -> bool {
        match (a, b) {
            (BExpr::True, BExpr::True) | (BExpr::False, BExpr::False) => true,
            (BExpr::Eq(l1, r1), BExpr::Eq(l2, r2)) | (BExpr::Lt(l1, r1), BExpr::Lt(l2, r2)) => {
                expr_eq(env, l1, l2) && expr_eq(env, r1, r2)
            }
            (BExpr::Not(x), BExpr::Not(y)) => bexpr_eq(env, x, y),
            (BExpr::And(l1, r1), BExpr::And(l2, r2)) => {
                bexpr_eq(env, l1, l2) && bexpr_eq(env, r1, r2)
            }
            _ => false,
        }
    }
    fn stmt_eq(env: &mut Vec<(Name, Name)>, a: &Stmt, b: &Stmt) -> bool {
        match (a, b) {
            (Stmt::Assign(x, e1), Stmt::Assign(y, e2))
            | (Stmt::Lookup(x, e1), Stmt::Lookup(y, e2))
            | (Stmt::Mutate(x, e1), Stmt::Mutate(y, e2))
            | (Stmt::Alloc(x, e1), Stmt::Alloc(y, e2))
            | (Stmt::HeapUpdate(x, e1), Stmt::HeapUpdate(y, e2)) => {
                var_eq(env, x, y) && expr_eq(env, e1, e2)
            }
            (Stmt::GeneralMutate(e1, f1), Stmt::GeneralMutate(e2, f2)) => {
                expr_eq(env, e1, e2) && expr_eq(env, f1, f2)
            }
            (Stmt::AllocMulti(x, es1), Stmt::AllocMulti(y, es2)) => {
                var_eq(env, x, y)
                    && es1.len() == es2.len()
                    && es1.iter().zip(es2).all(|(e1, e2)| expr_eq(env, e1, e2))
            }
            (Stmt::Dispose(x), Stmt::Dispose(y)) | (Stmt::HeapClear(x), Stmt::HeapClear(y)) => {
                var_eq(env, x, y)
            }
            (Stmt::Seq(a1, b1), Stmt::Seq(a2, b2)) => {
                stmt_eq(env, a1, a2) && stmt_eq(env, b1, b2)
            }
            (Stmt::If(c1, t1, e1), Stmt::If(c2, t2, e2)) => {
                bexpr_eq(env, c1, c2) && stmt_eq(env, t1, t2) && stmt_eq(env, e1, e2)
            }
            (Stmt::While(c1, i1, b1), Stmt::While(c2, i2, b2)) => {
                bexpr_eq(env, c1, c2)
                    && match (i1, i2) {
                        (None, None) => true,
                        (Some(i1), Some(i2)) => go(env, i1, i2),
                        _ => false,
                    }
                    && stmt_eq(env, b1, b2)
            }
            _ => false,
        }
    }
    fn go(env: &mut Vec<(Name, Name)>, p: &Assertion, q: &Assertion) -> bool {
        match (p, q) {
            (Assertion::Bool(a), Assertion::Bool(b)) => bexpr_eq(env, a, b),
            (Assertion::PointsWeak(a1, a2), Assertion::PointsWeak(b1, b2))
            | (Assertion::PointsStrong(a1, a2), Assertion::PointsStrong(b1, b2)) => {
                expr_eq(env, a1, b1) && expr_eq(env, a2, b2)
            }
            (Assertion::PointsWeakAny(a), Assertion::PointsWeakAny(b))
            | (Assertion::PointsStrongAny(a), Assertion::PointsStrongAny(b)) => expr_eq(env, a, b),
            (Assertion::Emp, Assertion::Emp) => true,
            (Assertion::Imp(a1, a2), Assertion::Imp(b1, b2))
            | (Assertion::SepConj(a1, a2), Assertion::SepConj(b1, b2))
            | (Assertion::SepImp(a1, a2), Assertion::SepImp(b1, b2))
            | (Assertion::And(a1, a2), Assertion::And(b1, b2))
            | (Assertion::Or(a1, a2), Assertion::Or(b1, b2))
            | (Assertion::Iff(a1, a2), Assertion::Iff(b1, b2)) => {
                go(env, a1, b1) && go(env, a2, b2)
            }
            (Assertion::Not(a), Assertion::Not(b)) => go(env, a, b),
            (Assertion::Forall(x, a), Assertion::Forall(y, b))
            | (Assertion::Exists(x, a), Assertion::Exists(y, b)) => {
                env.push((x.clone(), y.clone()));
                let r = go(env, a, b);
                env.pop();
                r
            }
            (Assertion::Modal(s1, a), Assertion::Modal(s2, b)) => {
                stmt_eq(env, s1, s2) && go(env, a, b)
            }
            _ => false,
        }
    }
    go(&mut Vec::new(), p, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_assertion;

    #[test]
    fn substitutes_atoms() {
        let p = parse_assertion("x ~> y").unwrap();
        let out = subst(&p, "x", &Expr::Int(3)).unwrap();
        assert_eq!(out, parse_assertion("3 ~> y").unwrap());
    }

    #[test]
    fn avoids_capture() {
        let p = parse_assertion("forall y (x ~> y)").unwrap();
        let e = Expr::add(Expr::var("y"), Expr::Int(1));
        let out = subst(&p, "x", &e).unwrap();
        assert_eq!(
            out,
            Assertion::forall(
                "$1",
                Assertion::PointsWeak(Expr::add(Expr::var("y"), Expr::Int(1)), Expr::var("$1"))
            )
        );
    }

    #[test]
    fn bound_variable_shadows() {
        let p = parse_assertion("forall x (x ~> 0)").unwrap();
        let out = subst(&p, "x", &Expr::Int(7)).unwrap();
        assert_eq!(out, p);
    }

    #[test]
    fn rejects_modalities() {
        let p = parse_assertion("[x := 0](x = 0)").unwrap();
        assert_eq!(subst(&p, "x", &Expr::Int(1)), Err(ModalityPresent));
    }

    #[test]
    fn alpha_equivalence_examples() {
        let a = parse_assertion("forall x (x ~> 0)").unwrap();
        let b = parse_assertion("forall y (y ~> 0)").unwrap();
        let c = parse_assertion("forall x (x ~> 1)").unwrap();
        assert!(alpha_equiv(&a, &b));
        assert!(!alpha_equiv(&a, &c));
        let free1 = parse_assertion("forall x (x ~> z)").unwrap();
        let free2 = parse_assertion("forall x (x ~> w)").unwrap();
        assert!(!alpha_equiv(&free1, &free2));
    }
}
