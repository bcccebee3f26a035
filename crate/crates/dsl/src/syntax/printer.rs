//! Precedence-aware printing. `parse(print(a))` reproduces `a` for the
//! printable fragment (see the parser module for the two documented
//! exceptions: statement sequencing reassociates to the right, and Boolean
//! `&&`/`!` inside assertion atoms have no assertion-level surface syntax).

use std::fmt;

use super::ast::{Assertion, BExpr, Expr, Stmt};

// Expression precedence: additive 1, multiplicative 2, atoms 3.
fn fmt_expr(f: &mut fmt::Formatter<'_>, e: &Expr, prec: u8) -> fmt::Result {
    match e {
        Expr::Int(n) => write!(f, "{n}"),
        Expr::Var(x) => write!(f, "{x}"),
        Expr::Add(l, r) | Expr::Sub(l, r) => {
            let op = if matches!(e, Expr::Add(..)) { "+" } else { "-" };
            let paren = prec > 1;
            if paren {
                write!(f, "(")?;
            }
            fmt_expr(f, l, 1)?;
            write!(f, " {op} ")?;
            fmt_expr(f, r, 2)?;
            if paren {
                write!(f, ")")?;
            }
            Ok(())
        }
        Expr::Mul(l, r) => {
            let paren = prec > 2;
            if paren {
                write!(f, "(")?;
            }
            fmt_expr(f, l, 2)?;
            write!(f, " * ")?;
            fmt_expr(f, r, 3)?;
            if paren {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_expr(f, self, 0)
    }
}

// Boolean precedence: && 1, ! 2, atoms 3. `!(e = e')` prints as `e != e'`.
fn fmt_bexpr(f: &mut fmt::Formatter<'_>, b: &BExpr, prec: u8) -> fmt::Result {
    match b {
        BExpr::True => write!(f, "true"),
        BExpr::False => write!(f, "false"),
        BExpr::Eq(l, r) => {
            fmt_expr(f, l, 0)?;
            write!(f, " = ")?;
            fmt_expr(f, r, 0)
        }
        BExpr::Lt(l, r) => {
            fmt_expr(f, l, 0)?;
            write!(f, " < ")?;
            fmt_expr(f, r, 0)
        }
        BExpr::Not(inner) => {
            if let BExpr::Eq(l, r) = inner.as_ref() {
                fmt_expr(f, l, 0)?;
                write!(f, " != ")?;
                return fmt_expr(f, r, 0);
            }
            write!(f, "!")?;
            match inner.as_ref() {
                BExpr::True | BExpr::False | BExpr::Not(_) => fmt_bexpr(f, inner, 2),
                _ => {
                    write!(f, "(")?;
                    fmt_bexpr(f, inner, 0)?;
                    write!(f, ")")
                }
            }
        }
        BExpr::And(l, r) => {
            let paren = prec > 1;
            if paren {
                write!(f, "(")?;
            }
            fmt_bexpr(f, l, 1)?;
            write!(f, " && ")?;
            fmt_bexpr(f, r, 2)?;
            if paren {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for BExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_bexpr(f, self, 0)
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Assign(x, e) => write!(f, "{x} := {e}"),
            Stmt::Lookup(x, e) => write!(f, "{x} := [{e}]"),
            Stmt::Mutate(x, e) => write!(f, "[{x}] := {e}"),
            Stmt::GeneralMutate(e, e2) => write!(f, "[{e}] := {e2}"),
            Stmt::Alloc(x, e) => write!(f, "{x} := cons({e})"),
            Stmt::AllocMulti(x, es) => {
                write!(f, "{x} := cons(")?;
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, ")")
            }
            Stmt::Dispose(x) => write!(f, "dispose({x})"),
            Stmt::HeapUpdate(x, e) => write!(f, "upd {x} := {e}"),
            Stmt::HeapClear(x) => write!(f, "clr {x}"),
            Stmt::Seq(l, r) => write!(f, "{l}; {r}"),
            Stmt::If(b, s1, s2) => write!(f, "if {b} then {s1} else {s2} fi"),
            Stmt::While(b, None, s) => write!(f, "while {b} do {s} od"),
            Stmt::While(b, Some(inv), s) => write!(f, "while {b} invariant {inv} do {s} od"),
        }
    }
}

// Assertion precedence, loose to tight:
//   0 <->   1 ->   2 \/   3 /\   4 -*   5 *   6 prefix (! and [S])   7 atoms
// Quantifiers extend maximally to the right and print at level 0.
fn fmt_assertion(f: &mut fmt::Formatter<'_>, a: &Assertion, prec: u8) -> fmt::Result {
    let binary = |f: &mut fmt::Formatter<'_>,
                  l: &Assertion,
                  op: &str,
                  r: &Assertion,
                  level: u8,
                  lp: u8,
                  rp: u8|
     -> fmt::Result {
        let paren = prec > level;
        if paren {
            write!(f, "(")?;
        }
        fmt_assertion(f, l, lp)?;
        write!(f, " {op} ")?;
        fmt_assertion(f, r, rp)?;
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    };
    // Atoms led by an expression take parentheses at `*` level and tighter:
    // a bare `x |-> 1 * y` would re-lex the star into the expression.
    let expr_led = |f: &mut fmt::Formatter<'_>,
                    body: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result|
     -> fmt::Result {
        let paren = prec > 4;
        if paren {
            write!(f, "(")?;
        }
        body(f)?;
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    };
    match a {
        Assertion::Bool(b) => match b {
            BExpr::True | BExpr::False => fmt_bexpr(f, b, 0),
            BExpr::Eq(..) | BExpr::Lt(..) => expr_led(f, &|f| fmt_bexpr(f, b, 0)),
            BExpr::Not(inner) if matches!(inner.as_ref(), BExpr::Eq(..)) => {
                expr_led(f, &|f| fmt_bexpr(f, b, 0))
            }
            // No assertion-level surface syntax; shown in condition syntax.
            _ => write!(f, "({b})"),
        },
        Assertion::PointsWeak(e, e2) => expr_led(f, &|f| {
            fmt_expr(f, e, 0)?;
            write!(f, " ~> ")?;
            fmt_expr(f, e2, 0)
        }),
        Assertion::PointsStrong(e, e2) => expr_led(f, &|f| {
            fmt_expr(f, e, 0)?;
            write!(f, " |-> ")?;
            fmt_expr(f, e2, 0)
        }),
        Assertion::PointsWeakAny(e) => expr_led(f, &|f| {
            fmt_expr(f, e, 0)?;
            write!(f, " ~> -")
        }),
        Assertion::PointsStrongAny(e) => expr_led(f, &|f| {
            fmt_expr(f, e, 0)?;
            write!(f, " |-> -")
        }),
        Assertion::Emp => write!(f, "emp"),
        Assertion::Iff(l, r) => binary(f, l, "<->", r, 0, 1, 0),
        Assertion::Imp(l, r) => binary(f, l, "->", r, 1, 2, 1),
        Assertion::Or(l, r) => binary(f, l, "\\/", r, 2, 2, 3),
        Assertion::And(l, r) => binary(f, l, "/\\", r, 3, 3, 4),
        Assertion::SepImp(l, r) => binary(f, l, "-*", r, 4, 5, 4),
        Assertion::SepConj(l, r) => binary(f, l, "*", r, 5, 5, 6),
        Assertion::Not(p) => {
            let paren = prec > 6;
            if paren {
                write!(f, "(")?;
            }
            write!(f, "!")?;
            fmt_assertion(f, p, 7)?;
            if paren {
                write!(f, ")")?;
            }
            Ok(())
        }
        Assertion::Modal(s, p) => {
            write!(f, "[{s}]")?;
            if matches!(p.as_ref(), Assertion::Modal(..)) {
                fmt_assertion(f, p, 7)
            } else {
                write!(f, "(")?;
                fmt_assertion(f, p, 0)?;
                write!(f, ")")
            }
        }
        Assertion::Forall(x, p) | Assertion::Exists(x, p) => {
            let kw = if matches!(a, Assertion::Forall(..)) {
                "forall"
            } else {
                "exists"
            };
            let paren = prec > 0;
            if paren {
                write!(f, "(")?;
            }
            write!(f, "{kw} {x} ")?;
            fmt_assertion(f, p, 0)?;
            if paren {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_assertion(f, self, 0)
    }
}
