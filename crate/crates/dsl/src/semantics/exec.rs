//! Big-step execution over bounded heaps and stores.
//!
//! Execution returns the full set of derivable outcomes: allocation is
//! nondeterministic, so one input state can reach several output states.
//! Loops unfold up to the fuel bound and then emit `FuelExhausted` for the
//! affected branch, a third outcome distinct from failure: strong partial
//! correctness treats divergence as vacuous, so an aborted unfolding must
//! never be conflated with `fail`.

use std::collections::BTreeSet;

use super::{Bounds, ExecError, Heap, Outcome, Store};
use crate::syntax::{BExpr, Expr, Stmt};

/// Evaluates an arithmetic expression in a store. Total and heap-independent;
/// arithmetic wraps on overflow.
pub fn eval_expr(s: &Store, e: &Expr) -> i64 {
    match e {
        Expr::Int(n) => *n,
        Expr::Var(x) => s.get(x),
        Expr::Add(l, r) => eval_expr(s, l).wrapping_add(eval_expr(s, r)),
        Expr::Sub(l, r) => eval_expr(s, l).wrapping_sub(eval_expr(s, r)),
        Expr::Mul(l, r) => eval_expr(s, l).wrapping_mul(eval_expr(s, r)),
    }
}

/// Evaluates a Boolean expression in a store.
pub fn eval_bexpr(s: &Store, b: &BExpr) -> bool {
    match b {
        BExpr::True => true,
        BExpr::False => false,
        BExpr::Eq(l, r) => eval_expr(s, l) == eval_expr(s, r),
        BExpr::Lt(l, r) => eval_expr(s, l) < eval_expr(s, r),
        BExpr::Not(b) => !eval_bexpr(s, b),
        BExpr::And(l, r) => eval_bexpr(s, l) && eval_bexpr(s, r),
    }
}

fn check_value(v: i64, bounds: &Bounds) -> Result<i64, ExecError> {
    if bounds.contains_value(v) {
        Ok(v)
    } else {
        Err(ExecError::OutOfUniverse(v))
    }
}

/// Executes `stmt` from `(h, s)`, returning every derivable outcome.
///
/// Allocation enumerates every free location (or run of consecutive free
/// locations) in the universe; an allocation with no room errors with
/// `UniverseExhausted` rather than failing, and any write of a value outside
/// the universe errors with `OutOfUniverse`. Both are bounded-model
/// artifacts, not program behavior: silent clamping would manufacture
/// spurious counterexamples.
pub fn exec(
    stmt: &Stmt,
    h: &Heap,
    s: &Store,
    bounds: &Bounds,
) -> Result<BTreeSet<Outcome>, ExecError> {
    exec_inner(stmt, h, s, bounds)
}

fn singleton(o: Outcome) -> BTreeSet<Outcome> {
    let mut set = BTreeSet::new();
    set.insert(o);
    set
}

pub(super) fn exec_inner(
    stmt: &Stmt,
    h: &Heap,
    s: &Store,
    bounds: &Bounds,
) -> Result<BTreeSet<Outcome>, ExecError> {
    match stmt {
        Stmt::Assign(x, e) => {
            let v = check_value(eval_expr(s, e), bounds)?;
            Ok(singleton(Outcome::State(h.clone(), s.set(x, v))))
        }
        Stmt::Lookup(x, e) => {
            let loc = eval_expr(s, e);
            Ok(singleton(match h.get(loc) {
                Some(v) => Outcome::State(h.clone(), s.set(x, v)),
                None => Outcome::Fail,
            }))
        }
        Stmt::Mutate(x, e) => {
            let loc = s.get(x);
            if h.contains(loc) {
                let v = check_value(eval_expr(s, e), bounds)?;
                Ok(singleton(Outcome::State(h.update(loc, v), s.clone())))
            } else {
                Ok(singleton(Outcome::Fail))
            }
        }
        Stmt::GeneralMutate(e, e2) => {
            let loc = eval_expr(s, e);
            if h.contains(loc) {
                let v = check_value(eval_expr(s, e2), bounds)?;
                Ok(singleton(Outcome::State(h.update(loc, v), s.clone())))
            } else {
                Ok(singleton(Outcome::Fail))
            }
        }
        Stmt::Alloc(x, e) => {
            let v = check_value(eval_expr(s, e), bounds)?;
            let mut out = BTreeSet::new();
            for n in bounds.values() {
                if !h.contains(n) {
                    out.insert(Outcome::State(h.update(n, v), s.set(x, n)));
                }
            }
            if out.is_empty() {
                Err(ExecError::UniverseExhausted)
            } else {
                Ok(out)
            }
        }
        Stmt::AllocMulti(x, es) => {
            debug_assert!(!es.is_empty(), "allocation of an empty block");
            let vs: Vec<i64> = es
                .iter()
                .map(|e| check_value(eval_expr(s, e), bounds))
                .collect::<Result<_, _>>()?;
            let n = vs.len() as i64;
            let mut out = BTreeSet::new();
            // Empty when the block is longer than the universe.
            for start in 0..=(bounds.universe_size() - n) {
                if (start..start + n).all(|loc| !h.contains(loc)) {
                    let mut h2 = h.clone();
                    for (i, v) in vs.iter().enumerate() {
                        h2 = h2.update(start + i as i64, *v);
                    }
                    out.insert(Outcome::State(h2, s.set(x, start)));
                }
            }
            if out.is_empty() {
                Err(ExecError::UniverseExhausted)
            } else {
                Ok(out)
            }
        }
        Stmt::Dispose(x) => {
            let loc = s.get(x);
            Ok(singleton(if h.contains(loc) {
                Outcome::State(h.clear(loc), s.clone())
            } else {
                Outcome::Fail
            }))
        }
        Stmt::HeapUpdate(x, e) => {
            let v = check_value(eval_expr(s, e), bounds)?;
            Ok(singleton(Outcome::State(h.update(s.get(x), v), s.clone())))
        }
        Stmt::HeapClear(x) => Ok(singleton(Outcome::State(h.clear(s.get(x)), s.clone()))),
        Stmt::Seq(a, b) => {
            let mut out = BTreeSet::new();
            for o in exec_inner(a, h, s, bounds)? {
                match o {
                    Outcome::State(h2, s2) => out.extend(exec_inner(b, &h2, &s2, bounds)?),
                    other => {
                        out.insert(other);
                    }
                }
            }
            Ok(out)
        }
        Stmt::If(b, s1, s2) => {
            if eval_bexpr(s, b) {
                exec_inner(s1, h, s, bounds)
            } else {
                exec_inner(s2, h, s, bounds)
            }
        }
        Stmt::While(b, _, body) => exec_while(b, body, h, s, bounds, bounds.fuel()),
    }
}

fn exec_while(
    b: &BExpr,
    body: &Stmt,
    h: &Heap,
    s: &Store,
    bounds: &Bounds,
    fuel: u32,
) -> Result<BTreeSet<Outcome>, ExecError> {
    if !eval_bexpr(s, b) {
        return Ok(singleton(Outcome::State(h.clone(), s.clone())));
    }
    if fuel == 0 {
        return Ok(singleton(Outcome::FuelExhausted));
    }
    let mut out = BTreeSet::new();
    for o in exec_inner(body, h, s, bounds)? {
        match o {
            Outcome::State(h2, s2) => out.extend(exec_while(b, body, &h2, &s2, bounds, fuel - 1)?),
            other => {
                out.insert(other);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn run(prog: &str, h: Heap, s: Store, bounds: &Bounds) -> BTreeSet<Outcome> {
        exec(&parse_program(prog).unwrap(), &h, &s, bounds).unwrap()
    }

    #[test]
    fn lookup_fails_on_dangling_pointer() {
        let b = Bounds::new(3, 10);
        let out = run("x := [1]", Heap::new(), Store::new(), &b);
        assert_eq!(out, BTreeSet::from([Outcome::Fail]));
    }

    #[test]
    fn dispose_removes_cell() {
        let b = Bounds::new(8, 10);
        let out = run(
            "dispose(x)",
            Heap::from_pairs([(5, 7)]),
            Store::new().set("x", 5),
            &b,
        );
        assert_eq!(
            out,
            BTreeSet::from([Outcome::State(Heap::new(), Store::new().set("x", 5))])
        );
    }

    #[test]
    fn alloc_enumerates_free_locations() {
        let b = Bounds::new(2, 10);
        let out = run("x := cons(0)", Heap::from_pairs([(0, 9)]), Store::new(), &b);
        assert_eq!(
            out,
            BTreeSet::from([Outcome::State(
                Heap::from_pairs([(0, 9), (1, 0)]),
                Store::new().set("x", 1)
            )])
        );
    }

    #[test]
    fn alloc_on_full_heap_is_an_error_not_fail() {
        let b = Bounds::new(1, 10);
        let err = exec(
            &parse_program("x := cons(0)").unwrap(),
            &Heap::from_pairs([(0, 0)]),
            &Store::new(),
            &b,
        )
        .unwrap_err();
        assert_eq!(err, ExecError::UniverseExhausted);
    }

    #[test]
    fn multi_alloc_needs_consecutive_room() {
        let b = Bounds::new(3, 10);
        // Location 1 is taken, so the only run of two free cells is blocked.
        let err = exec(
            &parse_program("x := cons(0, 1)").unwrap(),
            &Heap::from_pairs([(1, 0)]),
            &Store::new(),
            &Bounds::new(3, 10),
        )
        .unwrap_err();
        assert_eq!(err, ExecError::UniverseExhausted);

        let out = run("x := cons(2, 1)", Heap::new(), Store::new(), &b);
        assert_eq!(
            out,
            BTreeSet::from([
                Outcome::State(Heap::from_pairs([(0, 2), (1, 1)]), Store::new()),
                Outcome::State(
                    Heap::from_pairs([(1, 2), (2, 1)]),
                    Store::new().set("x", 1)
                ),
            ])
        );
    }

    #[test]
    fn pseudo_instructions_never_fail() {
        let b = Bounds::new(3, 10);
        let out = run("upd x := 2", Heap::new(), Store::new(), &b);
        assert_eq!(
            out,
            BTreeSet::from([Outcome::State(Heap::from_pairs([(0, 2)]), Store::new())])
        );
        let out = run("clr x", Heap::new(), Store::new(), &b);
        assert_eq!(
            out,
            BTreeSet::from([Outcome::State(Heap::new(), Store::new())])
        );
    }

    #[test]
    fn while_respects_fuel() {
        let b = Bounds::new(3, 2);
        let out = run("while x < 2 do x := x + 1 od", Heap::new(), Store::new(), &b);
        assert_eq!(
            out,
            BTreeSet::from([Outcome::State(Heap::new(), Store::new().set("x", 2))])
        );
        let tight = Bounds::new(3, 1);
        let out = exec(
            &parse_program("while x < 2 do x := x + 1 od").unwrap(),
            &Heap::new(),
            &Store::new(),
            &tight,
        )
        .unwrap();
        assert_eq!(out, BTreeSet::from([Outcome::FuelExhausted]));
    }

    #[test]
    fn out_of_universe_writes_error() {
        let b = Bounds::new(3, 10);
        let err = exec(
            &parse_program("x := 5").unwrap(),
            &Heap::new(),
            &Store::new(),
            &b,
        )
        .unwrap_err();
        assert_eq!(err, ExecError::OutOfUniverse(5));
    }

    #[test]
    fn deterministic_fragment_is_singleton() {
        let b = Bounds::new(3, 10);
        let out = run(
            "x := 1; upd x := 2; y := [x]; if y = 2 then [x] := 0 else clr x fi",
            Heap::new(),
            Store::new(),
            &b,
        );
        assert_eq!(out.len(), 1);
    }
}
