//! Weakest preconditions, strongest postconditions, and Hoare-triple
//! verification.
//!
//! `wp` works backwards through a full program. Basic and pseudo
//! instructions resolve through the rewrite system, so any modality-free
//! postcondition yields a modality-free precondition. General mutation
//! `[e] := e'` goes through a fresh simple assignment, block allocation
//! through a chain of heap updates guarded by freshness of every cell, and
//! annotated loops contribute side conditions instead of a computed
//! precondition.
//!
//! `sp` is the forward direction for the five basic instructions, phrased
//! with heap-update and heap-clear modalities and then normalized; the
//! `sp_global` variant returns the classical formulation built from `*` and
//! `-*` instead.

use thiserror::Error;

use crate::oracle::{self, Verdict};
use crate::rewrite::{normalize_seeded, RewriteError, Strategy, DEFAULT_STEP_CAP};
use crate::semantics::{Bounds, Heap, SatError, Store};
use crate::syntax::{
    allocated_core, and_core, desugar_with, exists_core, not_allocated_core, not_core, subst_expr,
    Assertion, BExpr, Expr, FreshNames, Stmt,
};

/// A specification `{pre} prog {post}`, read as strong partial correctness:
/// from any state satisfying `pre` the program cannot fail, and every state
/// it terminates in satisfies `post`.
#[derive(Debug, Clone, PartialEq)]
pub struct Triple {
    pub pre: Assertion,
    pub prog: Stmt,
    pub post: Assertion,
}

/// A labeled proof obligation. Generated formulas are modality-free.
#[derive(Debug, Clone, PartialEq)]
pub struct Vc {
    pub label: String,
    pub formula: Assertion,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum VcError {
    #[error("loop `{0}` carries no invariant annotation")]
    MissingInvariant(String),
    #[error("`{0}` is not a basic instruction")]
    NotBasic(String),
    #[error("side condition violated: `{var}` occurs in `{expr}`")]
    SideConditionViolated { var: String, expr: String },
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

/// Verdict of [`verify_triple`].
#[derive(Debug, Clone, PartialEq)]
pub enum TripleVerdict {
    Verified,
    Refuted {
        label: String,
        heap: Heap,
        store: Store,
    },
    Inconclusive(SatError),
}

impl std::fmt::Display for TripleVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TripleVerdict::Verified => write!(f, "Verified"),
            TripleVerdict::Refuted { label, heap, store } => {
                write!(f, "Refuted ({label}; counterexample {heap} {store})")
            }
            TripleVerdict::Inconclusive(reason) => write!(f, "Inconclusive ({reason})"),
        }
    }
}

// One fresh-name supply above everything in sight, shared across every
// normalization of a single wp/sp computation.
fn supply_for(stmt: &Stmt, p: &Assertion) -> FreshNames {
    FreshNames::above(&Assertion::modal(stmt.clone(), p.clone()))
}

fn normalize_core(
    f: Assertion,
    fresh: &mut FreshNames,
) -> Result<Assertion, VcError> {
    Ok(normalize_seeded(f, Strategy::Innermost, DEFAULT_STEP_CAP, fresh)?.0)
}

/// The weakest precondition of `prog` for the postcondition `post`, plus the
/// side conditions contributed by annotated loops. Both are modality-free.
pub fn wp(prog: &Stmt, post: &Assertion) -> Result<(Assertion, Vec<Vc>), VcError> {
    let mut fresh = supply_for(prog, post);
    let post = desugar_with(post, &mut fresh);
    let post = normalize_core(post, &mut fresh)?;
    let mut loops = 0;
    wp_in(prog, post, &mut fresh, &mut loops)
}

fn wp_in(
    prog: &Stmt,
    post: Assertion,
    fresh: &mut FreshNames,
    loops: &mut usize,
) -> Result<(Assertion, Vec<Vc>), VcError> {
    match prog {
        Stmt::Assign(..)
        | Stmt::Lookup(..)
        | Stmt::Mutate(..)
        | Stmt::Alloc(..)
        | Stmt::Dispose(..)
        | Stmt::HeapUpdate(..)
        | Stmt::HeapClear(..) => {
            let f = Assertion::modal(prog.clone(), post);
            Ok((normalize_core(f, fresh)?, Vec::new()))
        }
        Stmt::GeneralMutate(e, e2) => {
            // (e ~> -) /\ [x := e][upd x := e'] post, for fresh x.
            let x = fresh.fresh();
            let chain = Assertion::modal(
                Stmt::Assign(x.clone(), e.clone()),
                Assertion::modal(Stmt::HeapUpdate(x, e2.clone()), post),
            );
            let f = and_core(allocated_core(e.clone(), fresh), chain);
            Ok((normalize_core(f, fresh)?, Vec::new()))
        }
        Stmt::AllocMulti(x, es) => {
            if es.len() == 1 {
                return wp_in(&Stmt::Alloc(x.clone(), es[0].clone()), post, fresh, loops);
            }
            if es.iter().any(|e| e.vars().contains(x)) {
                // Save the old value first; the allocation target must not
                // occur in the block expressions.
                let y = fresh.fresh();
                let renamed: Vec<Expr> =
                    es.iter().map(|e| subst_expr(e, x, &Expr::Var(y.clone()))).collect();
                let sim = Stmt::seq(
                    Stmt::Assign(y, Expr::Var(x.clone())),
                    Stmt::AllocMulti(x.clone(), renamed),
                );
                return wp_in(&sim, post, fresh, loops);
            }
            // forall x (every cell of the block free -> [chain of updates] post),
            // where cell i is x + i, written through a fresh alias since heap
            // updates address by variable.
            let mut chain = post;
            for (i, e) in es.iter().enumerate().skip(1).rev() {
                let z = fresh.fresh();
                let loc = Expr::add(Expr::Var(x.clone()), Expr::Int(i as i64));
                chain = Assertion::modal(
                    Stmt::Assign(z.clone(), loc),
                    Assertion::modal(Stmt::HeapUpdate(z, e.clone()), chain),
                );
            }
            chain = Assertion::modal(Stmt::HeapUpdate(x.clone(), es[0].clone()), chain);
            let mut guard = not_allocated_core(Expr::Var(x.clone()), fresh);
            for i in 1..es.len() {
                let loc = Expr::add(Expr::Var(x.clone()), Expr::Int(i as i64));
                guard = and_core(guard, not_allocated_core(loc, fresh));
            }
            let f = Assertion::forall(x.clone(), Assertion::imp(guard, chain));
            Ok((normalize_core(f, fresh)?, Vec::new()))
        }
        Stmt::Seq(a, b) => {
            let (qb, vcs_b) = wp_in(b, post, fresh, loops)?;
            let (qa, mut vcs) = wp_in(a, qb, fresh, loops)?;
            vcs.extend(vcs_b);
            Ok((qa, vcs))
        }
        Stmt::If(b, s1, s2) => {
            let (q1, mut vcs) = wp_in(s1, post.clone(), fresh, loops)?;
            let (q2, vcs2) = wp_in(s2, post, fresh, loops)?;
            vcs.extend(vcs2);
            let f = and_core(
                Assertion::imp(Assertion::Bool(b.clone()), q1),
                Assertion::imp(not_core(Assertion::Bool(b.clone())), q2),
            );
            Ok((f, vcs))
        }
        Stmt::While(b, Some(inv), body) => {
            *loops += 1;
            let n = *loops;
            let inv = desugar_with(inv, fresh);
            let inv = normalize_core(inv, fresh)?;
            let (wb, body_vcs) = wp_in(body, inv.clone(), fresh, loops)?;
            let mut vcs = vec![Vc {
                label: format!("while#{n} invariant preserved"),
                formula: Assertion::imp(
                    and_core(inv.clone(), Assertion::Bool(b.clone())),
                    wb,
                ),
            }];
            vcs.extend(body_vcs);
            vcs.push(Vc {
                label: format!("while#{n} exit establishes postcondition"),
                formula: Assertion::imp(
                    and_core(inv.clone(), not_core(Assertion::Bool(b.clone()))),
                    post,
                ),
            });
            Ok((inv, vcs))
        }
        Stmt::While(_, None, _) => Err(VcError::MissingInvariant(prog.to_string())),
    }
}

/// Strongest postcondition of a basic instruction: the strengthened
/// precondition the axiom requires, and the postcondition, both
/// modality-free.
#[derive(Debug, Clone, PartialEq)]
pub struct SpResult {
    pub required_pre: Assertion,
    pub post: Assertion,
}

/// Forward axioms for the five basic instructions. `y` is minted fresh
/// everywhere; for `x := cons(e)` with `x` occurring in `e` the instruction
/// is first routed through a fresh copy of the old value.
pub fn sp(prog: &Stmt, p: &Assertion) -> Result<SpResult, VcError> {
    let mut fresh = supply_for(prog, p);
    let p = desugar_with(p, &mut fresh);
    let p = normalize_core(p, &mut fresh)?;
    sp_in(prog, p, &mut fresh)
}

fn sp_in(prog: &Stmt, p: Assertion, fresh: &mut FreshNames) -> Result<SpResult, VcError> {
    match prog {
        Stmt::Assign(x, e) => {
            let y = fresh.fresh();
            let post = exists_core(
                y.clone(),
                and_core(
                    Assertion::modal(Stmt::Assign(x.clone(), Expr::Var(y.clone())), p.clone()),
                    Assertion::Bool(BExpr::Eq(
                        Expr::Var(x.clone()),
                        subst_expr(e, x, &Expr::Var(y)),
                    )),
                ),
            );
            Ok(SpResult {
                required_pre: p,
                post: normalize_core(post, fresh)?,
            })
        }
        Stmt::Lookup(x, e) => {
            let y = fresh.fresh();
            let required = and_core(p.clone(), allocated_core(e.clone(), fresh));
            let post = exists_core(
                y.clone(),
                and_core(
                    Assertion::modal(Stmt::Assign(x.clone(), Expr::Var(y.clone())), p.clone()),
                    Assertion::PointsWeak(subst_expr(e, x, &Expr::Var(y)), Expr::Var(x.clone())),
                ),
            );
            Ok(SpResult {
                required_pre: required,
                post: normalize_core(post, fresh)?,
            })
        }
        Stmt::Mutate(x, e) => {
            let y = fresh.fresh();
            let required = and_core(p.clone(), allocated_core(Expr::Var(x.clone()), fresh));
            let post = and_core(
                exists_core(
                    y.clone(),
                    Assertion::modal(Stmt::HeapUpdate(x.clone(), Expr::Var(y)), p),
                ),
                Assertion::PointsWeak(Expr::Var(x.clone()), e.clone()),
            );
            Ok(SpResult {
                required_pre: required,
                post: normalize_core(post, fresh)?,
            })
        }
        Stmt::Alloc(x, e) => {
            if e.vars().contains(x) {
                // Route through `y := x; x := cons(e[y/x])` and close over
                // the helper variable.
                let y = fresh.fresh();
                let first = sp_in(&Stmt::Assign(y.clone(), Expr::Var(x.clone())), p, fresh)?;
                let rest = sp_in(
                    &Stmt::Alloc(x.clone(), subst_expr(e, x, &Expr::Var(y.clone()))),
                    first.post,
                    fresh,
                )?;
                return Ok(SpResult {
                    required_pre: first.required_pre,
                    post: normalize_core(exists_core(y, rest.post), fresh)?,
                });
            }
            let y = fresh.fresh();
            let post = and_core(
                Assertion::modal(
                    Stmt::HeapClear(x.clone()),
                    exists_core(
                        y.clone(),
                        Assertion::modal(Stmt::Assign(x.clone(), Expr::Var(y)), p.clone()),
                    ),
                ),
                Assertion::PointsWeak(Expr::Var(x.clone()), e.clone()),
            );
            Ok(SpResult {
                required_pre: p,
                post: normalize_core(post, fresh)?,
            })
        }
        Stmt::Dispose(x) => {
            let y = fresh.fresh();
            let required = and_core(p.clone(), allocated_core(Expr::Var(x.clone()), fresh));
            let post = and_core(
                exists_core(
                    y.clone(),
                    Assertion::modal(Stmt::HeapUpdate(x.clone(), Expr::Var(y)), p),
                ),
                not_allocated_core(Expr::Var(x.clone()), fresh),
            );
            Ok(SpResult {
                required_pre: required,
                post: normalize_core(post, fresh)?,
            })
        }
        other => Err(VcError::NotBasic(other.to_string())),
    }
}

/// The classical global strongest-postcondition axioms, built from `*` and
/// `-*`. Returned as written, sugar intact: they are already modality-free.
/// Look-up, mutation, and allocation require that the assigned variable not
/// occur in `e`.
pub fn sp_global(prog: &Stmt, p: &Assertion) -> Result<SpResult, VcError> {
    let side = |x: &str, e: &Expr| -> Result<(), VcError> {
        if e.vars().contains(x) {
            Err(VcError::SideConditionViolated {
                var: x.to_string(),
                expr: e.to_string(),
            })
        } else {
            Ok(())
        }
    };
    let p = if p.contains_modal() {
        let mut fresh = supply_for(prog, p);
        normalize_core(p.clone(), &mut fresh)?
    } else {
        p.clone()
    };
    match prog {
        Stmt::Assign(x, e) => {
            let mut fresh = supply_for(prog, &p);
            let y = fresh.fresh();
            let renamed = crate::syntax::subst(&p, x, &Expr::Var(y.clone()))
                .expect("modalities were normalized away");
            let post = Assertion::exists(
                y.clone(),
                Assertion::and(
                    renamed,
                    Assertion::Bool(BExpr::Eq(
                        Expr::Var(x.clone()),
                        subst_expr(e, x, &Expr::Var(y)),
                    )),
                ),
            );
            Ok(SpResult {
                required_pre: p,
                post,
            })
        }
        Stmt::Lookup(x, e) => {
            side(x, e)?;
            let cell = Assertion::PointsStrong(e.clone(), Expr::Var(x.clone()));
            let post = Assertion::sep_conj(
                cell.clone(),
                Assertion::not(Assertion::sep_imp(cell, Assertion::not(p.clone()))),
            );
            Ok(SpResult {
                required_pre: Assertion::and(p, Assertion::PointsWeakAny(e.clone())),
                post,
            })
        }
        Stmt::Mutate(x, e) => {
            side(x, e)?;
            let post = Assertion::sep_conj(
                Assertion::PointsStrong(Expr::Var(x.clone()), e.clone()),
                Assertion::not(Assertion::sep_imp(
                    Assertion::PointsStrongAny(Expr::Var(x.clone())),
                    Assertion::not(p.clone()),
                )),
            );
            Ok(SpResult {
                required_pre: Assertion::and(p, Assertion::PointsWeakAny(Expr::Var(x.clone()))),
                post,
            })
        }
        Stmt::Alloc(x, e) => {
            side(x, e)?;
            let post = Assertion::sep_conj(
                Assertion::PointsStrong(Expr::Var(x.clone()), e.clone()),
                p.clone(),
            );
            Ok(SpResult {
                required_pre: p,
                post,
            })
        }
        Stmt::Dispose(x) => {
            let post = Assertion::not(Assertion::sep_imp(
                Assertion::PointsStrongAny(Expr::Var(x.clone())),
                Assertion::not(p.clone()),
            ));
            Ok(SpResult {
                required_pre: Assertion::and(p, Assertion::PointsWeakAny(Expr::Var(x.clone()))),
                post,
            })
        }
        other => Err(VcError::NotBasic(other.to_string())),
    }
}

/// The proof obligations for a triple: the precondition must entail the
/// computed weakest precondition, and every loop side condition must hold.
pub fn triple_obligations(t: &Triple) -> Result<Vec<Vc>, VcError> {
    let post = if t.post.contains_modal() {
        let mut fresh = FreshNames::above(&t.post);
        normalize_core(t.post.clone(), &mut fresh)?
    } else {
        t.post.clone()
    };
    let (wp_formula, loop_vcs) = wp(&t.prog, &post)?;
    let mut vcs = vec![Vc {
        label: "precondition".to_string(),
        formula: Assertion::imp(t.pre.clone(), wp_formula),
    }];
    vcs.extend(loop_vcs);
    Ok(vcs)
}

/// Discharges every obligation with the bounded oracle.
pub fn discharge_triple(
    t: &Triple,
    bounds: &Bounds,
) -> Result<Vec<(Vc, Verdict)>, VcError> {
    let vcs = triple_obligations(t)?;
    Ok(vcs
        .into_iter()
        .map(|vc| {
            let verdict = oracle::valid(&vc.formula, bounds);
            (vc, verdict)
        })
        .collect())
}

/// Verifies `{pre} prog {post}` by weakest-precondition generation and one
/// bounded-validity check per obligation.
pub fn verify_triple(t: &Triple, bounds: &Bounds) -> Result<TripleVerdict, VcError> {
    let outcomes = discharge_triple(t, bounds)?;
    let mut pending = None;
    for (vc, verdict) in outcomes {
        match verdict {
            Verdict::Valid => {}
            Verdict::Invalid { heap, store } => {
                return Ok(TripleVerdict::Refuted {
                    label: vc.label,
                    heap,
                    store,
                });
            }
            Verdict::Inconclusive(reason) => pending = pending.or(Some(reason)),
        }
    }
    Ok(match pending {
        Some(reason) => TripleVerdict::Inconclusive(reason),
        None => TripleVerdict::Verified,
    })
}
