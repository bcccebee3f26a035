//! The satisfaction relation over bounded models.
//!
//! Quantifiers range over `{0..B-1}`. The separating conjunction enumerates
//! every split of the heap, and the separating implication every disjoint
//! extension whose locations and values stay inside the universe. A modality
//! `[S]p` holds when `S` cannot fail and every reachable state satisfies `p`;
//! a `FuelExhausted` branch makes the answer inconclusive rather than a
//! guess.

use super::exec::{eval_bexpr, eval_expr, exec_inner};
use super::{Bounds, Heap, Outcome, SatError, Store};
use crate::syntax::{desugar, Assertion};

/// Decides `h, s |= p` within `bounds`. Sugar in `p` is desugared on entry;
/// the input state must lie within the universe.
pub fn sat(h: &Heap, s: &Store, p: &Assertion, bounds: &Bounds) -> Result<bool, SatError> {
    for v in h.iter().flat_map(|(k, v)| [k, v]) {
        if !bounds.contains_value(v) {
            return Err(super::ExecError::OutOfUniverse(v).into());
        }
    }
    for (_, v) in s.iter() {
        if !bounds.contains_value(v) {
            return Err(super::ExecError::OutOfUniverse(v).into());
        }
    }
    if p.is_core() {
        sat_core(h, s, p, bounds)
    } else {
        sat_core(h, s, &desugar(p), bounds)
    }
}

/// Core-only evaluator; callers guarantee `p` is desugared.
pub(crate) fn sat_core(
    h: &Heap,
    s: &Store,
    p: &Assertion,
    bounds: &Bounds,
) -> Result<bool, SatError> {
    match p {
        Assertion::Bool(b) => Ok(eval_bexpr(s, b)),
        Assertion::PointsWeak(e, e2) => {
            Ok(h.get(eval_expr(s, e)) == Some(eval_expr(s, e2)))
        }
        Assertion::Imp(a, b) => match sat_core(h, s, a, bounds) {
            Ok(false) => Ok(true),
            Ok(true) => sat_core(h, s, b, bounds),
            // The conclusion can still settle the implication.
            Err(e) => match sat_core(h, s, b, bounds) {
                Ok(true) => Ok(true),
                _ => Err(e),
            },
        },
        Assertion::Forall(x, body) => {
            let mut pending: Option<SatError> = None;
            for n in bounds.values() {
                match sat_core(h, &s.set(x, n), body, bounds) {
                    Ok(true) => {}
                    Ok(false) => return Ok(false),
                    Err(e) => pending = pending.or(Some(e)),
                }
            }
            match pending {
                Some(e) => Err(e),
                None => Ok(true),
            }
        }
        Assertion::SepConj(a, b) => {
            let dom: Vec<i64> = h.domain().collect();
            let mut pending: Option<SatError> = None;
            for mask in 0u64..(1u64 << dom.len()) {
                let mut h1 = Heap::new();
                let mut h2 = Heap::new();
                for (i, loc) in dom.iter().enumerate() {
                    let v = h.get(*loc).expect("domain location");
                    if mask & (1 << i) != 0 {
                        h1 = h1.update(*loc, v);
                    } else {
                        h2 = h2.update(*loc, v);
                    }
                }
                match both(
                    sat_core(&h1, s, a, bounds),
                    || sat_core(&h2, s, b, bounds),
                ) {
                    Ok(true) => return Ok(true),
                    Ok(false) => {}
                    Err(e) => pending = pending.or(Some(e)),
                }
            }
            match pending {
                Some(e) => Err(e),
                None => Ok(false),
            }
        }
        Assertion::SepImp(a, b) => {
            let free: Vec<i64> = bounds.values().filter(|n| !h.contains(*n)).collect();
            let mut pending: Option<SatError> = None;
            // Mixed-radix counter over base B+1: digit 0 leaves the location
            // out, digit d stores value d-1.
            let mut digits = vec![0i64; free.len()];
            loop {
                let mut ext = Heap::new();
                for (loc, d) in free.iter().zip(&digits) {
                    if *d > 0 {
                        ext = ext.update(*loc, d - 1);
                    }
                }
                match sat_core(&ext, s, a, bounds) {
                    Ok(true) => match sat_core(&h.union(&ext), s, b, bounds) {
                        Ok(true) => {}
                        Ok(false) => return Ok(false),
                        Err(e) => pending = pending.or(Some(e)),
                    },
                    Ok(false) => {}
                    Err(e) => pending = pending.or(Some(e)),
                }
                if !bump(&mut digits, bounds.universe_size()) {
                    break;
                }
            }
            match pending {
                Some(e) => Err(e),
                None => Ok(true),
            }
        }
        Assertion::Modal(stmt, body) => {
            let outcomes = exec_inner(stmt, h, s, bounds)?;
            if outcomes.contains(&Outcome::Fail) {
                return Ok(false);
            }
            let mut pending: Option<SatError> = None;
            if outcomes.contains(&Outcome::FuelExhausted) {
                pending = Some(SatError::FuelExhausted);
            }
            for o in &outcomes {
                if let Outcome::State(h2, s2) = o {
                    match sat_core(h2, s2, body, bounds) {
                        Ok(true) => {}
                        Ok(false) => return Ok(false),
                        Err(e) => pending = pending.or(Some(e)),
                    }
                }
            }
            match pending {
                Some(e) => Err(e),
                None => Ok(true),
            }
        }
        sugar => unreachable!("sat_core on sugar constructor {sugar:?}"),
    }
}

fn both(
    a: Result<bool, SatError>,
    b: impl FnOnce() -> Result<bool, SatError>,
) -> Result<bool, SatError> {
    match a {
        Ok(false) => Ok(false),
        Ok(true) => b(),
        Err(e) => match b() {
            Ok(false) => Ok(false),
            _ => Err(e),
        },
    }
}

// Advances a mixed-radix counter with digits in 0..=base; returns false once
// it wraps around.
fn bump(digits: &mut [i64], base: i64) -> bool {
    for d in digits.iter_mut() {
        if *d < base {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}
