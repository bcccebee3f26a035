//! Brute-force bounded-model decision procedures.
//!
//! Validity, equivalence, and triple validity are decided by enumerating
//! every heap with domain inside the universe and every store over the free
//! variables: `(B+1)^B · B^|vars|` models in all. Enumeration order is fixed
//! (heap domains by bitmask, then cell values lexicographically, then store
//! values lexicographically), so the reported counterexample is stable
//! across runs. Model checks fan out across threads; the enumeration-first
//! event wins.
//!
//! A bounded `Valid` verdict does not imply validity over unbounded
//! integers: quantifiers and `-*` extensions are truncated at the universe.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::semantics::{exec, sat_core, Bounds, Heap, Outcome, SatError, Store};
use crate::syntax::{desugar, Assertion, Name};
use crate::vc::Triple;

/// Oracle verdict. An `Invalid` verdict carries a model that genuinely
/// falsifies the checked formula within bounds.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Valid,
    Invalid { heap: Heap, store: Store },
    Inconclusive(SatError),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Valid => write!(f, "Valid"),
            Verdict::Invalid { heap, store } => {
                write!(f, "Invalid (counterexample {heap} {store})")
            }
            Verdict::Inconclusive(reason) => write!(f, "Inconclusive ({reason})"),
        }
    }
}

/// The finite space of models over a fixed variable set.
#[derive(Debug, Clone)]
pub struct ModelSpace {
    bounds: Bounds,
    vars: Vec<Name>,
    // Cumulative model offsets per domain bitmask.
    mask_offsets: Vec<u64>,
    heap_count: u64,
    store_count: u64,
}

impl ModelSpace {
    pub fn new(vars: &BTreeSet<Name>, bounds: &Bounds) -> Self {
        let b = bounds.universe_size() as u32;
        let nmasks = 1u64 << b;
        let mut mask_offsets = Vec::with_capacity(nmasks as usize + 1);
        let mut total = 0u64;
        for mask in 0..nmasks {
            mask_offsets.push(total);
            total += (b as u64).pow(mask.count_ones());
        }
        mask_offsets.push(total);
        let store_count = (b as u64).pow(vars.len() as u32);
        ModelSpace {
            bounds: *bounds,
            vars: vars.iter().cloned().collect(),
            mask_offsets,
            heap_count: total,
            store_count,
        }
    }

    pub fn heap_count(&self) -> u64 {
        self.heap_count
    }

    pub fn count(&self) -> u64 {
        self.heap_count * self.store_count
    }

    /// Decodes the `i`-th model, `i < count()`.
    pub fn model(&self, i: u64) -> (Heap, Store) {
        let heap_idx = i / self.store_count;
        let store_idx = i % self.store_count;
        (self.heap_at(heap_idx), self.store_at(store_idx))
    }

    fn heap_at(&self, idx: u64) -> Heap {
        // Offsets are strictly increasing: every mask contributes at least
        // one heap.
        let mask = match self.mask_offsets.binary_search(&idx) {
            Ok(m) => m as u64,
            Err(ins) => ins as u64 - 1,
        };
        let mut within = idx - self.mask_offsets[mask as usize];
        let b = self.bounds.universe_size() as u64;
        let locs: Vec<i64> = (0..self.bounds.universe_size())
            .filter(|loc| mask & (1 << loc) != 0)
            .collect();
        let mut values = vec![0i64; locs.len()];
        for slot in (0..locs.len()).rev() {
            values[slot] = (within % b) as i64;
            within /= b;
        }
        Heap::from_pairs(locs.into_iter().zip(values))
    }

    fn store_at(&self, idx: u64) -> Store {
        let b = self.bounds.universe_size() as u64;
        let mut within = idx;
        let mut values = vec![0i64; self.vars.len()];
        for slot in (0..self.vars.len()).rev() {
            values[slot] = (within % b) as i64;
            within /= b;
        }
        Store::from_pairs(self.vars.iter().cloned().zip(values))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Heap, Store)> + '_ {
        (0..self.count()).map(|i| self.model(i))
    }
}

/// Streams every model over `vars`: all heaps with domain and values inside
/// the universe, crossed with all stores assigning `vars` into the universe.
pub fn enumerate_models(
    vars: &BTreeSet<Name>,
    bounds: &Bounds,
) -> impl Iterator<Item = (Heap, Store)> {
    let space = ModelSpace::new(vars, bounds);
    (0..space.count()).map(move |i| space.model(i))
}

// First index whose check is not `Ok(true)`, preferring a definite
// falsifying model over an inconclusive one when both exist.
fn search<F>(space: &ModelSpace, check: F) -> Verdict
where
    F: Fn(&Heap, &Store) -> Result<bool, SatError> + Sync,
{
    let first = (0..space.count()).into_par_iter().find_map_first(|i| {
        let (h, s) = space.model(i);
        match check(&h, &s) {
            Ok(true) => None,
            Ok(false) => Some((i, None)),
            Err(e) => Some((i, Some(e))),
        }
    });
    match first {
        None => Verdict::Valid,
        Some((i, None)) => {
            let (heap, store) = space.model(i);
            Verdict::Invalid { heap, store }
        }
        Some((_, Some(reason))) => {
            // Some model is inconclusive; a later definite counterexample
            // still refutes.
            let cex = (0..space.count()).into_par_iter().find_map_first(|i| {
                let (h, s) = space.model(i);
                matches!(check(&h, &s), Ok(false)).then_some(i)
            });
            match cex {
                Some(i) => {
                    let (heap, store) = space.model(i);
                    Verdict::Invalid { heap, store }
                }
                None => Verdict::Inconclusive(reason),
            }
        }
    }
}

/// Bounded validity: `p` holds in every model over its free variables.
pub fn valid(p: &Assertion, bounds: &Bounds) -> Verdict {
    let core = desugar(p);
    let space = ModelSpace::new(&core.free_vars(), bounds);
    search(&space, |h, s| sat_core(h, s, &core, bounds))
}

/// Bounded equivalence of `p` and `q`, over the union of their free
/// variables.
pub fn equiv(p: &Assertion, q: &Assertion, bounds: &Bounds) -> Verdict {
    valid(&Assertion::iff(p.clone(), q.clone()), bounds)
}

/// Bounded triple validity, decided directly from execution: in every model
/// of the precondition the program cannot fail and every reachable state
/// satisfies the postcondition. Independent of weakest-precondition
/// generation, which is cross-validated against it.
pub fn triple_valid(t: &Triple, bounds: &Bounds) -> Verdict {
    let pre = desugar(&t.pre);
    let post = desugar(&t.post);
    let mut vars = pre.free_vars();
    vars.extend(post.free_vars());
    vars.extend(t.prog.vars());
    let space = ModelSpace::new(&vars, bounds);
    search(&space, |h, s| {
        match sat_core(h, s, &pre, bounds) {
            Ok(false) => return Ok(true),
            Ok(true) => {}
            Err(e) => return Err(e),
        }
        let outcomes = match exec(&t.prog, h, s, bounds) {
            Ok(o) => o,
            // No room to allocate in this model: no derivable outcome at
            // all, so the triple holds vacuously here. Over unbounded
            // integers allocation always succeeds; only fuel exhaustion is
            // genuinely inconclusive.
            Err(crate::semantics::ExecError::UniverseExhausted) => return Ok(true),
            Err(e) => return Err(e.into()),
        };
        if outcomes.contains(&Outcome::Fail) {
            return Ok(false);
        }
        let mut pending = None;
        if outcomes.contains(&Outcome::FuelExhausted) {
            pending = Some(SatError::FuelExhausted);
        }
        for o in &outcomes {
            if let Outcome::State(h2, s2) = o {
                match sat_core(h2, s2, &post, bounds) {
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
    })
}

/// Counterexample JSON: `{"heap":{...},"store":{...}}`, plus the violated
/// label under `"vc"` when one applies.
pub fn counterexample_json(heap: &Heap, store: &Store, vc: Option<&str>) -> serde_json::Value {
    let mut obj = serde_json::Map::new();
    obj.insert(
        "heap".into(),
        heap.iter()
            .map(|(k, v)| (k.to_string(), serde_json::Value::from(v)))
            .collect::<serde_json::Map<_, _>>()
            .into(),
    );
    obj.insert(
        "store".into(),
        store
            .iter()
            .map(|(k, v)| (k.to_string(), serde_json::Value::from(v)))
            .collect::<serde_json::Map<_, _>>()
            .into(),
    );
    if let Some(label) = vc {
        obj.insert("vc".into(), label.into());
    }
    obj.into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::sat;
    use crate::syntax::{parse_assertion, parse_program};

    fn b(n: i64) -> Bounds {
        Bounds::new(n, 50)
    }

    #[test]
    fn model_counts_match_formula() {
        // (B+1)^B * B^|vars|
        let none = BTreeSet::new();
        let mut xyz = BTreeSet::new();
        xyz.insert("x".to_string());
        assert_eq!(enumerate_models(&none, &b(1)).count(), 2);
        assert_eq!(enumerate_models(&none, &b(2)).count(), 9);
        assert_eq!(enumerate_models(&xyz, &b(2)).count(), 18);
    }

    #[test]
    fn enumeration_order_starts_with_empty_heap() {
        let none = BTreeSet::new();
        let first: Vec<(Heap, Store)> = enumerate_models(&none, &b(1)).collect();
        assert_eq!(first[0].0, Heap::new());
        assert_eq!(first[1].0, Heap::from_pairs([(0, 0)]));
    }

    #[test]
    fn models_are_distinct_and_within_bounds() {
        let mut vars = BTreeSet::new();
        vars.insert("x".to_string());
        let bounds = b(2);
        let all: Vec<(Heap, Store)> = enumerate_models(&vars, &bounds).collect();
        let set: BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len(), "duplicate models");
        for (h, s) in &all {
            for (k, v) in h.iter() {
                assert!(bounds.contains_value(k) && bounds.contains_value(v));
            }
            assert!(s.iter().all(|(_, v)| bounds.contains_value(v)));
        }
    }

    #[test]
    fn validity_basics() {
        assert!(valid(&parse_assertion("true").unwrap(), &b(3)).is_valid());
        match valid(&parse_assertion("x ~> -").unwrap(), &b(3)) {
            Verdict::Invalid { heap, .. } => assert_eq!(heap, Heap::new()),
            other => panic!("expected Invalid, got {other:?}"),
        }
        assert!(valid(&parse_assertion("(y ~> 1) -* (y ~> 1)").unwrap(), &b(3)).is_valid());
    }

    #[test]
    fn equivalence_basics() {
        let p = parse_assertion("emp").unwrap();
        assert!(equiv(&p, &p, &b(3)).is_valid());
        let q = parse_assertion("x ~> -").unwrap();
        assert!(!equiv(&p, &q, &b(3)).is_valid());
    }

    #[test]
    fn counterexamples_replay() {
        let p = parse_assertion("(x ~> 0) -> (y ~> 0)").unwrap();
        match valid(&p, &b(2)) {
            Verdict::Invalid { heap, store } => {
                assert_eq!(sat(&heap, &store, &p, &b(2)), Ok(false));
            }
            other => panic!("expected Invalid, got {other:?}"),
        }
    }

    #[test]
    fn triples_check_failure_and_post() {
        let valid_triple = Triple {
            pre: parse_assertion("x |-> -").unwrap(),
            prog: parse_program("[x] := e").unwrap(),
            post: parse_assertion("x |-> e").unwrap(),
        };
        assert!(triple_valid(&valid_triple, &b(3)).is_valid());

        let failing = Triple {
            pre: parse_assertion("emp").unwrap(),
            prog: parse_program("dispose(x)").unwrap(),
            post: parse_assertion("true").unwrap(),
        };
        assert!(matches!(
            triple_valid(&failing, &b(3)),
            Verdict::Invalid { .. }
        ));

        let vacuous = Triple {
            pre: parse_assertion("false").unwrap(),
            prog: parse_program("dispose(x); dispose(x)").unwrap(),
            post: parse_assertion("false").unwrap(),
        };
        assert!(triple_valid(&vacuous, &b(3)).is_valid());
    }

    #[test]
    fn json_counterexample_shape() {
        let h = Heap::from_pairs([(1, 2)]);
        let s = Store::new().set("x", 1);
        let v = counterexample_json(&h, &s, Some("precondition"));
        assert_eq!(
            v.to_string(),
            r#"{"heap":{"1":2},"store":{"x":1},"vc":"precondition"}"#
        );
    }
}
