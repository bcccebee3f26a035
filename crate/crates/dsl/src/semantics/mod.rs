//! Heaps, stores, bounded universes, program execution, and the satisfaction
//! relation.

mod exec;
mod sat;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::Name;

pub use exec::{eval_bexpr, eval_expr, exec};
pub use sat::sat;
pub(crate) use sat::sat_core;

/// A finitely-based partial map from integer locations to integer values.
/// Lookup outside the domain yields `None`, the unallocated result.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Heap {
    cells: BTreeMap<i64, i64>,
}

impl Heap {
    pub fn new() -> Self {
        Heap::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, i64)>) -> Self {
        Heap {
            cells: pairs.into_iter().collect(),
        }
    }

    pub fn get(&self, n: i64) -> Option<i64> {
        self.cells.get(&n).copied()
    }

    pub fn contains(&self, n: i64) -> bool {
        self.cells.contains_key(&n)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = i64> + '_ {
        self.cells.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.cells.iter().map(|(k, v)| (*k, *v))
    }

    /// `h[n := v]`: extends the domain when `n` is unallocated.
    pub fn update(&self, n: i64, v: i64) -> Heap {
        let mut cells = self.cells.clone();
        cells.insert(n, v);
        Heap { cells }
    }

    /// `h[n := ⊥]`: removes `n` from the domain.
    pub fn clear(&self, n: i64) -> Heap {
        let mut cells = self.cells.clone();
        cells.remove(&n);
        Heap { cells }
    }

    /// Pointwise update or clear: `store(n, Some(v))` is `h[n := v]`,
    /// `store(n, None)` is `h[n := ⊥]`.
    pub fn store(&self, n: i64, v: Option<i64>) -> Heap {
        match v {
            Some(v) => self.update(n, v),
            None => self.clear(n),
        }
    }

    pub fn disjoint(&self, other: &Heap) -> bool {
        self.cells.keys().all(|k| !other.cells.contains_key(k))
    }

    /// Disjoint union. Callers guarantee disjointness.
    pub fn union(&self, other: &Heap) -> Heap {
        debug_assert!(self.disjoint(other));
        let mut cells = self.cells.clone();
        cells.extend(other.cells.iter().map(|(k, v)| (*k, *v)));
        Heap { cells }
    }
}

impl fmt::Display for Heap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "heap{{")?;
        for (i, (k, v)) in self.cells.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}:{v}")?;
        }
        write!(f, "}}")
    }
}

/// A total map from variable names to integers, represented finitely with
/// default value 0. Bindings to 0 are never stored, so structural equality
/// coincides with extensional equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Store {
    bindings: BTreeMap<Name, i64>,
}

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, i64)>) -> Self {
        let mut s = Store::new();
        for (x, v) in pairs {
            s = s.set(&x, v);
        }
        s
    }

    pub fn get(&self, x: &str) -> i64 {
        self.bindings.get(x).copied().unwrap_or(0)
    }

    /// `s[x := v]`.
    pub fn set(&self, x: &str, v: i64) -> Store {
        let mut bindings = self.bindings.clone();
        if v == 0 {
            bindings.remove(x);
        } else {
            bindings.insert(x.to_string(), v);
        }
        Store { bindings }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> + '_ {
        self.bindings.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl fmt::Display for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "store{{")?;
        for (i, (k, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}:{v}")?;
        }
        write!(f, "}}")
    }
}

/// The finite universe governing all bounded enumeration: locations and
/// values both range over `{0..B-1}`, and loops unfold at most `fuel` times
/// per entry. Keeping the two universes identical aligns value quantifiers
/// with allocation's choice of fresh locations.
///
/// Enumeration cost grows as `(B+1)^B`; `B <= 5` stays desk-scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    universe: i64,
    fuel: u32,
}

impl Bounds {
    /// Panics if `universe_size < 1`.
    pub fn new(universe_size: i64, fuel: u32) -> Self {
        assert!(universe_size >= 1, "universe size must be at least 1");
        Bounds {
            universe: universe_size,
            fuel,
        }
    }

    pub fn universe_size(&self) -> i64 {
        self.universe
    }

    pub fn fuel(&self) -> u32 {
        self.fuel
    }

    pub fn contains_value(&self, v: i64) -> bool {
        0 <= v && v < self.universe
    }

    pub fn values(&self) -> std::ops::Range<i64> {
        0..self.universe
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds::new(3, 100)
    }
}

/// Result of executing a statement: a reachable state, an explicit failure
/// (dangling-pointer access), or an aborted loop unfolding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    State(Heap, Store),
    Fail,
    FuelExhausted,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::State(h, s) => write!(f, "state {h} {s}"),
            Outcome::Fail => write!(f, "fail"),
            Outcome::FuelExhausted => write!(f, "fuel-exhausted"),
        }
    }
}

/// Bounded-model artifacts surfaced by `exec`. Neither is a program failure:
/// over unbounded integers allocation always succeeds and values never
/// escape.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ExecError {
    #[error("allocation found no free location in the universe (bounded-model artifact)")]
    UniverseExhausted,
    #[error("value {0} escapes the universe (bounded-model artifact)")]
    OutOfUniverse(i64),
}

/// Reasons `sat` may refuse to answer.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SatError {
    #[error("loop fuel exhausted; satisfaction is inconclusive")]
    FuelExhausted,
    #[error(transparent)]
    Exec(#[from] ExecError),
}

/// Parses the `heap{1:2, 5:7}` fixture literal.
pub fn parse_heap_literal(text: &str) -> Result<Heap, String> {
    let inner = literal_body(text, "heap")?;
    let mut pairs = Vec::new();
    for part in split_entries(inner) {
        let (k, v) = entry(part)?;
        let k: i64 = k.parse().map_err(|_| format!("bad location `{k}`"))?;
        let v: i64 = v.parse().map_err(|_| format!("bad value `{v}`"))?;
        pairs.push((k, v));
    }
    Ok(Heap::from_pairs(pairs))
}

/// Parses the `store{x:1, y:0}` fixture literal.
pub fn parse_store_literal(text: &str) -> Result<Store, String> {
    let inner = literal_body(text, "store")?;
    let mut s = Store::new();
    for part in split_entries(inner) {
        let (k, v) = entry(part)?;
        let v: i64 = v.parse().map_err(|_| format!("bad value `{v}`"))?;
        s = s.set(k, v);
    }
    Ok(s)
}

fn literal_body<'a>(text: &'a str, kind: &str) -> Result<&'a str, String> {
    let t = text.trim();
    let body = t
        .strip_prefix(kind)
        .and_then(|r| r.trim_start().strip_prefix('{'))
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| format!("expected `{kind}{{...}}`, found `{t}`"))?;
    Ok(body)
}

fn split_entries(body: &str) -> impl Iterator<Item = &str> {
    body.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn entry(part: &str) -> Result<(&str, &str), String> {
    let (k, v) = part
        .split_once(':')
        .ok_or_else(|| format!("expected `key:value`, found `{part}`"))?;
    Ok((k.trim(), v.trim()))
}
