// Constructor helpers named after the connectives they build (`not`,
// `add`, ...) are free functions in spirit, not operator impls.
#![allow(clippy::should_implement_trait)]

//! A verification toolkit for a small heap-manipulating while-language,
//! built around a dynamic-logic extension of separation logic.
//!
//! The assertion language adds a modality `[S]p` — "`S` cannot fail and
//! every state it reaches satisfies `p`" — for each statement `S`. The crate
//! provides:
//!
//! - [`syntax`]: parsing, printing, substitution, and desugaring of
//!   assertions and programs;
//! - [`semantics`]: bounded heaps and stores, a big-step interpreter with
//!   failure and nondeterministic allocation, and the satisfaction relation;
//! - [`rewrite`]: the modality-elimination rules E1–E16, which normalize any
//!   formula over basic and pseudo instructions to a modality-free
//!   separation-logic formula;
//! - [`vc`]: weakest preconditions, strongest postconditions, and
//!   Hoare-triple verification for full programs with loop invariants;
//! - [`oracle`]: brute-force bounded-model decision procedures for validity,
//!   equivalence, and triple validity, with counterexample extraction;
//! - [`cli`]: the `dsl` command-line front end.
//!
//! See the crate examples for a tour: each major capability has a runnable
//! example under `examples/`.

pub mod cli;
pub mod oracle;
pub mod rewrite;
pub mod semantics;
pub mod syntax;
pub mod vc;

pub use oracle::{enumerate_models, equiv, triple_valid, valid, Verdict};
pub use rewrite::{
    frame_for_mutation, normalize, normalize_with, rewrite_step, simplify, RuleId, Strategy,
    Trace,
};
pub use semantics::{exec, sat, Bounds, Heap, Outcome, Store};
pub use syntax::{
    alpha_equiv, desugar, parse_assertion, parse_program, subst, Assertion, BExpr, Expr, Stmt,
};
pub use vc::{sp, sp_global, verify_triple, wp, Triple, TripleVerdict, Vc};
