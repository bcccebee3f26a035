//! Deterministic random generators shared by the property and acceptance
//! suites. Everything draws from a seeded ChaCha stream so failures replay.
//!
//! Formulas are arithmetic-free (variables and in-universe literals only):
//! the equivalences under test are exact over the bounded model on that
//! fragment, while arithmetic can push values past the universe edge.

// Each suite uses its own subset of the generators.
#![allow(dead_code)]

use dsl::syntax::{Assertion, BExpr, Expr, Name, Stmt};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub const VARS: [&str; 3] = ["x", "y", "z"];

pub struct Gen {
    rng: ChaCha8Rng,
    bound: i64,
}

impl Gen {
    pub fn new(seed: u64, bound: i64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            bound,
        }
    }

    pub fn var(&mut self) -> Name {
        VARS[self.rng.gen_range(0..VARS.len())].to_string()
    }

    /// A variable or an in-universe literal; no arithmetic.
    pub fn expr(&mut self) -> Expr {
        if self.rng.gen_bool(0.5) {
            Expr::Var(self.var())
        } else {
            Expr::Int(self.rng.gen_range(0..self.bound))
        }
    }

    pub fn bexpr_atom(&mut self) -> BExpr {
        match self.rng.gen_range(0..4) {
            0 => BExpr::True,
            1 => BExpr::False,
            2 => BExpr::Eq(self.expr(), self.expr()),
            _ => BExpr::Lt(self.expr(), self.expr()),
        }
    }

    fn atom(&mut self) -> Assertion {
        match self.rng.gen_range(0..8) {
            0 => Assertion::Bool(self.bexpr_atom()),
            1 | 2 => Assertion::PointsWeak(self.expr(), self.expr()),
            3 => Assertion::PointsWeakAny(self.expr()),
            4 => Assertion::Emp,
            5 => Assertion::PointsStrong(self.expr(), self.expr()),
            6 => Assertion::PointsStrongAny(self.expr()),
            _ => Assertion::Bool(self.bexpr_atom()),
        }
    }

    /// Modality-free assertion of the given depth, sugar included.
    pub fn assertion(&mut self, depth: u32) -> Assertion {
        if depth == 0 {
            return self.atom();
        }
        match self.rng.gen_range(0..12) {
            0 => Assertion::not(self.assertion(depth - 1)),
            1 => Assertion::and(self.assertion(depth - 1), self.assertion(depth - 1)),
            2 => Assertion::or(self.assertion(depth - 1), self.assertion(depth - 1)),
            3 => Assertion::imp(self.assertion(depth - 1), self.assertion(depth - 1)),
            4 => Assertion::forall(self.var(), self.assertion(depth - 1)),
            5 => Assertion::exists(self.var(), self.assertion(depth - 1)),
            6 | 7 => Assertion::sep_conj(self.assertion(depth - 1), self.assertion(depth - 1)),
            8 => Assertion::sep_imp(self.assertion(depth - 1), self.assertion(depth - 1)),
            9 => Assertion::iff(self.assertion(depth - 1), self.assertion(depth - 1)),
            _ => self.atom(),
        }
    }

    /// One of the seven single-instruction modality targets, by index:
    /// assign, lookup, mutate, cons, dispose, upd, clr.
    pub fn instruction_of_kind(&mut self, kind: usize) -> Stmt {
        let x = self.var();
        match kind {
            0 => Stmt::Assign(x, self.expr()),
            1 => Stmt::Lookup(x, self.expr()),
            2 => Stmt::Mutate(x, self.expr()),
            // Sometimes allocate with the target on the right-hand side to
            // exercise the generalized allocation form.
            3 => {
                let e = if self.rng.gen_bool(0.25) {
                    Expr::Var(x.clone())
                } else {
                    self.expr()
                };
                Stmt::Alloc(x, e)
            }
            4 => Stmt::Dispose(x),
            5 => Stmt::HeapUpdate(x, self.expr()),
            _ => Stmt::HeapClear(x),
        }
    }

    pub fn instruction(&mut self) -> Stmt {
        let kind = self.rng.gen_range(0..7);
        self.instruction_of_kind(kind)
    }

    fn simple_statement(&mut self) -> Stmt {
        match self.rng.gen_range(0..8) {
            0 => Stmt::Assign(self.var(), self.expr()),
            1 => Stmt::Lookup(self.var(), self.expr()),
            2 => Stmt::Mutate(self.var(), self.expr()),
            3 => Stmt::Alloc(self.var(), self.expr()),
            4 => Stmt::Dispose(self.var()),
            5 => Stmt::HeapUpdate(self.var(), self.expr()),
            6 => Stmt::HeapClear(self.var()),
            _ => Stmt::GeneralMutate(self.expr(), self.expr()),
        }
    }

    /// Loop-free program: up to `len` statements, conditionals included.
    pub fn program(&mut self, len: usize) -> Stmt {
        let mut stmt = self.program_step();
        for _ in 1..len.max(1) {
            stmt = Stmt::seq(stmt, self.program_step());
        }
        stmt
    }

    fn program_step(&mut self) -> Stmt {
        if self.rng.gen_bool(0.2) {
            Stmt::If(
                self.bexpr_atom(),
                Box::new(self.simple_statement()),
                Box::new(self.simple_statement()),
            )
        } else {
            self.simple_statement()
        }
    }
}
