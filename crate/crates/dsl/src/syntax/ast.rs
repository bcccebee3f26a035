//! Abstract syntax for expressions, Boolean conditions, assertions, and programs.

/// Variable names. Names starting with `$` are reserved for machine-generated
/// fresh variables and are rejected by the parser.
pub type Name = String;

/// Prefix of the reserved fresh-name namespace.
pub const FRESH_PREFIX: char = '$';

/// Integer expressions. Evaluation is total given a store and never touches
/// the heap.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Int(i64),
    Var(Name),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<Name>) -> Self {
        Expr::Var(name.into())
    }

    pub fn add(l: Expr, r: Expr) -> Self {
        Expr::Add(Box::new(l), Box::new(r))
    }

    pub fn sub(l: Expr, r: Expr) -> Self {
        Expr::Sub(Box::new(l), Box::new(r))
    }

    pub fn mul(l: Expr, r: Expr) -> Self {
        Expr::Mul(Box::new(l), Box::new(r))
    }

    /// Collects the variables occurring in this expression into `out`.
    pub fn collect_vars(&self, out: &mut std::collections::BTreeSet<Name>) {
        match self {
            Expr::Int(_) => {}
            Expr::Var(x) => {
                out.insert(x.clone());
            }
            Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// The set of variables occurring in this expression.
    pub fn vars(&self) -> std::collections::BTreeSet<Name> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
}

/// Boolean expressions. Like `Expr`, these depend only on the store.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BExpr {
    True,
    False,
    Eq(Expr, Expr),
    Lt(Expr, Expr),
    Not(Box<BExpr>),
    And(Box<BExpr>, Box<BExpr>),
}

impl BExpr {
    pub fn eq(l: Expr, r: Expr) -> Self {
        BExpr::Eq(l, r)
    }

    pub fn lt(l: Expr, r: Expr) -> Self {
        BExpr::Lt(l, r)
    }

    pub fn not(b: BExpr) -> Self {
        BExpr::Not(Box::new(b))
    }

    pub fn and(l: BExpr, r: BExpr) -> Self {
        BExpr::And(Box::new(l), Box::new(r))
    }

    /// `l != r`, encoded as the negated equality.
    pub fn neq(l: Expr, r: Expr) -> Self {
        BExpr::not(BExpr::Eq(l, r))
    }

    pub fn collect_vars(&self, out: &mut std::collections::BTreeSet<Name>) {
        match self {
            BExpr::True | BExpr::False => {}
            BExpr::Eq(l, r) | BExpr::Lt(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            BExpr::Not(b) => b.collect_vars(out),
            BExpr::And(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }
}

/// Statements of the heap-manipulating language.
///
/// The five basic instructions are assignment, look-up, mutation, allocation,
/// and disposal. `HeapUpdate` and `HeapClear` are the low-level pseudo
/// instructions: total cell writes that never fail. `GeneralMutate` and
/// `AllocMulti` generalize mutation and allocation to expression targets and
/// consecutive blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stmt {
    /// `x := e`
    Assign(Name, Expr),
    /// `x := [e]` — read the cell at location `e`; fails if unallocated.
    Lookup(Name, Expr),
    /// `[x] := e` — write the cell at location `x`; fails if unallocated.
    Mutate(Name, Expr),
    /// `[e] := e'` — write the cell at an arbitrary location expression.
    GeneralMutate(Expr, Expr),
    /// `x := cons(e)` — allocate one fresh cell holding `e`.
    Alloc(Name, Expr),
    /// `x := cons(e1, ..., en)` — allocate `n` consecutive fresh cells.
    AllocMulti(Name, Vec<Expr>),
    /// `dispose(x)` — free the cell at location `x`; fails if unallocated.
    Dispose(Name),
    /// `upd x := e` — unconditional cell write at location `x`; never fails.
    HeapUpdate(Name, Expr),
    /// `clr x` — unconditional cell removal at location `x`; never fails.
    HeapClear(Name),
    Seq(Box<Stmt>, Box<Stmt>),
    If(BExpr, Box<Stmt>, Box<Stmt>),
    /// `while b invariant p do S od`; the invariant is optional in the
    /// syntax but required by verification-condition generation.
    While(BExpr, Option<Box<Assertion>>, Box<Stmt>),
}

impl Stmt {
    pub fn seq(l: Stmt, r: Stmt) -> Self {
        Stmt::Seq(Box::new(l), Box::new(r))
    }

    /// True for the five basic instructions and the two pseudo instructions,
    /// the statement forms the rewrite system accepts under a modality.
    pub fn is_rewritable(&self) -> bool {
        matches!(
            self,
            Stmt::Assign(..)
                | Stmt::Lookup(..)
                | Stmt::Mutate(..)
                | Stmt::Alloc(..)
                | Stmt::Dispose(..)
                | Stmt::HeapUpdate(..)
                | Stmt::HeapClear(..)
        )
    }

    /// All variables occurring anywhere in the statement, assigned or read.
    pub fn collect_vars(&self, out: &mut std::collections::BTreeSet<Name>) {
        match self {
            Stmt::Assign(x, e)
            | Stmt::Lookup(x, e)
            | Stmt::Mutate(x, e)
            | Stmt::Alloc(x, e)
            | Stmt::HeapUpdate(x, e) => {
                out.insert(x.clone());
                e.collect_vars(out);
            }
            Stmt::GeneralMutate(e, e2) => {
                e.collect_vars(out);
                e2.collect_vars(out);
            }
            Stmt::AllocMulti(x, es) => {
                out.insert(x.clone());
                for e in es {
                    e.collect_vars(out);
                }
            }
            Stmt::Dispose(x) | Stmt::HeapClear(x) => {
                out.insert(x.clone());
            }
            Stmt::Seq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Stmt::If(b, s1, s2) => {
                b.collect_vars(out);
                s1.collect_vars(out);
                s2.collect_vars(out);
            }
            Stmt::While(b, inv, body) => {
                b.collect_vars(out);
                if let Some(inv) = inv {
                    inv.collect_free_vars(&mut Vec::new(), out);
                }
                body.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Name> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
}

/// Assertions of the logic.
///
/// Core constructors are `Bool`, `PointsWeak`, `Imp`, `Forall`, `SepConj`,
/// `SepImp`, and `Modal`; everything else is syntactic sugar that
/// [`desugar`](crate::syntax::desugar) eliminates. The rewrite system and the
/// satisfaction checker operate on the core fragment only.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Assertion {
    // Core constructors.
    Bool(BExpr),
    /// `e ~> e'` — location `e` is allocated and holds `e'`.
    PointsWeak(Expr, Expr),
    /// `p -> q`
    Imp(Box<Assertion>, Box<Assertion>),
    /// `forall x p`
    Forall(Name, Box<Assertion>),
    /// `p * q`
    SepConj(Box<Assertion>, Box<Assertion>),
    /// `p -* q`
    SepImp(Box<Assertion>, Box<Assertion>),
    /// `[S]p` — the statement modality: `S` cannot fail and every state it
    /// can reach satisfies `p`.
    Modal(Box<Stmt>, Box<Assertion>),

    // Sugar constructors.
    Not(Box<Assertion>),
    And(Box<Assertion>, Box<Assertion>),
    Or(Box<Assertion>, Box<Assertion>),
    Iff(Box<Assertion>, Box<Assertion>),
    /// `exists x p`
    Exists(Name, Box<Assertion>),
    /// `emp` — the empty heap.
    Emp,
    /// `e |-> e'` — the heap is exactly the one cell `e` holding `e'`.
    PointsStrong(Expr, Expr),
    /// `e ~> -` — location `e` is allocated.
    PointsWeakAny(Expr),
    /// `e |-> -` — the heap is exactly one cell at location `e`.
    PointsStrongAny(Expr),
}

impl Assertion {
    pub fn truth() -> Self {
        Assertion::Bool(BExpr::True)
    }

    pub fn falsity() -> Self {
        Assertion::Bool(BExpr::False)
    }

    pub fn imp(p: Assertion, q: Assertion) -> Self {
        Assertion::Imp(Box::new(p), Box::new(q))
    }

    pub fn forall(x: impl Into<Name>, p: Assertion) -> Self {
        Assertion::Forall(x.into(), Box::new(p))
    }

    pub fn sep_conj(p: Assertion, q: Assertion) -> Self {
        Assertion::SepConj(Box::new(p), Box::new(q))
    }

    pub fn sep_imp(p: Assertion, q: Assertion) -> Self {
        Assertion::SepImp(Box::new(p), Box::new(q))
    }

    pub fn modal(s: Stmt, p: Assertion) -> Self {
        Assertion::Modal(Box::new(s), Box::new(p))
    }

    pub fn not(p: Assertion) -> Self {
        Assertion::Not(Box::new(p))
    }

    pub fn and(p: Assertion, q: Assertion) -> Self {
        Assertion::And(Box::new(p), Box::new(q))
    }

    pub fn or(p: Assertion, q: Assertion) -> Self {
        Assertion::Or(Box::new(p), Box::new(q))
    }

    pub fn iff(p: Assertion, q: Assertion) -> Self {
        Assertion::Iff(Box::new(p), Box::new(q))
    }

    pub fn exists(x: impl Into<Name>, p: Assertion) -> Self {
        Assertion::Exists(x.into(), Box::new(p))
    }

    /// True if any `Modal` node occurs in the assertion.
    pub fn contains_modal(&self) -> bool {
        match self {
            Assertion::Bool(_)
            | Assertion::PointsWeak(..)
            | Assertion::Emp
            | Assertion::PointsStrong(..)
            | Assertion::PointsWeakAny(_)
            | Assertion::PointsStrongAny(_) => false,
            Assertion::Modal(..) => true,
            Assertion::Imp(p, q)
            | Assertion::SepConj(p, q)
            | Assertion::SepImp(p, q)
            | Assertion::And(p, q)
            | Assertion::Or(p, q)
            | Assertion::Iff(p, q) => p.contains_modal() || q.contains_modal(),
            Assertion::Forall(_, p) | Assertion::Exists(_, p) | Assertion::Not(p) => {
                p.contains_modal()
            }
        }
    }

    /// True if only core constructors occur.
    pub fn is_core(&self) -> bool {
        match self {
            Assertion::Bool(_) | Assertion::PointsWeak(..) => true,
            Assertion::Imp(p, q) | Assertion::SepConj(p, q) | Assertion::SepImp(p, q) => {
                p.is_core() && q.is_core()
            }
            Assertion::Forall(_, p) => p.is_core(),
            Assertion::Modal(s, p) => {
                p.is_core()
                    && match s.as_ref() {
                        Stmt::While(_, Some(inv), _) => inv.is_core(),
                        _ => true,
                    }
            }
            _ => false,
        }
    }

    /// Free variables. For `Modal(S, p)` this conservatively includes every
    /// variable of `S`, which keeps the bounded oracle sound (extra store
    /// variables never change a verdict).
    pub(crate) fn collect_free_vars(
        &self,
        bound: &mut Vec<Name>,
        out: &mut std::collections::BTreeSet<Name>,
    ) {
        let add_expr = |e: &Expr, bound: &Vec<Name>, out: &mut std::collections::BTreeSet<Name>| {
            for v in e.vars() {
                if !bound.contains(&v) {
                    out.insert(v);
                }
            }
        };
        match self {
            Assertion::Bool(b) => {
                let mut vs = std::collections::BTreeSet::new();
                b.collect_vars(&mut vs);
                for v in vs {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            Assertion::PointsWeak(e, e2) | Assertion::PointsStrong(e, e2) => {
                add_expr(e, bound, out);
                add_expr(e2, bound, out);
            }
            Assertion::PointsWeakAny(e) | Assertion::PointsStrongAny(e) => add_expr(e, bound, out),
            Assertion::Emp => {}
            Assertion::Imp(p, q)
            | Assertion::SepConj(p, q)
            | Assertion::SepImp(p, q)
            | Assertion::And(p, q)
            | Assertion::Or(p, q)
            | Assertion::Iff(p, q) => {
                p.collect_free_vars(bound, out);
                q.collect_free_vars(bound, out);
            }
            Assertion::Not(p) => p.collect_free_vars(bound, out),
            Assertion::Forall(x, p) | Assertion::Exists(x, p) => {
                bound.push(x.clone());
                p.collect_free_vars(bound, out);
                bound.pop();
            }
            Assertion::Modal(s, p) => {
                for v in s.vars() {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
                p.collect_free_vars(bound, out);
            }
        }
    }

    pub fn free_vars(&self) -> std::collections::BTreeSet<Name> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_free_vars(&mut Vec::new(), &mut out);
        out
    }
}
