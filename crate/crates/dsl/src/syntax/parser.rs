//! Recursive-descent parser for assertions and programs.
//!
//! Operator precedence, loosest to tightest:
//! `<->`, `->`, `\/`, `/\`, `-*`, `*`, prefix `!` and `[S]`, atoms.
//! Quantifiers extend maximally to the right. Implications associate to the
//! right, the other binary connectives to the left. Statement sequencing is
//! parsed right-nested, so `a; b; c` reads as `a; (b; c)`.
//!
//! Identifiers starting with `$` are reserved for machine-minted fresh
//! variables and rejected here.

use thiserror::Error;

use super::ast::{Assertion, BExpr, Expr, Name, Stmt, FRESH_PREFIX};
use super::lexer::{tokenize, Spanned, Tok};

/// Parse failure with source position.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("syntax error at {line}:{col}: {msg}")]
pub struct SyntaxError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

impl SyntaxError {
    pub(crate) fn at(line: u32, col: u32, msg: impl Into<String>) -> Self {
        SyntaxError {
            line,
            col,
            msg: msg.into(),
        }
    }
}

/// Parses a single assertion; the whole input must be consumed.
pub fn parse_assertion(text: &str) -> Result<Assertion, SyntaxError> {
    let toks = tokenize(text)?;
    let mut p = Parser::new(toks);
    let a = p.assertion()?;
    p.expect_eof()?;
    Ok(a)
}

/// Parses a program; the whole input must be consumed.
pub fn parse_program(text: &str) -> Result<Stmt, SyntaxError> {
    let toks = tokenize(text)?;
    let mut p = Parser::new(toks);
    let s = p.stmt()?;
    p.expect_eof()?;
    Ok(s)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (u32, u32),
}

impl Parser {
    fn new(toks: Vec<Spanned>) -> Self {
        let end = toks
            .last()
            .map(|t| (t.line, t.col + t.tok.to_string().len() as u32))
            .unwrap_or((1, 1));
        Parser { toks, pos: 0, end }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|t| &t.tok)
    }

    fn here(&self) -> (u32, u32) {
        self.toks
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or(self.end)
    }

    fn err(&self, msg: impl Into<String>) -> SyntaxError {
        let (line, col) = self.here();
        SyntaxError::at(line, col, msg)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.err(format!(
                "expected `{tok}`, found {}",
                self.describe_here()
            )))
        }
    }

    fn describe_here(&self) -> String {
        match self.peek() {
            Some(t) => format!("`{t}`"),
            None => "end of input".to_string(),
        }
    }

    fn expect_eof(&self) -> Result<(), SyntaxError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(self.err(format!("unexpected {}", self.describe_here())))
        }
    }

    fn ident(&mut self) -> Result<Name, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                if s.starts_with(FRESH_PREFIX) {
                    return Err(self.err(format!(
                        "identifier `{s}` is reserved: names starting with `$` are machine-generated"
                    )));
                }
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err(format!("expected identifier, found {}", self.describe_here()))),
        }
    }

    // ----- expressions -----

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut l = self.expr_mul()?;
        loop {
            if self.eat(&Tok::Plus) {
                let r = self.expr_mul()?;
                l = Expr::add(l, r);
            } else if self.eat(&Tok::Minus) {
                let r = self.expr_mul()?;
                l = Expr::sub(l, r);
            } else {
                return Ok(l);
            }
        }
    }

    fn expr_mul(&mut self) -> Result<Expr, SyntaxError> {
        let mut l = self.expr_atom()?;
        while self.eat(&Tok::Star) {
            let r = self.expr_atom()?;
            l = Expr::mul(l, r);
        }
        Ok(l)
    }

    fn expr_atom(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some(Tok::Ident(_)) => Ok(Expr::Var(self.ident()?)),
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => Err(self.err(format!("expected expression, found {}", self.describe_here()))),
        }
    }

    // ----- Boolean expressions (statement conditions) -----

    fn bexpr(&mut self) -> Result<BExpr, SyntaxError> {
        let mut l = self.bexpr_unary()?;
        while self.eat(&Tok::AndAnd) {
            let r = self.bexpr_unary()?;
            l = BExpr::and(l, r);
        }
        Ok(l)
    }

    fn bexpr_unary(&mut self) -> Result<BExpr, SyntaxError> {
        if self.eat(&Tok::Bang) {
            Ok(BExpr::not(self.bexpr_unary()?))
        } else {
            self.bexpr_atom()
        }
    }

    fn bexpr_atom(&mut self) -> Result<BExpr, SyntaxError> {
        match self.peek() {
            Some(Tok::True) => {
                self.pos += 1;
                Ok(BExpr::True)
            }
            Some(Tok::False) => {
                self.pos += 1;
                Ok(BExpr::False)
            }
            Some(Tok::LParen) => {
                // Either a parenthesized condition or a parenthesized
                // expression starting a comparison.
                let save = self.pos;
                match self.comparison() {
                    Ok(b) => Ok(b),
                    Err(e1) => {
                        self.pos = save;
                        self.pos += 1;
                        let b = self.bexpr().map_err(|e2| further(e1, e2))?;
                        self.expect(Tok::RParen)?;
                        Ok(b)
                    }
                }
            }
            _ => self.comparison(),
        }
    }

    fn comparison(&mut self) -> Result<BExpr, SyntaxError> {
        let l = self.expr()?;
        if self.eat(&Tok::Eq) {
            Ok(BExpr::Eq(l, self.expr()?))
        } else if self.eat(&Tok::Lt) {
            Ok(BExpr::Lt(l, self.expr()?))
        } else if self.eat(&Tok::BangEq) {
            Ok(BExpr::neq(l, self.expr()?))
        } else {
            Err(self.err(format!(
                "expected `=`, `<` or `!=`, found {}",
                self.describe_here()
            )))
        }
    }

    // ----- assertions -----

    fn assertion(&mut self) -> Result<Assertion, SyntaxError> {
        self.a_iff()
    }

    fn a_iff(&mut self) -> Result<Assertion, SyntaxError> {
        let l = self.a_imp()?;
        if self.eat(&Tok::IffArrow) {
            let r = self.a_iff()?;
            Ok(Assertion::iff(l, r))
        } else {
            Ok(l)
        }
    }

    fn a_imp(&mut self) -> Result<Assertion, SyntaxError> {
        let l = self.a_or()?;
        if self.eat(&Tok::Arrow) {
            let r = self.a_imp()?;
            Ok(Assertion::imp(l, r))
        } else {
            Ok(l)
        }
    }

    fn a_or(&mut self) -> Result<Assertion, SyntaxError> {
        let mut l = self.a_and()?;
        while self.eat(&Tok::SlashOr) {
            let r = self.a_and()?;
            l = Assertion::or(l, r);
        }
        Ok(l)
    }

    fn a_and(&mut self) -> Result<Assertion, SyntaxError> {
        let mut l = self.a_sep_imp()?;
        while self.eat(&Tok::SlashAnd) {
            let r = self.a_sep_imp()?;
            l = Assertion::and(l, r);
        }
        Ok(l)
    }

    fn a_sep_imp(&mut self) -> Result<Assertion, SyntaxError> {
        let l = self.a_sep_conj()?;
        if self.eat(&Tok::Wand) {
            let r = self.a_sep_imp()?;
            Ok(Assertion::sep_imp(l, r))
        } else {
            Ok(l)
        }
    }

    fn a_sep_conj(&mut self) -> Result<Assertion, SyntaxError> {
        let mut l = self.a_unary()?;
        while self.eat(&Tok::Star) {
            let r = self.a_unary()?;
            l = Assertion::sep_conj(l, r);
        }
        Ok(l)
    }

    fn a_unary(&mut self) -> Result<Assertion, SyntaxError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(Assertion::not(self.a_unary()?))
            }
            Some(Tok::LBracket) => {
                self.pos += 1;
                let s = self.stmt()?;
                self.expect(Tok::RBracket)?;
                let body = self.a_unary()?;
                Ok(Assertion::modal(s, body))
            }
            Some(Tok::Forall) | Some(Tok::Exists) => {
                let is_forall = matches!(self.peek(), Some(Tok::Forall));
                self.pos += 1;
                let x = self.ident()?;
                let body = self.assertion()?;
                Ok(if is_forall {
                    Assertion::forall(x, body)
                } else {
                    Assertion::exists(x, body)
                })
            }
            _ => self.a_atom(),
        }
    }

    fn a_atom(&mut self) -> Result<Assertion, SyntaxError> {
        match self.peek() {
            Some(Tok::True) => {
                self.pos += 1;
                Ok(Assertion::truth())
            }
            Some(Tok::False) => {
                self.pos += 1;
                Ok(Assertion::falsity())
            }
            Some(Tok::Emp) => {
                self.pos += 1;
                Ok(Assertion::Emp)
            }
            Some(Tok::Int(_)) | Some(Tok::Ident(_)) => self.expr_led_atom(),
            Some(Tok::LParen) => {
                // Either an expression-led atom such as `(x + 1) ~> y`, or a
                // parenthesized assertion.
                let save = self.pos;
                match self.expr_led_atom() {
                    Ok(a) => Ok(a),
                    Err(e1) => {
                        self.pos = save;
                        self.pos += 1;
                        let a = self.assertion().map_err(|e2| further(e1, e2))?;
                        self.expect(Tok::RParen)?;
                        Ok(a)
                    }
                }
            }
            _ => Err(self.err(format!("expected assertion, found {}", self.describe_here()))),
        }
    }

    fn expr_led_atom(&mut self) -> Result<Assertion, SyntaxError> {
        let l = self.expr()?;
        if self.eat(&Tok::Eq) {
            Ok(Assertion::Bool(BExpr::Eq(l, self.expr()?)))
        } else if self.eat(&Tok::Lt) {
            Ok(Assertion::Bool(BExpr::Lt(l, self.expr()?)))
        } else if self.eat(&Tok::BangEq) {
            Ok(Assertion::Bool(BExpr::neq(l, self.expr()?)))
        } else if self.eat(&Tok::WeakArrow) {
            if self.eat(&Tok::Minus) {
                Ok(Assertion::PointsWeakAny(l))
            } else {
                Ok(Assertion::PointsWeak(l, self.expr()?))
            }
        } else if self.eat(&Tok::StrongArrow) {
            if self.eat(&Tok::Minus) {
                Ok(Assertion::PointsStrongAny(l))
            } else {
                Ok(Assertion::PointsStrong(l, self.expr()?))
            }
        } else {
            Err(self.err(format!(
                "expected a comparison or points-to operator, found {}",
                self.describe_here()
            )))
        }
    }

    // ----- statements -----

    fn stmt(&mut self) -> Result<Stmt, SyntaxError> {
        let l = self.stmt_single()?;
        if self.eat(&Tok::Semi) {
            let r = self.stmt()?;
            Ok(Stmt::seq(l, r))
        } else {
            Ok(l)
        }
    }

    fn stmt_single(&mut self) -> Result<Stmt, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let x = self.ident()?;
                self.expect(Tok::Assign)?;
                match self.peek() {
                    Some(Tok::LBracket) => {
                        self.pos += 1;
                        let e = self.expr()?;
                        self.expect(Tok::RBracket)?;
                        Ok(Stmt::Lookup(x, e))
                    }
                    Some(Tok::Cons) => {
                        self.pos += 1;
                        self.expect(Tok::LParen)?;
                        let mut es = vec![self.expr()?];
                        while self.eat(&Tok::Comma) {
                            es.push(self.expr()?);
                        }
                        self.expect(Tok::RParen)?;
                        if es.len() == 1 {
                            Ok(Stmt::Alloc(x, es.pop().expect("one element")))
                        } else {
                            Ok(Stmt::AllocMulti(x, es))
                        }
                    }
                    _ => Ok(Stmt::Assign(x, self.expr()?)),
                }
            }
            Some(Tok::LBracket) => {
                // `[x] := e` when the target is a plain variable, otherwise
                // `[e] := e'`.
                if matches!(self.peek2(), Some(Tok::Ident(_)))
                    && matches!(self.toks.get(self.pos + 2).map(|t| &t.tok), Some(Tok::RBracket))
                {
                    self.pos += 1;
                    let x = self.ident()?;
                    self.expect(Tok::RBracket)?;
                    self.expect(Tok::Assign)?;
                    Ok(Stmt::Mutate(x, self.expr()?))
                } else {
                    self.pos += 1;
                    let e = self.expr()?;
                    self.expect(Tok::RBracket)?;
                    self.expect(Tok::Assign)?;
                    Ok(Stmt::GeneralMutate(e, self.expr()?))
                }
            }
            Some(Tok::Dispose) => {
                self.pos += 1;
                self.expect(Tok::LParen)?;
                let x = self.ident()?;
                self.expect(Tok::RParen)?;
                Ok(Stmt::Dispose(x))
            }
            Some(Tok::Upd) => {
                self.pos += 1;
                let x = self.ident()?;
                self.expect(Tok::Assign)?;
                Ok(Stmt::HeapUpdate(x, self.expr()?))
            }
            Some(Tok::Clr) => {
                self.pos += 1;
                Ok(Stmt::HeapClear(self.ident()?))
            }
            Some(Tok::If) => {
                self.pos += 1;
                let b = self.bexpr()?;
                self.expect(Tok::Then)?;
                let s1 = self.stmt()?;
                self.expect(Tok::Else)?;
                let s2 = self.stmt()?;
                self.expect(Tok::Fi)?;
                Ok(Stmt::If(b, Box::new(s1), Box::new(s2)))
            }
            Some(Tok::While) => {
                self.pos += 1;
                let b = self.bexpr()?;
                let inv = if self.eat(&Tok::Invariant) {
                    Some(Box::new(self.assertion()?))
                } else {
                    None
                };
                self.expect(Tok::Do)?;
                let body = self.stmt()?;
                self.expect(Tok::Od)?;
                Ok(Stmt::While(b, inv, Box::new(body)))
            }
            _ => Err(self.err(format!("expected statement, found {}", self.describe_here()))),
        }
    }
}

// Keep whichever error made it further into the input.
fn further(a: SyntaxError, b: SyntaxError) -> SyntaxError {
    if (b.line, b.col) >= (a.line, a.col) {
        b
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::ast::{Assertion as A, BExpr, Expr, Stmt};

    fn rt_assert(text: &str) {
        let a = parse_assertion(text).expect("parse");
        let printed = a.to_string();
        let again = parse_assertion(&printed)
            .unwrap_or_else(|e| panic!("reparse of `{printed}` failed: {e}"));
        assert_eq!(a, again, "round trip through `{printed}`");
    }

    #[test]
    fn parses_constants() {
        assert_eq!(parse_assertion("true").unwrap(), A::truth());
        assert_eq!(
            parse_assertion("x ~> 2").unwrap(),
            A::PointsWeak(Expr::var("x"), Expr::Int(2))
        );
    }

    #[test]
    fn parses_modality_over_pseudo_instruction() {
        let a = parse_assertion("[upd x := e] (y ~> -)").unwrap();
        assert_eq!(
            a,
            A::modal(
                Stmt::HeapUpdate("x".into(), Expr::var("e")),
                A::PointsWeakAny(Expr::var("y"))
            )
        );
    }

    #[test]
    fn parses_program_sequence() {
        let s = parse_program("x := cons(0); dispose(x)").unwrap();
        assert_eq!(
            s,
            Stmt::seq(
                Stmt::Alloc("x".into(), Expr::Int(0)),
                Stmt::Dispose("x".into())
            )
        );
    }

    #[test]
    fn parses_loop_with_invariant() {
        let s = parse_program("while x < 3 invariant true do x := x od").unwrap();
        match s {
            Stmt::While(BExpr::Lt(..), Some(inv), _) => assert_eq!(*inv, A::truth()),
            other => panic!("unexpected parse: {other:?}"),
        }
    }

    #[test]
    fn prints_canonical_forms() {
        assert_eq!(A::truth().to_string(), "true");
        assert_eq!(
            A::PointsStrong(Expr::var("x"), Expr::Int(0)).to_string(),
            "x |-> 0"
        );
        let boxed = A::modal(
            Stmt::Mutate("x".into(), Expr::Int(0)),
            A::PointsWeak(Expr::var("y"), Expr::var("z")),
        );
        assert_eq!(boxed.to_string(), "[[x] := 0](y ~> z)");
    }

    #[test]
    fn modality_binds_tightest() {
        let a = parse_assertion("[x := 0]y ~> 1 /\\ emp").unwrap();
        assert_eq!(
            a,
            A::and(
                A::modal(
                    Stmt::Assign("x".into(), Expr::Int(0)),
                    A::PointsWeak(Expr::var("y"), Expr::Int(1))
                ),
                A::Emp
            )
        );
    }

    #[test]
    fn precedence_star_tighter_than_wand() {
        let a = parse_assertion("emp * emp -* emp").unwrap();
        assert_eq!(a, A::sep_imp(A::sep_conj(A::Emp, A::Emp), A::Emp));
    }

    #[test]
    fn quantifier_extends_right() {
        let a = parse_assertion("forall x x = 0 -> emp").unwrap();
        assert_eq!(
            a,
            A::forall(
                "x",
                A::imp(A::Bool(BExpr::Eq(Expr::var("x"), Expr::Int(0))), A::Emp)
            )
        );
    }

    #[test]
    fn rejects_reserved_names() {
        assert!(parse_assertion("$x ~> 1").is_err());
        assert!(parse_program("x := $y").is_err());
    }

    #[test]
    fn reports_position() {
        let err = parse_assertion("x ~>\n  @").unwrap_err();
        assert_eq!((err.line, err.col), (2, 3));
    }

    #[test]
    fn round_trips() {
        for text in [
            "true",
            "x ~> -",
            "(x |-> 1) * (y |-> 2)",
            "emp -* (x ~> 0)",
            "[x := cons(0, 1, y)](x ~> 0 /\\ x + 1 ~> 1)",
            "[[x] := 0](y ~> z)",
            "[upd x := e][clr x](y ~> -)",
            "forall x (x ~> - -> exists y (x ~> y))",
            "!(x = y) \\/ x < 2 <-> emp",
            "x != y /\\ (x * 2) + 1 ~> y - 1",
            "[if x = 0 then x := 1 else [y] := x fi](true)",
            "[while x < 2 invariant x ~> - do x := x + 1 od](x ~> -)",
            "[dispose(z)]emp * true",
        ] {
            rt_assert(text);
        }
    }

    #[test]
    fn general_mutation_distinct_from_mutation() {
        assert_eq!(
            parse_program("[x + 1] := 2").unwrap(),
            Stmt::GeneralMutate(Expr::add(Expr::var("x"), Expr::Int(1)), Expr::Int(2))
        );
        assert_eq!(
            parse_program("[x] := 2").unwrap(),
            Stmt::Mutate("x".into(), Expr::Int(2))
        );
    }
}
