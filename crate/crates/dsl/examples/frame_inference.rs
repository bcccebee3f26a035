//! Compute mutation frames: the residue that lets a local axiom prove any
//! valid mutation triple.
//!
//! For a valid `{p} [x] := e {q}`, the frame is the set of heaps that
//! satisfy `p` once some value is written back into x's cell. Splitting off
//! x's cell against it recovers both halves of the proof:
//! `p -> (x |-> -) * r` and `(x |-> e) * r -> q`.
//!
//! ```bash
//! cargo run -p dsl --release --example frame_inference
//! ```

use dsl::oracle::valid;
use dsl::rewrite::{frame_for_mutation, simplify};
use dsl::semantics::Bounds;
use dsl::syntax::{parse_assertion, parse_program, resugar, Assertion, Expr};
use dsl::vc::sp;

fn main() {
    let bounds = Bounds::new(3, 10);
    for pre_text in ["x |-> 2", "(x |-> 1) * (y |-> 2)", "(x ~> 0) /\\ (y ~> 0)"] {
        let p = parse_assertion(pre_text).unwrap();
        let frame = frame_for_mutation(&p, "x").unwrap();
        println!("frame for {{{pre_text}}} [x] := e:");
        println!("  r = {}", resugar(&simplify(&frame)));

        // Rebuild the strongest valid triple and check both obligations.
        let out = sp(&parse_program("[x] := e").unwrap(), &p).unwrap();
        let r = frame_for_mutation(&out.required_pre, "x").unwrap();
        let ob1 = Assertion::imp(
            out.required_pre.clone(),
            Assertion::sep_conj(Assertion::PointsStrongAny(Expr::var("x")), r.clone()),
        );
        let ob2 = Assertion::imp(
            Assertion::sep_conj(Assertion::PointsStrong(Expr::var("x"), Expr::var("e")), r),
            out.post.clone(),
        );
        println!("  p -> (x |-> -) * r : {}", valid(&ob1, &bounds));
        println!("  (x |-> e) * r -> q : {}", valid(&ob2, &bounds));
        println!();
    }
}
