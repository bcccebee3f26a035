//! Rewrite formulas with statement modalities into plain separation logic.
//!
//! ```bash
//! cargo run -p dsl --example modality_elimination
//! ```

use dsl::rewrite::{normalize, simplify};
use dsl::syntax::{parse_assertion, resugar};

fn main() {
    let inputs = [
        // Heap update against a points-to atom: a case split on aliasing.
        "[upd x := e](y ~> z)",
        // Allocation binds its own target inside the box.
        "[x := cons(0)](x ~> 0)",
        // Look-up introduces the read value as a fresh witness.
        "[x := [e]](x = 1)",
        // The interplay rules tidy up an update shadowed by a clear.
        "[upd x := 0][clr x](y ~> -)",
    ];
    for text in inputs {
        let p = parse_assertion(text).expect("well-formed input");
        let (nf, trace) = normalize(&p).expect("modalities over basic instructions");
        println!("input:  {p}");
        for step in trace.steps() {
            println!("        {step}");
        }
        println!("normal: {}", resugar(&nf));
        println!("tidied: {}", resugar(&simplify(&nf)));
        println!();
    }
}
