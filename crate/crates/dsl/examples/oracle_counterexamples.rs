//! Bounded validity and equivalence checking with counterexample replay.
//!
//! ```bash
//! cargo run -p dsl --example oracle_counterexamples
//! ```

use dsl::oracle::{equiv, triple_valid, valid, Verdict};
use dsl::semantics::{sat, Bounds};
use dsl::syntax::{parse_assertion, parse_program};
use dsl::vc::Triple;

fn main() {
    let bounds = Bounds::new(3, 10);

    // A wand truism and a near-miss.
    for text in ["(y ~> 1) -* (y ~> 1)", "(y ~> 1) -* (y ~> 0)"] {
        let p = parse_assertion(text).unwrap();
        let verdict = valid(&p, &bounds);
        println!("valid({text}) = {verdict}");
        if let Verdict::Invalid { heap, store } = &verdict {
            // Counterexamples replay: the model really falsifies the formula.
            assert_eq!(sat(heap, store, &p, &bounds), Ok(false));
            println!("  replayed: {heap} {store} falsifies it");
        }
    }
    println!();

    // Strong and weak points-to differ precisely on larger heaps.
    let verdict = equiv(
        &parse_assertion("x |-> 0").unwrap(),
        &parse_assertion("x ~> 0").unwrap(),
        &bounds,
    );
    println!("equiv(x |-> 0, x ~> 0) = {verdict}");
    println!();

    // Triple validity straight from the interpreter, no wp involved.
    let t = Triple {
        pre: parse_assertion("x ~> -").unwrap(),
        prog: parse_program("dispose(x); x := cons(0)").unwrap(),
        post: parse_assertion("x ~> 0").unwrap(),
    };
    println!(
        "{{x ~> -}} dispose(x); x := cons(0) {{x ~> 0}} = {}",
        triple_valid(&t, &bounds)
    );
}
