//! Two very different characterizations of the same weakest precondition.
//!
//! `[[x] := 0](y ~> z)` can be resolved compositionally to a first-order
//! formula, or written classically with `*` and `-*`. Automated SL provers
//! have historically struggled with exactly this pair; the bounded oracle
//! settles it by brute force.
//!
//! ```bash
//! cargo run -p dsl --release --example flagship_equivalence
//! ```

use dsl::oracle::equiv;
use dsl::rewrite::normalize;
use dsl::semantics::Bounds;
use dsl::syntax::{parse_assertion, resugar};

fn main() {
    let boxed = parse_assertion("[[x] := 0](y ~> z)").unwrap();
    let (normal_form, trace) = normalize(&boxed).unwrap();
    println!("input:       {boxed}");
    println!("normal form: {}   ({} rewrite steps)", resugar(&normal_form), trace.len());

    let first_order =
        parse_assertion("(x ~> -) /\\ ((y = x /\\ z = 0) \\/ (y != x /\\ y ~> z))").unwrap();
    let classical = parse_assertion("(x |-> -) * ((x |-> 0) -* (y ~> z))").unwrap();

    // x, y, z want pairwise-distinct values, so give the universe four.
    let bounds = Bounds::new(4, 10);
    println!("vs first-order form: {}", equiv(&normal_form, &first_order, &bounds));
    println!("vs classical form:   {}", equiv(&normal_form, &classical, &bounds));
}
