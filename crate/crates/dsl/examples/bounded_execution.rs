//! Run programs over bounded heaps: nondeterministic allocation, explicit
//! failure, and fuel-limited loops.
//!
//! ```bash
//! cargo run -p dsl --example bounded_execution
//! ```

use dsl::semantics::{exec, parse_heap_literal, parse_store_literal, Bounds};
use dsl::syntax::parse_program;

fn main() {
    let bounds = Bounds::new(3, 8);
    let runs = [
        // Allocation picks any free cell: one outcome per choice.
        ("x := cons(1)", "heap{0:0}", "store{}"),
        // Reading through a dangling pointer fails.
        ("y := [x]", "heap{}", "store{x:1}"),
        // The pseudo instructions never fail, even off the domain.
        ("upd x := 2; clr y", "heap{}", "store{x:1, y:1}"),
        // Loops unfold until the guard drops or the fuel runs out.
        ("while 0 < n do n := n - 1; x := cons(0); dispose(x) od", "heap{}", "store{n:2}"),
    ];
    for (prog, heap, store) in runs {
        let stmt = parse_program(prog).unwrap();
        let h = parse_heap_literal(heap).unwrap();
        let s = parse_store_literal(store).unwrap();
        println!("exec `{prog}` from {h} {s}:");
        match exec(&stmt, &h, &s, &bounds) {
            Ok(outcomes) => {
                for o in outcomes {
                    println!("  {o}");
                }
            }
            Err(e) => println!("  error: {e}"),
        }
        println!();
    }
}
