//! Generate weakest preconditions for full programs, loops included.
//!
//! ```bash
//! cargo run -p dsl --example weakest_preconditions
//! ```

use dsl::syntax::{parse_assertion, parse_program, resugar};
use dsl::vc::wp;

fn main() {
    // Allocate-then-dispose: the combined effect is a nondeterministic
    // choice of x, so the precondition quantifies over every fresh location.
    let random_assign = parse_program("x := cons(0); dispose(x)").unwrap();
    let post = parse_assertion("y ~> 1").unwrap();
    let (pre, _) = wp(&random_assign, &post).unwrap();
    println!("wp(x := cons(0); dispose(x), y ~> 1)");
    println!("  = {}", resugar(&pre));
    println!();

    // Conditionals split on the guard.
    let branchy = parse_program("if x = 0 then [y] := 1 else y := 0 fi").unwrap();
    let (pre, _) = wp(&branchy, &parse_assertion("y ~> 1 \\/ y = 0").unwrap()).unwrap();
    println!("wp(if x = 0 then [y] := 1 else y := 0 fi, y ~> 1 \\/ y = 0)");
    println!("  = {}", resugar(&pre));
    println!();

    // Loops contribute proof obligations instead of unfolding.
    let looped = parse_program(
        "while 0 < n invariant (x ~> 0) do n := n - 1 od",
    )
    .unwrap();
    let (pre, vcs) = wp(&looped, &parse_assertion("x ~> 0").unwrap()).unwrap();
    println!("wp(while 0 < n invariant (x ~> 0) do n := n - 1 od, x ~> 0)");
    println!("  = {}", resugar(&pre));
    for vc in vcs {
        println!("  vc [{}]: {}", vc.label, resugar(&vc.formula));
    }
}
