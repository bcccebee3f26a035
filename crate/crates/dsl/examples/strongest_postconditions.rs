//! Forward reasoning: strongest postconditions of the basic instructions.
//!
//! The forward axioms lean on the heap-update and heap-clear modalities and
//! normalize to first-order formulas with an explicit account of aliasing;
//! the classical global axioms express the same states through `*` and `-*`.
//!
//! ```bash
//! cargo run -p dsl --release --example strongest_postconditions
//! ```

use dsl::oracle::equiv;
use dsl::semantics::Bounds;
use dsl::syntax::{parse_assertion, parse_program, resugar};
use dsl::vc::{sp, sp_global};

fn main() {
    let bounds = Bounds::new(3, 10);
    let cases = [
        ("x := cons(1)", "y ~> 0"),
        ("[x] := 2", "(x ~> 0) * (y ~> 1)"),
        ("dispose(x)", "x |-> 0"),
        ("x := [y]", "y ~> 1"),
    ];
    for (instr, pre) in cases {
        let stmt = parse_program(instr).unwrap();
        let p = parse_assertion(pre).unwrap();
        let fwd = sp(&stmt, &p).unwrap();
        println!("{{{pre}}} {instr} {{...}}");
        println!("  requires: {}", resugar(&fwd.required_pre));
        println!("  forward:  {}", resugar(&fwd.post));
        match sp_global(&stmt, &p) {
            Ok(global) => {
                println!("  global:   {}", global.post);
                println!(
                    "  agree within bounds: {}",
                    equiv(&fwd.post, &global.post, &bounds)
                );
            }
            Err(e) => println!("  global:   inapplicable ({e})"),
        }
        println!();
    }
}
