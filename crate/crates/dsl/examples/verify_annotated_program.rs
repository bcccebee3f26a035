//! Verify the annotated programs shipped under `examples/programs/`.
//!
//! A program file carries a `requires:` line, the program text, and an
//! `ensures:` line; `#` starts a comment. Verification computes the weakest
//! precondition, adds one obligation per loop, and discharges everything
//! with the bounded oracle.
//!
//! ```bash
//! cargo run -p dsl --example verify_annotated_program
//! ```

use dsl::cli::parse_annotated_program;
use dsl::semantics::Bounds;
use dsl::vc::{discharge_triple, verify_triple};

fn main() {
    let bounds = Bounds::new(3, 10);
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/programs");
    for name in ["random_assign.dsl", "local_mutation.dsl", "swap.dsl"] {
        let text = std::fs::read_to_string(dir.join(name)).expect("read program file");
        let triple = parse_annotated_program(&text).expect("well-formed annotations");
        println!("{name}: {{{}}} {} {{{}}}", triple.pre, triple.prog, triple.post);
        for (vc, verdict) in discharge_triple(&triple, &bounds).unwrap() {
            println!("  vc [{}]: {verdict}", vc.label);
        }
        println!("  => {}", verify_triple(&triple, &bounds).unwrap());
        println!();
    }
}
