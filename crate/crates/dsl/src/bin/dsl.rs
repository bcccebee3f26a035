use clap::Parser;
use dsl::cli::{run, Invocation};

fn main() {
    let inv = Invocation::parse();
    let code = run(&inv, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
