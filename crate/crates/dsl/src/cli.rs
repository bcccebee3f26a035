//! Command-line front end: batch normalization, wp/sp generation,
//! equivalence checking, triple verification, and program execution.
//!
//! Exit codes: 0 for success / Valid / Verified, 1 for Invalid / Refuted,
//! 2 for Inconclusive, 3 for usage or parse errors.

use std::path::Path;

use clap::{Args, Parser, Subcommand};

use crate::oracle::{self, counterexample_json, Verdict};
use crate::rewrite::{self, Strategy, Trace};
use crate::semantics::{
    exec, parse_heap_literal, parse_store_literal, Bounds, Heap, Outcome, Store,
};
use crate::syntax::{parse_assertion, parse_program, resugar, Assertion, Stmt};
use crate::vc::{self, Triple, Vc};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// Verification toolkit for heap-manipulating programs: modality
/// elimination, weakest preconditions, and a bounded-model oracle.
#[derive(Debug, Parser)]
#[command(name = "dsl", version, about)]
pub struct Invocation {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Universe size B: locations and values range over 0..B-1.
    #[arg(short = 'b', long = "bound", default_value_t = 3)]
    pub bound: i64,
    /// Maximum loop iterations per loop entry.
    #[arg(long, default_value_t = 100)]
    pub fuel: u32,
}

impl BoundArgs {
    fn bounds(&self) -> Result<Bounds, String> {
        if self.bound < 1 {
            return Err("bound must be at least 1".into());
        }
        Ok(Bounds::new(self.bound, self.fuel))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rewrite a formula to its modality-free normal form.
    Normalize {
        /// Assertion text or path to a formula file.
        input: String,
        /// Print one line per rewrite step.
        #[arg(long)]
        trace: bool,
        /// Redex selection order.
        #[arg(long, value_parser = ["innermost", "outermost"], default_value = "innermost")]
        strategy: String,
        #[arg(long)]
        json: bool,
    },
    /// Weakest precondition of a program for a postcondition.
    Wp {
        /// Program text or file.
        program: String,
        /// Postcondition text or file.
        post: String,
        #[arg(long)]
        json: bool,
    },
    /// Strongest postcondition of a basic instruction from a precondition.
    Sp {
        /// Basic instruction text or file.
        program: String,
        /// Precondition text or file.
        pre: String,
        /// Use the classical axioms built from * and -* instead.
        #[arg(long)]
        global: bool,
        #[arg(long)]
        json: bool,
    },
    /// Bounded equivalence of two formulas.
    Equiv {
        left: String,
        right: String,
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long)]
        json: bool,
    },
    /// Verify an annotated program file (requires:/ensures: framing).
    Verify {
        input: String,
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long)]
        json: bool,
    },
    /// Run a program from an initial state and print every outcome.
    Exec {
        /// Program text or file.
        program: String,
        /// Initial heap, as heap{loc:val, ...} or JSON {"loc": val}.
        #[arg(default_value = "heap{}")]
        heap: String,
        /// Initial store, as store{x:val, ...} or JSON {"x": val}.
        #[arg(default_value = "store{}")]
        store: String,
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long)]
        json: bool,
    },
}

/// Runs an invocation, writing to the given sinks; returns the exit code.
pub fn run(inv: &Invocation, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32 {
    match run_inner(inv, out) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

// Inline input unless the string names an existing file.
fn load(input: &str) -> Result<String, String> {
    if Path::new(input).exists() {
        std::fs::read_to_string(input).map_err(|e| format!("cannot read `{input}`: {e}"))
    } else {
        Ok(input.to_string())
    }
}

fn assertion_arg(input: &str) -> Result<Assertion, String> {
    parse_assertion(load(input)?.trim()).map_err(|e| e.to_string())
}

fn program_arg(input: &str) -> Result<Stmt, String> {
    parse_program(load(input)?.trim()).map_err(|e| e.to_string())
}

fn trace_json(trace: &Trace) -> serde_json::Value {
    trace
        .steps()
        .iter()
        .map(|s| {
            serde_json::json!({
                "rule": s.rule.to_string(),
                "path": s.path,
                "formula": s.formula.to_string(),
            })
        })
        .collect::<Vec<_>>()
        .into()
}

fn state_json(h: &Heap, s: &Store) -> serde_json::Value {
    counterexample_json(h, s, None)
}

fn run_inner(inv: &Invocation, out: &mut dyn std::io::Write) -> Result<i32, String> {
    let w = |out: &mut dyn std::io::Write, line: String| -> Result<(), String> {
        writeln!(out, "{line}").map_err(|e| e.to_string())
    };
    match &inv.command {
        Command::Normalize {
            input,
            trace,
            strategy,
            json,
        } => {
            let p = assertion_arg(input)?;
            let strat = if strategy == "outermost" {
                Strategy::Outermost
            } else {
                Strategy::Innermost
            };
            let (nf, steps) = rewrite::normalize_with(&p, strat, rewrite::DEFAULT_STEP_CAP)
                .map_err(|e| e.to_string())?;
            let nf = resugar(&nf);
            if *json {
                let mut obj = serde_json::json!({
                    "input": p.to_string(),
                    "normal_form": nf.to_string(),
                });
                if *trace {
                    obj["steps"] = trace_json(&steps);
                }
                w(out, obj.to_string())?;
            } else {
                if *trace {
                    for step in steps.steps() {
                        w(out, step.to_string())?;
                    }
                }
                w(out, nf.to_string())?;
            }
            Ok(EXIT_OK)
        }
        Command::Wp { program, post, json } => {
            let prog = program_arg(program)?;
            let q = assertion_arg(post)?;
            let (pre, vcs) = vc::wp(&prog, &q).map_err(|e| e.to_string())?;
            let pre = resugar(&pre);
            let vcs: Vec<Vc> = vcs
                .into_iter()
                .map(|v| Vc {
                    label: v.label,
                    formula: resugar(&v.formula),
                })
                .collect();
            if *json {
                let obj = serde_json::json!({
                    "precondition": pre.to_string(),
                    "vcs": vcs
                        .iter()
                        .map(|vc| serde_json::json!({
                            "label": vc.label,
                            "formula": vc.formula.to_string(),
                        }))
                        .collect::<Vec<_>>(),
                });
                w(out, obj.to_string())?;
            } else {
                w(out, format!("wp: {pre}"))?;
                for Vc { label, formula } in &vcs {
                    w(out, format!("vc [{label}]: {formula}"))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Sp {
            program,
            pre,
            global,
            json,
        } => {
            let prog = program_arg(program)?;
            let p = assertion_arg(pre)?;
            let result = if *global {
                vc::sp_global(&prog, &p)
            } else {
                vc::sp(&prog, &p)
            }
            .map_err(|e| e.to_string())?;
            let (required_pre, post) = (resugar(&result.required_pre), resugar(&result.post));
            if *json {
                let obj = serde_json::json!({
                    "required_pre": required_pre.to_string(),
                    "post": post.to_string(),
                });
                w(out, obj.to_string())?;
            } else {
                w(out, format!("requires: {required_pre}"))?;
                w(out, format!("sp: {post}"))?;
            }
            Ok(EXIT_OK)
        }
        Command::Equiv {
            left,
            right,
            bounds,
            json,
        } => {
            let b = bounds.bounds()?;
            let p = assertion_arg(left)?;
            let q = assertion_arg(right)?;
            let verdict = oracle::equiv(&p, &q, &b);
            report_verdict(&verdict, b.universe_size(), *json, out)
        }
        Command::Verify { input, bounds, json } => {
            let b = bounds.bounds()?;
            let text = load(input)?;
            let triple = parse_annotated_program(&text)?;
            let outcomes = vc::discharge_triple(&triple, &b).map_err(|e| e.to_string())?;
            let mut code = EXIT_OK;
            let mut overall = "Verified";
            let mut refutation: Option<(String, Heap, Store)> = None;
            for (vc, verdict) in &outcomes {
                match verdict {
                    Verdict::Valid => {}
                    Verdict::Invalid { heap, store } => {
                        if refutation.is_none() {
                            refutation = Some((vc.label.clone(), heap.clone(), store.clone()));
                        }
                        overall = "Refuted";
                        code = EXIT_INVALID;
                    }
                    Verdict::Inconclusive(_) => {
                        if code == EXIT_OK {
                            overall = "Inconclusive";
                            code = EXIT_INCONCLUSIVE;
                        }
                    }
                }
            }
            if *json {
                let obj = serde_json::json!({
                    "verdict": overall,
                    "bound": b.universe_size(),
                    "vcs": outcomes
                        .iter()
                        .map(|(vc, verdict)| {
                            let mut o = serde_json::json!({
                                "label": vc.label,
                                "formula": resugar(&vc.formula).to_string(),
                                "verdict": verdict_name(verdict),
                            });
                            if let Verdict::Invalid { heap, store } = verdict {
                                o["counterexample"] =
                                    counterexample_json(heap, store, Some(&vc.label));
                            }
                            o
                        })
                        .collect::<Vec<_>>(),
                });
                w(out, obj.to_string())?;
            } else {
                for (vc, verdict) in &outcomes {
                    w(out, format!("vc [{}]: {verdict}", vc.label))?;
                }
                match &refutation {
                    Some((label, heap, store)) => w(
                        out,
                        format!("{overall} (bounded B={}): {label} fails at {heap} {store}",
                            b.universe_size()),
                    )?,
                    None => w(out, format!("{overall} (bounded B={})", b.universe_size()))?,
                }
            }
            Ok(code)
        }
        Command::Exec {
            program,
            heap,
            store,
            bounds,
            json,
        } => {
            let b = bounds.bounds()?;
            let prog = program_arg(program)?;
            let h = parse_heap_arg(heap)?;
            let s = parse_store_arg(store)?;
            let outcomes = exec(&prog, &h, &s, &b).map_err(|e| e.to_string())?;
            if *json {
                let arr: Vec<serde_json::Value> = outcomes
                    .iter()
                    .map(|o| match o {
                        Outcome::State(h, s) => state_json(h, s),
                        Outcome::Fail => serde_json::json!("fail"),
                        Outcome::FuelExhausted => serde_json::json!("fuel_exhausted"),
                    })
                    .collect();
                w(out, serde_json::json!({ "outcomes": arr }).to_string())?;
            } else {
                for o in &outcomes {
                    w(out, o.to_string())?;
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Valid => "valid",
        Verdict::Invalid { .. } => "invalid",
        Verdict::Inconclusive(_) => "inconclusive",
    }
}

fn report_verdict(
    verdict: &Verdict,
    bound: i64,
    json: bool,
    out: &mut dyn std::io::Write,
) -> Result<i32, String> {
    let w = |out: &mut dyn std::io::Write, line: String| -> Result<(), String> {
        writeln!(out, "{line}").map_err(|e| e.to_string())
    };
    if json {
        let mut obj = serde_json::json!({
            "verdict": verdict_name(verdict),
            "bound": bound,
        });
        if let Verdict::Invalid { heap, store } = verdict {
            obj["counterexample"] = counterexample_json(heap, store, None);
        }
        w(out, obj.to_string())?;
    } else {
        match verdict {
            Verdict::Valid => w(out, format!("Valid (bounded B={bound})"))?,
            Verdict::Invalid { heap, store } => {
                w(out, format!("Invalid (bounded B={bound}): {heap} {store}"))?
            }
            Verdict::Inconclusive(reason) => {
                w(out, format!("Inconclusive (bounded B={bound}): {reason}"))?
            }
        }
    }
    Ok(match verdict {
        Verdict::Valid => EXIT_OK,
        Verdict::Invalid { .. } => EXIT_INVALID,
        Verdict::Inconclusive(_) => EXIT_INCONCLUSIVE,
    })
}

fn json_object(text: &str, kind: &str) -> Result<serde_json::Map<String, serde_json::Value>, String> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| format!("cannot parse {kind} `{text}`: {e}"))?;
    match v {
        serde_json::Value::Object(obj) => Ok(obj),
        _ => Err(format!("{kind} JSON must be an object")),
    }
}

// Accepts the fixture literal `heap{1:2}` or its JSON mirror `{"1": 2}`.
fn parse_heap_arg(text: &str) -> Result<Heap, String> {
    let loaded = load(text)?;
    let t = loaded.trim();
    if t.starts_with("heap") {
        return parse_heap_literal(t);
    }
    let mut pairs = Vec::new();
    for (k, v) in json_object(t, "heap")? {
        let loc: i64 = k.parse().map_err(|_| format!("bad location `{k}`"))?;
        let val = v.as_i64().ok_or_else(|| format!("bad value for `{k}`"))?;
        pairs.push((loc, val));
    }
    Ok(Heap::from_pairs(pairs))
}

fn parse_store_arg(text: &str) -> Result<Store, String> {
    let loaded = load(text)?;
    let t = loaded.trim();
    if t.starts_with("store") {
        return parse_store_literal(t);
    }
    let mut s = Store::new();
    for (k, v) in json_object(t, "store")? {
        let val = v.as_i64().ok_or_else(|| format!("bad value for `{k}`"))?;
        s = s.set(&k, val);
    }
    Ok(s)
}

/// Parses the annotated-program file format: optional `#` comment lines, a
/// `requires:` line, the program text, and an `ensures:` line.
pub fn parse_annotated_program(text: &str) -> Result<Triple, String> {
    let mut requires: Option<String> = None;
    let mut ensures: Option<String> = None;
    let mut body = String::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.starts_with('#') || trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("requires:") {
            if requires.replace(rest.to_string()).is_some() {
                return Err("duplicate `requires:` line".into());
            }
        } else if let Some(rest) = trimmed.strip_prefix("ensures:") {
            if ensures.replace(rest.to_string()).is_some() {
                return Err("duplicate `ensures:` line".into());
            }
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let pre = requires.ok_or("missing `requires:` line")?;
    let post = ensures.ok_or("missing `ensures:` line")?;
    Ok(Triple {
        pre: parse_assertion(pre.trim()).map_err(|e| format!("in requires: {e}"))?,
        prog: parse_program(body.trim()).map_err(|e| e.to_string())?,
        post: parse_assertion(post.trim()).map_err(|e| format!("in ensures: {e}"))?,
    })
}
