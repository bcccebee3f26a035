//! Acceptance suite: one test per criterion, each printing a pass line with
//! its measurements (run with `--nocapture` to see them). All checks run at
//! desk scale (B <= 4, at most three free variables per formula).

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::Gen;
use dsl::oracle::{enumerate_models, equiv, triple_valid, ModelSpace, Verdict};
use dsl::rewrite::{normalize, normalize_with, Strategy, DEFAULT_STEP_CAP};
use dsl::semantics::{exec, sat, Bounds, ExecError, Heap, Outcome, SatError, Store};
use dsl::syntax::{desugar, parse_assertion, Assertion, Expr, Stmt};
use dsl::vc::{sp, sp_global, wp, Triple};
use rayon::prelude::*;

const INSTRUCTION_KINDS: [&str; 7] = [
    "assign", "lookup", "mutate", "cons", "dispose", "upd", "clr",
];

// The criteria carry their own runtime budgets and share one rayon pool, so
// they must not run concurrently with each other.
static SUITE: std::sync::Mutex<()> = std::sync::Mutex::new(());

fn exclusive() -> std::sync::MutexGuard<'static, ()> {
    SUITE.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn b3() -> Bounds {
    Bounds::new(3, 20)
}

fn xyz() -> BTreeSet<String> {
    common::VARS.iter().map(|v| v.to_string()).collect()
}

fn assert_equiv(bounds: &Bounds, left: &str, right: &str) {
    let p = parse_assertion(left).unwrap();
    let q = parse_assertion(right).unwrap();
    let (nf, _) = normalize(&p).unwrap();
    assert!(!nf.contains_modal(), "normalize left a modality in {nf}");
    match equiv(&nf, &q, bounds) {
        Verdict::Valid => {}
        other => panic!("normalize({left}) !~ {right}: {other} (normal form {nf})"),
    }
}

fn pass(criterion: &str, elapsed: Duration, detail: &str) {
    println!("[acceptance] {criterion}: PASS in {elapsed:.2?} ({detail})");
}

// Criterion 1: the worked heap-update and heap-clear examples reproduce,
// as exact bounded-equivalence verdicts at B=3, within 5 seconds.
#[test]
fn criterion_1_worked_examples() {
    let _guard = exclusive();
    let start = Instant::now();
    let b = b3();
    assert_equiv(&b, "[upd x := e](y ~> -)", "y != x -> y ~> -");
    assert_equiv(&b, "[upd x := e](y |-> -)", "y = x /\\ (emp \\/ x |-> -)");
    assert_equiv(&b, "[upd x := e](true * (x |-> -))", "true");
    assert_equiv(&b, "[upd x := 0]((y ~> 1) -* (y ~> 1))", "true");
    assert_equiv(
        &b,
        "[clr x](forall y forall z !(y ~> z))",
        "forall y forall z (y = x \\/ !(y ~> z))",
    );
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    pass("criterion 1 (worked examples)", elapsed, "5 equivalences at B=3");
}

// Criterion 2: the flagship mutation equivalence at B=4. The normal form of
// [[x] := 0](y ~> z) matches both the first-order characterization and the
// classical *, -* one, within 60 seconds.
#[test]
fn criterion_2_flagship_equivalence() {
    let _guard = exclusive();
    let start = Instant::now();
    let b = Bounds::new(4, 20);
    let (nf, _) = normalize(&parse_assertion("[[x] := 0](y ~> z)").unwrap()).unwrap();
    let first_order =
        parse_assertion("(x ~> -) /\\ ((y = x /\\ z = 0) \\/ (y != x /\\ y ~> z))").unwrap();
    let classical = parse_assertion("(x |-> -) * ((x |-> 0) -* (y ~> z))").unwrap();
    assert!(equiv(&nf, &first_order, &b).is_valid(), "first-order form");
    assert!(equiv(&nf, &classical, &b).is_valid(), "classical form");
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    pass(
        "criterion 2 (flagship equivalence)",
        elapsed,
        "both characterizations at B=4",
    );
}

// Shared driver for criterion 3: soundness of elimination for one
// single-instruction modality kind. Returns the number of models skipped
// because allocation had no room (the modal side is undefined there).
fn elimination_round(bounds: &Bounds, stmt: &Stmt, p: &Assertion) -> usize {
    let modal = Assertion::modal(stmt.clone(), desugar(p));
    let (nf, _) = normalize(&modal).unwrap();
    assert!(!nf.contains_modal());
    let mut vars = modal.free_vars();
    vars.extend(nf.free_vars());
    let mut skipped = 0;
    for (h, s) in enumerate_models(&vars, bounds) {
        let rhs = sat(&h, &s, &nf, bounds).unwrap();
        match sat(&h, &s, &modal, bounds) {
            Ok(lhs) => assert_eq!(
                lhs, rhs,
                "elimination unsound for [{stmt}]({p}) at {h} {s}"
            ),
            Err(SatError::Exec(ExecError::UniverseExhausted)) => {
                assert!(
                    matches!(stmt, Stmt::Alloc(..)),
                    "unexpected exhaustion for {stmt}"
                );
                skipped += 1;
            }
            Err(other) => panic!("unexpected error {other} for [{stmt}]({p})"),
        }
    }
    skipped
}

// Criterion 3: >= 1000 random assertions under each of the seven
// single-instruction modalities; satisfaction of the normal form matches the
// direct modal semantics on every model at B=3, zero mismatches.
#[test]
fn criterion_3_elimination_soundness() {
    let _guard = exclusive();
    let start = Instant::now();
    let b = b3();
    const PER_KIND: usize = 1000;
    let mut total_skipped = 0;
    for (kind, kind_name) in INSTRUCTION_KINDS.iter().enumerate() {
        let mut gen = Gen::new(0xE50 + kind as u64, b.universe_size());
        let cases: Vec<(Stmt, Assertion)> = (0..PER_KIND)
            .map(|_| (gen.instruction_of_kind(kind), gen.assertion(3)))
            .collect();
        let skipped: usize = cases
            .par_iter()
            .map(|(stmt, p)| elimination_round(&b, stmt, p))
            .sum();
        if kind_name != &"cons" {
            assert_eq!(skipped, 0, "non-allocating {kind_name} skipped models");
        }
        total_skipped += skipped;
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(600), "took {elapsed:?}");
    pass(
        "criterion 3 (elimination soundness)",
        elapsed,
        &format!(
            "7 x {PER_KIND} formulas, all models at B=3; {total_skipped} allocation-exhausted models skipped"
        ),
    );
}

// Criterion 4: termination within the step cap on the full suite-3 corpus,
// and innermost vs outermost normal forms bounded-equivalent on 500 samples.
#[test]
fn criterion_4_termination_and_confluence() {
    let _guard = exclusive();
    let start = Instant::now();
    let b = b3();
    // Same corpus as criterion 3; every input must normalize within the cap.
    for kind in 0..INSTRUCTION_KINDS.len() {
        let mut gen = Gen::new(0xE50 + kind as u64, b.universe_size());
        for _ in 0..1000 {
            let stmt = gen.instruction_of_kind(kind);
            let p = gen.assertion(3);
            normalize(&Assertion::modal(stmt, p)).expect("within step cap");
        }
    }
    // Confluence samples.
    let mut gen = Gen::new(0xC0F, b.universe_size());
    let cases: Vec<Assertion> = (0..500)
        .map(|i| Assertion::modal(gen.instruction_of_kind(i % 7), gen.assertion(3)))
        .collect();
    cases.par_iter().for_each(|p| {
        let inner = normalize_with(p, Strategy::Innermost, DEFAULT_STEP_CAP).unwrap().0;
        let outer = normalize_with(p, Strategy::Outermost, DEFAULT_STEP_CAP).unwrap().0;
        assert!(
            equiv(&inner, &outer, &b).is_valid(),
            "strategies diverge on {p}"
        );
    });
    let elapsed = start.elapsed();
    pass(
        "criterion 4 (termination and confluence)",
        elapsed,
        "7000 normalizations capped; 500 innermost/outermost agreements at B=3",
    );
}

// Criterion 5: for random loop-free programs, the generated weakest
// precondition coincides with the direct execution semantics on every model,
// including failure propagation.
#[test]
fn criterion_5_wp_exactness() {
    let _guard = exclusive();
    let start = Instant::now();
    let b = b3();
    let mut gen = Gen::new(0x3B, b.universe_size());
    let cases: Vec<(Stmt, Assertion)> = (0..500)
        .map(|i| (gen.program(1 + i % 3), gen.assertion(3)))
        .collect();
    let space = ModelSpace::new(&xyz(), &b);
    let skipped: usize = cases
        .par_iter()
        .map(|(prog, post)| {
            let (pre, vcs) = wp(prog, post).unwrap();
            assert!(vcs.is_empty(), "loop-free program produced side conditions");
            assert!(!pre.contains_modal());
            let post_core = desugar(post);
            let mut skipped = 0;
            for (h, s) in space.iter() {
                let lhs = sat(&h, &s, &pre, &b).unwrap();
                let rhs = match exec(prog, &h, &s, &b) {
                    Err(ExecError::UniverseExhausted) => {
                        skipped += 1;
                        continue;
                    }
                    Err(other) => panic!("unexpected exec error {other} for {prog}"),
                    Ok(outcomes) => {
                        !outcomes.contains(&Outcome::Fail)
                            && outcomes.iter().all(|o| match o {
                                Outcome::State(h2, s2) => {
                                    sat(h2, s2, &post_core, &b).unwrap()
                                }
                                Outcome::Fail => false,
                                Outcome::FuelExhausted => {
                                    panic!("fuel exhausted in loop-free program")
                                }
                            })
                    }
                };
                assert_eq!(
                    lhs, rhs,
                    "wp mismatch for {{{pre}}} {prog} {{{post}}} at {h} {s}"
                );
            }
            skipped
        })
        .sum();
    let elapsed = start.elapsed();
    pass(
        "criterion 5 (wp exactness)",
        elapsed,
        &format!("500 loop-free programs, all models at B=3; {skipped} allocation-exhausted models skipped"),
    );
}

// Criterion 6 helper: soundness and strongest-ness of one forward axiom.
fn sp_round(bounds: &Bounds, stmt: &Stmt, p: &Assertion) {
    let out = sp(stmt, p).unwrap();
    assert!(!out.required_pre.contains_modal());
    assert!(!out.post.contains_modal());

    // Soundness: the triple validates against the execution oracle.
    let t = Triple {
        pre: out.required_pre.clone(),
        prog: stmt.clone(),
        post: out.post.clone(),
    };
    match triple_valid(&t, bounds) {
        Verdict::Valid => {}
        other => panic!(
            "sp unsound for {stmt} from {p}: {other} (pre {}, post {})",
            out.required_pre, out.post
        ),
    }

    // Strongest-ness: every model of the post is reachable from some model
    // of the strengthened pre.
    let mut vars = out.required_pre.free_vars();
    vars.extend(out.post.free_vars());
    vars.extend(stmt.vars());
    let mut reachable: BTreeSet<(Heap, Store)> = BTreeSet::new();
    for (h, s) in enumerate_models(&vars, bounds) {
        if !sat(&h, &s, &out.required_pre, bounds).unwrap() {
            continue;
        }
        match exec(stmt, &h, &s, bounds) {
            Ok(outcomes) => {
                for o in outcomes {
                    match o {
                        Outcome::State(h2, s2) => {
                            reachable.insert((h2, s2));
                        }
                        Outcome::Fail => panic!("sp pre admits failure for {stmt} from {p}"),
                        Outcome::FuelExhausted => unreachable!("basic instruction"),
                    }
                }
            }
            Err(ExecError::UniverseExhausted) => {}
            Err(other) => panic!("unexpected exec error {other}"),
        }
    }
    for (h, s) in enumerate_models(&vars, bounds) {
        if sat(&h, &s, &out.post, bounds).unwrap() {
            assert!(
                reachable.contains(&(h.clone(), s.clone())),
                "post model {h} {s} unreachable for {stmt} from {p} (post {})",
                out.post
            );
        }
    }
}

// Criterion 6: the five forward axioms are sound and strongest on 200 random
// preconditions each, and match the classical global axioms wherever those
// apply.
#[test]
fn criterion_6_strongest_postconditions() {
    let _guard = exclusive();
    let start = Instant::now();
    let b = b3();
    let axiom_of = |gen: &mut Gen, axiom: usize| -> Stmt {
        let e = gen.expr();
        match axiom {
            0 => Stmt::Assign("x".into(), e),
            1 => Stmt::Lookup("x".into(), e),
            2 => Stmt::Mutate("x".into(), e),
            3 => {
                // The axiom form requires the target not occur in e.
                let e = if e == Expr::Var("x".into()) { Expr::Int(0) } else { e };
                Stmt::Alloc("x".into(), e)
            }
            _ => Stmt::Dispose("x".into()),
        }
    };
    for axiom in 0..5 {
        let mut gen = Gen::new(0x590 + axiom as u64, b.universe_size());
        let cases: Vec<(Stmt, Assertion)> = (0..200)
            .map(|_| (axiom_of(&mut gen, axiom), gen.assertion(2)))
            .collect();
        cases.par_iter().for_each(|(stmt, p)| sp_round(&b, stmt, p));
    }
    // The generalized allocation route (target occurs in the block
    // expression) goes through the save-old-value simulation.
    {
        let mut gen = Gen::new(0x599, b.universe_size());
        let cases: Vec<(Stmt, Assertion)> = (0..20)
            .map(|_| (Stmt::Alloc("x".into(), Expr::Var("x".into())), gen.assertion(2)))
            .collect();
        cases.par_iter().for_each(|(stmt, p)| sp_round(&b, stmt, p));
    }

    // Forward axioms agree with the classical global ones where the latter
    // apply: always for assign/mutate/dispose; for lookup and allocation the
    // assigned variable must not occur in the precondition either, so those
    // preconditions range over y and z only.
    for axiom in 0..5 {
        let mut gen = Gen::new(0x5f0 + axiom as u64, b.universe_size());
        let cases: Vec<(Stmt, Assertion)> = (0..200)
            .map(|_| {
                let p = gen.assertion(2);
                match axiom {
                    0 => (Stmt::Assign("x".into(), gen.expr()), p),
                    1 | 3 => {
                        // x out of both e and p.
                        let e = match gen.expr() {
                            Expr::Var(v) if v == "x" => Expr::Var("y".into()),
                            e => e,
                        };
                        let p = crate::rename_away_x(&p);
                        if axiom == 1 {
                            (Stmt::Lookup("x".into(), e), p)
                        } else {
                            (Stmt::Alloc("x".into(), e), p)
                        }
                    }
                    2 => {
                        let e = match gen.expr() {
                            Expr::Var(v) if v == "x" => Expr::Var("z".into()),
                            e => e,
                        };
                        (Stmt::Mutate("x".into(), e), p)
                    }
                    _ => (Stmt::Dispose("x".into()), p),
                }
            })
            .collect();
        cases.par_iter().for_each(|(stmt, p)| {
            let forward = sp(stmt, p).unwrap();
            let global = sp_global(stmt, p).unwrap();
            assert!(
                equiv(&forward.post, &global.post, &b).is_valid(),
                "forward and global posts disagree for {stmt} from {p}: {} vs {}",
                forward.post,
                global.post
            );
        });
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(600), "took {elapsed:?}");
    pass(
        "criterion 6 (strongest postconditions)",
        elapsed,
        "5 x 200 soundness+strongest-ness rounds, 5 x 200 global cross-checks at B=3",
    );
}

// Criterion 7: the two flagship triples verify end to end through the CLI,
// and the mutation frame satisfies both proof obligations on 100 random
// valid mutation triples.
#[test]
fn criterion_7_end_to_end_and_frames() {
    let _guard = exclusive();
    let start = Instant::now();
    let b = b3();

    // CLI runs on the shipped annotated programs.
    let bin = env!("CARGO_BIN_EXE_dsl");
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    for name in ["random_assign.dsl", "local_mutation.dsl"] {
        let path = root.join("examples/programs").join(name);
        let out = std::process::Command::new(bin)
            .args(["verify", path.to_str().unwrap(), "-b", "3"])
            .output()
            .expect("run dsl verify");
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert!(
            out.status.code() == Some(0) && stdout.contains("Verified"),
            "{name}: exit {:?}, output {stdout}",
            out.status.code()
        );
    }

    // Frame construction: for valid {p} [x] := e {q}, the frame r satisfies
    // p -> (x |-> -) * r and (x |-> e) * r -> q.
    let mut gen = Gen::new(0xF7A, b.universe_size());
    let cases: Vec<(Assertion, Expr)> = (0..100).map(|_| (gen.assertion(2), gen.expr())).collect();
    cases.par_iter().for_each(|(p0, e)| {
        let stmt = Stmt::Mutate("x".into(), e.clone());
        let out = sp(&stmt, p0).unwrap();
        let pre = out.required_pre;
        let q = out.post;
        let frame = dsl::rewrite::frame_for_mutation(&pre, "x").unwrap();
        assert!(!frame.contains_modal());
        let x_any = Assertion::PointsStrongAny(Expr::Var("x".into()));
        let x_e = Assertion::PointsStrong(Expr::Var("x".into()), e.clone());
        let ob1 = Assertion::imp(pre.clone(), Assertion::sep_conj(x_any, frame.clone()));
        let ob2 = Assertion::imp(Assertion::sep_conj(x_e, frame), q);
        assert!(
            dsl::oracle::valid(&ob1, &b).is_valid(),
            "frame obligation 1 fails for pre {pre}"
        );
        assert!(
            dsl::oracle::valid(&ob2, &b).is_valid(),
            "frame obligation 2 fails for pre {pre}"
        );
    });
    let elapsed = start.elapsed();
    pass(
        "criterion 7 (end-to-end verification and frames)",
        elapsed,
        "2 CLI verifications; 100 frame obligation pairs at B=3",
    );
}

// Criterion 8: the model enumeration count matches (B+1)^B * B^|vars|
// exactly.
#[test]
fn criterion_8_model_counts() {
    let _guard = exclusive();
    let start = Instant::now();
    for b in 1..=3i64 {
        for nvars in 0..=3usize {
            let vars: BTreeSet<String> = common::VARS[..nvars]
                .iter()
                .map(|v| v.to_string())
                .collect();
            let bounds = Bounds::new(b, 5);
            let expected =
                ((b + 1) as u64).pow(b as u32) * (b as u64).pow(nvars as u32);
            let space = ModelSpace::new(&vars, &bounds);
            assert_eq!(space.count(), expected, "count formula at B={b}, vars={nvars}");
            assert_eq!(
                enumerate_models(&vars, &bounds).count() as u64,
                expected,
                "stream length at B={b}, vars={nvars}"
            );
        }
    }
    let elapsed = start.elapsed();
    pass(
        "criterion 8 (model counts)",
        elapsed,
        "(B+1)^B * B^|vars| for B in 1..=3, vars in 0..=3",
    );
}

// Renames x to y in a generated precondition so the classical axioms' free
// occurrence side condition holds. Generated formulas never bind x, so a
// plain parse/print round through the substitution entry point suffices.
fn rename_away_x(p: &Assertion) -> Assertion {
    dsl::syntax::subst(p, "x", &Expr::Var("y".into())).expect("generated p has no modalities")
}
