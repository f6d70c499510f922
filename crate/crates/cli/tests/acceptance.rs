//! Acceptance suite: one PASS/FAIL line per criterion. Every check is exact,
//! so each tolerance below is a count of allowed disagreements.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wfsos_cli::run;
use wfsos_core::engine::{explore, successors, DerivationBudget, Exploration};
use wfsos_core::equiv::{
    brute_force_bisim, canonical_m, check_m_bisim, coarsest_bisimulation, coarsest_weighted_bisimulation, congruence_suite,
    segala_bisimilarity, CongruenceConfig, Partition, SigmaGenerator, BRUTE_FORCE_LIMIT,
};
use wfsos_core::frontends::corpus::{PEPA_MODELS, SEGALA_SPECS, WGSOS_SPECS};
use wfsos_core::frontends::explore_direct;
use wfsos_core::frontends::pepa::{classic_rates, classic_reachable, parse_pepa, pepa_wfsos, pepa_wgsos_text, Law, TAU};
use wfsos_core::frontends::segala::{parse_segala, translate_segala, SegalaSemantics};
use wfsos_core::frontends::wgsos::{parse_wgsos, translate_wgsos, WgsosSemantics};
use wfsos_core::interp::naturality::{holds, random_case, Shape};
use wfsos_core::interp::Interpretation;
use wfsos_core::ultras::random::{random_functional, random_one_termination, random_segala, random_ultras};
use wfsos_core::ultras::{StateFn, Ultras};
use wfsos_core::weights::{Bool, MonoidId, Nat, Rational, Weight};
use wfsos_core::wfsos::dsl::peek_header;

/// Allowed disagreements for every oracle comparison.
const TOLERANCE: usize = 0;
const MIN_PEPA_MODELS: usize = 20;
const MIN_TRANSLATION_SPECS: usize = 10;
const RANDOM_BISIM_SYSTEMS: usize = 500;
const RANDOM_BISIM_MAX_STATES: usize = 8;
const FUNCTIONAL_SYSTEMS: usize = 100;
const FUNCTIONAL_MAX_STATES: usize = 8;
const SEGALA_SYSTEMS: usize = 100;
const SEGALA_MAX_STATES: usize = 6;
const TERMINATION_SYSTEMS: usize = 100;
const TERMINATION_MAX_STATES: usize = 8;
const CONGRUENCE_TRIALS: usize = 200;
const NATURALITY_CASES: usize = 1000;

/// Builtins whose naturality squares are known not to commute; see the
/// counterexample printed by criterion 8.
const NON_NATURAL: &[&str] = &["reshape", "coop_min_law"];

struct Outcome {
    pass: bool,
    /// The failure is fully explained by [`NON_NATURAL`].
    known: bool,
    detail: String,
}

fn outcome(failures: usize, detail: String) -> Outcome {
    Outcome { pass: failures.saturating_sub(TOLERANCE) == 0, known: false, detail }
}

fn nat(n: u64) -> Nat {
    Nat::from_count(n)
}

fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pepa_fidelity() -> Outcome {
    let mut failures = 0;
    let mut first = String::new();
    for (name, text) in PEPA_MODELS {
        let model = parse_pepa(text).expect("corpus parses");
        let root = model.system.clone().expect("corpus models have a system");
        let spec = pepa_wfsos(&model);
        let ok = (|| {
            let ex = explore(&spec, std::slice::from_ref(&root), DerivationBudget::default()).ok()?;
            if !ex.ultras.is_functional() || ex.terms != classic_reachable(&model, &[root], 10_000) {
                return None;
            }
            for t in &ex.terms {
                let derived = successors(&spec, t).ok()?;
                for (label, f) in classic_rates(&model, t) {
                    if derived[&label].len() != 1 || derived[&label].first() != Some(&f) {
                        return None;
                    }
                }
            }
            Some(())
        })();
        if ok.is_none() {
            failures += 1;
            if first.is_empty() {
                first = format!(", first mismatch: {name}");
            }
        }
    }
    let n = PEPA_MODELS.len();
    let failures = failures + usize::from(n < MIN_PEPA_MODELS);
    outcome(failures, format!("{n} models, {failures} mismatches{first}"))
}

/// Every weight function over `n` states with weights from `ws`.
fn all_fns(n: usize, ws: &[u64]) -> Vec<StateFn<Nat>> {
    let mut out = vec![StateFn::zero()];
    for x in 0..n {
        let mut next = vec![];
        for f in &out {
            for &w in ws {
                let mut g = f.clone();
                if w > 0 {
                    g.add_at(x, nat(w));
                }
                next.push(g);
            }
        }
        out = next;
    }
    out
}

/// Every set of at most `max_fns` distinct functions.
fn all_rows(fns: &[StateFn<Nat>], max_fns: usize) -> Vec<Vec<StateFn<Nat>>> {
    let mut rows = vec![vec![]];
    for (i, f) in fns.iter().enumerate() {
        rows.push(vec![f.clone()]);
        if max_fns >= 2 {
            for g in &fns[i + 1..] {
                rows.push(vec![f.clone(), g.clone()]);
            }
        }
    }
    rows
}

/// Compares refinement with brute force on every system of a family; the
/// first cell is split across threads.
fn exhaustive(states: usize, labels: usize, ws: &[u64], max_fns: usize) -> (usize, usize) {
    let rows = all_rows(&all_fns(states, ws), max_fns);
    let cells = states * labels;
    let names: Vec<&str> = ["a", "b"][..labels].to_vec();
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get()).min(rows.len());
    let chunks: Vec<Vec<usize>> = (0..jobs).map(|j| (j..rows.len()).step_by(jobs).collect()).collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|firsts| {
                let rows = &rows;
                let names = &names;
                s.spawn(move || {
                    let mut u: Ultras<Nat> = Ultras::with_size(states, names);
                    let (mut count, mut bad) = (0, 0);
                    for &first in firsts {
                        let mut idx = vec![0; cells];
                        idx[0] = first;
                        loop {
                            for (c, &r) in idx.iter().enumerate() {
                                u.set_row(c / labels, c % labels, rows[r].iter().cloned()).expect("in range");
                            }
                            count += 1;
                            if brute_force_bisim(&u, BRUTE_FORCE_LIMIT).ok() != Some(coarsest_bisimulation(&u)) {
                                bad += 1;
                            }
                            let mut c = 1;
                            while c < cells {
                                idx[c] += 1;
                                if idx[c] < rows.len() {
                                    break;
                                }
                                idx[c] = 0;
                                c += 1;
                            }
                            if c == cells {
                                break;
                            }
                        }
                    }
                    (count, bad)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker")).fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    })
}

fn bisim_oracle() -> Outcome {
    // (states, labels, weights, functions per cell)
    let families: [(usize, usize, &[u64], usize); 5] = [
        (1, 2, &[0, 1, 2], 2),
        (2, 2, &[0, 1, 2], 2),
        (3, 1, &[0, 1, 2], 1),
        (3, 2, &[0, 1], 1),
        (4, 1, &[0, 1], 1),
    ];
    let mut total = 0;
    let mut failures = 0;
    for (states, labels, ws, max_fns) in families {
        let (n, bad) = exhaustive(states, labels, ws, max_fns);
        total += n;
        failures += bad;
    }
    let mut rng = seeded(2);
    let mut random_bad = 0;
    for i in 0..RANDOM_BISIM_SYSTEMS {
        let n = 1 + i % RANDOM_BISIM_MAX_STATES;
        let u: Ultras<Nat> = random_ultras(&mut rng, n, 1 + i % 2, 2);
        if brute_force_bisim(&u, BRUTE_FORCE_LIMIT).ok() != Some(coarsest_bisimulation(&u)) {
            random_bad += 1;
        }
    }
    outcome(
        failures + random_bad,
        format!(
            "{total} exhaustive systems in 5 families, {failures} disagreements; {RANDOM_BISIM_SYSTEMS} random, {random_bad} disagreements"
        ),
    )
}

fn weighted_coincidence() -> Outcome {
    let mut rng = seeded(3);
    let mut failures = 0;
    for i in 0..FUNCTIONAL_SYSTEMS {
        let u: Ultras<Nat> = random_functional(&mut rng, 1 + i % FUNCTIONAL_MAX_STATES, 2);
        if coarsest_weighted_bisimulation(&u).ok() != Some(coarsest_bisimulation(&u)) {
            failures += 1;
        }
    }
    outcome(failures, format!("{FUNCTIONAL_SYSTEMS} functional systems, {failures} disagreements"))
}

fn segala_coincidence() -> Outcome {
    let mut rng = seeded(4);
    let mut failures = 0;
    for i in 0..SEGALA_SYSTEMS {
        let u = random_segala(&mut rng, 1 + i % SEGALA_MAX_STATES, 2, 2);
        if segala_bisimilarity(&u).ok() != Some(coarsest_bisimulation(&u)) {
            failures += 1;
        }
    }
    outcome(failures, format!("{SEGALA_SYSTEMS} Segala systems, {failures} disagreements"))
}

fn m_bisimulation() -> Outcome {
    let mut rng = seeded(5);
    let mut failures = 0;
    let mut checked = 0;
    for i in 0..TERMINATION_SYSTEMS {
        let u: Ultras<Nat> = random_one_termination(&mut rng, 1 + i % TERMINATION_MAX_STATES, 2, 2);
        let mut partitions = vec![coarsest_bisimulation(&u), Partition::discrete(u.num_states())];
        if let Ok(p) = brute_force_bisim(&u, BRUTE_FORCE_LIMIT) {
            partitions.push(p);
        }
        for p in partitions {
            checked += 1;
            let ok = canonical_m(&u, &p).ok().and_then(|m| check_m_bisim(&u, &m, &p).ok()) == Some(true);
            failures += usize::from(!ok);
        }
    }
    outcome(failures, format!("{TERMINATION_SYSTEMS} systems, {checked} partitions, {failures} failures"))
}

fn congruence() -> Outcome {
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let cfg = CongruenceConfig { trials: CONGRUENCE_TRIALS, seed: 6, jobs, ..CongruenceConfig::default() };
    let mut parts = vec![];
    let mut failures = 0;

    let model = parse_pepa("C = (a, 1).(b, 2).C; S = (a, 3).S + (b, 1).S; C <a> S").expect("model parses");
    let spec = pepa_wfsos(&model);
    let mut gen = SigmaGenerator::new(&spec);
    gen.set_labels.retain(|l| l != TAU);
    let r = congruence_suite(&spec, &gen, &cfg);
    failures += r.counterexamples.len() + usize::from(r.trials != CONGRUENCE_TRIALS);
    parts.push(format!("pepa {} counterexamples ({} distinct pairs)", r.counterexamples.len(), r.distinct_pairs));

    let (_, text, _) = SEGALA_SPECS.iter().find(|s| s.0 == "par").expect("corpus spec");
    let spec = translate_segala(&parse_segala(text).expect("parses")).expect("translates");
    let r = congruence_suite(&spec, &SigmaGenerator::new(&spec), &cfg);
    failures += r.counterexamples.len() + usize::from(r.trials != CONGRUENCE_TRIALS);
    parts.push(format!("segala {} ({} distinct pairs)", r.counterexamples.len(), r.distinct_pairs));

    let (_, text, _) = WGSOS_SPECS.iter().find(|s| s.0 == "async").expect("corpus spec");
    let spec = translate_wgsos(&parse_wgsos::<Rational>(text).expect("parses")).expect("translates");
    let r = congruence_suite(&spec, &SigmaGenerator::new(&spec), &cfg);
    failures += r.counterexamples.len() + usize::from(r.trials != CONGRUENCE_TRIALS);
    parts.push(format!("wgsos {} ({} distinct pairs)", r.counterexamples.len(), r.distinct_pairs));

    outcome(failures, format!("{CONGRUENCE_TRIALS} trials each: {}", parts.join(", ")))
}

fn rows_as_text<W: Weight>(ex: &Exploration<W>) -> Vec<String> {
    let u = &ex.ultras;
    let mut out = vec![];
    for x in 0..u.num_states() {
        for a in 0..u.num_labels() {
            let fns: Vec<String> =
                u.row(x, a).iter().map(|f| format!("{:?}", f.iter().map(|(k, w)| (*k, w.to_string())).collect::<Vec<_>>())).collect();
            out.push(format!("{} {} {}", ex.terms[x], u.labels()[a], fns.join(" | ")));
        }
    }
    out
}

fn wgsos_agrees<W: Weight>(text: &str, roots: &[&str]) -> bool {
    let Ok(s) = parse_wgsos::<W>(text) else { return false };
    let Ok(spec) = translate_wgsos(&s) else { return false };
    let Ok(roots) = roots.iter().map(|r| spec.parse_process(r)).collect::<Result<Vec<_>, _>>() else { return false };
    let derived = explore(&spec, &roots, DerivationBudget::default());
    let mut direct = WgsosSemantics::new(&s, 64);
    let expected = explore_direct(&s.labels, &roots, 10_000, |t| direct.row(t));
    matches!((derived, expected), (Ok(d), Ok(e)) if d == e)
}

fn translation_soundness() -> Outcome {
    let mut failures = 0;
    for (_, text, roots) in SEGALA_SPECS {
        let ok = (|| {
            let s = parse_segala(text).ok()?;
            let spec = translate_segala(&s).ok()?;
            let roots = roots.iter().map(|r| spec.parse_process(r)).collect::<Result<Vec<_>, _>>().ok()?;
            let derived = explore(&spec, &roots, DerivationBudget::default()).ok()?;
            let mut direct = SegalaSemantics::new(&s);
            let expected = explore_direct(&s.labels, &roots, 10_000, |t| direct.successors(t).map(|r| (*r).clone())).ok()?;
            (derived == expected).then_some(())
        })();
        failures += usize::from(ok.is_none());
    }
    for (_, text, roots) in WGSOS_SPECS {
        let ok = match peek_header(text).map(|h| h.1) {
            Ok(MonoidId::Rat) => wgsos_agrees::<Rational>(text, roots),
            Ok(MonoidId::Nat) => wgsos_agrees::<Nat>(text, roots),
            Ok(MonoidId::Bool) => wgsos_agrees::<Bool>(text, roots),
            _ => false,
        };
        failures += usize::from(!ok);
    }
    let mut pepa_bad = 0;
    for law in [Law::MinimalRate, Law::Multiplicative] {
        for (_, text) in PEPA_MODELS {
            let mut model = parse_pepa(text).expect("corpus parses");
            model.law = law;
            let root = model.system.clone().expect("system");
            let ok = (|| {
                let mut s = parse_wgsos::<Rational>(&pepa_wgsos_text(&model.labels, law)).ok()?;
                s.defs = model.defs.clone();
                let spec = translate_wgsos(&s).ok()?;
                let via = explore(&spec, std::slice::from_ref(&root), DerivationBudget::default()).ok()?;
                let direct = explore(&pepa_wfsos(&model), &[root], DerivationBudget::default()).ok()?;
                (rows_as_text(&via) == rows_as_text(&direct)).then_some(())
            })();
            pepa_bad += usize::from(ok.is_none());
        }
    }
    let short = usize::from(SEGALA_SPECS.len() < MIN_TRANSLATION_SPECS || WGSOS_SPECS.len() < MIN_TRANSLATION_SPECS);
    outcome(
        failures + pepa_bad + short,
        format!(
            "{} segala + {} wgsos specs, {failures} mismatches; pepa via wgsos on {} models x 2 laws, {pepa_bad} mismatches",
            SEGALA_SPECS.len(),
            WGSOS_SPECS.len(),
            PEPA_MODELS.len()
        ),
    )
}

fn naturality_failures<W: Weight>(interp: &Interpretation<W>, op: &str, seed: u64) -> (usize, Option<String>) {
    let mut rng = seeded(seed);
    let mut bad = 0;
    let mut example = None;
    for _ in 0..NATURALITY_CASES {
        let case = random_case(&mut rng, interp, op, &Shape::default());
        if holds(interp, &case) != Ok(true) {
            bad += 1;
            example.get_or_insert_with(|| case.psi.to_string());
        }
    }
    (bad, example)
}

fn naturality() -> Outcome {
    let pepa_spec = |law| {
        let mut model = parse_pepa("(a, 1).nil").expect("parses");
        model.law = law;
        pepa_wfsos(&model).interp
    };
    let min = pepa_spec(Law::MinimalRate);
    let product = pepa_spec(Law::Multiplicative);
    let (_, text, _) = SEGALA_SPECS.iter().find(|s| s.0 == "mix").expect("corpus spec");
    let segala = translate_segala(&parse_segala(text).expect("parses")).expect("translates").interp;

    let results = [
        ("zero", naturality_failures(&min, "empty", 80)),
        ("reshape", naturality_failures(&min, "diamond", 81)),
        ("pointwise_sum", naturality_failures(&min, "wsum", 82)),
        ("coop_min_law", naturality_failures(&min, "par", 83)),
        ("coop_product_law", naturality_failures(&product, "par", 84)),
        ("convex", naturality_failures(&segala, "convex", 85)),
        ("colour", naturality_failures(&segala, "colour", 86)),
        ("wapply", naturality_failures(&segala, "wapply", 87)),
    ];
    let failures: usize = results.iter().map(|(_, (bad, _))| bad).sum();
    let summary: Vec<String> = results.iter().map(|(name, (bad, _))| format!("{name} {bad}/{NATURALITY_CASES}")).collect();
    let examples: Vec<String> =
        results.iter().filter_map(|(name, (_, ex))| ex.as_ref().map(|e| format!("{name}: {e}"))).collect();
    let mut detail = format!("failing cases per builtin: {}", summary.join(", "));
    if !examples.is_empty() {
        detail.push_str(&format!("; first counterexamples: {}", examples.join("; ")));
    }
    let unexpected = results.iter().filter(|(name, (bad, _))| *bad > 0 && !NON_NATURAL.contains(name)).count();
    Outcome { pass: failures.saturating_sub(TOLERANCE) == 0, known: unexpected == 0, detail }
}

fn terminal_vs_stuck() -> Outcome {
    // state 0 terminates on `a`, state 1 is stuck; nothing else differs
    let mut u: Ultras<Nat> = Ultras::with_size(2, &["a"]);
    u.add_fn(0, 0, StateFn::zero()).expect("in range");
    let p = coarsest_bisimulation(&u);
    let merged = usize::from(p.same_block(0, 1));
    outcome(merged, format!("partition {p}"))
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = vec![];
    let mut err = vec![];
    let code = run(std::iter::once("wfsos").chain(args.iter().copied()), &mut out, &mut err);
    out.extend_from_slice(&err);
    (code, out)
}

fn determinism() -> Outcome {
    let specs = concat!(env!("CARGO_MANIFEST_DIR"), "/specs");
    let seg = format!("{specs}/coins.seg");
    let pepa = format!("{specs}/client_server.pepa");
    let runs: Vec<Vec<&str>> = vec![
        vec!["derive", "--roots", "const{Loop}", "--seed", "7"],
        vec!["derive", "--spec", &pepa, "--emit", "dot", "--seed", "7"],
        vec!["derive", "--spec", &seg, "--roots", "par(coin, coin)", "--seed", "7"],
        vec!["bisim", "--pair", "(a,1).nil+(a,1).nil|(a,2).nil", "--seed", "7"],
        vec!["bisim", "--spec", &seg, "--pair", "par(h, coin)|par(coin, coin)", "--emit", "json", "--seed", "7"],
    ];
    let mut failures = 0;
    for args in &runs {
        let first = cli(args);
        let second = cli(args);
        failures += usize::from(first != second || first.1.is_empty());
    }
    outcome(failures, format!("{} command lines run twice, {failures} differ", runs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("PEPA fidelity", pepa_fidelity),
        ("bisimulation oracle", bisim_oracle),
        ("weighted bisimulation coincidence", weighted_coincidence),
        ("Segala coincidence", segala_coincidence),
        ("M-bisimulation", m_bisimulation),
        ("congruence", congruence),
        ("translation soundness", translation_soundness),
        ("interpretation naturality", naturality),
        ("terminal/stuck separation", terminal_vs_stuck),
        ("determinism", determinism),
    ];
    let mut unexpected = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status} {name}: {} [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.pass && !o.known {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
