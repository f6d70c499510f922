use wfsos_core::engine::{explore, DerivationBudget, Exploration};
use wfsos_core::frontends::corpus::{PEPA_MODELS, SEGALA_SPECS, WGSOS_SPECS};
use wfsos_core::frontends::explore_direct;
use wfsos_core::frontends::pepa::{parse_pepa, pepa_wfsos, pepa_wgsos_text, Law};
use wfsos_core::frontends::segala::{parse_segala, translate_segala, SegalaSemantics};
use wfsos_core::frontends::wgsos::{parse_wgsos, translate_wgsos, WgsosSemantics};
use wfsos_core::ultras::Constraint;
use wfsos_core::weights::{Bool, MonoidId, Nat, Rational, Weight};
use wfsos_core::wfsos::dsl::peek_header;
use wfsos_core::wfsos::{parse_spec, print_spec};

fn rows_as_text<W: Weight>(ex: &Exploration<W>) -> Vec<String> {
    let u = &ex.ultras;
    let mut out = vec![];
    for x in 0..u.num_states() {
        for a in 0..u.num_labels() {
            let fns: Vec<String> = u.row(x, a).iter().map(|f| format!("{:?}", f.iter().map(|(k, w)| (*k, w.to_string())).collect::<Vec<_>>())).collect();
            out.push(format!("{} {} {}", ex.terms[x], u.labels()[a], fns.join(" | ")));
        }
    }
    out
}

#[test]
fn segala_translation_matches_direct_semantics() {
    assert!(SEGALA_SPECS.len() >= 10);
    for (name, text, roots) in SEGALA_SPECS {
        let s = parse_segala(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let spec = translate_segala(&s).unwrap();
        assert!(spec.validate().is_empty(), "{name}: {:?}", spec.validate());
        let roots: Vec<_> = roots.iter().map(|r| spec.parse_process(r).unwrap()).collect();
        let derived = explore(&spec, &roots, DerivationBudget::default()).unwrap_or_else(|e| panic!("{name}: {e}"));
        let mut direct = SegalaSemantics::new(&s);
        let expected = explore_direct(&s.labels, &roots, 10_000, |t| direct.successors(t).map(|r| (*r).clone())).unwrap();
        assert_eq!(derived, expected, "{name}");
        assert!(derived.ultras.check_constraint(Constraint::Segala).unwrap().is_empty(), "{name}");
        let printed = print_spec(&spec);
        assert_eq!(parse_spec::<Rational>(&printed).unwrap(), spec, "{name}: round trip");
    }
}

fn check_wgsos<W: Weight>(name: &str, text: &str, roots: &[&str]) {
    let s = parse_wgsos::<W>(text).unwrap_or_else(|e| panic!("{name}: {e}"));
    let spec = translate_wgsos(&s).unwrap();
    assert!(spec.validate().is_empty(), "{name}: {:?}", spec.validate());
    let roots: Vec<_> = roots.iter().map(|r| spec.parse_process(r).unwrap()).collect();
    let derived = explore(&spec, &roots, DerivationBudget::default()).unwrap_or_else(|e| panic!("{name}: {e}"));
    let mut direct = WgsosSemantics::new(&s, 64);
    let expected = explore_direct(&s.labels, &roots, 10_000, |t| direct.row(t)).unwrap();
    assert_eq!(derived, expected, "{name}");
    assert!(derived.ultras.is_functional(), "{name}");
    let printed = print_spec(&spec);
    assert_eq!(parse_spec::<W>(&printed).unwrap(), spec, "{name}: round trip");
}

#[test]
fn wgsos_translation_matches_direct_semantics() {
    assert!(WGSOS_SPECS.len() >= 10);
    for (name, text, roots) in WGSOS_SPECS {
        match peek_header(text).unwrap().1 {
            MonoidId::Rat => check_wgsos::<Rational>(name, text, roots),
            MonoidId::Nat => check_wgsos::<Nat>(name, text, roots),
            MonoidId::Bool => check_wgsos::<Bool>(name, text, roots),
            other => panic!("{name}: unexpected monoid {other}"),
        }
    }
}

#[test]
fn pepa_through_wgsos_matches_pepa_spec() {
    for law in [Law::MinimalRate, Law::Multiplicative] {
        for (name, text) in PEPA_MODELS {
            let mut model = parse_pepa(text).unwrap();
            model.law = law;
            let root = model.system.clone().unwrap();
            let mut s = parse_wgsos::<Rational>(&pepa_wgsos_text(&model.labels, law)).unwrap();
            s.defs = model.defs.clone();
            let spec = translate_wgsos(&s).unwrap();
            assert!(spec.validate().is_empty(), "{name}: {:?}", spec.validate());
            let via = explore(&spec, std::slice::from_ref(&root), DerivationBudget::default()).unwrap_or_else(|e| panic!("{name}: {e}"));
            let direct = explore(&pepa_wfsos(&model), &[root], DerivationBudget::default()).unwrap();
            assert_eq!(rows_as_text(&via), rows_as_text(&direct), "{name} ({law:?})");
        }
    }
}

#[test]
fn merged_rules_add_their_contributions() {
    let (_, text, _) = WGSOS_SPECS.iter().find(|s| s.0 == "merge").unwrap();
    let spec = translate_wgsos(&parse_wgsos::<Rational>(text).unwrap()).unwrap();
    let t = spec.parse_process("twice(one)").unwrap();
    let row = wfsos_core::engine::successors(&spec, &t).unwrap();
    let f = row["a"].iter().next().unwrap();
    assert_eq!(f.get(&spec.parse_process("nil").unwrap()).to_string(), "2");
}

#[test]
fn duplicated_distribution_variable_is_drawn_independently() {
    let (_, text, _) = SEGALA_SPECS.iter().find(|s| s.0 == "pair_copy").unwrap();
    let spec = translate_segala(&parse_segala(text).unwrap()).unwrap();
    let row = wfsos_core::engine::successors(&spec, &spec.parse_process("dup(flip)").unwrap()).unwrap();
    let f = row["a"].iter().next().unwrap();
    assert_eq!(f.support_size(), 4);
    for (_, w) in f.iter() {
        assert_eq!(w.to_string(), "1/4");
    }
}

#[test]
fn non_additive_beta_is_rejected() {
    let text = "format wgsos
monoid rat
labels a
signature process { nil/0; one/0; f/1; }
beta sq(u) = u * u
rule one: => one --a--> nil @ prod{1}()
rule f: x =a=> ?w, x --a,u--> y => f(x) --a--> y @ sq(u)
";
    let err = parse_wgsos::<Rational>(text).unwrap_err();
    assert!(err.to_string().contains("not additive"), "{err}");
}

#[test]
fn segala_weights_must_sum_to_one() {
    let text = "format segala
monoid rat
labels a
signature process { nil/0; c/0; }
rule c: => c --a--> 1/2 * nil + 1/3 * c
";
    assert!(parse_segala(text).unwrap_err().to_string().contains("sum to 5/6"));
}
