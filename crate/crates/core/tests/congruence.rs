use wfsos_core::equiv::{congruence_suite, CongruenceConfig, SigmaGenerator};
use wfsos_core::frontends::corpus::{SEGALA_SPECS, WGSOS_SPECS};
use wfsos_core::frontends::pepa::{parse_pepa, pepa_wfsos, TAU};
use wfsos_core::frontends::segala::{parse_segala, translate_segala};
use wfsos_core::frontends::wgsos::{parse_wgsos, translate_wgsos};
use wfsos_core::weights::Rational;

fn config(trials: usize, jobs: usize) -> CongruenceConfig {
    CongruenceConfig { trials, seed: 11, jobs, ..CongruenceConfig::default() }
}

#[test]
fn pepa_contexts_preserve_bisimilarity() {
    let model = parse_pepa("P = (a, 1).P; Q = (b, 2).(a, 1).Q; P").unwrap();
    let spec = pepa_wfsos(&model);
    let mut gen = SigmaGenerator::new(&spec);
    gen.set_labels.retain(|l| l != TAU);
    let report = congruence_suite(&spec, &gen, &config(40, 2));
    assert!(report.counterexamples.is_empty(), "{:?}", report.counterexamples);
    assert!(report.distinct_pairs > 0 && report.contexts_checked > 0, "{report:?}");
}

#[test]
fn report_does_not_depend_on_jobs() {
    let model = parse_pepa("P = (a, 1).P; P").unwrap();
    let spec = pepa_wfsos(&model);
    let gen = SigmaGenerator::new(&spec);
    assert_eq!(congruence_suite(&spec, &gen, &config(12, 1)), congruence_suite(&spec, &gen, &config(12, 4)));
}

#[test]
fn translated_specs_are_congruences() {
    let (_, text, _) = SEGALA_SPECS.iter().find(|s| s.0 == "par").unwrap();
    let spec = translate_segala(&parse_segala(text).unwrap()).unwrap();
    let report = congruence_suite(&spec, &SigmaGenerator::new(&spec), &config(30, 2));
    assert!(report.counterexamples.is_empty(), "{:?}", report.counterexamples);

    let (_, text, _) = WGSOS_SPECS.iter().find(|s| s.0 == "async").unwrap();
    let spec = translate_wgsos(&parse_wgsos::<Rational>(text).unwrap()).unwrap();
    let report = congruence_suite(&spec, &SigmaGenerator::new(&spec), &config(30, 2));
    assert!(report.counterexamples.is_empty(), "{:?}", report.counterexamples);
}
