use wfsos_core::engine::{explore, successors, DerivationBudget};
use wfsos_core::frontends::corpus::PEPA_MODELS;
use wfsos_core::frontends::pepa::{classic_rates, classic_reachable, parse_pepa, pepa_wfsos, Law};

#[test]
fn corpus_matches_classic_rates() {
    for (name, text) in PEPA_MODELS {
        let model = parse_pepa(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let root = model.system.clone().expect("system");
        let spec = pepa_wfsos(&model);
        assert!(spec.validate().is_empty(), "{name}: {:?}", spec.validate());
        let ex = explore(&spec, std::slice::from_ref(&root), DerivationBudget::default()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(ex.ultras.is_functional(), "{name} is not functional");
        let classic = classic_reachable(&model, &[root], 1000);
        assert_eq!(ex.terms, classic, "{name}: reachable states differ");
        for t in &ex.terms {
            let derived = successors(&spec, t).unwrap();
            let expected = classic_rates(&model, t);
            for (label, f) in &expected {
                let row = &derived[label];
                assert_eq!(row.len(), 1, "{name}: {t} --{label}--> has {} functions", row.len());
                assert_eq!(row.iter().next().unwrap(), f, "{name}: {t} --{label}-->");
            }
        }
    }
}

#[test]
fn multiplicative_law_changes_sync_rate() {
    let mut model = parse_pepa("(a, 2).nil <a> (a, 3).nil").unwrap();
    model.law = Law::Multiplicative;
    let spec = pepa_wfsos(&model);
    let root = model.system.clone().unwrap();
    let derived = successors(&spec, &root).unwrap();
    assert_eq!(derived["a"].iter().next().unwrap(), &classic_rates(&model, &root)["a"]);
    assert_eq!(derived["a"].iter().next().unwrap().total().to_string(), "6");
}
