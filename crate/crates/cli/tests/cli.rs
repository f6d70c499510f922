use wfsos_cli::run;

fn spec(name: &str) -> String {
    format!("{}/specs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (vec![], vec![]);
    let code = run(std::iter::once("wfsos").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn demo_spec_checks() {
    let (code, out, _) = cli(&["check", "--spec", &spec("pepa_demo.wfs")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("ok:"));
}

#[test]
fn duplicated_choice_is_bisimilar_to_double_rate() {
    let (code, out, _) = cli(&["bisim", "--spec", &spec("pepa_demo.wfs"), "--pair", "(a,1).nil+(a,1).nil|(a,2).nil"]);
    assert_eq!((code, out.as_str()), (0, "bisimilar\n"));
    let (code, out, _) = cli(&["bisim", "--pair", "(a,1).nil|(a,2).nil"]);
    assert_eq!((code, out.as_str()), (1, "not bisimilar\n"));
}

#[test]
fn nil_derives_one_state() {
    let (code, out, _) = cli(&["derive", "--roots", "nil", "--max-states", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"states\": [\n    \"nil\"\n  ]"), "{out}");
}

#[test]
fn exit_codes() {
    let (code, _, err) = cli(&["derive", "--roots", "const{Loop}", "--max-states", "1"]);
    assert_eq!(code, 3);
    assert!(err.starts_with("error: budget exhausted") && err.lines().count() == 1, "{err}");
    let (code, _, err) = cli(&["derive", "--spec", "/nonexistent.wfs", "--roots", "nil"]);
    assert_eq!(code, 2);
    assert_eq!(err.lines().count(), 1);
    let (code, _, _) = cli(&["frobnicate"]);
    assert_eq!(code, 2);
    let (code, _, err) = cli(&["bisim", "--pair", "nil"]);
    assert_eq!(code, 2, "{err}");
    let (code, _, _) = cli(&["derive", "--roots", "undefined_op(nil)"]);
    assert_eq!(code, 2);
}

#[test]
fn translation_round_trips_through_the_wfsos_format() {
    let dir = std::env::temp_dir().join(format!("wfsos-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let translated = dir.join("coins.wfs");
    let (code, _, err) = cli(&["translate", "--spec", &spec("coins.seg"), "--out", translated.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let direct = cli(&["derive", "--spec", &spec("coins.seg"), "--roots", "par(coin, coin)"]);
    let via = cli(&["derive", "--spec", translated.to_str().unwrap(), "--roots", "par(coin, coin)"]);
    assert_eq!(direct.0, 0);
    assert_eq!(direct, via);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn export_converts_stored_systems() {
    let dir = std::env::temp_dir().join(format!("wfsos-export-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let stored = dir.join("rates.json");
    let (code, _, _) = cli(&["derive", "--spec", &spec("rates.wgs"), "--roots", "par(pre{a,1}(nil), pre{b,2}(nil))", "--out", stored.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, dot, _) = cli(&["export", "--spec", stored.to_str().unwrap(), "--emit", "dot"]);
    assert_eq!(code, 0);
    assert!(dot.starts_with("digraph"), "{dot}");
    let (code, json, _) = cli(&["export", "--spec", stored.to_str().unwrap()]);
    assert_eq!((code, json), (0, std::fs::read_to_string(&stored).unwrap()));
    let (code, _, _) = cli(&["export", "--spec", &spec("rates.wgs")]);
    assert_eq!(code, 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn pepa_models_use_their_system_process() {
    let (code, out, _) = cli(&["derive", "--spec", &spec("client_server.pepa"), "--emit", "text"]);
    assert_eq!(code, 0);
    assert!(out.contains("s0 --request--> {s1: 1}"), "{out}");
    let (code, out, _) = cli(&["congruence", "--spec", &spec("client_server.pepa"), "--trials", "10"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("counterexamples 0\n"), "{out}");
}

#[test]
fn help_goes_to_standard_output() {
    let (code, out, err) = cli(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("derive") && err.is_empty());
}
