//! The `wfsos` command line: spec checking, state-space derivation,
//! bisimilarity queries, congruence testing, translation and export.
//!
//! Exit codes: 0 success, 1 property violated or terms not bisimilar,
//! 2 usage or spec error, 3 budget exhausted.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wfsos_core::engine::{explore, DerivationBudget, EngineError, Exhaustion, Exploration};
use wfsos_core::equiv::{coarsest_bisimulation, congruence_suite, CongruenceConfig, SigmaGenerator};
use wfsos_core::frontends::pepa::{collect_labels, parse_pepa, parse_pepa_process, pepa_wfsos, PepaModel, TAU};
use wfsos_core::frontends::segala::{parse_segala, translate_segala};
use wfsos_core::frontends::wgsos::{parse_wgsos, translate_wgsos};
use wfsos_core::syntax::Term;
use wfsos_core::ultras::{from_json, to_dot, to_json, to_text, Ultras};
use wfsos_core::weights::{Bool, ExtRational, MonoidId, Nat, Rational, Weight};
use wfsos_core::wfsos::dsl::peek_header;
use wfsos_core::wfsos::{parse_spec, print_spec, Format, WfsosSpec};

/// The spec used when `--spec` is omitted: PEPA over labels `a`, `b`.
pub const DEMO_SPEC: &str = include_str!("../specs/pepa_demo.wfs");

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "wfsos", version, about = "Weight-function SOS workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a spec; with roots, also derive their state space.
    Check(Common),
    /// Derive the reachable system of the roots.
    Derive(Common),
    /// Decide bisimilarity of two terms in a shared state space.
    Bisim {
        #[command(flatten)]
        common: Common,
        /// Two terms separated by a single `|`.
        #[arg(long)]
        pair: String,
    },
    /// Check that random contexts preserve bisimilarity.
    Congruence(Common),
    /// Print the WFSOS spec of a Segala, W-GSOS or PEPA input.
    Translate(Common),
    /// Re-emit a stored JSON system (read from `--spec`).
    Export(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Input file; defaults to the bundled PEPA demo spec.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Input format; detected from the `format` statement when omitted.
    #[arg(long, value_enum)]
    format: Option<InputFormat>,
    /// Root terms separated by `;`.
    #[arg(long)]
    roots: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    max_states: usize,
    #[arg(long, default_value_t = 64)]
    max_depth: usize,
    /// Write the result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    emit: Option<Emit>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Wfsos,
    Pepa,
    Segala,
    Wgsos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Json,
    Dot,
    Text,
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl fmt::Display) -> Failure {
        Failure { code: EXIT_USAGE, message: message.to_string() }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Failure {
        let code = if matches!(e, EngineError::Budget(_)) { EXIT_BUDGET } else { EXIT_USAGE };
        Failure { code, message: e.to_string() }
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code. Results go to `out` (or `--out`), errors to `err` as one line.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            let _ = writeln!(err, "error: {line}");
            return EXIT_USAGE;
        }
    };
    let mut buf = Vec::new();
    let result = dispatch(&cli.command, &mut buf);
    let common = cli.command.common();
    let written = match &common.out {
        Some(path) if !buf.is_empty() || result.is_ok() => std::fs::write(path, &buf).map_err(|e| e.to_string()),
        _ => out.write_all(&buf).map_err(|e| e.to_string()),
    };
    match (result, written) {
        (Ok(code), Ok(())) => code,
        (Err(f), _) => {
            let _ = writeln!(err, "error: {}", f.message.replace('\n', " "));
            f.code
        }
        (Ok(_), Err(e)) => {
            let _ = writeln!(err, "error: cannot write output: {e}");
            EXIT_USAGE
        }
    }
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Check(c) | Command::Derive(c) | Command::Congruence(c) | Command::Translate(c) | Command::Export(c) => c,
            Command::Bisim { common, .. } => common,
        }
    }
}

fn dispatch(cmd: &Command, out: &mut Vec<u8>) -> Result<i32, Failure> {
    let common = cmd.common();
    let text = match &common.spec {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?
        }
        None => DEMO_SPEC.to_string(),
    };
    if let Command::Export(c) = cmd {
        return export(&text, c, out);
    }
    let format = match common.format {
        Some(f) => f,
        None => detect_format(&text),
    };
    match format {
        InputFormat::Pepa => {
            let model = parse_pepa(&text).map_err(Failure::usage)?;
            let mut roots = vec![];
            for r in split_roots(common.roots.as_deref()) {
                roots.push(model.process(r).map_err(Failure::usage)?);
            }
            if let Command::Bisim { pair, .. } = cmd {
                let (p, q) = split_pair(pair)?;
                roots.push(model.process(p).map_err(Failure::usage)?);
                roots.push(model.process(q).map_err(Failure::usage)?);
            }
            let model = with_root_labels(model, &roots);
            let spec = pepa_wfsos(&model);
            Session { spec, format, fallback_roots: model.system.iter().cloned().collect() }.run(cmd, out)
        }
        InputFormat::Segala => {
            let s = parse_segala(&text).map_err(Failure::usage)?;
            let spec = translate_segala(&s).map_err(Failure::usage)?;
            Session { spec, format, fallback_roots: vec![] }.run(cmd, out)
        }
        InputFormat::Wfsos | InputFormat::Wgsos => {
            let (_, monoid) = peek_header(&text).map_err(Failure::usage)?;
            match monoid {
                MonoidId::Bool => load::<Bool>(&text, format)?.run(cmd, out),
                MonoidId::Nat => load::<Nat>(&text, format)?.run(cmd, out),
                MonoidId::Rat => load::<Rational>(&text, format)?.run(cmd, out),
                MonoidId::RatInf => load::<ExtRational>(&text, format)?.run(cmd, out),
            }
        }
    }
}

fn detect_format(text: &str) -> InputFormat {
    match peek_header(text) {
        Ok((Format::Wfsos, _)) => InputFormat::Wfsos,
        Ok((Format::Segala, _)) => InputFormat::Segala,
        Ok((Format::Wgsos, _)) => InputFormat::Wgsos,
        Err(_) => InputFormat::Pepa,
    }
}

fn load<W: Weight>(text: &str, format: InputFormat) -> Result<Session<W>, Failure> {
    let spec = if format == InputFormat::Wgsos {
        translate_wgsos(&parse_wgsos::<W>(text).map_err(Failure::usage)?).map_err(Failure::usage)?
    } else {
        parse_spec::<W>(text).map_err(Failure::usage)?
    };
    Ok(Session { spec, format, fallback_roots: vec![] })
}

/// Labels used by roots but absent from the model still need rules.
fn with_root_labels(model: PepaModel, roots: &[Term]) -> PepaModel {
    let mut labels = Default::default();
    for r in roots {
        collect_labels(r, &mut labels);
    }
    model.with_labels(labels)
}

fn split_roots(roots: Option<&str>) -> Vec<&str> {
    roots.map_or(vec![], |r| r.split(';').map(str::trim).filter(|s| !s.is_empty()).collect())
}

/// Splits at the only `|` that is not part of `||`.
fn split_pair(pair: &str) -> Result<(&str, &str), Failure> {
    let bytes = pair.as_bytes();
    let cuts: Vec<usize> = (0..bytes.len())
        .filter(|&i| bytes[i] == b'|' && (i == 0 || bytes[i - 1] != b'|') && bytes.get(i + 1) != Some(&b'|'))
        .collect();
    match cuts.as_slice() {
        [i] => Ok((pair[..*i].trim(), pair[i + 1..].trim())),
        _ => Err(Failure::usage("--pair needs exactly one `|` separating two terms")),
    }
}

struct Session<W> {
    spec: WfsosSpec<W>,
    format: InputFormat,
    /// Roots used when `--roots` is omitted.
    fallback_roots: Vec<Term>,
}

impl<W: Weight> Session<W> {
    fn run(self, cmd: &Command, out: &mut Vec<u8>) -> Result<i32, Failure> {
        match cmd {
            Command::Check(c) => self.check(c, out),
            Command::Derive(c) => self.derive(c, out),
            Command::Bisim { common, pair } => self.bisim(common, pair, out),
            Command::Congruence(c) => self.congruence(c, out),
            Command::Translate(_) => {
                out.extend_from_slice(print_spec(&self.spec).as_bytes());
                Ok(EXIT_OK)
            }
            Command::Export(_) => unreachable!("handled before loading a spec"),
        }
    }

    fn parse_root(&self, text: &str) -> Result<Term, Failure> {
        match self.spec.parse_process(text) {
            Ok(t) => Ok(t),
            Err(e) => {
                let t = parse_pepa_process(text).map_err(|_| Failure::usage(format!("root `{text}`: {e}")))?;
                self.spec.check_process(&t).map_err(|e| Failure::usage(format!("root `{text}`: {e}")))?;
                Ok(t)
            }
        }
    }

    fn roots(&self, c: &Common) -> Result<Vec<Term>, Failure> {
        let given = split_roots(c.roots.as_deref());
        if given.is_empty() {
            return Ok(self.fallback_roots.clone());
        }
        given.into_iter().map(|r| self.parse_root(r)).collect()
    }

    fn budget(c: &Common) -> DerivationBudget {
        DerivationBudget { max_states: c.max_states, max_depth: c.max_depth, on_exhaustion: Exhaustion::Error }
    }

    fn explore(&self, c: &Common, roots: &[Term]) -> Result<Exploration<W>, Failure> {
        Ok(explore(&self.spec, roots, Self::budget(c))?)
    }

    fn check(&self, c: &Common, out: &mut Vec<u8>) -> Result<i32, Failure> {
        let violations = self.spec.validate();
        for v in &violations {
            let _ = writeln!(out, "violation: {v}");
        }
        if !violations.is_empty() {
            let _ = writeln!(out, "{} violation(s)", violations.len());
            return Ok(EXIT_VIOLATED);
        }
        let _ = writeln!(
            out,
            "ok: {} spec, {} rule(s), {} group(s)",
            self.format_name(),
            self.spec.rules.len(),
            self.spec.groups.len()
        );
        let roots = self.roots(c)?;
        if !roots.is_empty() {
            let e = self.explore(c, &roots)?;
            let functional = if e.ultras.is_functional() { "functional" } else { "not functional" };
            let _ = writeln!(out, "derived {} state(s), {functional}", e.ultras.num_states());
        }
        Ok(EXIT_OK)
    }

    fn format_name(&self) -> &'static str {
        match self.format {
            InputFormat::Wfsos => "wfsos",
            InputFormat::Pepa => "pepa",
            InputFormat::Segala => "segala",
            InputFormat::Wgsos => "wgsos",
        }
    }

    fn derive(&self, c: &Common, out: &mut Vec<u8>) -> Result<i32, Failure> {
        let roots = self.roots(c)?;
        if roots.is_empty() {
            return Err(Failure::usage("no roots: pass --roots"));
        }
        let e = self.explore(c, &roots)?;
        out.extend_from_slice(render(&e.ultras, c.emit.unwrap_or(Emit::Json)).as_bytes());
        Ok(EXIT_OK)
    }

    fn bisim(&self, c: &Common, pair: &str, out: &mut Vec<u8>) -> Result<i32, Failure> {
        let (p, q) = split_pair(pair)?;
        let (p, q) = (self.parse_root(p)?, self.parse_root(q)?);
        let e = self.explore(c, &[p.clone(), q.clone()])?;
        let partition = coarsest_bisimulation(&e.ultras);
        let (x, y) = (e.state_of(&p).expect("root explored"), e.state_of(&q).expect("root explored"));
        let same = partition.same_block(x, y);
        match c.emit.unwrap_or(Emit::Text) {
            Emit::Json => {
                let blocks: Vec<Vec<String>> =
                    partition.blocks().iter().map(|b| b.iter().map(|&s| e.terms[s].to_string()).collect()).collect();
                let _ = writeln!(
                    out,
                    "{{\"p\": {:?}, \"q\": {:?}, \"bisimilar\": {same}, \"blocks\": {blocks:?}}}",
                    p.to_string(),
                    q.to_string()
                );
            }
            Emit::Dot | Emit::Text => {
                let _ = writeln!(out, "{}", if same { "bisimilar" } else { "not bisimilar" });
            }
        }
        Ok(if same { EXIT_OK } else { EXIT_VIOLATED })
    }

    fn congruence(&self, c: &Common, out: &mut Vec<u8>) -> Result<i32, Failure> {
        let mut gen = SigmaGenerator::new(&self.spec);
        gen.set_labels.retain(|l| l != TAU);
        let cfg = CongruenceConfig {
            trials: c.trials,
            seed: c.seed,
            jobs: c.jobs.max(1),
            budget: DerivationBudget { max_states: c.max_states.min(2_000), ..Self::budget(c) },
            ..CongruenceConfig::default()
        };
        let report = congruence_suite(&self.spec, &gen, &cfg);
        let _ = writeln!(
            out,
            "trials {}, distinct pairs {}, contexts {}, skipped {}, counterexamples {}",
            report.trials,
            report.distinct_pairs,
            report.contexts_checked,
            report.skipped,
            report.counterexamples.len()
        );
        for ce in &report.counterexamples {
            let _ = writeln!(out, "counterexample: trial {}: {} ~ {} in {}", ce.trial, ce.p, ce.q, ce.context);
        }
        Ok(if report.counterexamples.is_empty() { EXIT_OK } else { EXIT_VIOLATED })
    }
}

fn render<W: Weight>(u: &Ultras<W>, emit: Emit) -> String {
    match emit {
        Emit::Json => to_json(u),
        Emit::Dot => to_dot(u),
        Emit::Text => to_text(u),
    }
}

fn export(text: &str, c: &Common, out: &mut Vec<u8>) -> Result<i32, Failure> {
    fn attempt<W: Weight>(text: &str, emit: Emit) -> Result<String, String> {
        from_json::<W>(text).map(|u| render(&u, emit)).map_err(|e| e.to_string())
    }
    let emit = c.emit.unwrap_or(Emit::Json);
    let attempts = [
        attempt::<Bool>(text, emit),
        attempt::<Nat>(text, emit),
        attempt::<Rational>(text, emit),
        attempt::<ExtRational>(text, emit),
    ];
    let mut reason = String::from("not a stored system");
    for a in attempts {
        match a {
            Ok(s) => {
                out.extend_from_slice(s.as_bytes());
                return Ok(EXIT_OK);
            }
            Err(e) if !e.contains("expected monoid") => reason = e,
            Err(_) => {}
        }
    }
    Err(Failure::usage(reason))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_split_outside_parallel_bars() {
        assert_eq!(split_pair("P || Q | R").unwrap(), ("P || Q", "R"));
        assert_eq!(split_pair("a|b").unwrap(), ("a", "b"));
        assert!(split_pair("a||b").is_err());
        assert!(split_pair("a|b|c").is_err());
    }
}
