//! PEPA: parser, the WFSOS specification of its semantics, and a direct
//! implementation of the classic rate-annotated SOS used as an oracle.
//!
//! Concrete syntax, by decreasing precedence: prefix `(a, r).P`, hiding
//! `P \ {a, b}`, cooperation `P <a, b> Q` (`P || Q` for an empty set), choice
//! `P + Q`. `nil` or `0` is the inactive process; capitalized names are
//! constants. A model is a list of `Name = P;` definitions optionally
//! followed by a system process.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_traits::Zero;
use thiserror::Error;

use crate::syntax::{Cursor, Param, ParseError, Term};
use crate::weights::{ExtRational, Rational, WeightFn};
use crate::wfsos::{parse_spec, WfsosSpec};

pub const TAU: &str = "tau";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Law {
    #[default]
    MinimalRate,
    Multiplicative,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PepaModel {
    pub defs: BTreeMap<String, Term>,
    /// Sorted, always containing `tau`.
    pub labels: Vec<String>,
    pub law: Law,
    pub system: Option<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PepaError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("undefined constant `{0}`")]
    Undefined(String),
    #[error("constant `{0}` defined twice")]
    Duplicate(String),
    #[error("rate must be positive, found `{0}`")]
    Rate(String),
    #[error("`tau` cannot be hidden or synchronized on explicitly")]
    Tau,
}

impl PepaModel {
    /// Adds labels (e.g. ones only used by roots parsed later).
    pub fn with_labels<I: IntoIterator<Item = String>>(mut self, extra: I) -> Self {
        let mut all: BTreeSet<String> = self.labels.into_iter().collect();
        all.extend(extra);
        self.labels = all.into_iter().collect();
        self
    }

    /// Parses a process over this model's constants.
    pub fn process(&self, text: &str) -> Result<Term, PepaError> {
        let t = parse_pepa_process(text)?;
        check_constants(&t, &self.defs)?;
        Ok(t)
    }
}

pub fn parse_pepa(text: &str) -> Result<PepaModel, PepaError> {
    let mut cur = Cursor::new(text);
    let mut defs = BTreeMap::new();
    let mut system = None;
    loop {
        while cur.eat(";") {}
        cur.skip_ws();
        if cur.at_end() {
            break;
        }
        let is_def = match cur.peek_ident() {
            Some(id) if id.starts_with(char::is_uppercase) => cur.rest()[id.len()..].trim_start().starts_with('='),
            _ => false,
        };
        if is_def {
            let name = cur.ident()?;
            cur.expect("=")?;
            let body = choice(&mut cur)?;
            if defs.insert(name.clone(), body).is_some() {
                return Err(PepaError::Duplicate(name));
            }
        } else {
            if system.is_some() {
                return Err(cur.error("only one system process is allowed").into());
            }
            system = Some(choice(&mut cur)?);
        }
        cur.skip_ws();
        if !cur.at_end() && !cur.starts_with(";") {
            return Err(cur.error("expected `;`").into());
        }
    }
    for body in defs.values().chain(system.iter()) {
        check_constants(body, &defs)?;
    }
    let mut labels: BTreeSet<String> = [TAU.to_string()].into();
    for body in defs.values().chain(system.iter()) {
        collect_labels(body, &mut labels);
    }
    Ok(PepaModel { defs, labels: labels.into_iter().collect(), law: Law::MinimalRate, system })
}

/// Parses a single PEPA process into a process term.
pub fn parse_pepa_process(text: &str) -> Result<Term, PepaError> {
    let mut cur = Cursor::new(text);
    let t = choice(&mut cur)?;
    cur.skip_ws();
    if !cur.at_end() {
        return Err(cur.error("trailing input after process").into());
    }
    Ok(t)
}

/// Every action label mentioned by a process term.
pub fn collect_labels(t: &Term, out: &mut BTreeSet<String>) {
    t.visit(&mut |s| match (s.op(), s.params()) {
        (Some("prefix"), [Param::Name(a), _]) => {
            out.insert(a.clone());
        }
        (Some("coop" | "hide"), [Param::Set(l)]) => out.extend(l.iter().cloned()),
        _ => {}
    });
}

fn check_constants(t: &Term, defs: &BTreeMap<String, Term>) -> Result<(), PepaError> {
    let mut missing = None;
    t.visit(&mut |s| {
        if let (Some("const"), [Param::Name(x)]) = (s.op(), s.params()) {
            if !defs.contains_key(x) && missing.is_none() {
                missing = Some(x.clone());
            }
        }
    });
    match missing {
        Some(x) => Err(PepaError::Undefined(x)),
        None => Ok(()),
    }
}

fn choice(cur: &mut Cursor<'_>) -> Result<Term, PepaError> {
    let mut t = coop(cur)?;
    while cur.eat("+") {
        let rhs = coop(cur)?;
        t = Term::app("plus", vec![], vec![t, rhs]);
    }
    Ok(t)
}

fn coop(cur: &mut Cursor<'_>) -> Result<Term, PepaError> {
    let mut t = hide(cur)?;
    loop {
        let set = if cur.eat("||") {
            BTreeSet::new()
        } else if cur.eat("<") {
            let mut s = BTreeSet::new();
            if !cur.eat(">") {
                loop {
                    s.insert(cur.ident()?);
                    if cur.eat(">") {
                        break;
                    }
                    cur.expect(",")?;
                }
            }
            s
        } else {
            return Ok(t);
        };
        if set.contains(TAU) {
            return Err(PepaError::Tau);
        }
        let rhs = hide(cur)?;
        t = Term::app("coop", vec![Param::Set(set)], vec![t, rhs]);
    }
}

fn hide(cur: &mut Cursor<'_>) -> Result<Term, PepaError> {
    let mut t = atom(cur)?;
    while cur.eat("\\") {
        let set = cur.label_set()?;
        if set.contains(TAU) {
            return Err(PepaError::Tau);
        }
        t = Term::app("hide", vec![Param::Set(set)], vec![t]);
    }
    Ok(t)
}

fn atom(cur: &mut Cursor<'_>) -> Result<Term, PepaError> {
    if cur.starts_with("(") {
        // `(a, r)` starts a prefix, anything else is a parenthesized process
        cur.expect("(")?;
        let is_prefix = match cur.peek_ident() {
            Some(id) => {
                let after = cur.rest()[id.len()..].trim_start();
                after.starts_with(',')
            }
            None => false,
        };
        if is_prefix {
            let a = cur.ident()?;
            cur.expect(",")?;
            let r = cur.number()?;
            if crate::weights::parse_rational(&r).is_none_or(|q| q.is_zero()) {
                return Err(PepaError::Rate(r));
            }
            cur.expect(")")?;
            cur.expect(".")?;
            let body = atom(cur)?;
            return Ok(Term::app("prefix", vec![Param::Name(a), Param::Weight(r)], vec![body]));
        }
        let t = choice(cur)?;
        cur.expect(")")?;
        return Ok(t);
    }
    if cur.eat("0") {
        return Ok(Term::constant("nil"));
    }
    let start = cur.pos();
    let id = cur.ident()?;
    if id == "nil" {
        return Ok(Term::constant("nil"));
    }
    if id.starts_with(char::is_uppercase) {
        return Ok(Term::app("const", vec![Param::Name(id)], vec![]));
    }
    Err(cur.error_at(start, format!("expected a process, found `{id}`")).into())
}

/// The spec text for a label set and cooperation law.
pub fn pepa_spec_text(labels: &[String], law: Law) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "format wfsos\nmonoid ratinf\nlabels {}", labels.join(", "));
    s.push_str(
        "signature process {\n  nil/0;\n  prefix/1 {label, weight};\n  plus/2;\n  coop/2 {labels};\n  hide/1 {labels};\n  const/0 {name} unfold;\n}\n",
    );
    s.push_str("signature weight {\n  empty/0;\n  diamond/1 {weight};\n  wsum/2;\n  par/2 {labels};\n}\n");
    let (coop, base) = match law {
        Law::MinimalRate => ("coop_min_law", "inf"),
        Law::Multiplicative => ("coop_product_law", "1"),
    };
    let _ = writeln!(
        s,
        "interp pepa = {{ empty: zero; diamond: reshape; wsum: pointwise_sum; par: {coop}(coop); base: dirac({base}) }}"
    );
    s.push_str(
        "rule nil: => nil --?a--> empty
rule act: open(x) => prefix{?a,?r}(x) --?a--> diamond{?r}(x)
rule dis: open(x) => prefix{?a,?r}(x) --?b--> empty where ?a != ?b
rule choice: open(x), open(y), x --?a--> %p, y --?a--> %q => plus(x,y) --?a--> wsum(%p,%q)
rule sync: open(x), open(y), x --?a--> %p, y --?a--> %q => coop{?L}(x,y) --?a--> par{?L}(%p,%q) where ?a in ?L
rule async: open(x), open(y), x --?a--> %p, y --?a--> %q => coop{?L}(x,y) --?a--> wsum(par{?L}(%p,y),par{?L}(x,%q)) where ?a notin ?L
rule hide_pass: open(x), x --?c--> %p => hide{?L}(x) --?c--> %p where ?c notin ?L, ?c != tau
rule hide_block: open(x) => hide{?L}(x) --?c--> empty where ?c in ?L, ?c != tau
rule unfold: open(x), x --?a--> %p => const{?X}(x) --?a--> %p
",
    );
    // one rule per hidden set: its tau-function sums the functions of the
    // hidden labels and of tau itself
    let visible: Vec<&String> = labels.iter().filter(|l| *l != TAU).collect();
    for mask in 0u64..(1 << visible.len()) {
        let hidden: Vec<&String> = (0..visible.len()).filter(|k| mask >> k & 1 == 1).map(|k| visible[k]).collect();
        let mut premises: Vec<String> = vec!["open(x)".into()];
        let mut vars = vec![];
        for (k, l) in hidden.iter().map(|l| l.as_str()).chain([TAU]).enumerate() {
            premises.push(format!("x --{l}--> %p{k}"));
            vars.push(format!("%p{k}"));
        }
        let target = vars.iter().rev().cloned().reduce(|acc, v| format!("wsum({v},{acc})")).expect("tau premise");
        let set: Vec<&str> = hidden.iter().map(|l| l.as_str()).collect();
        let _ = writeln!(s, "rule hide_tau_{mask}: {} => hide{{{{{}}}}}(x) --tau--> {target}", premises.join(", "), set.join(","));
    }
    s
}

/// The same semantics as a W-GSOS spec over the rationals, for
/// [`super::wgsos::translate_wgsos`].
pub fn pepa_wgsos_text(labels: &[String], law: Law) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "format wgsos\nmonoid rat\nlabels {}", labels.join(", "));
    s.push_str(
        "signature process {\n  nil/0;\n  prefix/1 {label, weight};\n  plus/2;\n  coop/2 {labels};\n  hide/1 {labels};\n  const/0 {name} unfold;\n}\n",
    );
    let sync = match law {
        Law::MinimalRate => "prod{[min(?v, ?w) / (?v * ?w)]}(u1, u2)",
        Law::Multiplicative => "prod{1}(u1, u2)",
    };
    let _ = write!(
        s,
        "rule act: open(x) => prefix{{?a,?r}}(x) --?a--> x @ prod{{?r}}()
rule choice_l: open(x), open(y), x =?c=> ?w, x --?c,u--> z => plus(x, y) --?c--> z @ prod{{1}}(u)
rule choice_r: open(x), open(y), y =?c=> ?w, y --?c,u--> z => plus(x, y) --?c--> z @ prod{{1}}(u)
rule async_l: open(x), open(y), x =?c=> ?w, x --?c,u--> z => coop{{?L}}(x, y) --?c--> coop{{?L}}(z, y) @ prod{{1}}(u) where ?c notin ?L
rule async_r: open(x), open(y), y =?c=> ?w, y --?c,u--> z => coop{{?L}}(x, y) --?c--> coop{{?L}}(x, z) @ prod{{1}}(u) where ?c notin ?L
rule sync: open(x), open(y), x =?c=> ?v, y =?c=> ?w, x --?c,u1--> x1, y --?c,u2--> y1 => coop{{?L}}(x, y) --?c--> coop{{?L}}(x1, y1) @ {sync} where ?c in ?L
rule hide_pass: open(x), x =?c=> ?w, x --?c,u--> y => hide{{?L}}(x) --?c--> y @ prod{{1}}(u) where ?c notin ?L, ?c != tau
rule hide_tau: open(x), x =?b=> ?w, x --?b,u--> y => hide{{?L}}(x) --tau--> y @ prod{{1}}(u) where ?b in ?L
rule hide_own: open(x), x =tau=> ?w, x --tau,u--> y => hide{{?L}}(x) --tau--> y @ prod{{1}}(u)
rule unfold: open(x), x =?c=> ?w, x --?c,u--> y => const{{?X}}(x) --?c--> y @ prod{{1}}(u)
"
    );
    s
}

/// The WFSOS specification of the model's semantics.
pub fn pepa_wfsos(model: &PepaModel) -> WfsosSpec<ExtRational> {
    let mut spec: WfsosSpec<ExtRational> =
        parse_spec(&pepa_spec_text(&model.labels, model.law)).expect("generated PEPA spec parses");
    spec.defs = model.defs.clone();
    spec
}

/// Classic transitions `(a, r, Q)` of a process, as a multiset.
pub fn classic_transitions(model: &PepaModel, p: &Term, depth: usize) -> Vec<(String, Rational, Term)> {
    let Some(a) = p.as_app() else { return vec![] };
    match (a.op.as_str(), a.params.as_slice()) {
        ("nil", _) => vec![],
        ("prefix", [Param::Name(l), Param::Weight(r)]) => {
            let r = crate::weights::parse_rational(r).expect("rates are rationals");
            vec![(l.clone(), r, a.args[0].clone())]
        }
        ("plus", _) => {
            let mut v = classic_transitions(model, &a.args[0], depth);
            v.extend(classic_transitions(model, &a.args[1], depth));
            v
        }
        ("hide", [Param::Set(l)]) => classic_transitions(model, &a.args[0], depth)
            .into_iter()
            .map(|(b, r, q)| if l.contains(&b) { (TAU.to_string(), r, q) } else { (b, r, q) })
            .collect(),
        ("const", [Param::Name(x)]) => {
            assert!(depth > 0, "unfolding bound reached");
            classic_transitions(model, &model.defs[x], depth - 1)
        }
        ("coop", [Param::Set(l)]) => {
            let (p1, p2) = (&a.args[0], &a.args[1]);
            let t1 = classic_transitions(model, p1, depth);
            let t2 = classic_transitions(model, p2, depth);
            let coop = |q1: &Term, q2: &Term| Term::app("coop", vec![Param::Set(l.clone())], vec![q1.clone(), q2.clone()]);
            let apparent = |ts: &[(String, Rational, Term)], b: &str| {
                ts.iter().filter(|t| t.0 == b).fold(Rational::zero(), |acc, t| acc + &t.1)
            };
            let mut out = vec![];
            for (b, r, q) in &t1 {
                if !l.contains(b) {
                    out.push((b.clone(), r.clone(), coop(q, p2)));
                }
            }
            for (b, r, q) in &t2 {
                if !l.contains(b) {
                    out.push((b.clone(), r.clone(), coop(p1, q)));
                }
            }
            for (b1, r1, q1) in &t1 {
                for (b2, r2, q2) in &t2 {
                    if b1 != b2 || !l.contains(b1) {
                        continue;
                    }
                    let rate = match model.law {
                        Law::MinimalRate => {
                            let (ra1, ra2) = (apparent(&t1, b1), apparent(&t2, b1));
                            r1 / &ra1 * (r2 / &ra2) * ra1.clone().min(ra2)
                        }
                        Law::Multiplicative => r1 * r2,
                    };
                    out.push((b1.clone(), rate, coop(q1, q2)));
                }
            }
            out
        }
        _ => panic!("not a PEPA process: {p}"),
    }
}

/// Race-summed rate functions per label; labels without transitions map to
/// the zero function.
pub fn classic_rates(model: &PepaModel, p: &Term) -> BTreeMap<String, WeightFn<Term, ExtRational>> {
    let mut out: BTreeMap<String, WeightFn<Term, ExtRational>> =
        model.labels.iter().map(|l| (l.clone(), WeightFn::zero())).collect();
    for (a, r, q) in classic_transitions(model, p, 64) {
        out.entry(a).or_insert_with(WeightFn::zero).add_at(q, ExtRational::Finite(r));
    }
    out
}

/// States reachable under the classic semantics, for cross-checks.
pub fn classic_reachable(model: &PepaModel, roots: &[Term], limit: usize) -> Vec<Term> {
    let mut seen: BTreeSet<Term> = roots.iter().cloned().collect();
    let mut todo: Vec<Term> = roots.to_vec();
    while let Some(t) = todo.pop() {
        for (_, _, q) in classic_transitions(model, &t, 64) {
            if seen.len() >= limit {
                break;
            }
            if seen.insert(q.clone()) {
                todo.push(q);
            }
        }
    }
    seen.into_iter().collect()
}
