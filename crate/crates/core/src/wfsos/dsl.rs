//! The textual spec language shared by the WFSOS, Segala and W-GSOS formats.
//!
//! A document is a sequence of statements, each introduced by a keyword:
//!
//! ```text
//! format wfsos
//! monoid ratinf
//! labels a, b, tau
//! signature process { nil/0; prefix/1 {label, weight}; const/0 {name} unfold }
//! signature weight { empty/0; diamond/1 {weight}; wsum/2 }
//! define P = prefix{a,1}(const{P})
//! interp pepa = { empty: zero; diamond: reshape; wsum: pointwise_sum; base: dirac(inf) }
//! rule act: => prefix{?a,?r}(x) --?a--> diamond{?r}(x)
//! ```
//!
//! Rules of the three formats share the premise syntax and differ in their
//! targets: a weight term, a convex sum `w1 * t1 + ...`, or `t @ beta`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::interp::{Beta, Builtin, Interpretation};
use crate::syntax::{Cursor, OpDecl, Param, ParamKind, ParseError, SigKind, Signature, Term};
use crate::weights::{MonoidId, Weight};

use super::rule::{ArgMode, CondOp, MergeGroup, NegPremise, PosPremise, Rule, SideCond, SupportPremise, TotalPremise};
use super::spec::WfsosSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Wfsos,
    Segala,
    Wgsos,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Wfsos => "wfsos",
            Format::Segala => "segala",
            Format::Wgsos => "wgsos",
        }
    }

    pub fn from_name(s: &str) -> Option<Format> {
        match s {
            "wfsos" => Some(Format::Wfsos),
            "segala" => Some(Format::Segala),
            "wgsos" => Some(Format::Wgsos),
            _ => None,
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("spec is for monoid {found}, expected {expected}")]
    Monoid { expected: MonoidId, found: MonoidId },
    #[error("spec has format {found}, expected {expected}")]
    Format { expected: Format, found: Format },
    #[error("rule {rule}: {message}")]
    Rule { rule: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

/// The multiadditive function of a W-GSOS conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BetaRef {
    /// `prod{c}(u1, ..)`: `c * u1 * ... * um`; the coefficient may be an
    /// expression over metas.
    Prod(Param),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawTarget {
    Term(Term),
    /// `w1 * t1 + ... + wm * tm`.
    Convex(Vec<(String, Term)>),
    Weighted { term: Term, beta: BetaRef, args: Vec<String> },
}

/// A rule as written, before resolution against a format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRule {
    pub name: String,
    pub op: String,
    pub params: Vec<Param>,
    pub args: Vec<String>,
    pub modes: Vec<(String, ArgMode)>,
    /// `x --a--> %phi`
    pub pos: Vec<(String, Param, String)>,
    /// `x -/a->`
    pub neg: Vec<(String, Param)>,
    /// `total(%phi) = w`
    pub totals: Vec<(String, Param)>,
    /// `in(%phi, y)`
    pub support: Vec<(String, String)>,
    /// `x =a=> w`
    pub wtotals: Vec<(String, Param, Param)>,
    /// `x --a,u--> y`
    pub weighted: Vec<(String, Param, String, String)>,
    pub label: Param,
    pub target: Option<RawTarget>,
    pub conds: Vec<SideCond>,
}

impl RawRule {
    pub fn new(name: String) -> Self {
        RawRule {
            name,
            op: String::new(),
            params: vec![],
            args: vec![],
            modes: vec![],
            pos: vec![],
            neg: vec![],
            totals: vec![],
            support: vec![],
            wtotals: vec![],
            weighted: vec![],
            label: Param::Name(String::new()),
            target: None,
            conds: vec![],
        }
    }

    pub fn arg_index(&self, x: &str) -> Result<usize, SpecError> {
        self.args.iter().position(|a| a == x).ok_or_else(|| SpecError::Rule {
            rule: self.name.clone(),
            message: format!("`{x}` is not a source variable"),
        })
    }

    pub fn error(&self, message: impl Into<String>) -> SpecError {
        SpecError::Rule { rule: self.name.clone(), message: message.into() }
    }

    pub fn modes(&self) -> Result<Vec<ArgMode>, SpecError> {
        let mut modes = vec![ArgMode::Exact; self.args.len()];
        for (x, m) in &self.modes {
            modes[self.arg_index(x)?] = *m;
        }
        Ok(modes)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterpDecl {
    pub name: String,
    pub rules: Vec<(String, Builtin)>,
    pub base: String,
}

/// A parsed document of any format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub format: Format,
    pub monoid: MonoidId,
    pub labels: Vec<String>,
    pub sigma: Signature,
    pub theta: Signature,
    pub defs: BTreeMap<String, Term>,
    pub interp: Option<InterpDecl>,
    pub betas: Vec<Beta>,
    pub rules: Vec<RawRule>,
    pub groups: Vec<RawGroup>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawGroup {
    pub name: String,
    pub op: String,
    pub members: Vec<RawRule>,
}

/// Format and monoid of a document, read without parsing the rest.
pub fn peek_header(text: &str) -> Result<(Format, MonoidId), SpecError> {
    let mut format = Format::Wfsos;
    let mut monoid = None;
    for line in text.lines() {
        let line = line.trim().trim_end_matches(';');
        let mut words = line.split_whitespace();
        match (words.next(), words.next()) {
            (Some("format"), Some(f)) => {
                format = Format::from_name(f).ok_or_else(|| SpecError::Invalid(format!("unknown format `{f}`")))?
            }
            (Some("monoid"), Some(m)) => {
                monoid = Some(MonoidId::from_name(m).ok_or_else(|| SpecError::Invalid(format!("unknown monoid `{m}`")))?)
            }
            _ => {}
        }
    }
    Ok((format, monoid.ok_or_else(|| SpecError::Invalid("missing `monoid` statement".into()))?))
}

pub fn parse_document(text: &str) -> Result<Document, SpecError> {
    let mut p = DocParser {
        cur: Cursor::new(text),
        doc: Document {
            format: Format::Wfsos,
            monoid: MonoidId::Rat,
            labels: vec![],
            sigma: Signature::new(SigKind::Process),
            theta: Signature::new(SigKind::Weight),
            defs: BTreeMap::new(),
            interp: None,
            betas: vec![],
            rules: vec![],
            groups: vec![],
        },
        saw_monoid: false,
    };
    p.document()?;
    if !p.saw_monoid {
        return Err(SpecError::Invalid("missing `monoid` statement".into()));
    }
    Ok(p.doc)
}

struct DocParser<'a> {
    cur: Cursor<'a>,
    doc: Document,
    saw_monoid: bool,
}

impl DocParser<'_> {
    fn term(&mut self) -> Result<Term, ParseError> {
        let (cur, doc) = (&mut self.cur, &self.doc);
        cur.term(&|s| !doc.sigma.contains(s) && !doc.theta.contains(s))
    }

    fn document(&mut self) -> Result<(), SpecError> {
        loop {
            while self.cur.eat(";") {}
            self.cur.skip_ws();
            if self.cur.at_end() {
                return Ok(());
            }
            let start = self.cur.pos();
            let kw = self.cur.ident()?;
            match kw.as_str() {
                "format" => {
                    let f = self.cur.ident()?;
                    self.doc.format =
                        Format::from_name(&f).ok_or_else(|| self.cur.error_at(start, format!("unknown format `{f}`")))?;
                }
                "monoid" => {
                    let m = self.cur.ident()?;
                    self.doc.monoid =
                        MonoidId::from_name(&m).ok_or_else(|| self.cur.error_at(start, format!("unknown monoid `{m}`")))?;
                    self.saw_monoid = true;
                }
                "labels" => loop {
                    let l = self.cur.ident()?;
                    if self.doc.labels.contains(&l) {
                        return Err(self.cur.error(format!("label `{l}` declared twice")).into());
                    }
                    self.doc.labels.push(l);
                    if !self.cur.eat(",") {
                        break;
                    }
                },
                "signature" => self.signature()?,
                "define" => {
                    let name = self.cur.ident()?;
                    self.cur.expect("=")?;
                    let body = self.cur.term(&|_| false)?;
                    if self.doc.defs.insert(name.clone(), body).is_some() {
                        return Err(self.cur.error_at(start, format!("`{name}` defined twice")).into());
                    }
                }
                "interp" => self.interp()?,
                "beta" => {
                    let name = self.cur.ident()?;
                    self.cur.expect("(")?;
                    let mut params = vec![];
                    if !self.cur.eat(")") {
                        loop {
                            params.push(self.cur.ident()?);
                            if self.cur.eat(")") {
                                break;
                            }
                            self.cur.expect(",")?;
                        }
                    }
                    self.cur.expect("=")?;
                    let body = self.cur.expr()?;
                    self.doc.betas.push(Beta { name, params, body });
                }
                "rule" => {
                    let r = self.rule()?;
                    self.doc.rules.push(r);
                }
                "group" => {
                    let name = self.cur.ident()?;
                    let op = if self.cur.eat_keyword("on") { Some(self.cur.ident()?) } else { None };
                    self.cur.expect("{")?;
                    let mut members = vec![];
                    loop {
                        while self.cur.eat(";") {}
                        if self.cur.eat("}") {
                            break;
                        }
                        if !self.cur.eat_keyword("rule") {
                            return Err(self.cur.error("expected `rule` or `}` in group").into());
                        }
                        members.push(self.rule()?);
                    }
                    let op = match op.or_else(|| members.first().map(|r| r.op.clone())) {
                        Some(op) => op,
                        None => return Err(self.cur.error_at(start, format!("empty group `{name}` needs `on <op>`")).into()),
                    };
                    self.doc.groups.push(RawGroup { name, op, members });
                }
                other => return Err(self.cur.error_at(start, format!("unknown statement `{other}`")).into()),
            }
        }
    }

    fn signature(&mut self) -> Result<(), SpecError> {
        let kind = match self.cur.ident()?.as_str() {
            "process" => SigKind::Process,
            "weight" => SigKind::Weight,
            other => return Err(self.cur.error(format!("expected `process` or `weight`, found `{other}`")).into()),
        };
        self.cur.expect("{")?;
        loop {
            while self.cur.eat(";") || self.cur.eat(",") {}
            if self.cur.eat("}") {
                return Ok(());
            }
            let start = self.cur.pos();
            let name = self.cur.ident()?;
            self.cur.expect("/")?;
            let variadic = self.cur.eat("*");
            let arity = if variadic {
                0
            } else {
                self.cur.number()?.parse::<usize>().map_err(|_| self.cur.error_at(start, "expected an arity"))?
            };
            let mut kinds = vec![];
            if self.cur.eat("{") && !self.cur.eat("}") {
                loop {
                    let k = self.cur.ident()?;
                    kinds.push(
                        ParamKind::from_keyword(&k)
                            .ok_or_else(|| self.cur.error(format!("unknown parameter kind `{k}`")))?,
                    );
                    if self.cur.eat("}") {
                        break;
                    }
                    self.cur.expect(",")?;
                }
            }
            let unfold = self.cur.eat_keyword("unfold");
            let decl = if variadic {
                if kinds.len() != 1 {
                    return Err(self.cur.error_at(start, "a variadic operator declares one parameter kind").into());
                }
                OpDecl::variadic(name.clone(), kinds[0])
            } else {
                OpDecl { name: name.clone(), arity, params: kinds, variadic: false, unfold }
            };
            if decl.unfold && (decl.arity != 0 || decl.params != [ParamKind::Name]) {
                return Err(self.cur.error_at(start, "an unfolding operator is `name/0 {name} unfold`").into());
            }
            let other = if kind == SigKind::Process { &self.doc.theta } else { &self.doc.sigma };
            if other.contains(&name) {
                return Err(self.cur.error_at(start, format!("`{name}` is in both signatures")).into());
            }
            let sig = if kind == SigKind::Process { &mut self.doc.sigma } else { &mut self.doc.theta };
            sig.declare(decl).map_err(|e| self.cur.error_at(start, e.to_string()))?;
        }
    }

    fn interp(&mut self) -> Result<(), SpecError> {
        let name = self.cur.ident()?;
        self.cur.expect("=")?;
        self.cur.expect("{")?;
        let mut rules = vec![];
        let mut base = None;
        loop {
            while self.cur.eat(";") || self.cur.eat(",") {}
            if self.cur.eat("}") {
                break;
            }
            let start = self.cur.pos();
            let op = self.cur.ident()?;
            if self.cur.eat("(") {
                // parameter names are documentation only
                while !self.cur.eat(")") {
                    if self.cur.at_end() {
                        return Err(self.cur.error("unclosed `(`").into());
                    }
                    self.cur.ident()?;
                    self.cur.eat(",");
                }
            }
            self.cur.expect(":")?;
            let b = self.cur.ident()?;
            if op == "base" {
                if b != "dirac" {
                    return Err(self.cur.error_at(start, "the base is `dirac(w)`").into());
                }
                self.cur.expect("(")?;
                base = Some(self.cur.weight_literal()?);
                self.cur.expect(")")?;
                continue;
            }
            let rule = if b == "pointwise" {
                self.cur.expect("(")?;
                let e = self.cur.expr()?;
                self.cur.expect(")")?;
                Builtin::Pointwise(e)
            } else {
                let arg = if self.cur.eat("(") {
                    let a = self.cur.ident()?;
                    self.cur.expect(")")?;
                    Some(a)
                } else if b.starts_with("coop_") {
                    Some(op.clone())
                } else {
                    None
                };
                Builtin::from_name(&b, arg.as_deref())
                    .ok_or_else(|| self.cur.error_at(start, format!("unknown builtin `{b}`")))?
            };
            rules.push((op, rule));
        }
        let base = base.ok_or_else(|| self.cur.error("interpretation without `base: dirac(w)`"))?;
        self.doc.interp = Some(InterpDecl { name, rules, base });
        Ok(())
    }

    fn label(&mut self) -> Result<Param, SpecError> {
        if self.cur.starts_with("?") {
            Ok(Param::Meta(self.cur.meta()?))
        } else {
            Ok(Param::Name(self.cur.ident()?))
        }
    }

    fn fn_var(&mut self) -> Result<String, SpecError> {
        self.cur.expect("%")?;
        Ok(self.cur.ident()?)
    }

    fn rule(&mut self) -> Result<RawRule, SpecError> {
        let mut r = RawRule::new(self.cur.ident()?);
        self.cur.expect(":")?;
        if !self.cur.eat("=>") {
            loop {
                self.premise(&mut r)?;
                if self.cur.eat("=>") {
                    break;
                }
                self.cur.expect(",")?;
            }
        }
        let start = self.cur.pos();
        let source = self.term()?;
        let Term::App(src) = &source else {
            return Err(self.cur.error_at(start, "the source must be an operator application").into());
        };
        r.op = src.op.clone();
        r.params = src.params.clone();
        for a in &src.args {
            match a.as_var() {
                Some(crate::syntax::Var::Proc(x)) => r.args.push(x.clone()),
                _ => return Err(self.cur.error_at(start, "source arguments must be variables").into()),
            }
        }
        self.cur.expect("--")?;
        r.label = self.label()?;
        self.cur.expect("-->")?;
        r.target = Some(match self.doc.format {
            Format::Wfsos => RawTarget::Term(self.term()?),
            Format::Segala => {
                let mut parts = vec![];
                loop {
                    let w = self.cur.number()?;
                    self.cur.expect("*")?;
                    parts.push((w, self.term()?));
                    if !self.cur.eat("+") {
                        break;
                    }
                }
                RawTarget::Convex(parts)
            }
            Format::Wgsos => {
                let term = self.term()?;
                self.cur.expect("@")?;
                let name = self.cur.ident()?;
                let beta = if name == "prod" {
                    if self.cur.eat("{") {
                        let c = self.cur.param()?;
                        self.cur.expect("}")?;
                        BetaRef::Prod(c)
                    } else {
                        BetaRef::Prod(Param::weight("1"))
                    }
                } else {
                    BetaRef::Named(name)
                };
                self.cur.expect("(")?;
                let mut args = vec![];
                if !self.cur.eat(")") {
                    loop {
                        args.push(self.cur.ident()?);
                        if self.cur.eat(")") {
                            break;
                        }
                        self.cur.expect(",")?;
                    }
                }
                RawTarget::Weighted { term, beta, args }
            }
        });
        if self.cur.eat_keyword("where") {
            loop {
                let lhs = self.cur.param()?;
                let op = if self.cur.eat_keyword("notin") {
                    CondOp::NotIn
                } else if self.cur.eat_keyword("in") {
                    CondOp::In
                } else if self.cur.eat("==") {
                    CondOp::Eq
                } else if self.cur.eat("!=") {
                    CondOp::Ne
                } else {
                    return Err(self.cur.error("expected `in`, `notin`, `==` or `!=`").into());
                };
                let rhs = self.cur.param()?;
                r.conds.push(SideCond { lhs, op, rhs });
                if !self.cur.eat(",") {
                    break;
                }
            }
        }
        Ok(r)
    }

    fn premise(&mut self, r: &mut RawRule) -> Result<(), SpecError> {
        for (kw, mode) in [("open", ArgMode::Open), ("rest_zero", ArgMode::RestZero)] {
            if self.cur.eat_keyword(kw) {
                self.cur.expect("(")?;
                let x = self.cur.ident()?;
                self.cur.expect(")")?;
                r.modes.push((x, mode));
                return Ok(());
            }
        }
        if self.cur.eat_keyword("total") {
            self.cur.expect("(")?;
            let v = self.fn_var()?;
            self.cur.expect(")")?;
            self.cur.expect("=")?;
            let w = self.weight_param()?;
            r.totals.push((v, w));
            return Ok(());
        }
        if self.cur.eat_keyword("in") {
            self.cur.expect("(")?;
            let v = self.fn_var()?;
            self.cur.expect(",")?;
            let y = self.cur.ident()?;
            self.cur.expect(")")?;
            r.support.push((v, y));
            return Ok(());
        }
        let x = self.cur.ident()?;
        if self.cur.eat("-/") {
            let l = self.label()?;
            self.cur.expect("->")?;
            r.neg.push((x, l));
        } else if self.cur.eat("--") {
            let l = self.label()?;
            if self.cur.eat(",") {
                let u = self.cur.ident()?;
                self.cur.expect("-->")?;
                let y = self.cur.ident()?;
                r.weighted.push((x, l, u, y));
            } else {
                self.cur.expect("-->")?;
                let v = self.fn_var()?;
                r.pos.push((x, l, v));
            }
        } else if self.cur.eat("=") {
            let l = self.label()?;
            self.cur.expect("=>")?;
            let w = self.weight_param()?;
            r.wtotals.push((x, l, w));
        } else {
            return Err(self.cur.error("expected a premise").into());
        }
        Ok(())
    }

    fn weight_param(&mut self) -> Result<Param, SpecError> {
        if self.cur.starts_with("?") {
            Ok(Param::Meta(self.cur.meta()?))
        } else {
            Ok(Param::Weight(self.cur.weight_literal()?))
        }
    }
}

/// Resolves a raw rule of the WFSOS format.
pub fn resolve_rule(r: &RawRule) -> Result<Rule, SpecError> {
    if !r.wtotals.is_empty() || !r.weighted.is_empty() {
        return Err(r.error("weighted premises belong to the wgsos format"));
    }
    let target = match &r.target {
        Some(RawTarget::Term(t)) => t.clone(),
        _ => return Err(r.error("expected a weight-term target")),
    };
    Ok(Rule {
        name: r.name.clone(),
        op: r.op.clone(),
        params: r.params.clone(),
        args: r.args.clone(),
        modes: r.modes()?,
        pos: r
            .pos
            .iter()
            .map(|(x, l, v)| Ok(PosPremise { arg: r.arg_index(x)?, label: l.clone(), var: v.clone() }))
            .collect::<Result<_, SpecError>>()?,
        neg: r
            .neg
            .iter()
            .map(|(x, l)| Ok(NegPremise { arg: r.arg_index(x)?, label: l.clone() }))
            .collect::<Result<_, SpecError>>()?,
        totals: r.totals.iter().map(|(v, w)| TotalPremise { var: v.clone(), weight: w.clone() }).collect(),
        support: r.support.iter().map(|(v, y)| SupportPremise { var: v.clone(), target: y.clone() }).collect(),
        label: r.label.clone(),
        target,
        conds: r.conds.clone(),
    })
}

/// Builds the interpretation of a document, checking the base weight.
pub fn build_interp<W: Weight>(doc: &Document) -> Result<Interpretation<W>, SpecError> {
    let Some(decl) = &doc.interp else {
        return Err(SpecError::Invalid("missing `interp` statement".into()));
    };
    let base = W::parse_weight(&decl.base).map_err(|e| SpecError::Invalid(format!("interp base: {e}")))?;
    let mut interp = Interpretation::new(&decl.name, base);
    for (op, b) in &decl.rules {
        interp.set_rule(op, b.clone());
    }
    for b in &doc.betas {
        interp.add_beta(b.clone());
    }
    Ok(interp)
}

fn check_monoid<W: Weight>(doc: &Document) -> Result<(), SpecError> {
    if doc.monoid != W::MONOID.id {
        return Err(SpecError::Monoid { expected: W::MONOID.id, found: doc.monoid });
    }
    Ok(())
}

/// Parses a WFSOS document. Validation is separate: see
/// [`WfsosSpec::validate`].
pub fn parse_spec<W: Weight>(text: &str) -> Result<WfsosSpec<W>, SpecError> {
    let doc = parse_document(text)?;
    spec_from_document(&doc)
}

pub fn spec_from_document<W: Weight>(doc: &Document) -> Result<WfsosSpec<W>, SpecError> {
    if doc.format != Format::Wfsos {
        return Err(SpecError::Format { expected: Format::Wfsos, found: doc.format });
    }
    check_monoid::<W>(doc)?;
    let mut spec = WfsosSpec::new(doc.labels.clone(), doc.sigma.clone(), doc.theta.clone(), build_interp(doc)?);
    spec.defs = doc.defs.clone();
    spec.rules = doc.rules.iter().map(resolve_rule).collect::<Result<_, _>>()?;
    for g in &doc.groups {
        let members: Vec<Rule> = g.members.iter().map(resolve_rule).collect::<Result<_, _>>()?;
        spec.groups.push(MergeGroup { name: g.name.clone(), op: g.op.clone(), members });
    }
    Ok(spec)
}

/// Header, labels and both signatures, as shared by every format.
pub fn print_preamble(out: &mut String, format: Format, monoid: MonoidId, labels: &[String], sigma: &Signature, theta: &Signature) {
    let _ = writeln!(out, "format {format}");
    let _ = writeln!(out, "monoid {monoid}");
    let _ = writeln!(out, "labels {}", labels.join(", "));
    for (kw, sig) in [("process", sigma), ("weight", theta)] {
        if sig.is_empty() {
            continue;
        }
        let _ = writeln!(out, "signature {kw} {{");
        for d in sig.ops() {
            let _ = writeln!(out, "  {d};");
        }
        out.push_str("}\n");
    }
}

/// Prints a spec in the DSL; `parse_spec` reads it back to an equal spec.
pub fn print_spec<W: Weight>(spec: &WfsosSpec<W>) -> String {
    let mut out = String::new();
    print_preamble(&mut out, Format::Wfsos, W::MONOID.id, &spec.labels, &spec.sigma, &spec.theta);
    for (name, body) in &spec.defs {
        let _ = writeln!(out, "define {name} = {body}");
    }
    for b in spec.interp.betas() {
        let _ = writeln!(out, "{b}");
    }
    let _ = writeln!(out, "interp {} = {{", spec.interp.name);
    for (op, b) in spec.interp.rules() {
        let _ = writeln!(out, "  {op}: {b};");
    }
    let _ = writeln!(out, "  base: dirac({});", spec.interp.base);
    out.push_str("}\n");
    for r in &spec.rules {
        let _ = writeln!(out, "{r}");
    }
    for g in &spec.groups {
        let _ = writeln!(out, "{g}");
    }
    out
}
