//! Segala GSOS: rules whose targets are convex combinations of terms over
//! process variables, support variables and distribution variables.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::interp::{Builtin, Interpretation, TermFn};
use crate::syntax::{OpDecl, Param, ParamKind, SigKind, Signature, Term, Var};
use crate::weights::{Rational, Weight};
use crate::wfsos::dsl::{parse_document, Document, RawRule, RawTarget};
use crate::wfsos::{ArgMode, Format, NegPremise, PosPremise, Rule, SpecError, SupportPremise, WfsosSpec};

use super::{DirectError, DirectRow};

pub const CONVEX: &str = "convex";
pub const WAPPLY: &str = "wapply";
pub const COLOUR: &str = "colour";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegalaRule {
    pub name: String,
    pub op: String,
    pub params: Vec<Param>,
    pub args: Vec<String>,
    pub modes: Vec<ArgMode>,
    pub pos: Vec<PosPremise>,
    pub neg: Vec<NegPremise>,
    pub support: Vec<SupportPremise>,
    pub label: String,
    /// `w1 * t1 + ... + wm * tm`, weights in (0,1] summing to 1.
    pub target: Vec<(Rational, Term)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegalaGsosSpec {
    pub labels: Vec<String>,
    pub sigma: Signature,
    pub rules: Vec<SegalaRule>,
}

fn label_name(r: &RawRule, l: &Param, labels: &[String]) -> Result<String, SpecError> {
    match l {
        Param::Name(n) if labels.contains(n) => Ok(n.clone()),
        Param::Name(n) => Err(r.error(format!("unknown label `{n}`"))),
        _ => Err(r.error("segala rules take concrete labels")),
    }
}

fn resolve(r: &RawRule, doc: &Document) -> Result<SegalaRule, SpecError> {
    if !r.totals.is_empty() || !r.wtotals.is_empty() || !r.weighted.is_empty() {
        return Err(r.error("weight premises do not belong to the segala format"));
    }
    if !r.conds.is_empty() {
        return Err(r.error("segala rules take no side conditions"));
    }
    doc.sigma.check_node(&r.op, &r.params, r.args.len()).map_err(|e| r.error(e.to_string()))?;
    if r.params.iter().any(Param::is_schematic) {
        return Err(r.error("segala rules take concrete operator parameters"));
    }
    let modes = r.modes()?;
    if modes.contains(&ArgMode::RestZero) {
        return Err(r.error("`rest_zero` does not belong to the segala format"));
    }
    let mut names: BTreeSet<&str> = BTreeSet::new();
    for x in &r.args {
        if !names.insert(x) {
            return Err(r.error(format!("variable `{x}` occurs twice")));
        }
    }
    let mut pos = vec![];
    let mut fn_vars = BTreeSet::new();
    for (x, l, v) in &r.pos {
        if !fn_vars.insert(v.clone()) {
            return Err(r.error(format!("`%{v}` is bound twice")));
        }
        pos.push(PosPremise { arg: r.arg_index(x)?, label: Param::Name(label_name(r, l, &doc.labels)?), var: v.clone() });
    }
    let mut neg = vec![];
    for (x, l) in &r.neg {
        neg.push(NegPremise { arg: r.arg_index(x)?, label: Param::Name(label_name(r, l, &doc.labels)?) });
    }
    let mut support = vec![];
    for (v, y) in &r.support {
        if !fn_vars.contains(v) {
            return Err(r.error(format!("`%{v}` is not bound by a premise")));
        }
        if !names.insert(y) {
            return Err(r.error(format!("variable `{y}` occurs twice")));
        }
        support.push(SupportPremise { var: v.clone(), target: y.clone() });
    }
    let label = label_name(r, &r.label, &doc.labels)?;
    let Some(RawTarget::Convex(parts)) = &r.target else {
        return Err(r.error("expected a convex target `w1 * t1 + ...`"));
    };
    let mut target = vec![];
    let mut sum = Rational::zero();
    for (w, t) in parts {
        let w = Rational::parse_weight(w).map_err(|e| r.error(e.to_string()))?;
        if w.is_zero() || w > <Rational as One>::one() {
            return Err(r.error(format!("weight {w} is outside (0,1]")));
        }
        sum += &w;
        doc.sigma.check_term(t).map_err(|e| r.error(e.to_string()))?;
        for v in t.vars() {
            let ok = match &v {
                Var::Proc(x) => names.contains(x.as_str()),
                Var::Fn(p) => fn_vars.contains(p),
            };
            if !ok {
                return Err(r.error(format!("target variable `{v}` is not bound")));
            }
        }
        target.push((w, t.clone()));
    }
    if !sum.is_one() {
        return Err(r.error(format!("target weights sum to {sum}, not 1")));
    }
    Ok(SegalaRule { name: r.name.clone(), op: r.op.clone(), params: r.params.clone(), args: r.args.clone(), modes, pos, neg, support, label, target })
}

pub fn segala_from_document(doc: &Document) -> Result<SegalaGsosSpec, SpecError> {
    if doc.format != Format::Segala {
        return Err(SpecError::Format { expected: Format::Segala, found: doc.format });
    }
    if doc.monoid != Rational::MONOID.id {
        return Err(SpecError::Monoid { expected: Rational::MONOID.id, found: doc.monoid });
    }
    if !doc.defs.is_empty() || doc.interp.is_some() || !doc.betas.is_empty() || !doc.groups.is_empty() || !doc.theta.is_empty() {
        return Err(SpecError::Invalid(
            "a segala spec has only labels, a process signature and rules".into(),
        ));
    }
    let rules = doc.rules.iter().map(|r| resolve(r, doc)).collect::<Result<_, _>>()?;
    Ok(SegalaGsosSpec { labels: doc.labels.clone(), sigma: doc.sigma.clone(), rules })
}

pub fn parse_segala(text: &str) -> Result<SegalaGsosSpec, SpecError> {
    segala_from_document(&parse_document(text)?)
}

/// The direct semantics, memoized per term.
pub struct SegalaSemantics<'s> {
    spec: &'s SegalaGsosSpec,
    memo: HashMap<Term, Arc<DirectRow<Rational>>>,
}

impl<'s> SegalaSemantics<'s> {
    pub fn new(spec: &'s SegalaGsosSpec) -> Self {
        SegalaSemantics { spec, memo: HashMap::new() }
    }

    pub fn successors(&mut self, p: &Term) -> Result<Arc<DirectRow<Rational>>, DirectError> {
        if let Some(r) = self.memo.get(p) {
            return Ok(r.clone());
        }
        let a = p.as_app().ok_or_else(|| DirectError::Term(p.to_string()))?;
        if !p.is_ground() || self.spec.sigma.check_term(p).is_err() {
            return Err(DirectError::Term(p.to_string()));
        }
        let rows = a.args.iter().map(|q| self.successors(q)).collect::<Result<Vec<_>, _>>()?;
        let mut out: DirectRow<Rational> = self.spec.labels.iter().map(|l| (l.clone(), BTreeSet::new())).collect();
        for r in &self.spec.rules {
            if r.op != a.op || r.params != a.params || !triggered(r, &rows) {
                continue;
            }
            let lists: Vec<Vec<&TermFn<Rational>>> =
                r.pos.iter().map(|pp| rows[pp.arg][label_of(&pp.label)].iter().collect()).collect();
            for choice in product(&lists) {
                let theta: BTreeMap<&str, &TermFn<Rational>> =
                    r.pos.iter().zip(&choice).map(|(pp, f)| (pp.var.as_str(), *f)).collect();
                let supports: Vec<Vec<&Term>> = r.support.iter().map(|s| theta[s.var.as_str()].support().collect()).collect();
                for ys in product(&supports) {
                    let mut sigma: BTreeMap<&str, &Term> = r.args.iter().map(String::as_str).zip(&a.args).collect();
                    for (s, y) in r.support.iter().zip(ys) {
                        sigma.insert(&s.target, y);
                    }
                    let mut mu = TermFn::zero();
                    for (w, t) in &r.target {
                        for (k, v) in lift(t, &sigma, &theta).iter() {
                            mu.add_at(k.clone(), w * v);
                        }
                    }
                    out.get_mut(&r.label).expect("declared label").insert(mu);
                }
            }
        }
        let row = Arc::new(out);
        self.memo.insert(p.clone(), row.clone());
        Ok(row)
    }
}

fn label_of(l: &Param) -> &str {
    match l {
        Param::Name(n) => n,
        _ => unreachable!("segala labels are concrete"),
    }
}

fn triggered(r: &SegalaRule, rows: &[Arc<DirectRow<Rational>>]) -> bool {
    (0..r.args.len()).all(|i| {
        let enabled: BTreeSet<&str> = rows[i].iter().filter(|(_, fs)| !fs.is_empty()).map(|(l, _)| l.as_str()).collect();
        let wanted: BTreeSet<&str> = r.pos.iter().filter(|p| p.arg == i).map(|p| label_of(&p.label)).collect();
        let blocked = r.neg.iter().filter(|n| n.arg == i).any(|n| enabled.contains(label_of(&n.label)));
        let shape = match r.modes[i] {
            ArgMode::Open => wanted.is_subset(&enabled),
            _ => wanted == enabled,
        };
        shape && !blocked
    })
}

/// The distribution of `t` with process variables substituted and every
/// occurrence of a distribution variable drawn independently.
fn lift(t: &Term, sigma: &BTreeMap<&str, &Term>, theta: &BTreeMap<&str, &TermFn<Rational>>) -> TermFn<Rational> {
    match t {
        Term::Var(Var::Proc(x)) => TermFn::point(sigma[x.as_str()].clone(), <Rational as One>::one()),
        Term::Var(Var::Fn(p)) => theta[p.as_str()].clone(),
        Term::App(a) => {
            let mut acc: Vec<(Vec<Term>, Rational)> = vec![(vec![], <Rational as One>::one())];
            for c in &a.args {
                let d = lift(c, sigma, theta);
                acc = acc
                    .iter()
                    .flat_map(|(ts, w)| {
                        d.iter().map(move |(k, v)| {
                            let mut ts = ts.clone();
                            ts.push(k.clone());
                            (ts, w * v)
                        })
                    })
                    .collect();
            }
            let mut out = TermFn::zero();
            for (ts, w) in acc {
                out.add_at(Term::app(a.op.clone(), a.params.clone(), ts), w);
            }
            out
        }
    }
}

fn product<T: Copy>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    lists.iter().fold(vec![vec![]], |acc, l| {
        acc.iter()
            .flat_map(|prefix| {
                l.iter().map(move |x| {
                    let mut v = prefix.clone();
                    v.push(*x);
                    v
                })
            })
            .collect()
    })
}

/// The WFSOS spec over the rationals: premises carry over unchanged, and each
/// target part containing distribution variables becomes
/// `wapply{1}(t[each occurrence of %p -> colour{k}(%p)])`.
pub fn translate_segala(s: &SegalaGsosSpec) -> Result<WfsosSpec<Rational>, SpecError> {
    for op in [CONVEX, WAPPLY, COLOUR] {
        if s.sigma.contains(op) {
            return Err(SpecError::Invalid(format!("process operator `{op}` clashes with the translation")));
        }
    }
    let theta = Signature::new(SigKind::Weight)
        .with(OpDecl::variadic(CONVEX, ParamKind::Weight))
        .with(OpDecl::new(WAPPLY, 1, vec![ParamKind::Any]))
        .with(OpDecl::new(COLOUR, 1, vec![ParamKind::Name]));
    let interp = Interpretation::new("segala", <Rational as One>::one())
        .with_rule(CONVEX, Builtin::Convex)
        .with_rule(WAPPLY, Builtin::WApply)
        .with_rule(COLOUR, Builtin::Colour);
    let mut spec = WfsosSpec::new(s.labels.clone(), s.sigma.clone(), theta, interp);
    for r in &s.rules {
        let weights = r.target.iter().map(|(w, _)| Param::Weight(w.to_string())).collect();
        let parts = r.target.iter().map(|(_, t)| colour_part(t)).collect();
        spec.rules.push(Rule {
            name: r.name.clone(),
            op: r.op.clone(),
            params: r.params.clone(),
            args: r.args.clone(),
            modes: r.modes.clone(),
            pos: r.pos.clone(),
            neg: r.neg.clone(),
            totals: vec![],
            support: r.support.clone(),
            label: Param::Name(r.label.clone()),
            target: Term::app(CONVEX, weights, parts),
            conds: vec![],
        });
    }
    Ok(spec)
}

fn colour_part(t: &Term) -> Term {
    if !t.vars().iter().any(|v| matches!(v, Var::Fn(_))) {
        return t.clone();
    }
    let mut k = 0;
    let body = t.rewrite(&mut |s| match s {
        Term::Var(Var::Fn(_)) => {
            k += 1;
            Some(Term::app(COLOUR, vec![Param::Weight(k.to_string())], vec![s.clone()]))
        }
        _ => None,
    });
    Term::app(WAPPLY, vec![Param::Weight("1".into())], vec![body])
}
