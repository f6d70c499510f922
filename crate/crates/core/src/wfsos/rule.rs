use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::syntax::{Param, Term, Var};
use crate::weights::Weight;

use super::spec::WfsosSpec;

/// How the trigger constrains the labels enabled at an argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ArgMode {
    /// The premise labels are exactly the enabled labels.
    #[default]
    Exact,
    /// The premise labels are among the enabled labels. Shorthand for the
    /// family of exact rules with one unused premise per extra label.
    Open,
    /// Like `Open`, and every extra enabled label offers a zero-total function.
    RestZero,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosPremise {
    pub arg: usize,
    /// A label or a label meta-variable.
    pub label: Param,
    pub var: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegPremise {
    pub arg: usize,
    pub label: Param,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotalPremise {
    pub var: String,
    /// A weight literal or a weight meta-variable bound to the observed total.
    pub weight: Param,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportPremise {
    pub var: String,
    pub target: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CondOp {
    In,
    NotIn,
    Eq,
    Ne,
}

impl CondOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CondOp::In => "in",
            CondOp::NotIn => "notin",
            CondOp::Eq => "==",
            CondOp::Ne => "!=",
        }
    }
}

/// A decidable side condition over static parameters, e.g. `?a in ?L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideCond {
    pub lhs: Param,
    pub op: CondOp,
    pub rhs: Param,
}

impl SideCond {
    pub fn metas(&self) -> BTreeSet<String> {
        let mut out = param_metas(&self.lhs);
        out.extend(param_metas(&self.rhs));
        out
    }
}

/// A rule schema. Meta-variables (`?m`) in the source parameters, labels,
/// total premises and target stand for every instantiation satisfying the
/// side conditions; each instance is a WFSOS rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub op: String,
    pub params: Vec<Param>,
    /// Source variables, one per argument (one for a definition reference,
    /// standing for the body).
    pub args: Vec<String>,
    pub modes: Vec<ArgMode>,
    pub pos: Vec<PosPremise>,
    pub neg: Vec<NegPremise>,
    pub totals: Vec<TotalPremise>,
    pub support: Vec<SupportPremise>,
    pub label: Param,
    pub target: Term,
    pub conds: Vec<SideCond>,
}

/// Rules sharing a source operator that are combined per trigger: the
/// conclusion is the pointwise sum of the matching members' targets, or the
/// zero function when none matches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeGroup {
    pub name: String,
    pub op: String,
    pub members: Vec<Rule>,
}

pub(crate) fn param_metas(p: &Param) -> BTreeSet<String> {
    match p {
        Param::Meta(m) => [m.clone()].into(),
        Param::Expr(e) => e.metas(),
        _ => BTreeSet::new(),
    }
}

pub(crate) fn term_metas(t: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    t.visit(&mut |s| {
        for p in s.params() {
            out.extend(param_metas(p));
        }
    });
    out
}

impl Rule {
    pub fn source(&self) -> Term {
        Term::app(self.op.clone(), self.params.clone(), self.args.iter().map(Term::var).collect())
    }

    /// Metas that instantiation binds: source parameters, labels and total
    /// premises.
    pub fn binding_metas(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.params.iter().flat_map(param_metas).collect();
        out.extend(param_metas(&self.label));
        for p in &self.pos {
            out.extend(param_metas(&p.label));
        }
        for p in &self.neg {
            out.extend(param_metas(&p.label));
        }
        for t in &self.totals {
            out.extend(param_metas(&t.weight));
        }
        out
    }

    /// Label metas only bound by premises; instantiation enumerates them.
    pub fn free_label_metas(&self) -> Vec<String> {
        let mut bound: BTreeSet<String> = self.params.iter().flat_map(param_metas).collect();
        bound.extend(param_metas(&self.label));
        let mut out = vec![];
        for l in self.pos.iter().map(|p| &p.label).chain(self.neg.iter().map(|n| &n.label)) {
            if let Param::Meta(m) = l {
                if !bound.contains(m) && !out.contains(m) {
                    out.push(m.clone());
                }
            }
        }
        out
    }

    pub fn weight_metas(&self) -> BTreeSet<String> {
        self.totals.iter().flat_map(|t| param_metas(&t.weight)).collect()
    }

    fn arg_name(&self, i: usize) -> &str {
        self.args.get(i).map_or("?", String::as_str)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut premises: Vec<String> = vec![];
        for (i, m) in self.modes.iter().enumerate() {
            match m {
                ArgMode::Exact => {}
                ArgMode::Open => premises.push(format!("open({})", self.arg_name(i))),
                ArgMode::RestZero => premises.push(format!("rest_zero({})", self.arg_name(i))),
            }
        }
        premises.extend(self.pos.iter().map(|p| format!("{} --{}--> %{}", self.arg_name(p.arg), p.label, p.var)));
        premises.extend(self.neg.iter().map(|n| format!("{} -/{}->", self.arg_name(n.arg), n.label)));
        premises.extend(self.totals.iter().map(|t| format!("total(%{}) = {}", t.var, t.weight)));
        premises.extend(self.support.iter().map(|s| format!("in(%{}, {})", s.var, s.target)));
        write!(f, "rule {}: ", self.name)?;
        if !premises.is_empty() {
            write!(f, "{} ", premises.join(", "))?;
        }
        write!(f, "=> {} --{}--> {}", self.source(), self.label, self.target)?;
        if !self.conds.is_empty() {
            let conds: Vec<String> = self.conds.iter().map(|c| format!("{} {} {}", c.lhs, c.op.symbol(), c.rhs)).collect();
            write!(f, " where {}", conds.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Display for MergeGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "group {} on {} {{", self.name, self.op)?;
        for r in &self.members {
            writeln!(f, "  {r}")?;
        }
        f.write_str("}")
    }
}

/// Which well-formedness condition a rule breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    UnknownOperator,
    Arity,
    ParamPattern,
    DistinctVars,
    PremiseOverlap,
    UnknownLabel,
    TargetVars,
    FnVarUnbound,
    ZeroSupportConstant,
    ZerosumfreeRequired,
    UnboundMeta,
    TargetOperator,
    Group,
    Definition,
    Interpretation,
}

impl ViolationKind {
    pub fn describe(self) -> &'static str {
        match self {
            ViolationKind::UnknownOperator => "source operator not in the process signature",
            ViolationKind::Arity => "source variables do not match the operator arity",
            ViolationKind::ParamPattern => "parameters do not fit the operator schema",
            ViolationKind::DistinctVars => "variables are not pairwise distinct",
            ViolationKind::PremiseOverlap => "a label has both positive and negative premises on one argument",
            ViolationKind::UnknownLabel => "label not declared",
            ViolationKind::TargetVars => "target mentions variables outside X, Y and the premise functions",
            ViolationKind::FnVarUnbound => "total or support premise on a variable without positive premise",
            ViolationKind::ZeroSupportConstant => "total constant 0 on a variable with support premises",
            ViolationKind::ZerosumfreeRequired => "support premises need a zerosumfree monoid",
            ViolationKind::UnboundMeta => "meta-variable is never bound",
            ViolationKind::TargetOperator => "target uses an operator outside both signatures or without evaluation rule",
            ViolationKind::Group => "merge group members are incompatible",
            ViolationKind::Definition => "definition is malformed",
            ViolationKind::Interpretation => "interpretation does not cover the weight signature",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleViolation {
    pub rule: String,
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for RuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ({})", self.rule, self.kind.describe(), self.detail)
    }
}

/// Checks every well-formedness condition of a rule schema against a spec.
pub fn validate_rule<W: Weight>(r: &Rule, spec: &WfsosSpec<W>) -> Vec<RuleViolation> {
    let mut out = vec![];
    let mut v = |kind: ViolationKind, detail: String| out.push(RuleViolation { rule: r.name.clone(), kind, detail });

    match spec.sigma.get(&r.op) {
        None => v(ViolationKind::UnknownOperator, r.op.clone()),
        Some(d) => {
            let expected = if d.unfold { 1 } else { d.arity };
            if r.args.len() != expected {
                v(ViolationKind::Arity, format!("{} expects {expected}, rule has {}", r.op, r.args.len()));
            }
            if let Err(e) = spec.sigma.check_node(&r.op, &r.params, d.arity) {
                v(ViolationKind::ParamPattern, e.to_string());
            }
        }
    }
    if r.params.iter().any(|p| matches!(p, Param::Expr(_))) {
        v(ViolationKind::ParamPattern, "expressions cannot occur in source patterns".into());
    }
    if r.modes.len() != r.args.len() {
        v(ViolationKind::Arity, "one mode per argument expected".into());
    }

    let mut procs = BTreeSet::new();
    for x in r.args.iter().chain(r.support.iter().map(|s| &s.target)) {
        if !procs.insert(x.clone()) {
            v(ViolationKind::DistinctVars, x.clone());
        }
    }
    let mut fns = BTreeSet::new();
    for p in &r.pos {
        if !fns.insert(p.var.clone()) {
            v(ViolationKind::DistinctVars, format!("%{}", p.var));
        }
    }
    if r.pos.iter().any(|p| p.arg >= r.args.len()) || r.neg.iter().any(|n| n.arg >= r.args.len()) {
        v(ViolationKind::Arity, "premise on an argument the source does not have".into());
    }

    for n in &r.neg {
        if r.pos.iter().any(|p| p.arg == n.arg && p.label == n.label) {
            v(ViolationKind::PremiseOverlap, format!("{} on {}", n.label, r.arg_name(n.arg)));
        }
    }

    let labels: BTreeSet<&str> = spec.labels.iter().map(String::as_str).collect();
    for l in std::iter::once(&r.label).chain(r.pos.iter().map(|p| &p.label)).chain(r.neg.iter().map(|n| &n.label)) {
        match l {
            Param::Name(n) if !labels.contains(n.as_str()) => v(ViolationKind::UnknownLabel, n.clone()),
            Param::Name(_) | Param::Meta(_) => {}
            other => v(ViolationKind::UnknownLabel, format!("`{other}` is not a label")),
        }
    }

    for x in r.target.vars() {
        let ok = match &x {
            Var::Proc(n) => procs.contains(n),
            Var::Fn(n) => fns.contains(n),
        };
        if !ok {
            v(ViolationKind::TargetVars, x.to_string());
        }
    }

    for t in &r.totals {
        if !fns.contains(&t.var) {
            v(ViolationKind::FnVarUnbound, format!("%{}", t.var));
        }
        if !matches!(t.weight, Param::Weight(_) | Param::Meta(_)) {
            v(ViolationKind::ParamPattern, format!("total premise weight `{}`", t.weight));
        }
    }
    for s in &r.support {
        if !fns.contains(&s.var) {
            v(ViolationKind::FnVarUnbound, format!("%{}", s.var));
        }
        for t in r.totals.iter().filter(|t| t.var == s.var) {
            if let Param::Weight(w) = &t.weight {
                if W::parse_weight(w).is_ok_and(|w| w.is_zero()) {
                    v(ViolationKind::ZeroSupportConstant, format!("%{}", s.var));
                }
            }
        }
    }
    if !r.support.is_empty() && !W::MONOID.zerosumfree {
        v(ViolationKind::ZerosumfreeRequired, W::MONOID.id.to_string());
    }

    let bound = r.binding_metas();
    let mut used = term_metas(&r.target);
    for c in &r.conds {
        used.extend(c.metas());
    }
    for m in used.difference(&bound) {
        v(ViolationKind::UnboundMeta, format!("?{m}"));
    }

    check_target(&r.target, spec, &mut |d| v(ViolationKind::TargetOperator, d));
    for w in r.totals.iter().filter_map(|t| match &t.weight {
        Param::Weight(w) => Some(w),
        _ => None,
    }) {
        if W::parse_weight(w).is_err() {
            v(ViolationKind::ParamPattern, format!("`{w}` is not a weight of monoid {}", W::MONOID.id));
        }
    }
    out
}

fn check_target<W: Weight>(t: &Term, spec: &WfsosSpec<W>, report: &mut dyn FnMut(String)) {
    if let Term::App(a) = t {
        if spec.theta.contains(&a.op) {
            if spec.interp.rule(&a.op).is_none() {
                report(format!("`{}` has no evaluation rule", a.op));
            }
            if let Err(e) = spec.theta.check_node(&a.op, &a.params, a.args.len()) {
                report(e.to_string());
            }
        } else if spec.sigma.contains(&a.op) {
            if let Err(e) = spec.sigma.check_node(&a.op, &a.params, a.args.len()) {
                report(e.to_string());
            }
        } else {
            report(format!("unknown operator `{}`", a.op));
        }
        for c in &a.args {
            check_target(c, spec, report);
        }
    }
}

/// Checks a merge group: members are valid rules for the group operator,
/// without support premises and with at most one premise per argument and
/// label (the group binds one function per argument and label).
pub fn validate_group<W: Weight>(g: &MergeGroup, spec: &WfsosSpec<W>) -> Vec<RuleViolation> {
    let mut out = vec![];
    for r in &g.members {
        out.extend(validate_rule(r, spec));
        let mut v = |detail: String| out.push(RuleViolation { rule: r.name.clone(), kind: ViolationKind::Group, detail });
        if r.op != g.op {
            v(format!("member source `{}` in group for `{}`", r.op, g.op));
        }
        if !r.support.is_empty() {
            v("support premises are not allowed in merge groups".into());
        }
        for (k, p) in r.pos.iter().enumerate() {
            if r.pos[..k].iter().any(|q| q.arg == p.arg && q.label == p.label) {
                v(format!("two premises on {} --{}-->", r.args.get(p.arg).map_or("?", String::as_str), p.label));
            }
        }
    }
    out
}

/// Enabled labels and offered totals of the arguments of a source term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trigger<W> {
    pub enabled: Vec<BTreeSet<String>>,
    /// Totals of the candidate functions, per argument and label.
    pub totals: Vec<BTreeMap<String, Vec<W>>>,
}

/// Whether a rule with concrete premise labels fires on a trigger: the
/// premise labels match the enabled labels per argument mode, negative
/// labels are disabled, and each literal total constant is offered by some
/// candidate function. Premises with label metas never match; instantiate
/// them first.
pub fn match_trigger<W: Weight>(r: &Rule, t: &Trigger<W>) -> bool {
    if t.enabled.len() != r.args.len() {
        return false;
    }
    for (i, enabled) in t.enabled.iter().enumerate() {
        let mut a = BTreeSet::new();
        for p in r.pos.iter().filter(|p| p.arg == i) {
            match &p.label {
                Param::Name(l) => a.insert(l.clone()),
                _ => return false,
            };
        }
        for n in r.neg.iter().filter(|n| n.arg == i) {
            match &n.label {
                Param::Name(l) if enabled.contains(l) || a.contains(l) => return false,
                Param::Name(_) => {}
                _ => return false,
            }
        }
        let ok = match r.modes.get(i).copied().unwrap_or_default() {
            ArgMode::Exact => &a == enabled,
            ArgMode::Open => a.is_subset(enabled),
            ArgMode::RestZero => {
                a.is_subset(enabled)
                    && enabled.difference(&a).all(|b| {
                        t.totals.get(i).and_then(|m| m.get(b)).is_some_and(|ws| ws.iter().any(|w| w.is_zero()))
                    })
            }
        };
        if !ok {
            return false;
        }
    }
    r.totals.iter().all(|tp| {
        let Param::Weight(lit) = &tp.weight else {
            return true;
        };
        let Ok(w) = W::parse_weight(lit) else {
            return false;
        };
        r.pos.iter().filter(|p| p.var == tp.var).all(|p| {
            let Param::Name(l) = &p.label else {
                return false;
            };
            t.totals.get(p.arg).and_then(|m| m.get(l)).is_some_and(|ws| ws.contains(&w))
        })
    })
}
