//! W-GSOS: rules with total-weight premises `x =a=> w`, weighted premises
//! `x --a,u--> y` and a target `t @ beta(u1, ..)`, over any weight monoid.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::marker::PhantomData;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::interp::{Beta, Builtin, Interpretation, NoCtx, TermFn, WeightExpr};
use crate::syntax::{OpDecl, Param, ParamKind, SigKind, Signature, Term, Var};
use crate::weights::{Rational, Weight};
use crate::wfsos::dsl::{parse_document, BetaRef, Document, RawRule, RawTarget};
use crate::wfsos::{
    ArgMode, CondOp, Format, MergeGroup, PosPremise, Rule, SideCond, SpecError, TotalPremise, WfsosSpec,
};

use super::segala::{COLOUR, WAPPLY};
use super::{DirectError, DirectRow};

/// Samples drawn when checking that a user function is multiadditive.
pub const MULTIADDITIVITY_SAMPLES: usize = 1000;

/// `x_arg =label=> weight`; the weight is a nonzero literal or a meta.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotalWeightPremise {
    pub arg: usize,
    pub label: Param,
    pub weight: Param,
}

/// `x_arg --label,u--> y`, reading the weight function of the total
/// premise `total` (an index into the rule's totals).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedPremise {
    pub total: usize,
    pub u: String,
    pub y: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WgsosRule {
    pub name: String,
    pub op: String,
    pub params: Vec<Param>,
    pub args: Vec<String>,
    /// `Exact` for a closed argument, `Open` for one declared `open(x)`.
    pub modes: Vec<ArgMode>,
    pub totals: Vec<TotalWeightPremise>,
    pub weighted: Vec<WeightedPremise>,
    pub label: Param,
    pub target: Term,
    pub beta: BetaRef,
    /// Arguments of `beta`: the `u` of each weighted premise, in call order.
    pub beta_args: Vec<String>,
    pub conds: Vec<SideCond>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WgsosSpec<W> {
    pub labels: Vec<String>,
    pub sigma: Signature,
    pub defs: BTreeMap<String, Term>,
    pub betas: BTreeMap<String, Beta>,
    pub rules: Vec<WgsosRule>,
    _weights: PhantomData<W>,
}

impl<W: Weight> WgsosSpec<W> {
    fn arity(&self, op: &str) -> Option<usize> {
        self.sigma.get(op).map(|d| if d.unfold { 1 } else { d.arity })
    }
}

/// Checks `beta(.., a + b, ..) = beta(.., a, ..) + beta(.., b, ..)` in every
/// position on random weights.
pub fn check_multiadditive<W: Weight>(beta: &Beta, samples: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = beta.params.len();
    let eval = |xs: &[W]| beta.apply(xs).map_err(|e| format!("`{}`: {e}", beta.name));
    for _ in 0..samples {
        let xs: Vec<W> = (0..m).map(|_| W::sample(&mut rng)).collect();
        for k in 0..m {
            let extra = W::sample(&mut rng);
            let mut sum = xs.clone();
            sum[k] = xs[k].clone() + extra.clone();
            let mut other = xs.clone();
            other[k] = extra;
            let (lhs, a, b) = (eval(&sum)?, eval(&xs)?, eval(&other)?);
            if lhs != a.clone() + b.clone() {
                let show = |v: &[W]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
                return Err(format!(
                    "`{}` is not additive in argument {}: f({}) = {lhs} but f({}) + f({}) = {}",
                    beta.name,
                    k + 1,
                    show(&sum),
                    show(&xs),
                    show(&other),
                    a + b
                ));
            }
        }
    }
    Ok(())
}

fn resolve<W: Weight>(r: &RawRule, spec: &WgsosSpec<W>) -> Result<WgsosRule, SpecError> {
    if !r.pos.is_empty() || !r.neg.is_empty() || !r.totals.is_empty() || !r.support.is_empty() {
        return Err(r.error("only `x =a=> w` and `x --a,u--> y` premises belong to the wgsos format"));
    }
    let decl = spec.sigma.get(&r.op).ok_or_else(|| r.error(format!("unknown operator `{}`", r.op)))?;
    let expected = spec.arity(&r.op).expect("declared");
    if r.args.len() != expected {
        return Err(r.error(format!("`{}` takes {expected} arguments", r.op)));
    }
    spec.sigma.check_node(&r.op, &r.params, decl.arity).map_err(|e| r.error(e.to_string()))?;
    let modes = r.modes()?;
    if modes.contains(&ArgMode::RestZero) {
        return Err(r.error("`rest_zero` does not belong to the wgsos format"));
    }
    let check_label = |l: &Param| match l {
        Param::Name(n) if !spec.labels.contains(n) => Err(r.error(format!("unknown label `{n}`"))),
        Param::Name(_) | Param::Meta(_) => Ok(()),
        _ => Err(r.error(format!("`{l}` is not a label"))),
    };
    check_label(&r.label)?;
    let mut names: BTreeSet<&str> = BTreeSet::new();
    for x in &r.args {
        if !names.insert(x) {
            return Err(r.error(format!("variable `{x}` occurs twice")));
        }
    }
    let mut totals: Vec<TotalWeightPremise> = vec![];
    for (x, l, w) in &r.wtotals {
        check_label(l)?;
        let arg = r.arg_index(x)?;
        if totals.iter().any(|t| t.arg == arg && &t.label == l) {
            return Err(r.error(format!("two total premises for `{x}` and `{l}`")));
        }
        match w {
            Param::Weight(lit) => {
                let v = W::parse_weight(lit).map_err(|e| r.error(e.to_string()))?;
                if v.is_zero() {
                    return Err(r.error("total-weight premises must be nonzero"));
                }
            }
            Param::Meta(_) => {}
            _ => return Err(r.error(format!("`{w}` is not a weight"))),
        }
        totals.push(TotalWeightPremise { arg, label: l.clone(), weight: w.clone() });
    }
    let mut weighted = vec![];
    let mut us: BTreeSet<&str> = BTreeSet::new();
    for (x, l, u, y) in &r.weighted {
        let arg = r.arg_index(x)?;
        let total = totals
            .iter()
            .position(|t| t.arg == arg && &t.label == l)
            .ok_or_else(|| r.error(format!("`{x} --{l},{u}--> {y}` needs a premise `{x} ={l}=> w`")))?;
        if !us.insert(u) {
            return Err(r.error(format!("weight variable `{u}` occurs twice")));
        }
        if !names.insert(y) {
            return Err(r.error(format!("variable `{y}` occurs twice")));
        }
        weighted.push(WeightedPremise { total, u: u.clone(), y: y.clone() });
    }
    let Some(RawTarget::Weighted { term, beta, args }) = &r.target else {
        return Err(r.error("expected a target `t @ beta(u1, ..)`"));
    };
    let called: BTreeSet<&str> = args.iter().map(String::as_str).collect();
    if called.len() != args.len() || called != us {
        return Err(r.error("the arguments of beta must be the weight variables, each once"));
    }
    if let BetaRef::Named(n) = beta {
        let b = spec.betas.get(n).ok_or_else(|| r.error(format!("unknown function `{n}`")))?;
        if b.params.len() != args.len() {
            return Err(r.error(format!("`{n}` takes {} arguments", b.params.len())));
        }
    }
    spec.sigma.check_term(term).map_err(|e| r.error(e.to_string()))?;
    let vars = term.vars();
    for v in &vars {
        match v {
            Var::Proc(x) if names.contains(x.as_str()) => {}
            _ => return Err(r.error(format!("target variable `{v}` is not bound"))),
        }
    }
    if let Some(w) = weighted.iter().find(|w| !vars.contains(&Var::proc(&w.y))) {
        return Err(r.error(format!("`{}` does not occur in the target", w.y)));
    }
    Ok(WgsosRule {
        name: r.name.clone(),
        op: r.op.clone(),
        params: r.params.clone(),
        args: r.args.clone(),
        modes,
        totals,
        weighted,
        label: r.label.clone(),
        target: term.clone(),
        beta: beta.clone(),
        beta_args: args.clone(),
        conds: r.conds.clone(),
    })
}

pub fn wgsos_from_document<W: Weight>(doc: &Document) -> Result<WgsosSpec<W>, SpecError> {
    if doc.format != Format::Wgsos {
        return Err(SpecError::Format { expected: Format::Wgsos, found: doc.format });
    }
    if doc.monoid != W::MONOID.id {
        return Err(SpecError::Monoid { expected: W::MONOID.id, found: doc.monoid });
    }
    if doc.interp.is_some() || !doc.groups.is_empty() || !doc.theta.is_empty() {
        return Err(SpecError::Invalid(
            "a wgsos spec has no weight signature, interpretation or groups".into(),
        ));
    }
    let mut spec = WgsosSpec {
        labels: doc.labels.clone(),
        sigma: doc.sigma.clone(),
        defs: doc.defs.clone(),
        betas: BTreeMap::new(),
        rules: vec![],
        _weights: PhantomData,
    };
    for b in &doc.betas {
        check_multiadditive::<W>(b, MULTIADDITIVITY_SAMPLES, 0).map_err(SpecError::Invalid)?;
        spec.betas.insert(b.name.clone(), b.clone());
    }
    spec.rules = doc.rules.iter().map(|r| resolve(r, &spec)).collect::<Result<_, _>>()?;
    Ok(spec)
}

pub fn parse_wgsos<W: Weight>(text: &str) -> Result<WgsosSpec<W>, SpecError> {
    wgsos_from_document(&parse_document(text)?)
}

type Bindings = BTreeMap<String, Param>;

/// One function per label: the direct semantics is functional.
pub type FunctionalRow<W> = BTreeMap<String, TermFn<W>>;

/// The direct semantics, memoized per term.
pub struct WgsosSemantics<'s, W> {
    spec: &'s WgsosSpec<W>,
    memo: HashMap<Term, Arc<FunctionalRow<W>>>,
    max_depth: usize,
    depth: usize,
}

impl<'s, W: Weight> WgsosSemantics<'s, W> {
    pub fn new(spec: &'s WgsosSpec<W>, max_depth: usize) -> Self {
        WgsosSemantics { spec, memo: HashMap::new(), max_depth, depth: 0 }
    }

    /// The row as a set-valued row, for comparison with derived systems.
    pub fn row(&mut self, p: &Term) -> Result<DirectRow<W>, DirectError> {
        let row = self.successors(p)?;
        Ok(row.iter().map(|(l, f)| (l.clone(), BTreeSet::from([f.clone()]))).collect())
    }

    pub fn successors(&mut self, p: &Term) -> Result<Arc<FunctionalRow<W>>, DirectError> {
        if let Some(r) = self.memo.get(p) {
            return Ok(r.clone());
        }
        let bad = || DirectError::Term(p.to_string());
        let a = p.as_app().ok_or_else(bad)?;
        let decl = self.spec.sigma.get(&a.op).ok_or_else(bad)?;
        let args: Vec<Term> = if decl.unfold {
            let name = match a.params.first() {
                Some(Param::Name(n)) => n,
                _ => return Err(bad()),
            };
            vec![self.spec.defs.get(name).ok_or_else(bad)?.clone()]
        } else {
            a.args.clone()
        };
        if decl.unfold {
            if self.depth >= self.max_depth {
                return Err(DirectError::Budget(self.max_depth));
            }
            self.depth += 1;
        }
        let result = self.compute(a.op.as_str(), &a.params, &args);
        if decl.unfold {
            self.depth -= 1;
        }
        let row = Arc::new(result?);
        self.memo.insert(p.clone(), row.clone());
        Ok(row)
    }

    fn compute(&mut self, op: &str, params: &[Param], args: &[Term]) -> Result<FunctionalRow<W>, DirectError> {
        let spec = self.spec;
        let mut out: FunctionalRow<W> = spec.labels.iter().map(|l| (l.clone(), TermFn::zero())).collect();
        let mut rows: Vec<Option<Arc<FunctionalRow<W>>>> = vec![None; args.len()];
        for r in spec.rules.iter().filter(|r| r.op == op) {
            let err = |message: String| DirectError::Rule { rule: r.name.clone(), message };
            let Some(b) = match_params(&r.params, params) else { continue };
            for i in 0..args.len() {
                let needed = r.modes[i] == ArgMode::Exact || r.totals.iter().any(|t| t.arg == i);
                if needed && rows[i].is_none() {
                    rows[i] = Some(self.successors(&args[i])?);
                }
            }
            let mut free: BTreeSet<String> = BTreeSet::new();
            for l in std::iter::once(&r.label).chain(r.totals.iter().map(|t| &t.label)) {
                if let Param::Meta(m) = l {
                    if !b.contains_key(m) {
                        free.insert(m.clone());
                    }
                }
            }
            let free: Vec<String> = free.into_iter().collect();
            let mut pick = vec![0usize; free.len()];
            loop {
                let mut b = b.clone();
                for (m, &k) in free.iter().zip(&pick) {
                    b.insert(m.clone(), Param::Name(spec.labels[k].clone()));
                }
                if let Some((c, f)) = self.fire(r, b, args, &rows).map_err(err)? {
                    let slot = out.get_mut(&c).expect("declared label");
                    *slot = slot.plus(&f);
                }
                if !advance(&mut pick, spec.labels.len()) {
                    break;
                }
            }
        }
        Ok(out)
    }

    fn fire(
        &self,
        r: &WgsosRule,
        mut b: Bindings,
        args: &[Term],
        rows: &[Option<Arc<FunctionalRow<W>>>],
    ) -> Result<Option<(String, TermFn<W>)>, String> {
        let label_of = |p: &Param, b: &Bindings| -> Result<String, String> {
            match resolve_param(p, b) {
                Some(Param::Name(n)) if self.spec.labels.contains(&n) => Ok(n),
                other => Err(format!("`{p}` resolves to {other:?}, not a label")),
            }
        };
        let c = label_of(&r.label, &b)?;
        let mut fns: Vec<&TermFn<W>> = vec![];
        for t in &r.totals {
            let l = label_of(&t.label, &b)?;
            let f = &rows[t.arg].as_ref().expect("computed")[&l];
            let total = f.total();
            if total.is_zero() {
                return Ok(None);
            }
            match &t.weight {
                Param::Meta(m) => match b.get(m) {
                    Some(prev) if !params_eq(prev, &Param::Weight(total.to_string())) => return Ok(None),
                    Some(_) => {}
                    None => {
                        b.insert(m.clone(), Param::Weight(total.to_string()));
                    }
                },
                Param::Weight(lit) => {
                    if W::parse_weight(lit).map_err(|e| e.to_string())? != total {
                        return Ok(None);
                    }
                }
                other => return Err(format!("`{other}` is not a weight")),
            }
            fns.push(f);
        }
        for (i, mode) in r.modes.iter().enumerate() {
            if *mode != ArgMode::Exact {
                continue;
            }
            let mut wanted = BTreeSet::new();
            for t in r.totals.iter().filter(|t| t.arg == i) {
                wanted.insert(label_of(&t.label, &b)?);
            }
            let row = rows[i].as_ref().expect("computed");
            let nonzero: BTreeSet<String> = row.iter().filter(|(_, f)| !f.total().is_zero()).map(|(l, _)| l.clone()).collect();
            if nonzero != wanted {
                return Ok(None);
            }
        }
        for cond in &r.conds {
            if !eval_cond(cond, &b)? {
                return Ok(None);
            }
        }
        let order: Vec<&WeightedPremise> = r
            .beta_args
            .iter()
            .map(|u| r.weighted.iter().find(|w| &w.u == u).expect("validated"))
            .collect();
        let supports: Vec<Vec<(&Term, &W)>> = order.iter().map(|w| fns[w.total].iter().collect()).collect();
        let coeff: Option<W> = match &r.beta {
            BetaRef::Prod(p) => Some(weight_of::<W>(p, &b)?),
            BetaRef::Named(_) => None,
        };
        let mut base: BTreeMap<Var, Term> = r.args.iter().map(Var::proc).zip(args.iter().cloned()).collect();
        let mut out = TermFn::zero();
        let mut pick = vec![0usize; order.len()];
        if supports.iter().any(Vec::is_empty) {
            return Ok(Some((c, out)));
        }
        loop {
            let values: Vec<W> = pick.iter().zip(&supports).map(|(&k, s)| s[k].1.clone()).collect();
            let w = match (&r.beta, &coeff) {
                (BetaRef::Named(n), _) => self.spec.betas[n].apply(&values).map_err(|e| e.to_string())?,
                (_, Some(c)) => values.iter().fold(c.clone(), |acc, v| acc.mul(v)),
                _ => unreachable!(),
            };
            if !w.is_zero() {
                for (wp, (&k, s)) in order.iter().zip(pick.iter().zip(&supports)) {
                    base.insert(Var::proc(&wp.y), s[k].0.clone());
                }
                let t = r.target.apply_subst(&base, true).map_err(|e| e.to_string())?;
                out.add_at(t, w);
            }
            let lens: Vec<usize> = supports.iter().map(Vec::len).collect();
            if !advance_mixed(&mut pick, &lens) {
                break;
            }
        }
        Ok(Some((c, out)))
    }
}

fn advance(pick: &mut [usize], base: usize) -> bool {
    let lens = vec![base; pick.len()];
    advance_mixed(pick, &lens)
}

fn advance_mixed(pick: &mut [usize], lens: &[usize]) -> bool {
    for (k, len) in pick.iter_mut().zip(lens) {
        *k += 1;
        if *k < *len {
            return true;
        }
        *k = 0;
    }
    false
}

fn params_eq(a: &Param, b: &Param) -> bool {
    match (a, b) {
        (Param::Weight(x), Param::Weight(y)) => {
            x == y
                || matches!((Rational::parse_weight(x), Rational::parse_weight(y)), (Ok(p), Ok(q)) if p == q)
        }
        _ => a == b,
    }
}

fn match_params(pattern: &[Param], actual: &[Param]) -> Option<Bindings> {
    let mut b = Bindings::new();
    for (p, q) in pattern.iter().zip(actual) {
        match p {
            Param::Meta(m) => match b.get(m) {
                Some(prev) if !params_eq(prev, q) => return None,
                Some(_) => {}
                None => {
                    b.insert(m.clone(), q.clone());
                }
            },
            _ if params_eq(p, q) => {}
            _ => return None,
        }
    }
    Some(b)
}

fn resolve_param(p: &Param, b: &Bindings) -> Option<Param> {
    match p {
        Param::Meta(m) => b.get(m).cloned(),
        _ => Some(p.clone()),
    }
}

fn eval_cond(c: &SideCond, b: &Bindings) -> Result<bool, String> {
    let (Some(l), Some(r)) = (resolve_param(&c.lhs, b), resolve_param(&c.rhs, b)) else {
        return Err(format!("unbound meta-variable in `{} {} {}`", c.lhs, c.op.symbol(), c.rhs));
    };
    Ok(match (c.op, &l, &r) {
        (CondOp::In, Param::Name(x), Param::Set(s)) => s.contains(x),
        (CondOp::NotIn, Param::Name(x), Param::Set(s)) => !s.contains(x),
        (CondOp::Eq, _, _) => params_eq(&l, &r),
        (CondOp::Ne, _, _) => !params_eq(&l, &r),
        _ => return Err(format!("cannot evaluate `{l} {} {r}`", c.op.symbol())),
    })
}

fn weight_of<W: Weight>(p: &Param, b: &Bindings) -> Result<W, String> {
    match resolve_param(p, b) {
        Some(Param::Weight(lit)) => W::parse_weight(&lit).map_err(|e| e.to_string()),
        Some(Param::Expr(e)) => {
            let closed = e.subst_metas(&|m| match b.get(m) {
                Some(Param::Weight(lit)) => Some(WeightExpr::lit(lit.clone())),
                _ => None,
            });
            closed.eval(&NoCtx).map_err(|e| e.to_string())
        }
        other => Err(format!("`{p}` resolves to {other:?}, not a weight")),
    }
}

/// The WFSOS spec: one merge group per process operator (an operator without
/// rules gets an empty group, so it emits the zero function on every label).
/// A total premise on `(x, a)` becomes `x --a--> %wj, total(%wj) = w` (plus
/// `where w != 0` for a meta); closed arguments become `rest_zero`; the
/// target becomes `wapply{beta}(t[y_k -> colour{k}(%w)])`.
pub fn translate_wgsos<W: Weight>(s: &WgsosSpec<W>) -> Result<WfsosSpec<W>, SpecError> {
    for op in [WAPPLY, COLOUR] {
        if s.sigma.contains(op) {
            return Err(SpecError::Invalid(format!("process operator `{op}` clashes with the translation")));
        }
    }
    let theta = Signature::new(SigKind::Weight)
        .with(OpDecl::new(WAPPLY, 1, vec![ParamKind::Any]))
        .with(OpDecl::new(COLOUR, 1, vec![ParamKind::Name]));
    let mut interp = Interpretation::new("wgsos", W::one()).with_rule(WAPPLY, Builtin::WApply).with_rule(COLOUR, Builtin::Colour);
    for b in s.betas.values() {
        interp.add_beta(b.clone());
    }
    let mut spec = WfsosSpec::new(s.labels.clone(), s.sigma.clone(), theta, interp);
    spec.defs = s.defs.clone();
    for d in s.sigma.ops() {
        let members = s.rules.iter().filter(|r| r.op == d.name).map(translate_rule).collect();
        spec.groups.push(MergeGroup { name: d.name.clone(), op: d.name.clone(), members });
    }
    Ok(spec)
}

fn translate_rule(r: &WgsosRule) -> Rule {
    let var = |j: usize| format!("w{j}");
    let mut conds = r.conds.clone();
    for t in &r.totals {
        if let Param::Meta(_) = t.weight {
            conds.push(SideCond { lhs: t.weight.clone(), op: CondOp::Ne, rhs: Param::Weight("0".into()) });
        }
    }
    let colours: BTreeMap<Var, Term> = r
        .beta_args
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let w = r.weighted.iter().find(|w| &w.u == u).expect("validated");
            let colour = Term::app(COLOUR, vec![Param::Weight((k + 1).to_string())], vec![Term::fn_var(var(w.total))]);
            (Var::proc(&w.y), colour)
        })
        .collect();
    let body = r.target.apply_subst(&colours, false).expect("non-strict substitution");
    let coeff = match &r.beta {
        BetaRef::Prod(p) => p.clone(),
        BetaRef::Named(n) => Param::Name(n.clone()),
    };
    Rule {
        name: r.name.clone(),
        op: r.op.clone(),
        params: r.params.clone(),
        args: r.args.clone(),
        modes: r.modes.iter().map(|m| if *m == ArgMode::Open { ArgMode::Open } else { ArgMode::RestZero }).collect(),
        pos: r
            .totals
            .iter()
            .enumerate()
            .map(|(j, t)| PosPremise { arg: t.arg, label: t.label.clone(), var: var(j) })
            .collect(),
        neg: vec![],
        totals: r.totals.iter().enumerate().map(|(j, t)| TotalPremise { var: var(j), weight: t.weight.clone() }).collect(),
        support: vec![],
        label: r.label.clone(),
        target: Term::app(WAPPLY, vec![coeff], vec![body]),
        conds,
    }
}
