//! Derivation of the induced ULTraS of a specification over ground process
//! terms, by structural recursion with memoization, and reachable state-space
//! exploration.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::interp::{Env, InterpError, NoCtx, TermFn, WeightExpr};
use crate::syntax::{Param, Subst, Term, Var};
use crate::ultras::{StateFn, Ultras};
use crate::weights::Weight;
use crate::wfsos::{ArgMode, CondOp, MergeGroup, Rule, SideCond, WfsosSpec};

/// What to do when a bound is hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exhaustion {
    #[default]
    Error,
    /// Stop expanding, keep what was derived and flag the result.
    Truncate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DerivationBudget {
    pub max_states: usize,
    /// Nesting bound on definition unfoldings.
    pub max_depth: usize,
    pub on_exhaustion: Exhaustion,
}

impl Default for DerivationBudget {
    fn default() -> Self {
        DerivationBudget { max_states: 10_000, max_depth: 64, on_exhaustion: Exhaustion::Error }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("bad process term `{term}`: {reason}")]
    Term { term: String, reason: String },
    #[error("rule {rule}: {source}")]
    Interp { rule: String, source: InterpError },
    #[error("rule {rule}: {message}")]
    Rule { rule: String, message: String },
}

/// Successor functions of one term, one set per label (in spec label order).
pub type Row<W> = Vec<BTreeSet<TermFn<W>>>;

type Bindings = BTreeMap<String, Param>;

/// A statically applicable rule instance: parameters and labels bound and
/// the trigger matched.
struct Inst<'r> {
    rule: &'r Rule,
    b: Bindings,
    /// `(arg, label, var)` per positive premise.
    pos: Vec<(usize, usize, &'r str)>,
}

/// Memoizing derivation of successor rows.
pub struct Engine<'s, W> {
    spec: &'s WfsosSpec<W>,
    budget: DerivationBudget,
    memo: HashMap<Term, Arc<Row<W>>>,
    by_op: HashMap<&'s str, (Vec<&'s Rule>, Vec<&'s MergeGroup>)>,
    depth: usize,
    truncated: bool,
}

impl<'s, W: Weight> Engine<'s, W> {
    pub fn new(spec: &'s WfsosSpec<W>, budget: DerivationBudget) -> Self {
        let mut by_op: HashMap<&str, (Vec<&Rule>, Vec<&MergeGroup>)> = HashMap::new();
        for r in &spec.rules {
            by_op.entry(&r.op).or_default().0.push(r);
        }
        for g in &spec.groups {
            by_op.entry(&g.op).or_default().1.push(g);
        }
        Engine { spec, budget, memo: HashMap::new(), by_op, depth: 0, truncated: false }
    }

    /// Whether a bound was hit in truncate mode.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Successors of a ground term, keyed by label name.
    pub fn successors_by_label(&mut self, p: &Term) -> Result<BTreeMap<String, BTreeSet<TermFn<W>>>, EngineError> {
        let row = self.successors(p)?;
        Ok(self.spec.labels.iter().cloned().zip(row.iter().cloned()).collect())
    }

    pub fn successors(&mut self, p: &Term) -> Result<Arc<Row<W>>, EngineError> {
        if let Some(r) = self.memo.get(p) {
            return Ok(r.clone());
        }
        let row = Arc::new(self.derive(p)?);
        self.memo.insert(p.clone(), row.clone());
        Ok(row)
    }

    fn derive(&mut self, p: &Term) -> Result<Row<W>, EngineError> {
        let bad = |reason: &str| EngineError::Term { term: p.to_string(), reason: reason.to_string() };
        let app = p.as_app().ok_or_else(|| bad("not ground"))?;
        let spec = self.spec;
        let decl = spec.sigma.get(&app.op).ok_or_else(|| bad("unknown operator"))?;
        let args: Vec<Term> = if decl.unfold {
            let body = spec.unfold(p).ok_or_else(|| bad("undefined constant"))?;
            vec![body.clone()]
        } else {
            app.args.clone()
        };
        let unfolding = decl.unfold;
        if unfolding {
            if self.depth >= self.budget.max_depth {
                return match self.budget.on_exhaustion {
                    Exhaustion::Error => {
                        Err(EngineError::Budget(format!("more than {} nested unfoldings at `{p}`", self.budget.max_depth)))
                    }
                    Exhaustion::Truncate => {
                        self.truncated = true;
                        Ok(vec![BTreeSet::new(); spec.labels.len()])
                    }
                };
            }
            self.depth += 1;
        }
        let result = self.derive_app(&app.op, &app.params, &args);
        if unfolding {
            self.depth -= 1;
        }
        result
    }

    fn derive_app(&mut self, op: &str, params: &[Param], args: &[Term]) -> Result<Row<W>, EngineError> {
        let spec = self.spec;
        let (rules, groups) = match self.by_op.get(op) {
            Some((r, g)) => (r.clone(), g.clone()),
            None => (vec![], vec![]),
        };
        let mut rows: Vec<Option<Arc<Row<W>>>> = vec![None; args.len()];
        let mut out: Row<W> = vec![BTreeSet::new(); spec.labels.len()];
        for (c, slot) in out.iter_mut().enumerate() {
            for rule in &rules {
                for inst in self.instances(rule, params, args, c, &mut rows)? {
                    self.fire(&inst, args, &rows, slot)?;
                }
            }
            for g in &groups {
                self.fire_group(g, params, args, c, &mut rows, slot)?;
            }
        }
        Ok(out)
    }

    fn row(&mut self, args: &[Term], rows: &mut [Option<Arc<Row<W>>>], i: usize) -> Result<Arc<Row<W>>, EngineError> {
        if rows[i].is_none() {
            rows[i] = Some(self.successors(&args[i])?);
        }
        Ok(rows[i].clone().expect("just computed"))
    }

    fn instances<'r>(
        &mut self,
        rule: &'r Rule,
        params: &[Param],
        args: &[Term],
        c: usize,
        rows: &mut [Option<Arc<Row<W>>>],
    ) -> Result<Vec<Inst<'r>>, EngineError> {
        let spec = self.spec;
        let mut b = Bindings::new();
        if rule.params.len() != params.len() || rule.args.len() != args.len() {
            return Ok(vec![]);
        }
        for (pat, actual) in rule.params.iter().zip(params) {
            if !bind::<W>(&mut b, pat, actual) {
                return Ok(vec![]);
            }
        }
        if !bind::<W>(&mut b, &rule.label, &Param::Name(spec.labels[c].clone())) {
            return Ok(vec![]);
        }
        let free = rule.free_label_metas();
        let n = spec.labels.len();
        let combos = n.checked_pow(free.len() as u32).unwrap_or(usize::MAX);
        let mut out = vec![];
        'combo: for mut k in 0..combos {
            let mut b = b.clone();
            for m in &free {
                b.insert(m.clone(), Param::Name(spec.labels[k % n].clone()));
                k /= n;
            }
            for cond in &rule.conds {
                if let Some(false) = eval_cond::<W>(cond, &b).map_err(|m| rule_error(rule, m))? {
                    continue 'combo;
                }
            }
            let label_of = |l: &Param| match resolve(l, &b) {
                Param::Name(n) => spec.label_index(&n),
                _ => None,
            };
            let mut pos = vec![];
            for p in &rule.pos {
                match label_of(&p.label) {
                    Some(a) => pos.push((p.arg, a, p.var.as_str())),
                    None => continue 'combo,
                }
            }
            let mut neg = vec![];
            for q in &rule.neg {
                match label_of(&q.label) {
                    Some(a) => neg.push((q.arg, a)),
                    None => continue 'combo,
                }
            }
            for i in 0..args.len() {
                let mode = rule.modes.get(i).copied().unwrap_or_default();
                let has_pos = pos.iter().any(|p| p.0 == i);
                let has_neg = neg.iter().any(|q| q.0 == i);
                if mode == ArgMode::Open && !has_pos && !has_neg {
                    continue;
                }
                let row = self.row(args, rows, i)?;
                let enabled: BTreeSet<usize> = (0..n).filter(|&a| !row[a].is_empty()).collect();
                let wanted: BTreeSet<usize> = pos.iter().filter(|p| p.0 == i).map(|p| p.1).collect();
                if neg.iter().any(|q| q.0 == i && enabled.contains(&q.1)) {
                    continue 'combo;
                }
                let ok = match mode {
                    ArgMode::Exact => wanted == enabled,
                    ArgMode::Open => wanted.is_subset(&enabled),
                    ArgMode::RestZero => {
                        wanted.is_subset(&enabled)
                            && enabled.difference(&wanted).all(|&a| row[a].iter().any(|f| f.total().is_zero()))
                    }
                };
                if !ok {
                    continue 'combo;
                }
            }
            out.push(Inst { rule, b, pos });
        }
        Ok(out)
    }

    // Candidate functions for a premise, filtered by literal total constants.
    fn candidates<'a>(inst: &Inst<'_>, var: &str, row: &'a [BTreeSet<TermFn<W>>], a: usize) -> Vec<&'a TermFn<W>> {
        let lits: Vec<W> = inst
            .rule
            .totals
            .iter()
            .filter(|t| t.var == var)
            .filter_map(|t| match &t.weight {
                Param::Weight(w) => Some(W::parse_weight(w).ok()),
                _ => None,
            })
            .map(|w| w.unwrap_or_else(W::zero))
            .collect();
        row[a].iter().filter(|f| lits.iter().all(|w| &f.total() == w)).collect()
    }

    fn fire(
        &self,
        inst: &Inst<'_>,
        args: &[Term],
        rows: &[Option<Arc<Row<W>>>],
        slot: &mut BTreeSet<TermFn<W>>,
    ) -> Result<(), EngineError> {
        let lists: Vec<Vec<&TermFn<W>>> = inst
            .pos
            .iter()
            .map(|&(i, a, var)| Self::candidates(inst, var, rows[i].as_ref().expect("premise rows are computed"), a))
            .collect();
        for choice in product(&lists) {
            let theta: Env<W> = inst.pos.iter().zip(&choice).map(|(p, f)| (p.2.to_string(), (*f).clone())).collect();
            self.finish(inst, args, &theta, &mut |f| {
                slot.insert(f);
            })?;
        }
        Ok(())
    }

    fn fire_group(
        &mut self,
        g: &MergeGroup,
        params: &[Param],
        args: &[Term],
        c: usize,
        rows: &mut [Option<Arc<Row<W>>>],
        slot: &mut BTreeSet<TermFn<W>>,
    ) -> Result<(), EngineError> {
        let mut insts = vec![];
        for r in &g.members {
            insts.extend(self.instances(r, params, args, c, rows)?);
        }
        let keys: Vec<(usize, usize)> =
            insts.iter().flat_map(|i| i.pos.iter().map(|p| (p.0, p.1))).collect::<BTreeSet<_>>().into_iter().collect();
        let lists: Vec<Vec<&TermFn<W>>> =
            keys.iter().map(|&(i, a)| rows[i].as_ref().expect("premise rows are computed")[a].iter().collect()).collect();
        for choice in product(&lists) {
            let theta: BTreeMap<(usize, usize), &TermFn<W>> = keys.iter().copied().zip(choice.iter().copied()).collect();
            let mut sum = TermFn::zero();
            for inst in &insts {
                let env: Env<W> = inst.pos.iter().map(|p| (p.2.to_string(), theta[&(p.0, p.1)].clone())).collect();
                self.finish(inst, args, &env, &mut |f| sum = sum.plus(&f))?;
            }
            slot.insert(sum);
        }
        Ok(())
    }

    // Binds total metas, checks the remaining side conditions, enumerates
    // support premises and interprets the target.
    fn finish(
        &self,
        inst: &Inst<'_>,
        args: &[Term],
        theta: &Env<W>,
        emit: &mut dyn FnMut(TermFn<W>),
    ) -> Result<(), EngineError> {
        let rule = inst.rule;
        let mut b = inst.b.clone();
        for t in &rule.totals {
            let total = theta[&t.var].total();
            match &t.weight {
                Param::Meta(_) => {
                    if !bind::<W>(&mut b, &t.weight, &Param::Weight(total.to_string())) {
                        return Ok(());
                    }
                }
                Param::Weight(w) => {
                    if W::parse_weight(w).ok().as_ref() != Some(&total) {
                        return Ok(());
                    }
                }
                _ => return Err(rule_error(rule, format!("bad total premise `{}`", t.weight))),
            }
        }
        for cond in &rule.conds {
            match eval_cond::<W>(cond, &b).map_err(|m| rule_error(rule, m))? {
                Some(true) => {}
                Some(false) => return Ok(()),
                None => return Err(rule_error(rule, format!("unbound meta in `{} {} {}`", cond.lhs, cond.op.symbol(), cond.rhs))),
            }
        }
        let target = rule
            .target
            .map_params(&mut |p| instantiate::<W>(p, &b))
            .map_err(|m| rule_error(rule, m))?;
        let mut sigma: Subst = rule.args.iter().zip(args).map(|(x, t)| (Var::proc(x.clone()), t.clone())).collect();
        let supports: Vec<Vec<&Term>> = rule.support.iter().map(|s| theta[&s.var].support().collect()).collect();
        for qs in product(&supports) {
            for (s, q) in rule.support.iter().zip(&qs) {
                sigma.insert(Var::proc(s.target.clone()), (*q).clone());
            }
            let psi = target.apply_subst(&sigma, false).expect("non-strict substitution");
            let f = self.spec.interp.interpret(&psi, theta).map_err(|e| EngineError::Interp { rule: rule.name.clone(), source: e })?;
            emit(f);
        }
        Ok(())
    }
}

fn rule_error(rule: &Rule, message: impl Into<String>) -> EngineError {
    EngineError::Rule { rule: rule.name.clone(), message: message.into() }
}

fn params_equal<W: Weight>(a: &Param, b: &Param) -> bool {
    match (a, b) {
        (Param::Weight(x), Param::Weight(y)) => match (W::parse_weight(x), W::parse_weight(y)) {
            (Ok(x), Ok(y)) => x == y,
            _ => x == y,
        },
        _ => a == b,
    }
}

/// Matches a pattern against a value, binding a meta on first use.
fn bind<W: Weight>(b: &mut Bindings, pattern: &Param, actual: &Param) -> bool {
    match pattern {
        Param::Meta(m) => match b.get(m) {
            Some(v) => params_equal::<W>(v, actual),
            None => {
                b.insert(m.clone(), actual.clone());
                true
            }
        },
        lit => params_equal::<W>(lit, actual),
    }
}

fn resolve(p: &Param, b: &Bindings) -> Param {
    match p {
        Param::Meta(m) => b.get(m).cloned().unwrap_or_else(|| p.clone()),
        _ => p.clone(),
    }
}

/// `None` while a meta of the condition is unbound.
fn eval_cond<W: Weight>(c: &SideCond, b: &Bindings) -> Result<Option<bool>, String> {
    if c.metas().iter().any(|m| !b.contains_key(m)) {
        return Ok(None);
    }
    let (l, r) = (resolve(&c.lhs, b), resolve(&c.rhs, b));
    let member = || match (&l, &r) {
        (Param::Name(x), Param::Set(s)) => Ok(s.contains(x)),
        (Param::Set(x), Param::Set(s)) => Ok(x.is_subset(s)),
        _ => Err(format!("`{l} in {r}` needs a label and a label set")),
    };
    Ok(Some(match c.op {
        CondOp::In => member()?,
        CondOp::NotIn => !member()?,
        CondOp::Eq => params_equal::<W>(&l, &r),
        CondOp::Ne => !params_equal::<W>(&l, &r),
    }))
}

fn instantiate<W: Weight>(p: &Param, b: &Bindings) -> Result<Param, String> {
    match p {
        Param::Meta(m) => b.get(m).cloned().ok_or_else(|| format!("unbound meta ?{m}")),
        Param::Expr(e) => {
            let mut missing = None;
            let e = e.subst_metas(&|m| match b.get(m) {
                Some(Param::Weight(w)) => Some(WeightExpr::Lit(w.clone())),
                _ => None,
            });
            for m in e.metas() {
                missing.get_or_insert(m);
            }
            if let Some(m) = missing {
                return Err(format!("meta ?{m} is not bound to a weight"));
            }
            match e.eval::<W>(&NoCtx) {
                Ok(w) => Ok(Param::Weight(w.to_string())),
                Err(_) => Ok(Param::Expr(e)),
            }
        }
        other => Ok(other.clone()),
    }
}

/// Cartesian product of candidate lists, in lexicographic order.
fn product<'a, T>(lists: &[Vec<&'a T>]) -> Vec<Vec<&'a T>> {
    let mut out = vec![vec![]];
    for l in lists {
        let mut next = Vec::with_capacity(out.len() * l.len());
        for prefix in &out {
            for x in l {
                let mut v = prefix.clone();
                v.push(*x);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// The reachable fragment of the induced ULTraS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exploration<W> {
    pub ultras: Ultras<W>,
    /// The term of each state.
    pub terms: Vec<Term>,
    /// Whether a bound was hit in truncate mode.
    pub truncated: bool,
    /// States left unexpanded by truncation; their rows are empty.
    pub unexpanded: Vec<usize>,
}

impl<W> Exploration<W> {
    pub fn state_of(&self, t: &Term) -> Option<usize> {
        self.terms.binary_search(t).ok()
    }
}

/// Breadth-first exploration from `roots` through the supports of derived
/// functions. States are numbered in term order.
pub fn explore<W: Weight>(spec: &WfsosSpec<W>, roots: &[Term], budget: DerivationBudget) -> Result<Exploration<W>, EngineError> {
    for r in roots {
        spec.check_process(r).map_err(|reason| EngineError::Term { term: r.to_string(), reason })?;
    }
    let mut engine = Engine::new(spec, budget);
    let mut seen: HashSet<Term> = HashSet::new();
    let mut order: Vec<Term> = vec![];
    let mut frontier: HashSet<Term> = HashSet::new();
    let mut truncated = false;
    for r in roots {
        if seen.insert(r.clone()) {
            order.push(r.clone());
        }
    }
    if order.len() > budget.max_states {
        return Err(EngineError::Budget(format!("{} roots exceed {} states", order.len(), budget.max_states)));
    }
    let mut rows: HashMap<Term, Arc<Row<W>>> = HashMap::new();
    let mut i = 0;
    while i < order.len() {
        let t = order[i].clone();
        i += 1;
        if frontier.contains(&t) {
            continue;
        }
        let row = engine.successors(&t)?;
        for fs in row.iter() {
            for f in fs {
                for q in f.support() {
                    if seen.contains(q) {
                        continue;
                    }
                    if seen.len() >= budget.max_states {
                        match budget.on_exhaustion {
                            Exhaustion::Error => {
                                return Err(EngineError::Budget(format!("more than {} states", budget.max_states)))
                            }
                            Exhaustion::Truncate => {
                                truncated = true;
                                frontier.insert(q.clone());
                            }
                        }
                    }
                    seen.insert(q.clone());
                    order.push(q.clone());
                }
            }
        }
        rows.insert(t, row);
    }
    let mut terms = order;
    terms.sort();
    let index: HashMap<&Term, usize> = terms.iter().enumerate().map(|(k, t)| (t, k)).collect();
    let mut ultras = Ultras::new(spec.labels.clone(), terms.iter().map(Term::to_string).collect());
    for (k, t) in terms.iter().enumerate() {
        let Some(row) = rows.get(t) else { continue };
        for (a, fs) in row.iter().enumerate() {
            let fns: Vec<StateFn<W>> = fs.iter().map(|f| f.substitute(|q| index[q])).collect();
            ultras.set_row(k, a, fns).expect("supports are explored states");
        }
    }
    let unexpanded = frontier.iter().map(|t| index[t]).collect::<BTreeSet<_>>().into_iter().collect();
    Ok(Exploration { ultras, terms, truncated: truncated || engine.truncated(), unexpanded })
}

/// Successors of a single ground term under the default budget.
pub fn successors<W: Weight>(spec: &WfsosSpec<W>, p: &Term) -> Result<BTreeMap<String, BTreeSet<TermFn<W>>>, EngineError> {
    spec.check_process(p).map_err(|reason| EngineError::Term { term: p.to_string(), reason })?;
    Engine::new(spec, DerivationBudget::default()).successors_by_label(p)
}
