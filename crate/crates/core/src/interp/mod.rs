//! Interpretations of weight terms as weight functions over process terms.
//!
//! An [`Interpretation`] assigns a [`Builtin`] evaluation rule to every
//! operator of the weight signature and a Dirac-like base to process leaves;
//! [`Interpretation::interpret`] is the structural recursion these define.

mod expr;
pub mod naturality;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use expr::{ExprCtx, ExprError, NoCtx, VarCtx, WeightExpr};

use crate::syntax::{Param, Signature, Term, Var};
use crate::weights::{Weight, WeightFn};

/// Weight function over (possibly open) process terms.
pub type TermFn<W> = WeightFn<Term, W>;

/// Values of weight-function variables, keyed by name (without `%`).
pub type Env<W> = BTreeMap<String, TermFn<W>>;

/// The catalogue of operator evaluation rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Builtin {
    /// The constantly zero function.
    Zero,
    /// `r` spread evenly over the support of the argument.
    Reshape,
    PointwiseSum,
    /// Cooperation by the minimal rate law; outputs are keyed by
    /// `target{params}(t1, t2)`.
    CoopMinLaw { target: String },
    /// Cooperation by the multiplicative law.
    CoopProductLaw { target: String },
    /// `w1 * f1 + ... + wm * fm`, the weights being the operator parameters.
    Convex,
    /// Marks an occurrence of a weight-function variable; the identity outside
    /// of `WApply`.
    Colour,
    /// Sums `beta(f_1(y_1), ..., f_m(y_m))` at `t[y_k / colour k]` over all
    /// choices of `y_k` in the supports of the coloured subterms. The
    /// parameter is a coefficient `c` (for `c * u_1 * ... * u_m`) or the name
    /// of a user multiadditive function.
    WApply,
    /// User rule: the value at each point of the children's joint support.
    Pointwise(WeightExpr),
}

impl Builtin {
    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Zero => "zero",
            Builtin::Reshape => "reshape",
            Builtin::PointwiseSum => "pointwise_sum",
            Builtin::CoopMinLaw { .. } => "coop_min_law",
            Builtin::CoopProductLaw { .. } => "coop_product_law",
            Builtin::Convex => "convex",
            Builtin::Colour => "colour",
            Builtin::WApply => "wapply",
            Builtin::Pointwise(_) => "pointwise",
        }
    }

    /// Looks a builtin up by name. `arg` is the text inside the parentheses
    /// for `coop_*_law(target)`; `pointwise` is built directly.
    pub fn from_name(name: &str, arg: Option<&str>) -> Option<Builtin> {
        let target = || arg.map(str::to_string);
        Some(match name {
            "zero" => Builtin::Zero,
            "reshape" => Builtin::Reshape,
            "pointwise_sum" => Builtin::PointwiseSum,
            "coop_min_law" => Builtin::CoopMinLaw { target: target()? },
            "coop_product_law" => Builtin::CoopProductLaw { target: target()? },
            "convex" | "convex_combination" => Builtin::Convex,
            "colour" => Builtin::Colour,
            "wapply" | "multiadditive_apply" => Builtin::WApply,
            _ => return None,
        })
    }

    fn arity_ok(&self, arity: usize, variadic: bool) -> bool {
        match self {
            Builtin::Zero => arity == 0 && !variadic,
            Builtin::Reshape | Builtin::Colour | Builtin::WApply => arity == 1 && !variadic,
            Builtin::CoopMinLaw { .. } | Builtin::CoopProductLaw { .. } => arity == 2 && !variadic,
            Builtin::Convex => variadic,
            Builtin::PointwiseSum => true,
            Builtin::Pointwise(e) => variadic || e.max_child().is_none_or(|k| k < arity),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::CoopMinLaw { target } | Builtin::CoopProductLaw { target } => {
                write!(f, "{}({target})", self.name())
            }
            Builtin::Pointwise(e) => write!(f, "pointwise({e})"),
            _ => f.write_str(self.name()),
        }
    }
}

/// A user multiadditive function `name(u1, ..., um) = body`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Beta {
    pub name: String,
    pub params: Vec<String>,
    pub body: WeightExpr,
}

impl Beta {
    pub fn apply<W: Weight>(&self, args: &[W]) -> Result<W, ExprError> {
        self.body.eval(&VarCtx { names: &self.params, values: args })
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "beta {}({}) = {}", self.name, self.params.join(", "), self.body)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpError {
    #[error("weight-function variable %{0} is not bound")]
    MissingBinding(String),
    #[error("operator `{0}` has no evaluation rule")]
    NoRule(String),
    #[error("operators without evaluation rule: {0:?}")]
    Coverage(Vec<String>),
    #[error("rule `{rule}` does not fit operator `{op}`")]
    Arity { op: String, rule: String },
    #[error("operator `{op}`: {reason}")]
    BadParam { op: String, reason: String },
    #[error("process leaf `{0}` contains a weight subterm")]
    MixedLeaf(String),
    #[error("unknown multiadditive function `{0}`")]
    UnknownBeta(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// An interpretation: one rule per weight operator plus the base value
/// assigned to process leaves (`{t -> base}`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation<W> {
    pub name: String,
    rules: BTreeMap<String, Builtin>,
    pub base: W,
    betas: BTreeMap<String, Beta>,
}

/// Builds the interpretation that agrees with `rules` on operators and with
/// the Dirac base on process leaves, checking that every operator of `theta`
/// is covered by a rule of fitting arity.
pub fn build_from_recursion<W: Weight>(
    name: &str,
    theta: &Signature,
    rules: BTreeMap<String, Builtin>,
    base: W,
) -> Result<Interpretation<W>, InterpError> {
    let missing: Vec<String> = theta.ops().filter(|d| !rules.contains_key(&d.name)).map(|d| d.name.clone()).collect();
    if !missing.is_empty() {
        return Err(InterpError::Coverage(missing));
    }
    for (op, rule) in &rules {
        if let Some(d) = theta.get(op) {
            if !rule.arity_ok(d.arity, d.variadic) {
                return Err(InterpError::Arity { op: op.clone(), rule: rule.to_string() });
            }
        }
    }
    Ok(Interpretation { name: name.to_string(), rules, base, betas: BTreeMap::new() })
}

impl<W: Weight> Interpretation<W> {
    pub fn new(name: &str, base: W) -> Self {
        Interpretation { name: name.to_string(), rules: BTreeMap::new(), base, betas: BTreeMap::new() }
    }

    pub fn with_rule(mut self, op: &str, rule: Builtin) -> Self {
        self.rules.insert(op.to_string(), rule);
        self
    }

    pub fn with_beta(mut self, beta: Beta) -> Self {
        self.betas.insert(beta.name.clone(), beta);
        self
    }

    pub fn set_rule(&mut self, op: &str, rule: Builtin) {
        self.rules.insert(op.to_string(), rule);
    }

    pub fn add_beta(&mut self, beta: Beta) {
        self.betas.insert(beta.name.clone(), beta);
    }

    pub fn rule(&self, op: &str) -> Option<&Builtin> {
        self.rules.get(op)
    }

    pub fn rules(&self) -> impl Iterator<Item = (&String, &Builtin)> + '_ {
        self.rules.iter()
    }

    pub fn betas(&self) -> impl Iterator<Item = &Beta> + '_ {
        self.betas.values()
    }

    pub fn beta(&self, name: &str) -> Option<&Beta> {
        self.betas.get(name)
    }

    pub fn is_weight_op(&self, op: &str) -> bool {
        self.rules.contains_key(op)
    }

    /// Whether `t` is a process term for this interpretation: no weight
    /// operators and no weight-function variables.
    pub fn is_process_term(&self, t: &Term) -> bool {
        match t {
            Term::Var(Var::Fn(_)) => false,
            Term::Var(Var::Proc(_)) => true,
            Term::App(a) => !self.is_weight_op(&a.op) && a.args.iter().all(|c| self.is_process_term(c)),
        }
    }

    /// `{t -> base}` for a process leaf `t`.
    pub fn dirac(&self, t: &Term) -> TermFn<W> {
        WeightFn::point(t.clone(), self.base.clone())
    }

    /// Evaluates a weight term. Process leaves (variables or process terms)
    /// are mapped by the base, weight-function variables by `env`.
    pub fn interpret(&self, psi: &Term, env: &Env<W>) -> Result<TermFn<W>, InterpError> {
        match psi {
            Term::Var(Var::Fn(n)) => env.get(n).cloned().ok_or_else(|| InterpError::MissingBinding(n.clone())),
            Term::Var(Var::Proc(_)) => Ok(self.dirac(psi)),
            Term::App(a) => match self.rules.get(&a.op) {
                None => {
                    if self.is_process_term(psi) {
                        Ok(self.dirac(psi))
                    } else {
                        Err(InterpError::MixedLeaf(psi.to_string()))
                    }
                }
                Some(rule) => self.apply(rule, psi, env),
            },
        }
    }

    fn apply(&self, rule: &Builtin, node: &Term, env: &Env<W>) -> Result<TermFn<W>, InterpError> {
        let a = node.as_app().expect("operator node");
        let op = a.op.as_str();
        let child = |i: usize| -> Result<TermFn<W>, InterpError> {
            let t = a.args.get(i).ok_or_else(|| InterpError::Arity { op: op.into(), rule: rule.to_string() })?;
            self.interpret(t, env)
        };
        match rule {
            Builtin::Zero => Ok(WeightFn::zero()),
            Builtin::Reshape => {
                let r: W = param_weight(op, a.params.first())?;
                let f = child(0)?;
                let n = f.support_size();
                if n == 0 {
                    return Ok(WeightFn::zero());
                }
                let share = div(op, &r, &W::from_count(n as u64))?;
                Ok(f.support().map(|k| (k.clone(), share.clone())).collect())
            }
            Builtin::PointwiseSum => {
                let mut out = WeightFn::zero();
                for i in 0..a.args.len() {
                    out = out.plus(&child(i)?);
                }
                Ok(out)
            }
            Builtin::CoopMinLaw { target } | Builtin::CoopProductLaw { target } => {
                let (f, g) = (child(0)?, child(1)?);
                let min_law = matches!(rule, Builtin::CoopMinLaw { .. });
                let (tf, tg) = (f.total(), g.total());
                if min_law && (tf.is_zero() || tg.is_zero()) {
                    return Ok(WeightFn::zero());
                }
                let rate = tf.clone().min(tg.clone());
                let mut out = WeightFn::zero();
                for (t1, w1) in f.iter() {
                    for (t2, w2) in g.iter() {
                        let w = if min_law {
                            div(op, w1, &tf)?.mul(&div(op, w2, &tg)?).mul(&rate)
                        } else {
                            w1.mul(w2)
                        };
                        out.add_at(Term::app(target.clone(), a.params.clone(), vec![t1.clone(), t2.clone()]), w);
                    }
                }
                Ok(out)
            }
            Builtin::Convex => {
                if a.params.len() != a.args.len() {
                    return Err(InterpError::BadParam { op: op.into(), reason: "one weight per argument expected".into() });
                }
                let mut out = WeightFn::zero();
                for (i, p) in a.params.iter().enumerate() {
                    let w: W = param_weight(op, Some(p))?;
                    for (k, v) in child(i)?.iter() {
                        out.add_at(k.clone(), w.mul(v));
                    }
                }
                Ok(out)
            }
            Builtin::Colour => child(0),
            Builtin::WApply => self.wapply(op, a.params.first(), &a.args[0], env),
            Builtin::Pointwise(e) => {
                let fs = (0..a.args.len()).map(child).collect::<Result<Vec<_>, _>>()?;
                let keys: BTreeSet<&Term> = fs.iter().flat_map(|f| f.support()).collect();
                let totals: Vec<W> = fs.iter().map(|f| f.total()).collect();
                let mut out = WeightFn::zero();
                for k in keys {
                    let ctx = PointCtx { fs: &fs, totals: &totals, at: k };
                    out.add_at(k.clone(), e.eval(&ctx)?);
                }
                Ok(out)
            }
        }
    }

    fn wapply(&self, op: &str, coeff: Option<&Param>, skeleton: &Term, env: &Env<W>) -> Result<TermFn<W>, InterpError> {
        // colours nested inside a coloured subterm belong to that subterm
        fn collect<'t, W>(
            i: &Interpretation<W>,
            t: &'t Term,
            colours: &mut BTreeMap<ColourKey, &'t Term>,
            clash: &mut Option<ColourKey>,
        ) {
            let Some(a) = t.as_app() else { return };
            if !matches!(i.rules.get(&a.op), Some(Builtin::Colour)) {
                a.args.iter().for_each(|s| collect(i, s, colours, clash));
                return;
            }
            let key = ColourKey::of(a.params.first());
            if let Some(prev) = colours.insert(key.clone(), &a.args[0]) {
                if prev != &a.args[0] {
                    *clash = Some(key);
                }
            }
        }
        let mut colours: BTreeMap<ColourKey, &Term> = BTreeMap::new();
        let mut clash = None;
        collect(self, skeleton, &mut colours, &mut clash);
        if let Some(k) = clash {
            return Err(InterpError::BadParam { op: op.into(), reason: format!("colour {k} wraps different terms") });
        }
        let keys: Vec<ColourKey> = colours.keys().cloned().collect();
        let fns = colours.values().map(|t| self.interpret(t, env)).collect::<Result<Vec<_>, _>>()?;

        let beta: Option<&Beta> = match coeff {
            Some(Param::Name(n)) => Some(self.betas.get(n).ok_or_else(|| InterpError::UnknownBeta(n.clone()))?),
            _ => None,
        };
        if let Some(b) = beta {
            if b.params.len() != keys.len() {
                return Err(InterpError::BadParam {
                    op: op.into(),
                    reason: format!("`{}` takes {} arguments, {} colours given", b.name, b.params.len(), keys.len()),
                });
            }
        }
        let c: W = match (beta, coeff) {
            (Some(_), _) => W::one(),
            (None, None) => W::one(),
            (None, p) => param_weight(op, p)?,
        };

        let supports: Vec<Vec<(&Term, &W)>> = fns.iter().map(|f| f.iter().collect()).collect();
        let mut out = WeightFn::zero();
        let mut choice = vec![0usize; keys.len()];
        if supports.iter().any(Vec::is_empty) {
            return Ok(out);
        }
        loop {
            let picked: Vec<(&Term, &W)> = choice.iter().zip(&supports).map(|(&i, s)| s[i]).collect();
            let weights: Vec<W> = picked.iter().map(|(_, w)| (*w).clone()).collect();
            let w = match beta {
                Some(b) => b.apply(&weights)?,
                None => weights.iter().fold(c.clone(), |acc, w| acc.mul(w)),
            };
            if !w.is_zero() {
                let key = skeleton.rewrite(&mut |t| {
                    let a = t.as_app()?;
                    if !matches!(self.rules.get(&a.op), Some(Builtin::Colour)) {
                        return None;
                    }
                    let ck = ColourKey::of(a.params.first());
                    let i = keys.iter().position(|k| *k == ck)?;
                    Some(picked[i].0.clone())
                });
                if !self.is_process_term(&key) {
                    return Err(InterpError::MixedLeaf(key.to_string()));
                }
                out.add_at(key, w);
            }
            // odometer over the product of supports
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return Ok(out);
                }
                choice[i] += 1;
                if choice[i] < supports[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }
}

/// Colour indices order numerically when they are numerals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum ColourKey {
    Num(u64),
    Text(String),
}

impl ColourKey {
    fn of(p: Option<&Param>) -> ColourKey {
        let text = p.map(|p| p.to_string()).unwrap_or_default();
        match text.parse() {
            Ok(n) => ColourKey::Num(n),
            Err(_) => ColourKey::Text(text),
        }
    }
}

impl fmt::Display for ColourKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColourKey::Num(n) => write!(f, "{n}"),
            ColourKey::Text(s) => f.write_str(s),
        }
    }
}

struct PointCtx<'a, W: Weight> {
    fs: &'a [TermFn<W>],
    totals: &'a [W],
    at: &'a Term,
}

impl<W: Weight> ExprCtx<W> for PointCtx<'_, W> {
    fn total(&self, k: usize) -> Option<W> {
        self.totals.get(k).cloned()
    }
    fn size(&self, k: usize) -> Option<usize> {
        self.fs.get(k).map(|f| f.support_size())
    }
    fn point(&self, k: usize) -> Option<W> {
        self.fs.get(k).map(|f| f.get(self.at))
    }
}

fn div<W: Weight>(op: &str, a: &W, b: &W) -> Result<W, InterpError> {
    if b.is_zero() {
        return Ok(W::zero());
    }
    a.checked_div(b)
        .ok_or_else(|| InterpError::BadParam { op: op.into(), reason: format!("{a}/{b} is not representable") })
}

/// Reads a weight parameter: a literal or a constant expression.
pub fn param_weight<W: Weight>(op: &str, p: Option<&Param>) -> Result<W, InterpError> {
    match p {
        Some(Param::Weight(lit)) => W::parse_weight(lit)
            .map_err(|_| InterpError::BadParam { op: op.into(), reason: format!("`{lit}` is not a weight") }),
        Some(Param::Expr(e)) => Ok(e.eval(&NoCtx)?),
        Some(other) => Err(InterpError::BadParam { op: op.into(), reason: format!("`{other}` is not a weight") }),
        None => Err(InterpError::BadParam { op: op.into(), reason: "missing weight parameter".into() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term_with, OpDecl, ParamKind, SigKind};
    use crate::weights::{ExtRational, Rational};

    type X = ExtRational;

    fn x(s: &str) -> X {
        X::parse_weight(s).unwrap()
    }

    fn q(s: &str) -> Rational {
        Rational::parse_weight(s).unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term_with(s, &|v| v.starts_with('x') || v.starts_with('y')).unwrap()
    }

    fn pepa(base: X) -> Interpretation<X> {
        Interpretation::new("pepa", base)
            .with_rule("empty", Builtin::Zero)
            .with_rule("diamond", Builtin::Reshape)
            .with_rule("wsum", Builtin::PointwiseSum)
            .with_rule("par", Builtin::CoopMinLaw { target: "coop".into() })
    }

    fn env<W: Weight>(pairs: &[(&str, &[(&str, W)])]) -> Env<W> {
        pairs
            .iter()
            .map(|(n, f)| (n.to_string(), f.iter().map(|(k, w)| (t(k), w.clone())).collect()))
            .collect()
    }

    #[test]
    fn empty_is_zero() {
        let i = pepa(X::Infinite);
        assert!(i.interpret(&t("empty"), &Env::new()).unwrap().is_zero());
    }

    #[test]
    fn diamond_of_dirac_assigns_rate() {
        let i = pepa(X::Infinite);
        let f = i.interpret(&t("diamond{2}(nil)"), &Env::new()).unwrap();
        assert_eq!(f, WeightFn::point(t("nil"), x("2")));
    }

    #[test]
    fn reshape_spreads_evenly() {
        let i = pepa(X::Infinite);
        let e = env(&[("f", &[("a", x("1")), ("b", x("5")), ("c", x("1/3"))])]);
        let f = i.interpret(&t("diamond{1}(%f)"), &e).unwrap();
        assert!(f.iter().all(|(_, w)| *w == x("1/3")));
        assert_eq!(f.support_size(), 3);
    }

    #[test]
    fn wsum_adds_pointwise() {
        let i = pepa(X::Infinite);
        let e = env(&[("p1", &[("nil", x("2"))]), ("p2", &[("nil", x("3"))])]);
        let f = i.interpret(&t("wsum(%p1,%p2)"), &e).unwrap();
        assert_eq!(f, WeightFn::point(t("nil"), x("5")));
    }

    #[test]
    fn min_law_example() {
        let i = pepa(X::Infinite);
        let e = env(&[("p", &[("t1", x("2"))]), ("q", &[("t2", x("3"))])]);
        let f = i.interpret(&t("par{{a}}(%p,%q)"), &e).unwrap();
        assert_eq!(f, WeightFn::point(t("coop{{a}}(t1,t2)"), x("2")));
    }

    #[test]
    fn min_law_with_process_operand_keeps_rates() {
        let i = pepa(X::Infinite);
        let e = env(&[("q", &[("t2", x("3")), ("t3", x("1"))])]);
        let f = i.interpret(&t("par{{}}(p0,%q)"), &e).unwrap();
        let expected: TermFn<X> = [(t("coop{{}}(p0,t2)"), x("3")), (t("coop{{}}(p0,t3)"), x("1"))].into_iter().collect();
        assert_eq!(f, expected);
    }

    #[test]
    fn min_law_zero_total_disables() {
        let i = pepa(X::Infinite);
        let e = env::<X>(&[("p", &[]), ("q", &[("t2", x("3"))])]);
        assert!(i.interpret(&t("par{{a}}(%p,%q)"), &e).unwrap().is_zero());
    }

    #[test]
    fn product_law_multiplies() {
        let i = Interpretation::new("mult", q("1")).with_rule("par", Builtin::CoopProductLaw { target: "coop".into() });
        let e = env(&[("p", &[("t1", q("2"))]), ("q", &[("t2", q("3"))])]);
        let f = i.interpret(&t("par{{a}}(%p,%q)"), &e).unwrap();
        assert_eq!(f, WeightFn::point(t("coop{{a}}(t1,t2)"), q("6")));
    }

    #[test]
    fn convex_combination() {
        let i = Interpretation::new("seg", q("1")).with_rule("convex", Builtin::Convex);
        let f = i.interpret(&t("convex{1/2,1/2}(t0,u0)"), &Env::new()).unwrap();
        let expected: TermFn<Rational> = [(t("t0"), q("1/2")), (t("u0"), q("1/2"))].into_iter().collect();
        assert_eq!(f, expected);
    }

    // Brute force over outcome pairs: pair(%f,%f) with independent copies of
    // {u -> 1/2, v -> 1/2} gives each of the four pairs probability 1/4.
    #[test]
    fn duplicated_distribution_variable() {
        let i = Interpretation::new("seg", q("1")).with_rule("colour", Builtin::Colour).with_rule("wapply", Builtin::WApply);
        let e = env(&[("f", &[("u", q("1/2")), ("v", q("1/2"))])]);
        let f = i.interpret(&t("wapply{1}(pair(colour{1}(%f),colour{2}(%f)))"), &e).unwrap();
        let mut expected = TermFn::zero();
        for a in ["u", "v"] {
            for b in ["u", "v"] {
                expected.add_at(t(&format!("pair({a},{b})")), q("1/4"));
            }
        }
        assert_eq!(f, expected);
        // the same colour twice is one choice
        let f = i.interpret(&t("wapply{1}(pair(colour{1}(%f),colour{1}(%f)))"), &e).unwrap();
        let expected: TermFn<Rational> = [(t("pair(u,u)"), q("1/2")), (t("pair(v,v)"), q("1/2"))].into_iter().collect();
        assert_eq!(f, expected);
    }

    #[test]
    fn wapply_with_user_beta() {
        let beta = Beta { name: "half".into(), params: vec!["u".into()], body: WeightExpr::Div(Box::new(WeightExpr::Var("u".into())), Box::new(WeightExpr::lit("2"))) };
        let i = Interpretation::new("w", q("1")).with_rule("colour", Builtin::Colour).with_rule("wapply", Builtin::WApply).with_beta(beta);
        let e = env(&[("f", &[("u0", q("3"))])]);
        let f = i.interpret(&t("wapply{half}(g(colour{1}(%f)))"), &e).unwrap();
        assert_eq!(f, WeightFn::point(t("g(u0)"), q("3/2")));
    }

    #[test]
    fn nested_colours_are_scoped() {
        let i = Interpretation::new("seg", q("1")).with_rule("colour", Builtin::Colour).with_rule("wapply", Builtin::WApply);
        let e = env(&[("f", &[("u0", q("3"))])]);
        let f = i.interpret(&t("wapply{2}(g(colour{1}(wapply{1}(colour{1}(%f)))))"), &e).unwrap();
        assert_eq!(f, WeightFn::point(t("g(u0)"), q("6")));
    }

    #[test]
    fn user_pointwise_rule() {
        let e = {
            let mut c = crate::syntax::Cursor::new("point(0) * total(1)");
            c.expr().unwrap()
        };
        let i = Interpretation::new("u", q("1")).with_rule("scale", Builtin::Pointwise(e));
        let en = env(&[("f", &[("a", q("2"))]), ("g", &[("b", q("3"))])]);
        let f = i.interpret(&t("scale(%f,%g)"), &en).unwrap();
        assert_eq!(f, WeightFn::point(t("a"), q("6")));
    }

    #[test]
    fn missing_binding_is_an_error() {
        let i = pepa(X::Infinite);
        assert!(matches!(i.interpret(&t("wsum(%p,%q)"), &Env::new()), Err(InterpError::MissingBinding(_))));
    }

    #[test]
    fn build_checks_coverage() {
        let theta = Signature::new(SigKind::Weight)
            .with(OpDecl::new("empty", 0, vec![]))
            .with(OpDecl::new("wsum", 2, vec![]))
            .with(OpDecl::new("diamond", 1, vec![ParamKind::Weight]));
        let mut rules = BTreeMap::new();
        rules.insert("empty".to_string(), Builtin::Zero);
        let err = build_from_recursion("p", &theta, rules.clone(), x("1")).unwrap_err();
        assert_eq!(err, InterpError::Coverage(vec!["diamond".into(), "wsum".into()]));
        rules.insert("wsum".into(), Builtin::PointwiseSum);
        rules.insert("diamond".into(), Builtin::Zero);
        assert!(matches!(build_from_recursion("p", &theta, rules, x("1")), Err(InterpError::Arity { .. })));
    }

    #[test]
    fn single_operator_recursion() {
        let theta = Signature::new(SigKind::Weight).with(OpDecl::new("wsum", 2, vec![]));
        let mut rules = BTreeMap::new();
        rules.insert("wsum".to_string(), Builtin::PointwiseSum);
        let i = build_from_recursion("s", &theta, rules, q("1")).unwrap();
        let e = env(&[("f", &[("x0", q("1"))])]);
        assert_eq!(i.interpret(&t("wsum(%f,%f)"), &e).unwrap(), WeightFn::point(t("x0"), q("2")));
    }
}
