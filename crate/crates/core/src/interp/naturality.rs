//! Randomized naturality checks: `interpret(psi)[sigma] == interpret(psi[sigma])`
//! with the weight-function variables substituted along `sigma` as well.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Builtin, Env, InterpError, Interpretation, TermFn};
use crate::syntax::{Param, Subst, Term};
use crate::weights::{Weight, WeightFn};

/// One instance of the naturality square.
#[derive(Debug, Clone)]
pub struct Case<W> {
    pub psi: Term,
    pub env: Env<W>,
    pub sigma: Subst,
}

/// Both paths around the square: `(interpret(psi)[sigma], interpret(psi[sigma]))`.
pub fn square<W: Weight>(interp: &Interpretation<W>, case: &Case<W>) -> Result<(TermFn<W>, TermFn<W>), InterpError> {
    let rename = |k: &Term| k.apply_subst(&case.sigma, false).expect("non-strict substitution");
    let lhs = interp.interpret(&case.psi, &case.env)?.substitute(rename);
    let env: Env<W> = case.env.iter().map(|(n, f)| (n.clone(), f.substitute(rename))).collect();
    let psi = case.psi.apply_subst(&case.sigma, false).expect("non-strict substitution");
    let rhs = interp.interpret(&psi, &env)?;
    Ok((lhs, rhs))
}

/// Shape of generated instances.
#[derive(Debug, Clone)]
pub struct Shape {
    /// Source variables `x1..xn`.
    pub sources: usize,
    /// Target variables `y1..ym`.
    pub targets: usize,
    pub fn_vars: usize,
    pub depth: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { sources: 3, targets: 2, fn_vars: 2, depth: 3 }
    }
}

const RATES: [&str; 4] = ["1", "2", "1/2", "3"];

/// Draws a case exercising the weight operator `focus`. Other nodes use the
/// interpretation's pointwise-sum operator when it has one.
pub fn random_case<W: Weight, R: Rng + ?Sized>(rng: &mut R, interp: &Interpretation<W>, focus: &str, shape: &Shape) -> Case<W> {
    let xs: Vec<Term> = (1..=shape.sources).map(|i| Term::var(format!("x{i}"))).collect();
    let ys: Vec<Term> = (1..=shape.targets).map(|i| Term::var(format!("y{i}"))).collect();
    let sigma: Subst = xs.iter().map(|x| (x.as_var().unwrap().clone(), ys.choose(rng).unwrap().clone())).collect();
    let fn_names: Vec<String> = (1..=shape.fn_vars).map(|i| format!("f{i}")).collect();
    let env: Env<W> = fn_names
        .iter()
        .map(|n| {
            let size = rng.gen_range(0..=3);
            let mut f = WeightFn::zero();
            for _ in 0..size {
                f.add_at(process_leaf(rng, &xs), nonzero(rng));
            }
            (n.clone(), f)
        })
        .collect();
    let gen = Gen { interp, focus, xs: &xs, fns: &fn_names };
    let psi = gen.node(rng, shape.depth, true);
    Case { psi, env, sigma }
}

fn nonzero<W: Weight, R: Rng + ?Sized>(rng: &mut R) -> W {
    loop {
        let w = W::sample(rng);
        if !w.is_zero() {
            return w;
        }
    }
}

fn process_leaf<R: Rng + ?Sized>(rng: &mut R, xs: &[Term]) -> Term {
    let x = xs.choose(rng).unwrap().clone();
    match rng.gen_range(0..4) {
        0 => Term::constant("nil"),
        1 => Term::app("s", vec![], vec![x]),
        2 => Term::app("pair", vec![], vec![x, xs.choose(rng).unwrap().clone()]),
        _ => x,
    }
}

struct Gen<'a, W> {
    interp: &'a Interpretation<W>,
    focus: &'a str,
    xs: &'a [Term],
    fns: &'a [String],
}

impl<W: Weight> Gen<'_, W> {
    fn op_with(&self, pred: impl Fn(&Builtin) -> bool) -> Option<String> {
        self.interp.rules().find(|(_, b)| pred(b)).map(|(n, _)| n.clone())
    }

    fn leaf<R: Rng + ?Sized>(&self, rng: &mut R) -> Term {
        if !self.fns.is_empty() && rng.gen_bool(0.5) {
            Term::fn_var(self.fns.choose(rng).unwrap().clone())
        } else {
            process_leaf(rng, self.xs)
        }
    }

    fn node<R: Rng + ?Sized>(&self, rng: &mut R, depth: usize, root: bool) -> Term {
        if depth == 0 || (!root && rng.gen_bool(0.35)) {
            return self.leaf(rng);
        }
        let sum = self.op_with(|b| matches!(b, Builtin::PointwiseSum));
        let op = match sum {
            Some(s) if !root && rng.gen_bool(0.4) => s,
            _ => self.focus.to_string(),
        };
        let Some(rule) = self.interp.rule(&op) else {
            return self.leaf(rng);
        };
        let sub = |rng: &mut R| self.node(rng, depth - 1, false);
        match rule {
            Builtin::Zero => Term::constant(op),
            Builtin::Reshape => {
                let r = Param::weight(RATES.choose(rng).unwrap());
                Term::app(op, vec![r], vec![sub(rng)])
            }
            Builtin::PointwiseSum => {
                let n = rng.gen_range(1..=3);
                Term::app(op, vec![], (0..n).map(|_| sub(rng)).collect())
            }
            Builtin::CoopMinLaw { .. } | Builtin::CoopProductLaw { .. } => {
                let l = if rng.gen_bool(0.5) { Param::set(["a"]) } else { Param::set(Vec::<String>::new()) };
                Term::app(op, vec![l], vec![sub(rng), sub(rng)])
            }
            Builtin::Convex => {
                let ws = [["1/2", "1/2"], ["1/3", "2/3"]].choose(rng).unwrap().map(Param::weight);
                Term::app(op, ws.to_vec(), vec![sub(rng), sub(rng)])
            }
            Builtin::Colour => Term::app(op, vec![Param::weight(&rng.gen_range(1..4).to_string())], vec![sub(rng)]),
            Builtin::WApply => {
                let colour = self.op_with(|b| matches!(b, Builtin::Colour));
                let c = Param::weight(RATES.choose(rng).unwrap());
                let skeleton = self.skeleton(rng, colour.as_deref(), depth.saturating_sub(1), &mut Vec::new());
                Term::app(op, vec![c], vec![skeleton])
            }
            Builtin::Pointwise(e) => {
                let n = e.max_child().map_or(1, |k| k + 1);
                Term::app(op, vec![], (0..n).map(|_| sub(rng)).collect())
            }
        }
    }

    // A process-term skeleton whose leaves may be coloured weight subterms;
    // reusing a colour index reuses its subterm, as required.
    fn skeleton<R: Rng + ?Sized>(&self, rng: &mut R, colour: Option<&str>, depth: usize, used: &mut Vec<Term>) -> Term {
        let coloured = |rng: &mut R, used: &mut Vec<Term>| -> Term {
            let Some(cop) = colour else {
                return process_leaf(rng, self.xs);
            };
            if !used.is_empty() && rng.gen_bool(0.3) {
                let k = rng.gen_range(0..used.len());
                return Term::app(cop, vec![Param::weight(&(k + 1).to_string())], vec![used[k].clone()]);
            }
            let inner = if rng.gen_bool(0.6) {
                Term::fn_var(self.fns.choose(rng).cloned().unwrap_or_else(|| "f1".into()))
            } else {
                self.node(rng, depth.min(1), false)
            };
            used.push(inner.clone());
            Term::app(cop, vec![Param::weight(&used.len().to_string())], vec![inner])
        };
        match rng.gen_range(0..3) {
            0 => Term::app("s", vec![], vec![coloured(rng, used)]),
            1 => {
                let a = coloured(rng, used);
                let b = if rng.gen_bool(0.5) { coloured(rng, used) } else { process_leaf(rng, self.xs) };
                Term::app("pair", vec![], vec![a, b])
            }
            _ => coloured(rng, used),
        }
    }
}

/// Convenience: true when both sides of the square agree.
pub fn holds<W: Weight>(interp: &Interpretation<W>, case: &Case<W>) -> Result<bool, InterpError> {
    let (l, r) = square(interp, case)?;
    Ok(l == r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term_with, Var};
    use crate::weights::{ExtRational, Rational};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(s: &str) -> Term {
        parse_term_with(s, &|v| v.starts_with('x') || v.starts_with('y')).unwrap()
    }

    #[test]
    fn sum_square_commutes() {
        let interp = Interpretation::new("s", Rational::from(num_bigint::BigInt::from(1))).with_rule("wsum", Builtin::PointwiseSum);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let case = random_case(&mut rng, &interp, "wsum", &Shape::default());
            assert!(holds(&interp, &case).unwrap(), "{}", case.psi);
        }
    }

    // Merging two of three support points makes the even split uneven.
    #[test]
    fn reshape_is_not_natural_under_merging() {
        let interp = Interpretation::new("p", ExtRational::Infinite)
            .with_rule("diamond", Builtin::Reshape)
            .with_rule("wsum", Builtin::PointwiseSum);
        let case = Case {
            psi: t("diamond{1}(wsum(x1,wsum(x2,x3)))"),
            env: Env::new(),
            sigma: [(Var::proc("x1"), t("y1")), (Var::proc("x2"), t("y1")), (Var::proc("x3"), t("y2"))].into_iter().collect(),
        };
        let (l, r) = square(&interp, &case).unwrap();
        assert_ne!(l, r);
        assert_eq!(l.get(&t("y1")), ExtRational::parse_weight("2/3").unwrap());
        assert_eq!(r.get(&t("y1")), ExtRational::parse_weight("1/2").unwrap());
    }
}
