use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::interp::WeightExpr;

/// A variable: process variables (`x`) or weight-function variables (`%phi`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Proc(String),
    Fn(String),
}

impl Var {
    pub fn proc(name: impl Into<String>) -> Var {
        Var::Proc(name.into())
    }

    pub fn func(name: impl Into<String>) -> Var {
        Var::Fn(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Var::Proc(n) | Var::Fn(n) => n,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Proc(n) => f.write_str(n),
            Var::Fn(n) => write!(f, "%{n}"),
        }
    }
}

/// Static parameter of an operator instance, e.g. the label and rate of a
/// PEPA prefix or the cooperation set of `coop`.
///
/// `Meta` and `Expr` only occur in rule schemas; ground terms never carry them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    Name(String),
    /// A weight literal in canonical text form (`1/2`, `3`, `inf`, `tt`).
    Weight(String),
    Set(BTreeSet<String>),
    Meta(String),
    Expr(WeightExpr),
}

impl Param {
    pub fn name(s: impl Into<String>) -> Param {
        Param::Name(s.into())
    }

    pub fn set<I: IntoIterator<Item = S>, S: Into<String>>(items: I) -> Param {
        Param::Set(items.into_iter().map(Into::into).collect())
    }

    /// Canonicalizes a weight literal; rationals are reduced.
    pub fn weight(lit: &str) -> Param {
        Param::Weight(canonical_weight_literal(lit))
    }

    pub fn is_schematic(&self) -> bool {
        matches!(self, Param::Meta(_) | Param::Expr(_))
    }
}

pub(crate) fn canonical_weight_literal(lit: &str) -> String {
    match crate::weights::parse_rational(lit) {
        Some(r) => r.to_string(),
        None => lit.trim().to_string(),
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Name(n) => f.write_str(n),
            Param::Weight(w) => f.write_str(w),
            Param::Set(s) => {
                f.write_str("{")?;
                for (i, x) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(x)?;
                }
                f.write_str("}")
            }
            Param::Meta(m) => write!(f, "?{m}"),
            Param::Expr(e) => write!(f, "[{e}]"),
        }
    }
}

/// An operator application.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct App {
    pub op: String,
    pub params: Vec<Param>,
    pub args: Vec<Term>,
}

/// A term over some signature with variables. Structural equality, hashing
/// and the derived order are the canonical ones used for state interning.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    App(Arc<App>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("variable {0} is not mapped by the substitution")]
    Unmapped(Var),
}

impl Term {
    pub fn app(op: impl Into<String>, params: Vec<Param>, args: Vec<Term>) -> Term {
        Term::App(Arc::new(App { op: op.into(), params, args }))
    }

    pub fn constant(op: impl Into<String>) -> Term {
        Term::app(op, vec![], vec![])
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(Var::Proc(name.into()))
    }

    pub fn fn_var(name: impl Into<String>) -> Term {
        Term::Var(Var::Fn(name.into()))
    }

    pub fn as_app(&self) -> Option<&App> {
        match self {
            Term::App(a) => Some(a),
            Term::Var(_) => None,
        }
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(_) => None,
        }
    }

    pub fn op(&self) -> Option<&str> {
        self.as_app().map(|a| a.op.as_str())
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(a) => &a.args,
            Term::Var(_) => &[],
        }
    }

    pub fn params(&self) -> &[Param] {
        match self {
            Term::App(a) => &a.params,
            Term::Var(_) => &[],
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(a) => a.args.iter().all(Term::is_ground),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(a) => 1 + a.args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(a) => 1 + a.args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// The exact set of variable leaves.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(a) => a.args.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    /// Simultaneous substitution. In strict mode every variable must be mapped.
    pub fn apply_subst(&self, subst: &BTreeMap<Var, Term>, strict: bool) -> Result<Term, SubstError> {
        match self {
            Term::Var(v) => match subst.get(v) {
                Some(t) => Ok(t.clone()),
                None if strict => Err(SubstError::Unmapped(v.clone())),
                None => Ok(self.clone()),
            },
            Term::App(a) => {
                if a.args.is_empty() {
                    return Ok(self.clone());
                }
                let args = a
                    .args
                    .iter()
                    .map(|t| t.apply_subst(subst, strict))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Term::app(a.op.clone(), a.params.clone(), args))
            }
        }
    }

    /// Rewrites every operator's parameters.
    pub fn map_params<E>(&self, f: &mut dyn FnMut(&Param) -> Result<Param, E>) -> Result<Term, E> {
        match self {
            Term::Var(_) => Ok(self.clone()),
            Term::App(a) => {
                let params = a.params.iter().map(&mut *f).collect::<Result<Vec<_>, E>>()?;
                let args = a.args.iter().map(|t| t.map_params(f)).collect::<Result<Vec<_>, E>>()?;
                Ok(Term::app(a.op.clone(), params, args))
            }
        }
    }

    /// Pre-order visit of every subterm.
    pub fn visit<'a>(&'a self, f: &mut dyn FnMut(&'a Term)) {
        f(self);
        for t in self.args() {
            t.visit(f);
        }
    }

    /// Replaces subterms bottom-up wherever `f` returns `Some`.
    pub fn rewrite(&self, f: &mut dyn FnMut(&Term) -> Option<Term>) -> Term {
        if let Some(t) = f(self) {
            return t;
        }
        match self {
            Term::Var(_) => self.clone(),
            Term::App(a) => {
                let args = a.args.iter().map(|t| t.rewrite(f)).collect();
                Term::app(a.op.clone(), a.params.clone(), args)
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(a) => {
                f.write_str(&a.op)?;
                if !a.params.is_empty() {
                    f.write_str("{")?;
                    for (i, p) in a.params.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{p}")?;
                    }
                    f.write_str("}")?;
                }
                if !a.args.is_empty() {
                    f.write_str("(")?;
                    for (i, t) in a.args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{t}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}
