use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::weights::Weight;

/// Arithmetic over weights, used for user-defined operator rules, user
/// multiadditive functions and rule-dependent coefficients.
///
/// Division by zero (including `0/0`) evaluates to zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WeightExpr {
    Lit(String),
    /// A rule meta-variable `?w`, replaced before evaluation.
    Meta(String),
    /// A named argument, e.g. `u1` in a multiadditive function.
    Var(String),
    Add(Box<WeightExpr>, Box<WeightExpr>),
    Mul(Box<WeightExpr>, Box<WeightExpr>),
    Div(Box<WeightExpr>, Box<WeightExpr>),
    Min(Box<WeightExpr>, Box<WeightExpr>),
    Max(Box<WeightExpr>, Box<WeightExpr>),
    /// Total weight of the k-th child (0-based).
    Total(usize),
    /// Support size of the k-th child.
    Size(usize),
    /// Weight of the k-th child at the point being computed.
    Point(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("invalid literal `{0}` for this monoid")]
    Literal(String),
    #[error("unbound meta-variable ?{0}")]
    Meta(String),
    #[error("unbound variable `{0}`")]
    Var(String),
    #[error("`{0}` is not available in this context")]
    Context(String),
    #[error("quotient not representable in this monoid")]
    Unrepresentable,
}

/// What an expression may read besides literals.
pub trait ExprCtx<W> {
    fn var(&self, _name: &str) -> Option<W> {
        None
    }
    fn total(&self, _k: usize) -> Option<W> {
        None
    }
    fn size(&self, _k: usize) -> Option<usize> {
        None
    }
    fn point(&self, _k: usize) -> Option<W> {
        None
    }
}

/// Context with nothing in scope.
pub struct NoCtx;

impl<W> ExprCtx<W> for NoCtx {}

/// Named arguments only.
pub struct VarCtx<'a, W> {
    pub names: &'a [String],
    pub values: &'a [W],
}

impl<W: Clone> ExprCtx<W> for VarCtx<'_, W> {
    fn var(&self, name: &str) -> Option<W> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i].clone())
    }
}

impl WeightExpr {
    pub fn lit(s: impl Into<String>) -> Self {
        WeightExpr::Lit(s.into())
    }

    pub fn eval<W: Weight>(&self, ctx: &dyn ExprCtx<W>) -> Result<W, ExprError> {
        let bin = |a: &WeightExpr, b: &WeightExpr| -> Result<(W, W), ExprError> { Ok((a.eval(ctx)?, b.eval(ctx)?)) };
        Ok(match self {
            WeightExpr::Lit(s) => W::parse_weight(s).map_err(|_| ExprError::Literal(s.clone()))?,
            WeightExpr::Meta(m) => return Err(ExprError::Meta(m.clone())),
            WeightExpr::Var(v) => ctx.var(v).ok_or_else(|| ExprError::Var(v.clone()))?,
            WeightExpr::Add(a, b) => {
                let (x, y) = bin(a, b)?;
                x + y
            }
            WeightExpr::Mul(a, b) => {
                let (x, y) = bin(a, b)?;
                x.mul(&y)
            }
            WeightExpr::Div(a, b) => {
                let (x, y) = bin(a, b)?;
                if y.is_zero() {
                    W::zero()
                } else {
                    x.checked_div(&y).ok_or(ExprError::Unrepresentable)?
                }
            }
            WeightExpr::Min(a, b) => {
                let (x, y) = bin(a, b)?;
                x.min(y)
            }
            WeightExpr::Max(a, b) => {
                let (x, y) = bin(a, b)?;
                x.max(y)
            }
            WeightExpr::Total(k) => ctx.total(*k).ok_or_else(|| ExprError::Context(format!("total({k})")))?,
            WeightExpr::Size(k) => {
                W::from_count(ctx.size(*k).ok_or_else(|| ExprError::Context(format!("size({k})")))? as u64)
            }
            WeightExpr::Point(k) => ctx.point(*k).ok_or_else(|| ExprError::Context(format!("point({k})")))?,
        })
    }

    pub fn metas(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let WeightExpr::Meta(m) = e {
                out.insert(m.clone());
            }
        });
        out
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let WeightExpr::Var(v) = e {
                out.insert(v.clone());
            }
        });
        out
    }

    /// Highest child index read by `total`, `size` or `point`, if any.
    pub fn max_child(&self) -> Option<usize> {
        let mut out = None;
        self.walk(&mut |e| {
            if let WeightExpr::Total(k) | WeightExpr::Size(k) | WeightExpr::Point(k) = e {
                out = Some(out.map_or(*k, |m: usize| m.max(*k)));
            }
        });
        out
    }

    fn walk(&self, f: &mut dyn FnMut(&WeightExpr)) {
        f(self);
        match self {
            WeightExpr::Add(a, b)
            | WeightExpr::Mul(a, b)
            | WeightExpr::Div(a, b)
            | WeightExpr::Min(a, b)
            | WeightExpr::Max(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            _ => {}
        }
    }

    /// Replaces meta-variables; unknown ones are left in place.
    pub fn subst_metas(&self, f: &dyn Fn(&str) -> Option<WeightExpr>) -> WeightExpr {
        let go = |a: &WeightExpr| Box::new(a.subst_metas(f));
        match self {
            WeightExpr::Meta(m) => f(m).unwrap_or_else(|| self.clone()),
            WeightExpr::Add(a, b) => WeightExpr::Add(go(a), go(b)),
            WeightExpr::Mul(a, b) => WeightExpr::Mul(go(a), go(b)),
            WeightExpr::Div(a, b) => WeightExpr::Div(go(a), go(b)),
            WeightExpr::Min(a, b) => WeightExpr::Min(go(a), go(b)),
            WeightExpr::Max(a, b) => WeightExpr::Max(go(a), go(b)),
            _ => self.clone(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            WeightExpr::Add(..) => 1,
            WeightExpr::Mul(..) | WeightExpr::Div(..) => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for WeightExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let infix = |f: &mut fmt::Formatter<'_>, a: &WeightExpr, op: &str, b: &WeightExpr| {
            let p = self.precedence();
            if a.precedence() < p {
                write!(f, "({a})")?;
            } else {
                write!(f, "{a}")?;
            }
            f.write_str(op)?;
            if b.precedence() <= p {
                write!(f, "({b})")
            } else {
                write!(f, "{b}")
            }
        };
        match self {
            WeightExpr::Lit(s) => f.write_str(s),
            WeightExpr::Meta(m) => write!(f, "?{m}"),
            WeightExpr::Var(v) => f.write_str(v),
            WeightExpr::Add(a, b) => infix(f, a, "+", b),
            WeightExpr::Mul(a, b) => infix(f, a, "*", b),
            WeightExpr::Div(a, b) => infix(f, a, "/", b),
            WeightExpr::Min(a, b) => write!(f, "min({a},{b})"),
            WeightExpr::Max(a, b) => write!(f, "max({a},{b})"),
            WeightExpr::Total(k) => write!(f, "total({k})"),
            WeightExpr::Size(k) => write!(f, "size({k})"),
            WeightExpr::Point(k) => write!(f, "point({k})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Cursor;
    use crate::weights::{ExtRational, Rational};

    fn parse(s: &str) -> WeightExpr {
        let mut c = Cursor::new(s);
        let e = c.expr().unwrap();
        assert!(c.rest().trim().is_empty());
        e
    }

    fn q(s: &str) -> Rational {
        Rational::parse_weight(s).unwrap()
    }

    #[test]
    fn arithmetic() {
        let e = parse("min(2, 3) * 4 / (1 + 1)");
        assert_eq!(e.eval::<Rational>(&NoCtx).unwrap(), q("4"));
        assert_eq!(parse("0.5 + 1").eval::<Rational>(&NoCtx).unwrap(), q("3/2"));
    }

    #[test]
    fn division_by_zero_is_zero() {
        assert_eq!(parse("3 / 0").eval::<Rational>(&NoCtx).unwrap(), q("0"));
        assert_eq!(parse("0 / 0").eval::<Rational>(&NoCtx).unwrap(), q("0"));
    }

    #[test]
    fn infinity_conventions() {
        let inf = |s: &str| parse(s).eval::<ExtRational>(&NoCtx).unwrap();
        assert_eq!(inf("2 / inf"), ExtRational::parse_weight("0").unwrap());
        assert_eq!(inf("inf / inf"), ExtRational::parse_weight("1").unwrap());
        assert_eq!(inf("min(inf, 3)"), ExtRational::parse_weight("3").unwrap());
    }

    #[test]
    fn vars_and_metas() {
        let e = parse("u1 * u2 * ?c");
        assert_eq!(e.vars(), ["u1".to_string(), "u2".to_string()].into());
        assert!(matches!(e.eval::<Rational>(&NoCtx), Err(ExprError::Meta(_)) | Err(ExprError::Var(_))));
        let e = e.subst_metas(&|m| (m == "c").then(|| WeightExpr::lit("2")));
        let names = ["u1".to_string(), "u2".to_string()];
        let values = [q("3"), q("1/2")];
        assert_eq!(e.eval(&VarCtx { names: &names, values: &values }).unwrap(), q("3"));
    }

    #[test]
    fn display_round_trips() {
        for s in ["min(?w1,?w2)/(?w1*?w2)", "a+b*c", "(a+b)*c", "a/(b/c)", "a"] {
            let e = parse(s);
            assert_eq!(parse(&e.to_string()), e, "{s}");
        }
        assert_eq!(parse("total(0) + point(1)").to_string(), "total(0)+point(1)");
    }
}
