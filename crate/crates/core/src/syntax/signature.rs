use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::term::{Param, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SigKind {
    Process,
    Weight,
}

/// Schema of a static operator parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParamKind {
    Label,
    Weight,
    Labels,
    Name,
    /// Anything: a weight, an expression or a name (e.g. a coefficient or a
    /// reference to a user multiadditive function).
    Any,
}

impl ParamKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ParamKind::Label => "label",
            ParamKind::Weight => "weight",
            ParamKind::Labels => "labels",
            ParamKind::Name => "name",
            ParamKind::Any => "any",
        }
    }

    pub fn from_keyword(s: &str) -> Option<ParamKind> {
        match s {
            "label" => Some(ParamKind::Label),
            "weight" | "rate" => Some(ParamKind::Weight),
            "labels" => Some(ParamKind::Labels),
            "name" => Some(ParamKind::Name),
            "any" => Some(ParamKind::Any),
            _ => None,
        }
    }

    pub fn accepts(self, p: &Param) -> bool {
        match (self, p) {
            (_, Param::Meta(_)) | (ParamKind::Any, _) => true,
            (ParamKind::Label | ParamKind::Name, Param::Name(_)) => true,
            (ParamKind::Weight, Param::Weight(_) | Param::Expr(_)) => true,
            (ParamKind::Labels, Param::Set(_)) => true,
            // colour indices and similar small numerals double as names
            (ParamKind::Name, Param::Weight(_)) => true,
            _ => false,
        }
    }
}

/// An operator declaration `name/arity {kinds}`.
///
/// A `variadic` operator takes as many arguments as parameters, all of the
/// single declared kind (e.g. a convex combination). An `unfold` operator is
/// a definition reference whose single effective argument is the body of the
/// named definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpDecl {
    pub name: String,
    pub arity: usize,
    pub params: Vec<ParamKind>,
    pub variadic: bool,
    pub unfold: bool,
}

impl OpDecl {
    pub fn new(name: impl Into<String>, arity: usize, params: Vec<ParamKind>) -> Self {
        OpDecl { name: name.into(), arity, params, variadic: false, unfold: false }
    }

    pub fn variadic(name: impl Into<String>, kind: ParamKind) -> Self {
        OpDecl { name: name.into(), arity: 0, params: vec![kind], variadic: true, unfold: false }
    }

    pub fn unfolding(name: impl Into<String>) -> Self {
        OpDecl { name: name.into(), arity: 0, params: vec![ParamKind::Name], variadic: false, unfold: true }
    }
}

impl fmt::Display for OpDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.variadic {
            write!(f, "{}/*", self.name)?;
        } else {
            write!(f, "{}/{}", self.name, self.arity)?;
        }
        if !self.params.is_empty() {
            let kinds: Vec<_> = self.params.iter().map(|k| k.keyword()).collect();
            write!(f, " {{{}}}", kinds.join(", "))?;
        }
        if self.unfold {
            f.write_str(" unfold")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("operator `{0}` declared twice")]
    Duplicate(String),
    #[error("unknown operator `{0}`")]
    Unknown(String),
    #[error("operator `{op}` expects {expected} arguments, got {got}")]
    Arity { op: String, expected: usize, got: usize },
    #[error("operator `{op}` parameter {index} does not fit its schema")]
    Param { op: String, index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub kind: SigKind,
    ops: BTreeMap<String, OpDecl>,
}

impl Signature {
    pub fn new(kind: SigKind) -> Self {
        Signature { kind, ops: BTreeMap::new() }
    }

    pub fn with(mut self, decl: OpDecl) -> Self {
        self.declare(decl).expect("duplicate operator");
        self
    }

    pub fn declare(&mut self, decl: OpDecl) -> Result<(), SignatureError> {
        if self.ops.contains_key(&decl.name) {
            return Err(SignatureError::Duplicate(decl.name));
        }
        self.ops.insert(decl.name.clone(), decl);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&OpDecl> {
        self.ops.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.ops.contains_key(name)
    }

    pub fn ops(&self) -> impl Iterator<Item = &OpDecl> + '_ {
        self.ops.values()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Checks the head of `t` (not its children) against its declaration.
    pub fn check_node(&self, op: &str, params: &[Param], arity: usize) -> Result<(), SignatureError> {
        let decl = self.get(op).ok_or_else(|| SignatureError::Unknown(op.to_string()))?;
        if decl.variadic {
            if arity != params.len() {
                return Err(SignatureError::Arity { op: op.into(), expected: params.len(), got: arity });
            }
            let kind = decl.params[0];
            if let Some(i) = params.iter().position(|p| !kind.accepts(p)) {
                return Err(SignatureError::Param { op: op.into(), index: i });
            }
            return Ok(());
        }
        if decl.arity != arity {
            return Err(SignatureError::Arity { op: op.into(), expected: decl.arity, got: arity });
        }
        if decl.params.len() != params.len() {
            return Err(SignatureError::Param { op: op.into(), index: params.len().min(decl.params.len()) });
        }
        for (i, (k, p)) in decl.params.iter().zip(params).enumerate() {
            if !k.accepts(p) {
                return Err(SignatureError::Param { op: op.into(), index: i });
            }
        }
        Ok(())
    }

    /// Checks every operator node of a term built purely over this signature.
    pub fn check_term(&self, t: &Term) -> Result<(), SignatureError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::App(a) => {
                self.check_node(&a.op, &a.params, a.args.len())?;
                a.args.iter().try_for_each(|c| self.check_term(c))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_ground_term;

    fn pepa_sigma() -> Signature {
        Signature::new(SigKind::Process)
            .with(OpDecl::new("nil", 0, vec![]))
            .with(OpDecl::new("prefix", 1, vec![ParamKind::Label, ParamKind::Weight]))
            .with(OpDecl::new("coop", 2, vec![ParamKind::Labels]))
    }

    #[test]
    fn checks_arity_and_params() {
        let s = pepa_sigma();
        assert!(s.check_term(&parse_ground_term("coop{{a}}(prefix{a,1}(nil),nil)").unwrap()).is_ok());
        assert!(matches!(
            s.check_term(&parse_ground_term("prefix{a,1}(nil,nil)").unwrap()),
            Err(SignatureError::Arity { .. })
        ));
        assert!(matches!(
            s.check_term(&parse_ground_term("prefix{{a},1}(nil)").unwrap()),
            Err(SignatureError::Param { .. })
        ));
        assert!(matches!(s.check_term(&parse_ground_term("zz").unwrap()), Err(SignatureError::Unknown(_))));
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let mut s = pepa_sigma();
        assert!(s.declare(OpDecl::new("nil", 0, vec![])).is_err());
    }

    #[test]
    fn variadic_arity_follows_params() {
        let s = Signature::new(SigKind::Weight).with(OpDecl::variadic("convex", ParamKind::Weight));
        assert!(s.check_node("convex", &[Param::weight("1/2"), Param::weight("1/2")], 2).is_ok());
        assert!(s.check_node("convex", &[Param::weight("1")], 2).is_err());
    }
}
