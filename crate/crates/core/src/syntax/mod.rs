//! Process and weight signatures, freely generated terms and substitution.
//!
//! One [`Term`] type serves both signatures: weight terms mention process
//! terms as leaves, and which operators belong to which side is decided by
//! the signatures (and the interpretation) in force.

mod cursor;
mod signature;
mod term;

pub use cursor::{Cursor, ParseError};
pub use signature::{OpDecl, ParamKind, SigKind, Signature, SignatureError};
pub use term::{App, Param, SubstError, Term, Var};

use std::collections::BTreeMap;

/// A simultaneous substitution of variables by terms.
pub type Subst = BTreeMap<Var, Term>;

/// Parses a term in the textual syntax `name{p1,...}(t1,...)`.
///
/// Bare identifiers (no parameters, no arguments) are variables when
/// `is_var` says so and nullary operators otherwise. Weight-function
/// variables are written `%name`.
pub fn parse_term_with(text: &str, is_var: &dyn Fn(&str) -> bool) -> Result<Term, ParseError> {
    let mut cur = Cursor::new(text);
    let t = cur.term(is_var)?;
    cur.skip_ws();
    if !cur.at_end() {
        return Err(cur.error("trailing input after term"));
    }
    Ok(t)
}

/// Parses a ground term: every bare identifier is a nullary operator.
pub fn parse_ground_term(text: &str) -> Result<Term, ParseError> {
    parse_term_with(text, &|_| false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn lower(s: &str) -> bool {
        s.chars().next().is_some_and(|c| c.is_ascii_lowercase()) && s != "nil"
    }

    fn t(s: &str) -> Term {
        parse_term_with(s, &lower).unwrap()
    }

    #[test]
    fn apply_subst_examples() {
        let mut s = Subst::new();
        s.insert(Var::proc("x"), t("f(y)"));
        assert_eq!(t("x").apply_subst(&s, true).unwrap(), t("f(y)"));

        let mut s = Subst::new();
        s.insert(Var::proc("x"), t("nil"));
        assert_eq!(t("plus(x,x)").apply_subst(&s, true).unwrap(), t("plus(nil,nil)"));

        let mut s = Subst::new();
        s.insert(Var::proc("x"), t("nil"));
        s.insert(Var::proc("y"), t("nil"));
        let c = t("coop{{a}}(x, y)");
        assert_eq!(c.apply_subst(&s, true).unwrap().to_string(), "coop{{a}}(nil,nil)");
    }

    #[test]
    fn strict_substitution_rejects_unmapped() {
        let s = Subst::new();
        assert!(matches!(t("f(x)").apply_subst(&s, true), Err(SubstError::Unmapped(_))));
        assert_eq!(t("f(x)").apply_subst(&s, false).unwrap(), t("f(x)"));
    }

    #[test]
    fn vars_examples() {
        assert!(t("nil").vars().is_empty());
        let v: BTreeSet<Var> = [Var::proc("x"), Var::proc("y")].into();
        assert_eq!(t("plus(x, prefix{a,2}(y))").vars(), v);
        let v: BTreeSet<Var> = [Var::func("phi"), Var::proc("x")].into();
        assert_eq!(t("wsum(%phi, dirac(x))").vars(), v);
    }

    #[test]
    fn print_parse_round_trip() {
        for s in [
            "nil",
            "prefix{a,1/2}(nil)",
            "coop{{a,b}}(prefix{a,1}(nil),hide{{}}(nil))",
            "wsum(%p1,par{{a}}(%p2,x))",
            "const{P}",
            "wapply{[min(?w1,?w2)/(?w1*?w2)]}(coop{?L}(colour{1}(%f),colour{2}(%g)))",
        ] {
            let parsed = t(s);
            assert_eq!(parsed.to_string(), s);
            assert_eq!(t(&parsed.to_string()), parsed);
        }
    }

    #[test]
    fn rational_params_are_canonical() {
        assert_eq!(t("prefix{a,2/4}(nil)"), t("prefix{a,1/2}(nil)"));
        assert_eq!(t("prefix{a,0.5}(nil)").to_string(), "prefix{a,1/2}(nil)");
    }

    #[test]
    fn equal_ground_terms_hash_equal() {
        use std::collections::hash_map::DefaultHasher;
        use std::hash::{Hash, Hasher};
        let a = parse_ground_term("plus(prefix{a,1}(nil),nil)").unwrap();
        let b = parse_ground_term("plus( prefix{a, 1}(nil) , nil )").unwrap();
        let h = |x: &Term| {
            let mut s = DefaultHasher::new();
            x.hash(&mut s);
            s.finish()
        };
        assert_eq!(a, b);
        assert_eq!(h(&a), h(&b));
        assert!(a.is_ground());
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = parse_ground_term("plus(nil,").unwrap_err();
        assert!(err.offset >= 8, "{err}");
        assert!(parse_ground_term("f(x) g").is_err());
    }
}
