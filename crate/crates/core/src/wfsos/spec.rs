use std::collections::BTreeMap;

use crate::interp::Interpretation;
use crate::syntax::{Param, Signature, Term};
use crate::weights::Weight;

use super::rule::{validate_group, validate_rule, MergeGroup, Rule, RuleViolation, ViolationKind};

/// A WFSOS specification: labels, both signatures, rules (possibly merged
/// into groups), named definitions for unfolding operators and the
/// interpretation of the weight signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WfsosSpec<W> {
    pub labels: Vec<String>,
    pub sigma: Signature,
    pub theta: Signature,
    pub defs: BTreeMap<String, Term>,
    pub interp: Interpretation<W>,
    pub rules: Vec<Rule>,
    pub groups: Vec<MergeGroup>,
}

impl<W: Weight> WfsosSpec<W> {
    pub fn new(labels: Vec<String>, sigma: Signature, theta: Signature, interp: Interpretation<W>) -> Self {
        WfsosSpec { labels, sigma, theta, defs: BTreeMap::new(), interp, rules: vec![], groups: vec![] }
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Bare identifiers in rule terms that are not operators are variables.
    pub fn is_var(&self, ident: &str) -> bool {
        !self.sigma.contains(ident) && !self.theta.contains(ident)
    }

    /// Parses a ground process term and checks it against the signature and
    /// the definitions.
    pub fn parse_process(&self, text: &str) -> Result<Term, String> {
        let t = crate::syntax::parse_ground_term(text).map_err(|e| e.to_string())?;
        self.check_process(&t)?;
        Ok(t)
    }

    pub fn check_process(&self, t: &Term) -> Result<(), String> {
        if !t.is_ground() {
            return Err(format!("`{t}` is not ground"));
        }
        self.sigma.check_term(t).map_err(|e| e.to_string())?;
        let mut missing = None;
        t.visit(&mut |s| {
            if let Some(name) = self.unfold_name(s) {
                if !self.defs.contains_key(name) && missing.is_none() {
                    missing = Some(name.to_string());
                }
            }
        });
        match missing {
            Some(n) => Err(format!("undefined constant `{n}`")),
            None => Ok(()),
        }
    }

    /// The definition name of an unfolding node.
    pub fn unfold_name<'t>(&self, t: &'t Term) -> Option<&'t str> {
        let a = t.as_app()?;
        if !self.sigma.get(&a.op)?.unfold {
            return None;
        }
        match a.params.first() {
            Some(Param::Name(n)) => Some(n),
            _ => None,
        }
    }

    /// The body of an unfolding node.
    pub fn unfold(&self, t: &Term) -> Option<&Term> {
        self.defs.get(self.unfold_name(t)?)
    }

    pub fn all_rules(&self) -> impl Iterator<Item = &Rule> + '_ {
        self.rules.iter().chain(self.groups.iter().flat_map(|g| g.members.iter()))
    }

    /// Every rule, group, definition and interpretation problem.
    pub fn validate(&self) -> Vec<RuleViolation> {
        let mut out = vec![];
        for r in &self.rules {
            out.extend(validate_rule(r, self));
        }
        for g in &self.groups {
            out.extend(validate_group(g, self));
        }
        for (name, body) in &self.defs {
            if let Err(e) = self.check_process(body) {
                out.push(RuleViolation { rule: format!("define {name}"), kind: ViolationKind::Definition, detail: e });
            }
        }
        for d in self.theta.ops() {
            if self.interp.rule(&d.name).is_none() {
                out.push(RuleViolation {
                    rule: format!("interp {}", self.interp.name),
                    kind: ViolationKind::Interpretation,
                    detail: format!("no rule for `{}`", d.name),
                });
            }
        }
        if let Err(e) = crate::interp::build_from_recursion(
            &self.interp.name,
            &self.theta,
            self.interp.rules().map(|(k, v)| (k.clone(), v.clone())).collect(),
            self.interp.base.clone(),
        ) {
            if !matches!(e, crate::interp::InterpError::Coverage(_)) {
                out.push(RuleViolation {
                    rule: format!("interp {}", self.interp.name),
                    kind: ViolationKind::Interpretation,
                    detail: e.to_string(),
                });
            }
        }
        for (op, _) in self.interp.rules() {
            if self.sigma.contains(op) {
                out.push(RuleViolation {
                    rule: format!("interp {}", self.interp.name),
                    kind: ViolationKind::Interpretation,
                    detail: format!("`{op}` is a process operator"),
                });
            }
        }
        out
    }
}
