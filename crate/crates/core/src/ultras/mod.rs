//! Finite ULTraSs: every (state, label) pair carries a finite set of weight
//! functions over the states.

mod export;
pub mod random;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::weights::{MonoidId, Weight, WeightFn};

pub use export::{from_json, to_dot, to_json, to_text};

/// Weight function over state indices.
pub type StateFn<W> = WeightFn<usize, W>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TerminationKind {
    /// No transition at all.
    Stuck,
    /// A transition to the constantly zero function.
    Terminal,
    /// A transition to a function with nonempty support.
    Active,
}

impl fmt::Display for TerminationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TerminationKind::Stuck => "stuck",
            TerminationKind::Terminal => "terminal",
            TerminationKind::Active => "active",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    /// Every weight function is a probability distribution.
    Segala,
    /// Every weight function has total 0 or 1.
    Reactive,
    /// Functional, and the totals over all labels sum to 0 or 1 per state.
    Generative,
}

impl Constraint {
    pub fn from_name(s: &str) -> Option<Constraint> {
        match s {
            "segala" => Some(Constraint::Segala),
            "reactive" => Some(Constraint::Reactive),
            "generative" => Some(Constraint::Generative),
            _ => None,
        }
    }
}

/// A constraint violation; `label`/`fn_index` are absent when the whole state
/// (or row) is at fault.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub state: usize,
    pub label: Option<usize>,
    pub fn_index: Option<usize>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UltrasError {
    #[error("unknown state {0}")]
    UnknownState(usize),
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error("weight function mentions state {0} outside the state set")]
    Support(usize),
    #[error("constraint {constraint:?} needs a rational monoid, found {monoid}")]
    Incompatible { constraint: Constraint, monoid: MonoidId },
    #[error("label sets differ")]
    LabelMismatch,
    #[error("malformed system: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ultras<W> {
    labels: Vec<String>,
    states: Vec<String>,
    trans: Vec<Vec<Vec<StateFn<W>>>>,
}

impl<W: Weight> Ultras<W> {
    /// A system over the given states and labels with every row empty.
    pub fn new(labels: Vec<String>, states: Vec<String>) -> Self {
        let trans = vec![vec![Vec::new(); labels.len()]; states.len()];
        Ultras { labels, states, trans }
    }

    /// Anonymous states `s0..s{n-1}` and labels as given.
    pub fn with_size(n: usize, labels: &[&str]) -> Self {
        Ultras::new(labels.iter().map(|l| l.to_string()).collect(), (0..n).map(|i| format!("s{i}")).collect())
    }

    pub fn monoid(&self) -> MonoidId {
        W::MONOID.id
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// The transitions of `(x, a)`, sorted and without duplicates.
    pub fn row(&self, x: usize, a: usize) -> &[StateFn<W>] {
        &self.trans[x][a]
    }

    /// Replaces a row; the functions are sorted and deduplicated.
    pub fn set_row<I: IntoIterator<Item = StateFn<W>>>(&mut self, x: usize, a: usize, fns: I) -> Result<(), UltrasError> {
        if x >= self.states.len() {
            return Err(UltrasError::UnknownState(x));
        }
        if a >= self.labels.len() {
            return Err(UltrasError::UnknownLabel(a.to_string()));
        }
        let set: BTreeSet<StateFn<W>> = fns.into_iter().collect();
        if let Some(&bad) = set.iter().flat_map(|f| f.support()).find(|&&k| k >= self.states.len()) {
            return Err(UltrasError::Support(bad));
        }
        self.trans[x][a] = set.into_iter().collect();
        Ok(())
    }

    pub fn add_fn(&mut self, x: usize, a: usize, f: StateFn<W>) -> Result<(), UltrasError> {
        let mut row = self.trans.get(x).ok_or(UltrasError::UnknownState(x))?.get(a).cloned().unwrap_or_default();
        row.push(f);
        self.set_row(x, a, row)
    }

    pub fn classify(&self, x: usize, a: usize) -> Result<BTreeSet<TerminationKind>, UltrasError> {
        if x >= self.states.len() {
            return Err(UltrasError::UnknownState(x));
        }
        let row = self.trans[x].get(a).ok_or_else(|| UltrasError::UnknownLabel(a.to_string()))?;
        let mut out = BTreeSet::new();
        if row.is_empty() {
            out.insert(TerminationKind::Stuck);
        }
        for f in row {
            out.insert(if f.is_zero() { TerminationKind::Terminal } else { TerminationKind::Active });
        }
        Ok(out)
    }

    /// Exactly one weight function per state and label.
    pub fn is_functional(&self) -> bool {
        self.trans.iter().all(|rows| rows.iter().all(|r| r.len() == 1))
    }

    /// The unique successor function of a functional system.
    pub fn successor(&self, x: usize, a: usize) -> Option<&StateFn<W>> {
        match self.trans[x][a].as_slice() {
            [f] => Some(f),
            _ => None,
        }
    }

    pub fn check_constraint(&self, c: Constraint) -> Result<Vec<Violation>, UltrasError> {
        if !matches!(self.monoid(), MonoidId::Rat | MonoidId::RatInf) {
            return Err(UltrasError::Incompatible { constraint: c, monoid: self.monoid() });
        }
        let one = W::one();
        let zero = W::zero();
        let mut out = vec![];
        for x in 0..self.num_states() {
            match c {
                Constraint::Segala | Constraint::Reactive => {
                    for a in 0..self.num_labels() {
                        for (j, f) in self.trans[x][a].iter().enumerate() {
                            let t = f.total();
                            let ok = t == one || (c == Constraint::Reactive && t == zero);
                            if !ok {
                                out.push(Violation { state: x, label: Some(a), fn_index: Some(j), reason: format!("total {t}") });
                            }
                        }
                    }
                }
                Constraint::Generative => {
                    let mut sum = W::zero();
                    let mut functional = true;
                    for a in 0..self.num_labels() {
                        match self.successor(x, a) {
                            Some(f) => sum = sum + f.total(),
                            None => {
                                functional = false;
                                out.push(Violation {
                                    state: x,
                                    label: Some(a),
                                    fn_index: None,
                                    reason: format!("{} weight functions", self.trans[x][a].len()),
                                });
                            }
                        }
                    }
                    if functional && sum != zero && sum != one {
                        out.push(Violation { state: x, label: None, fn_index: None, reason: format!("total {sum}") });
                    }
                }
            }
        }
        Ok(out)
    }

    /// States of `self` followed by those of `other` (indices shifted).
    pub fn disjoint_union(&self, other: &Ultras<W>) -> Result<Ultras<W>, UltrasError> {
        if self.labels != other.labels {
            return Err(UltrasError::LabelMismatch);
        }
        let n = self.num_states();
        let mut states = self.states.clone();
        states.extend(other.states.iter().cloned());
        let mut trans = self.trans.clone();
        for rows in &other.trans {
            trans.push(rows.iter().map(|r| r.iter().map(|f| f.substitute(|k| k + n)).collect()).collect());
        }
        Ok(Ultras { labels: self.labels.clone(), states, trans })
    }

    /// The system restricted to the given states (which must be closed under
    /// successors), renumbered in the given order.
    pub fn restrict(&self, keep: &[usize]) -> Result<Ultras<W>, UltrasError> {
        let mut index = vec![usize::MAX; self.num_states()];
        for (i, &s) in keep.iter().enumerate() {
            index[s] = i;
        }
        let mut out = Ultras::new(self.labels.clone(), keep.iter().map(|&s| self.states[s].clone()).collect());
        for (i, &s) in keep.iter().enumerate() {
            for a in 0..self.num_labels() {
                let fns = self.trans[s][a]
                    .iter()
                    .map(|f| {
                        f.try_substitute(|&k| if index[k] == usize::MAX { Err(UltrasError::Support(k)) } else { Ok(index[k]) })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                out.set_row(i, a, fns)?;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::Rational;

    fn q(s: &str) -> Rational {
        Rational::parse_weight(s).unwrap()
    }

    fn f(pairs: &[(usize, &str)]) -> StateFn<Rational> {
        pairs.iter().map(|(k, w)| (*k, q(w))).collect()
    }

    #[test]
    fn classify_examples() {
        let mut u = Ultras::<Rational>::with_size(2, &["a"]);
        assert_eq!(u.classify(0, 0).unwrap(), [TerminationKind::Stuck].into());
        u.set_row(0, 0, [f(&[])]).unwrap();
        assert_eq!(u.classify(0, 0).unwrap(), [TerminationKind::Terminal].into());
        u.set_row(0, 0, [f(&[]), f(&[(1, "1")])]).unwrap();
        assert_eq!(u.classify(0, 0).unwrap(), [TerminationKind::Terminal, TerminationKind::Active].into());
        assert!(u.classify(5, 0).is_err());
        assert!(u.classify(0, 3).is_err());
    }

    #[test]
    fn functionality() {
        let mut u = Ultras::<Rational>::with_size(1, &["a"]);
        assert!(!u.is_functional());
        u.set_row(0, 0, [f(&[(0, "1")])]).unwrap();
        assert!(u.is_functional());
        u.add_fn(0, 0, f(&[(0, "2")])).unwrap();
        assert!(!u.is_functional());
    }

    #[test]
    fn duplicates_collapse() {
        let mut u = Ultras::<Rational>::with_size(1, &["a"]);
        u.set_row(0, 0, [f(&[(0, "1")]), f(&[(0, "1")])]).unwrap();
        assert_eq!(u.row(0, 0).len(), 1);
    }

    #[test]
    fn support_outside_states_is_rejected() {
        let mut u = Ultras::<Rational>::with_size(1, &["a"]);
        assert_eq!(u.set_row(0, 0, [f(&[(3, "1")])]), Err(UltrasError::Support(3)));
    }

    #[test]
    fn segala_constraint() {
        let mut u = Ultras::<Rational>::with_size(3, &["a"]);
        u.set_row(0, 0, [f(&[(1, "1/2"), (2, "1/2")])]).unwrap();
        assert!(u.check_constraint(Constraint::Segala).unwrap().is_empty());
        u.set_row(0, 0, [f(&[(1, "1/2")])]).unwrap();
        let v = u.check_constraint(Constraint::Segala).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].state, v[0].label, v[0].fn_index), (0, Some(0), Some(0)));
    }

    #[test]
    fn reactive_and_generative() {
        let mut u = Ultras::<Rational>::with_size(2, &["a", "b"]);
        for x in 0..2 {
            u.set_row(x, 0, [f(&[(1, "1")])]).unwrap();
            u.set_row(x, 1, [f(&[])]).unwrap();
        }
        assert!(u.check_constraint(Constraint::Reactive).unwrap().is_empty());
        assert!(u.check_constraint(Constraint::Generative).unwrap().is_empty());
        u.set_row(1, 1, [f(&[(0, "1")])]).unwrap();
        assert!(u.check_constraint(Constraint::Reactive).unwrap().is_empty());
        assert_eq!(u.check_constraint(Constraint::Generative).unwrap().len(), 1);
        u.set_row(1, 1, []).unwrap();
        assert_eq!(u.check_constraint(Constraint::Generative).unwrap()[0].label, Some(1));
    }

    #[test]
    fn constraints_need_rationals() {
        let u = Ultras::<crate::weights::Bool>::with_size(1, &["a"]);
        assert!(matches!(u.check_constraint(Constraint::Segala), Err(UltrasError::Incompatible { .. })));
    }

    #[test]
    fn union_shifts_indices() {
        let mut u = Ultras::<Rational>::with_size(1, &["a"]);
        u.set_row(0, 0, [f(&[(0, "1")])]).unwrap();
        let w = u.disjoint_union(&u).unwrap();
        assert_eq!(w.num_states(), 2);
        assert_eq!(w.row(1, 0), &[f(&[(1, "1")])]);
    }
}
