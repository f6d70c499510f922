//! Concrete instantiations: PEPA, and the Segala and W-GSOS formats with
//! their translations into WFSOS.

pub mod corpus;
pub mod pepa;
pub mod segala;
pub mod wgsos;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::engine::Exploration;
use crate::interp::TermFn;
use crate::syntax::Term;
use crate::ultras::{StateFn, Ultras};
use crate::weights::Weight;

/// Successor functions per label, as computed by a direct semantics.
pub type DirectRow<W> = BTreeMap<String, BTreeSet<TermFn<W>>>;

/// Errors of the direct (untranslated) semantics of a format.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DirectError {
    #[error("more than {0} states")]
    Budget(usize),
    #[error("bad process term `{0}`")]
    Term(String),
    #[error("rule {rule}: {message}")]
    Rule { rule: String, message: String },
}

/// Reachable exploration driven by a direct semantics, numbered like
/// [`crate::engine::explore`] so the two results compare with `==`.
pub fn explore_direct<W: Weight>(
    labels: &[String],
    roots: &[Term],
    max_states: usize,
    mut successors: impl FnMut(&Term) -> Result<DirectRow<W>, DirectError>,
) -> Result<Exploration<W>, DirectError> {
    let mut seen: HashSet<Term> = roots.iter().cloned().collect();
    let mut order: Vec<Term> = roots.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let mut rows = BTreeMap::new();
    let mut i = 0;
    while i < order.len() {
        let t = order[i].clone();
        i += 1;
        let row = successors(&t)?;
        for q in row.values().flatten().flat_map(|f| f.support()) {
            if seen.insert(q.clone()) {
                if seen.len() > max_states {
                    return Err(DirectError::Budget(max_states));
                }
                order.push(q.clone());
            }
        }
        rows.insert(t, row);
    }
    let terms: Vec<Term> = rows.keys().cloned().collect();
    let index: BTreeMap<&Term, usize> = terms.iter().enumerate().map(|(k, t)| (t, k)).collect();
    let mut ultras = Ultras::new(labels.to_vec(), terms.iter().map(Term::to_string).collect());
    for (k, row) in rows.values().enumerate() {
        for (a, label) in labels.iter().enumerate() {
            let Some(fs) = row.get(label) else { continue };
            let fns: Vec<StateFn<W>> = fs.iter().map(|f| f.substitute(|q| index[q])).collect();
            ultras.set_row(k, a, fns).expect("supports are explored states");
        }
    }
    Ok(Exploration { ultras, terms, truncated: false, unexpanded: vec![] })
}
