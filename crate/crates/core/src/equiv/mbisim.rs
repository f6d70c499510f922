//! M-functions and M-bisimulation.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ultras::Ultras;
use crate::weights::Weight;

use super::Partition;

/// A map `(state, label, set of states) -> V` pointed at `bottom`, evaluated
/// on demand.
pub struct MFunction<'a, V> {
    pub bottom: V,
    eval: Box<dyn Fn(usize, usize, &BTreeSet<usize>) -> V + 'a>,
}

impl<'a, V: Clone + Eq + fmt::Debug + 'a> MFunction<'a, V> {
    pub fn new(bottom: V, eval: impl Fn(usize, usize, &BTreeSet<usize>) -> V + 'a) -> Self {
        MFunction { bottom, eval: Box::new(eval) }
    }

    /// The constant map to `bottom`.
    pub fn constant(bottom: V) -> Self {
        let b = bottom.clone();
        MFunction::new(bottom, move |_, _, _| b.clone())
    }

    pub fn value(&self, x: usize, a: usize, c: &BTreeSet<usize>) -> V {
        (self.eval)(x, a, c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MBisimError {
    #[error("not an M-function: state {state}, label {label}, class {class:?} has no weight there but M is not bottom")]
    Bottom { state: usize, label: String, class: Vec<usize> },
    #[error("not an M-function: states {x} and {y} agree on {c1:?} and {c2:?} under label {label} but not on their union")]
    Union { x: usize, y: usize, label: String, c1: Vec<usize>, c2: Vec<usize> },
    #[error("{0}")]
    Termination(#[from] MixedTermination),
}

/// Two states with different kinds of termination under one label.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("label {label}: state {stuck} is stuck while state {terminal} is terminal")]
pub struct MixedTermination {
    pub label: String,
    pub stuck: usize,
    pub terminal: usize,
}

/// A witness against "at most one kind of termination per label": a state
/// without transitions and one with the zero function, under the same label.
pub fn termination_witness<W: Weight>(u: &Ultras<W>) -> Option<MixedTermination> {
    for a in 0..u.num_labels() {
        let stuck = (0..u.num_states()).find(|&x| u.row(x, a).is_empty());
        let terminal = (0..u.num_states()).find(|&y| u.row(y, a).iter().any(|f| f.is_zero()));
        if let (Some(stuck), Some(terminal)) = (stuck, terminal) {
            return Some(MixedTermination { label: u.labels()[a].clone(), stuck, terminal });
        }
    }
    None
}

/// `M(x, a, C)`: the classes (class-weight vectors modulo `rel`) of the
/// functions of `x` under `a` that give `C` nonzero weight, together with
/// the class of the zero function, which is also the bottom element.
pub fn canonical_m<'a, W: Weight>(
    u: &'a Ultras<W>,
    rel: &'a Partition,
) -> Result<MFunction<'a, BTreeSet<Vec<W>>>, MixedTermination> {
    if let Some(w) = termination_witness(u) {
        return Err(w);
    }
    let zero_class = vec![W::zero(); rel.num_blocks()];
    let bottom: BTreeSet<Vec<W>> = BTreeSet::from([zero_class.clone()]);
    Ok(MFunction::new(bottom, move |x, a, c| {
        let mut out: BTreeSet<Vec<W>> = u
            .row(x, a)
            .iter()
            .filter(|f| !f.class_weight(|k| c.contains(k)).is_zero())
            .map(|f| rel.class_vector(f))
            .collect();
        out.insert(zero_class.clone());
        out
    }))
}

/// Whether `rel` is an M-bisimulation for `m`. Both M-function conditions
/// are checked on the classes queried along the way.
pub fn check_m_bisim<W: Weight, V: Clone + Eq + fmt::Debug>(
    u: &Ultras<W>,
    m: &MFunction<'_, V>,
    rel: &Partition,
) -> Result<bool, MBisimError> {
    let classes: Vec<BTreeSet<usize>> = rel.blocks().iter().map(|b| b.iter().copied().collect()).collect();
    for a in 0..u.num_labels() {
        let label = || u.labels()[a].clone();
        let table: Vec<Vec<V>> = (0..u.num_states()).map(|x| classes.iter().map(|c| m.value(x, a, c)).collect()).collect();
        for (x, row) in table.iter().enumerate() {
            for (c, v) in classes.iter().zip(row) {
                let silent = u.row(x, a).iter().all(|f| f.class_weight(|k| c.contains(k)).is_zero());
                if silent && *v != m.bottom {
                    return Err(MBisimError::Bottom { state: x, label: label(), class: c.iter().copied().collect() });
                }
            }
        }
        for x in 0..u.num_states() {
            for y in x + 1..u.num_states() {
                for i in 0..classes.len() {
                    for j in i + 1..classes.len() {
                        if table[x][i] != table[y][i] || table[x][j] != table[y][j] {
                            continue;
                        }
                        let union: BTreeSet<usize> = classes[i].union(&classes[j]).copied().collect();
                        if m.value(x, a, &union) != m.value(y, a, &union) {
                            return Err(MBisimError::Union {
                                x,
                                y,
                                label: label(),
                                c1: classes[i].iter().copied().collect(),
                                c2: classes[j].iter().copied().collect(),
                            });
                        }
                    }
                }
            }
        }
        for block in rel.blocks() {
            if block[1..].iter().any(|&y| table[y] != table[block[0]]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
