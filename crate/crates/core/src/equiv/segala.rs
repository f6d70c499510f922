//! Strong probabilistic bisimulation on Segala systems, as the greatest
//! relation whose transitions match up to a coupling of the distributions.

use std::collections::VecDeque;

use num_traits::{One, Zero};

use crate::ultras::{StateFn, Ultras};
use crate::weights::Rational;

use super::{EquivError, Partition};

/// Computes bisimilarity pair by pair: `(x, y)` is dropped when some
/// distribution of one side has no partner on the other side that it can be
/// coupled with inside the current relation.
pub fn segala_bisimilarity(u: &Ultras<Rational>) -> Result<Partition, EquivError> {
    let n = u.num_states();
    for x in 0..n {
        for a in 0..u.num_labels() {
            if u.row(x, a).iter().any(|f| !f.total().is_one()) {
                return Err(EquivError::NotSegala { state: x, label: u.labels()[a].clone() });
            }
        }
    }
    let mut rel = vec![vec![true; n]; n];
    loop {
        let mut changed = false;
        for x in 0..n {
            for y in 0..n {
                if !rel[x][y] {
                    continue;
                }
                let ok = (0..u.num_labels()).all(|a| {
                    let (fx, fy) = (u.row(x, a), u.row(y, a));
                    fx.iter().all(|f| fy.iter().any(|g| coupled(f, g, &rel)))
                        && fy.iter().all(|g| fx.iter().any(|f| coupled(f, g, &rel)))
                });
                if !ok {
                    rel[x][y] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let keys: Vec<Vec<bool>> = rel.clone();
    let p = Partition::from_labels(&keys);
    debug_assert!((0..n).all(|x| (0..n).all(|y| rel[x][y] == p.same_block(x, y))));
    Ok(p)
}

/// Whether there is a joint distribution with marginals `f` and `g`
/// supported on `rel`: a maximum flow of value 1.
fn coupled(f: &StateFn<Rational>, g: &StateFn<Rational>, rel: &[Vec<bool>]) -> bool {
    let left: Vec<(usize, &Rational)> = f.iter().map(|(k, w)| (*k, w)).collect();
    let right: Vec<(usize, &Rational)> = g.iter().map(|(k, w)| (*k, w)).collect();
    let (nl, nr) = (left.len(), right.len());
    let size = nl + nr + 2;
    let (source, sink) = (0, size - 1);
    let mut cap = vec![vec![Rational::zero(); size]; size];
    for (i, (_, w)) in left.iter().enumerate() {
        cap[source][1 + i] = (*w).clone();
    }
    for (j, (_, w)) in right.iter().enumerate() {
        cap[1 + nl + j][sink] = (*w).clone();
    }
    for (i, (x, _)) in left.iter().enumerate() {
        for (j, (y, _)) in right.iter().enumerate() {
            if rel[*x][*y] {
                cap[1 + i][1 + nl + j] = Rational::one();
            }
        }
    }
    let mut flow = Rational::zero();
    loop {
        let mut prev = vec![usize::MAX; size];
        prev[source] = source;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for w in 0..size {
                if prev[w] == usize::MAX && cap[v][w] > Rational::zero() {
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        if prev[sink] == usize::MAX {
            break;
        }
        let mut bottleneck: Option<Rational> = None;
        let mut v = sink;
        while v != source {
            let c = cap[prev[v]][v].clone();
            bottleneck = Some(bottleneck.map_or(c.clone(), |b| b.min(c)));
            v = prev[v];
        }
        let b = bottleneck.expect("nonempty path");
        let mut v = sink;
        while v != source {
            let p = prev[v];
            cap[p][v] -= &b;
            cap[v][p] += &b;
            v = p;
        }
        flow += b;
    }
    flow.is_one()
}
