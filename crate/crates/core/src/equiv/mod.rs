//! Bisimilarity: signature refinement, a brute-force oracle, and the
//! weighted, Segala and M-bisimulation cross-checks.

mod congruence;
mod mbisim;
mod segala;
mod weighted;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ultras::{StateFn, Ultras};
use crate::weights::Weight;

pub use congruence::{
    congruence_suite, CongruenceConfig, CongruenceReport, Counterexample, SigmaGenerator, TermGenerator,
};
pub use mbisim::{canonical_m, check_m_bisim, termination_witness, MBisimError, MFunction, MixedTermination};
pub use segala::segala_bisimilarity;
pub use weighted::{check_weighted_bisim, coarsest_weighted_bisimulation};

/// A partition of the states `0..n`. Blocks are numbered by their least
/// state, and each block lists its states in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Normalizes an arbitrary block labelling.
    pub fn from_labels<K: Ord + Clone>(keys: &[K]) -> Partition {
        let mut ids: BTreeMap<K, usize> = BTreeMap::new();
        let mut blocks: Vec<Vec<usize>> = vec![];
        let mut block_of = Vec::with_capacity(keys.len());
        for (x, k) in keys.iter().enumerate() {
            let id = *ids.entry(k.clone()).or_insert_with(|| {
                blocks.push(vec![]);
                blocks.len() - 1
            });
            blocks[id].push(x);
            block_of.push(id);
        }
        Partition { block_of, blocks }
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Partition, EquivError> {
        let mut keys = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(EquivError::Partition("empty block".into()));
            }
            for &x in block {
                if x >= n {
                    return Err(EquivError::Partition(format!("state {x} out of range")));
                }
                if keys[x] != usize::MAX {
                    return Err(EquivError::Partition(format!("state {x} in two blocks")));
                }
                keys[x] = b;
            }
        }
        if let Some(x) = keys.iter().position(|&k| k == usize::MAX) {
            return Err(EquivError::Partition(format!("state {x} in no block")));
        }
        Ok(Partition::from_labels(&keys))
    }

    /// One block.
    pub fn single(n: usize) -> Partition {
        Partition::from_labels(&vec![0; n])
    }

    /// Singleton blocks.
    pub fn discrete(n: usize) -> Partition {
        Partition::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn num_states(&self) -> usize {
        self.block_of.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn same_block(&self, x: usize, y: usize) -> bool {
        self.block_of[x] == self.block_of[y]
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|&x| other.same_block(x, b[0])))
    }

    /// The class-weight vector of `f`, one entry per block.
    pub fn class_vector<W: Weight>(&self, f: &StateFn<W>) -> Vec<W> {
        let mut v = vec![W::zero(); self.blocks.len()];
        for (&y, w) in f.iter() {
            let b = self.block_of[y];
            v[b] = v[b].clone() + w.clone();
        }
        v
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.blocks)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|b| format!("{{{}}}", b.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "{}", blocks.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("{states} states exceed the brute-force limit of {limit}")]
    Limit { states: usize, limit: usize },
    #[error("the system is not functional at state {state}, label {label}")]
    NotFunctional { state: usize, label: String },
    #[error("state {state}, label {label}: a weight function is not a probability distribution")]
    NotSegala { state: usize, label: String },
}

/// Per label, the set of class-weight vectors of the state's functions. A
/// stuck label gives the empty set; a terminal one contains the zero vector.
pub type StateSignature<W> = Vec<BTreeSet<Vec<W>>>;

pub fn signature<W: Weight>(u: &Ultras<W>, p: &Partition, x: usize) -> StateSignature<W> {
    (0..u.num_labels()).map(|a| u.row(x, a).iter().map(|f| p.class_vector(f)).collect()).collect()
}

/// The coarsest bisimulation: states are split by their signatures until
/// nothing changes.
pub fn coarsest_bisimulation<W: Weight>(u: &Ultras<W>) -> Partition {
    refine_from(u, Partition::single(u.num_states()))
}

/// The coarsest bisimulation refining `initial`.
pub fn refine_from<W: Weight>(u: &Ultras<W>, initial: Partition) -> Partition {
    let mut p = initial;
    loop {
        let keys: Vec<(usize, StateSignature<W>)> =
            (0..u.num_states()).map(|x| (p.block_of(x), signature(u, &p, x))).collect();
        let next = Partition::from_labels(&keys);
        if next.num_blocks() == p.num_blocks() {
            return next;
        }
        p = next;
    }
}

/// Bisimilarity of a state of `u` and a state of `v`, on their disjoint union.
pub fn bisimilar_across<W: Weight>(u: &Ultras<W>, x: usize, v: &Ultras<W>, y: usize) -> Result<bool, EquivError> {
    let joint = u
        .disjoint_union(v)
        .map_err(|e| EquivError::Partition(e.to_string()))?;
    Ok(coarsest_bisimulation(&joint).same_block(x, u.num_states() + y))
}

/// Default state bound of [`brute_force_bisim`].
pub const BRUTE_FORCE_LIMIT: usize = 8;

/// Whether `p` satisfies both transfer conditions of a bisimulation, checked
/// pair by pair.
pub fn is_bisimulation<W: Weight>(u: &Ultras<W>, p: &Partition) -> bool {
    let matches = |f: &StateFn<W>, g: &StateFn<W>| {
        p.blocks().iter().all(|c| f.class_weight(|k| c.binary_search(k).is_ok()) == g.class_weight(|k| c.binary_search(k).is_ok()))
    };
    let simulates = |x: usize, y: usize, a: usize| u.row(x, a).iter().all(|f| u.row(y, a).iter().any(|g| matches(f, g)));
    p.blocks().iter().all(|b| {
        b.iter().all(|&x| b.iter().all(|&y| x >= y || (0..u.num_labels()).all(|a| simulates(x, y, a) && simulates(y, x, a))))
    })
}

/// The largest bisimulation found by enumerating partitions by increasing
/// number of blocks and testing each directly.
pub fn brute_force_bisim<W: Weight>(u: &Ultras<W>, limit: usize) -> Result<Partition, EquivError> {
    let n = u.num_states();
    if n > limit {
        return Err(EquivError::Limit { states: n, limit });
    }
    if n == 0 {
        return Ok(Partition::discrete(0));
    }
    for k in 1..=n {
        let mut found = None;
        set_partitions(n, k, &mut |keys| {
            let p = Partition::from_labels(keys);
            if is_bisimulation(u, &p) {
                found = Some(p);
                return true;
            }
            false
        });
        if let Some(p) = found {
            return Ok(p);
        }
    }
    unreachable!("the discrete partition is a bisimulation")
}

/// Calls `visit` on every restricted growth string of length `n` with exactly
/// `k` distinct values, stopping once it returns true.
fn set_partitions(n: usize, k: usize, visit: &mut dyn FnMut(&[usize]) -> bool) {
    fn go(keys: &mut Vec<usize>, n: usize, k: usize, used: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if keys.len() == n {
            return used == k && visit(keys);
        }
        if used + (n - keys.len()) < k {
            return false;
        }
        for b in 0..=used.min(k - 1) {
            keys.push(b);
            let stop = go(keys, n, k, used.max(b + 1), visit);
            keys.pop();
            if stop {
                return true;
            }
        }
        false
    }
    go(&mut Vec::with_capacity(n), n, k, 0, visit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::Nat;

    fn count(n: usize, k: usize) -> usize {
        let mut c = 0;
        set_partitions(n, k, &mut |_| {
            c += 1;
            false
        });
        c
    }

    #[test]
    fn stirling_numbers() {
        assert_eq!(count(4, 2), 7);
        assert_eq!(count(5, 3), 25);
        assert_eq!((1..=6).map(|k| count(6, k)).sum::<usize>(), 203);
    }

    #[test]
    fn partitions_normalize() {
        let p = Partition::from_labels(&['b', 'a', 'b']);
        assert_eq!(p.blocks(), &[vec![0, 2], vec![1]]);
        assert_eq!(p.to_string(), "{0, 2} {1}");
        assert!(Partition::from_blocks(3, &[vec![0], vec![0, 1, 2]]).is_err());
    }

    #[test]
    fn stuck_and_terminal_are_separated() {
        let mut u: Ultras<Nat> = Ultras::with_size(2, &["a"]);
        u.add_fn(0, 0, StateFn::zero()).unwrap();
        assert_eq!(coarsest_bisimulation(&u).num_blocks(), 2);
        assert_eq!(brute_force_bisim(&u, 8).unwrap().num_blocks(), 2);
    }
}
