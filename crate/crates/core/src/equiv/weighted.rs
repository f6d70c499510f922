//! Weighted bisimulation on functional systems, where every state has one
//! weight function per label.

use std::collections::BTreeMap;

use crate::ultras::{StateFn, Ultras};
use crate::weights::Weight;

use super::{EquivError, Partition};

fn successors<W: Weight>(u: &Ultras<W>) -> Result<Vec<Vec<&StateFn<W>>>, EquivError> {
    (0..u.num_states())
        .map(|x| {
            (0..u.num_labels())
                .map(|a| {
                    u.successor(x, a)
                        .ok_or_else(|| EquivError::NotFunctional { state: x, label: u.labels()[a].clone() })
                })
                .collect()
        })
        .collect()
}

fn weight_into<W: Weight>(f: &StateFn<W>, class: &[usize]) -> W {
    class.iter().fold(W::zero(), |acc, y| acc + f.get(y))
}

/// Whether related states give equal weight to every class under every
/// label.
pub fn check_weighted_bisim<W: Weight>(u: &Ultras<W>, p: &Partition) -> Result<bool, EquivError> {
    let succ = successors(u)?;
    for block in p.blocks() {
        for c in p.blocks() {
            for a in 0..u.num_labels() {
                let w = weight_into(succ[block[0]][a], c);
                if block[1..].iter().any(|&y| weight_into(succ[y][a], c) != w) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The coarsest weighted bisimulation, by splitting blocks against one
/// splitter class and label at a time until no splitter separates anything.
pub fn coarsest_weighted_bisimulation<W: Weight>(u: &Ultras<W>) -> Result<Partition, EquivError> {
    let succ = successors(u)?;
    let n = u.num_states();
    let mut blocks: Vec<Vec<usize>> = if n == 0 { vec![] } else { vec![(0..n).collect()] };
    'outer: loop {
        for s in 0..blocks.len() {
            let splitter = blocks[s].clone();
            for a in 0..u.num_labels() {
                let mut next: Vec<Vec<usize>> = vec![];
                let mut split = false;
                for b in &blocks {
                    let mut parts: BTreeMap<W, Vec<usize>> = BTreeMap::new();
                    for &x in b {
                        parts.entry(weight_into(succ[x][a], &splitter)).or_default().push(x);
                    }
                    split |= parts.len() > 1;
                    next.extend(parts.into_values());
                }
                if split {
                    blocks = next;
                    continue 'outer;
                }
            }
        }
        break;
    }
    Partition::from_blocks(n, &blocks)
}
