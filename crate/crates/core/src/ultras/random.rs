//! Random systems for the cross-check suites.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::weights::{Rational, Weight};

use super::{StateFn, Ultras};

fn labels(n: usize) -> Vec<&'static str> {
    ["a", "b", "c", "d"][..n.min(4)].to_vec()
}

/// A weight function with at most two support points, weights drawn by
/// [`Weight::sample`] (so possibly zero).
pub fn random_fn<W: Weight, R: Rng + ?Sized>(rng: &mut R, states: usize) -> StateFn<W> {
    let mut f = StateFn::zero();
    for _ in 0..rng.gen_range(0..=2) {
        f.add_at(rng.gen_range(0..states), W::sample(rng));
    }
    f
}

/// Up to `max_fns` functions per state and label (rows may be empty).
pub fn random_ultras<W: Weight, R: Rng + ?Sized>(rng: &mut R, states: usize, nlabels: usize, max_fns: usize) -> Ultras<W> {
    let mut u = Ultras::with_size(states, &labels(nlabels));
    for x in 0..states {
        for a in 0..nlabels {
            let fns: Vec<StateFn<W>> = (0..rng.gen_range(0..=max_fns)).map(|_| random_fn(rng, states)).collect();
            u.set_row(x, a, fns).expect("in range");
        }
    }
    u
}

/// Exactly one function per state and label.
pub fn random_functional<W: Weight, R: Rng + ?Sized>(rng: &mut R, states: usize, nlabels: usize) -> Ultras<W> {
    let mut u = Ultras::with_size(states, &labels(nlabels));
    for x in 0..states {
        for a in 0..nlabels {
            let f = random_fn(rng, states);
            u.set_row(x, a, [f]).expect("in range");
        }
    }
    u
}

/// Every function is a probability distribution over at most two states.
pub fn random_segala<R: Rng + ?Sized>(rng: &mut R, states: usize, nlabels: usize, max_fns: usize) -> Ultras<Rational> {
    let halves = ["1/2", "1/3", "2/3", "1/4", "3/4"];
    let mut u = Ultras::with_size(states, &labels(nlabels));
    for x in 0..states {
        for a in 0..nlabels {
            let mut fns = vec![];
            for _ in 0..rng.gen_range(0..=max_fns) {
                let y = rng.gen_range(0..states);
                let mut f = StateFn::zero();
                if rng.gen_bool(0.5) {
                    f.add_at(y, Rational::from_integer(1.into()));
                } else {
                    let p = Rational::parse_weight(halves.choose(rng).expect("nonempty")).expect("literal");
                    let q = Rational::from_integer(1.into()) - &p;
                    f.add_at(y, p);
                    f.add_at(rng.gen_range(0..states), q);
                }
                debug_assert!(!f.total().is_zero());
                fns.push(f);
            }
            u.set_row(x, a, fns).expect("in range");
        }
    }
    u
}

/// Stuck or terminal, but never both, under each label: every label either
/// has no zero function anywhere or no empty row anywhere.
pub fn random_one_termination<W: Weight, R: Rng + ?Sized>(rng: &mut R, states: usize, nlabels: usize, max_fns: usize) -> Ultras<W> {
    let mut u = Ultras::with_size(states, &labels(nlabels));
    for a in 0..nlabels {
        let terminal = rng.gen_bool(0.5);
        for x in 0..states {
            let mut fns: Vec<StateFn<W>> = vec![];
            let n = if terminal { rng.gen_range(1..=max_fns.max(1)) } else { rng.gen_range(0..=max_fns) };
            for _ in 0..n {
                let f = random_fn(rng, states);
                if !terminal && f.is_zero() {
                    continue;
                }
                fns.push(f);
            }
            if terminal && fns.is_empty() {
                fns.push(StateFn::zero());
            }
            u.set_row(x, a, fns).expect("in range");
        }
    }
    u
}
