use std::collections::btree_map;
use std::collections::BTreeMap;
use std::fmt;

use super::Weight;

/// A finitely supported weight function `K -> W`.
///
/// Zero weights are never stored, so two functions are equal exactly when
/// their entry maps are equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightFn<K: Ord, W> {
    entries: BTreeMap<K, W>,
}

impl<K: Ord, W> Default for WeightFn<K, W> {
    fn default() -> Self {
        WeightFn { entries: BTreeMap::new() }
    }
}

impl<K: Ord + Clone, W: Weight> WeightFn<K, W> {
    /// The constantly-zero function.
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn point(key: K, weight: W) -> Self {
        let mut f = Self::zero();
        f.add_at(key, weight);
        f
    }

    /// Builds a function from pairs, summing repeated keys.
    pub fn from_pairs<I: IntoIterator<Item = (K, W)>>(pairs: I) -> Self {
        let mut f = Self::zero();
        for (k, w) in pairs {
            f.add_at(k, w);
        }
        f
    }

    /// Adds `weight` to the value at `key`, keeping the canonical form.
    pub fn add_at(&mut self, key: K, weight: W) {
        if weight.is_zero() {
            return;
        }
        match self.entries.entry(key) {
            btree_map::Entry::Vacant(e) => {
                e.insert(weight);
            }
            btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + weight;
                if sum.is_zero() {
                    e.remove();
                } else {
                    e.insert(sum);
                }
            }
        }
    }

    pub fn get(&self, key: &K) -> W {
        self.entries.get(key).cloned().unwrap_or_else(W::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &K> + '_ {
        self.entries.keys()
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &W)> + '_ {
        self.entries.iter()
    }

    /// Monoid sum over the support; the unit for the empty function.
    pub fn total(&self) -> W {
        W::sum(self.entries.values())
    }

    /// `rho(C)`: the sum of the weights of members of `class`.
    pub fn class_weight<F: Fn(&K) -> bool>(&self, class: F) -> W {
        W::sum(self.entries.iter().filter(|(k, _)| class(k)).map(|(_, w)| w))
    }

    /// Push-forward along a key map: `result(y) = sum of rho(x) for x with sigma(x) = y`.
    pub fn substitute<K2: Ord + Clone, F: FnMut(&K) -> K2>(&self, mut sigma: F) -> WeightFn<K2, W> {
        WeightFn::from_pairs(self.entries.iter().map(|(k, w)| (sigma(k), w.clone())))
    }

    /// Fallible variant of [`WeightFn::substitute`].
    pub fn try_substitute<K2, E, F>(&self, mut sigma: F) -> Result<WeightFn<K2, W>, E>
    where
        K2: Ord + Clone,
        F: FnMut(&K) -> Result<K2, E>,
    {
        let mut out = WeightFn::zero();
        for (k, w) in &self.entries {
            out.add_at(sigma(k)?, w.clone());
        }
        Ok(out)
    }

    /// Pointwise sum.
    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, w) in &other.entries {
            out.add_at(k.clone(), w.clone());
        }
        out
    }

    /// Maps every stored weight, dropping results that become zero.
    pub fn map_weights<F: FnMut(&K, &W) -> W>(&self, mut f: F) -> Self {
        WeightFn::from_pairs(self.entries.iter().map(|(k, w)| (k.clone(), f(k, w))))
    }

    pub fn into_entries(self) -> BTreeMap<K, W> {
        self.entries
    }
}

impl<K: Ord + Clone, W: Weight> FromIterator<(K, W)> for WeightFn<K, W> {
    fn from_iter<I: IntoIterator<Item = (K, W)>>(iter: I) -> Self {
        WeightFn::from_pairs(iter)
    }
}

impl<K: Ord + fmt::Display, W: fmt::Display> fmt::Display for WeightFn<K, W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, w)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k} -> {w}")?;
        }
        f.write_str("}")
    }
}

impl<K: Ord + fmt::Debug, W: fmt::Debug> fmt::Debug for WeightFn<K, W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{Bool, Rational};
    use num_traits::Zero;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        Rational::parse_weight(s).unwrap()
    }

    #[test]
    fn total_weight_examples() {
        let empty: WeightFn<&str, Rational> = WeightFn::zero();
        assert!(empty.total().is_zero());
        let f = WeightFn::from_pairs([("x", q("2")), ("y", q("3"))]);
        assert_eq!(f.total(), q("5"));
        let b = WeightFn::from_pairs([("x", Bool::TT), ("y", Bool::TT)]);
        assert_eq!(b.total(), Bool::TT);
    }

    #[test]
    fn class_weight_examples() {
        let f = WeightFn::from_pairs([("x", q("2")), ("y", q("3"))]);
        assert_eq!(f.class_weight(|k| *k == "x"), q("2"));
        assert_eq!(f.class_weight(|k| ["x", "y", "z"].contains(k)), q("5"));
        let empty: WeightFn<&str, Rational> = WeightFn::zero();
        assert!(empty.class_weight(|_| true).is_zero());
    }

    #[test]
    fn substitute_examples() {
        let f = WeightFn::point("x", q("1"));
        assert_eq!(f.substitute(|k| *k), f);
        let g = WeightFn::from_pairs([("x", q("1")), ("y", q("2"))]);
        assert_eq!(g.substitute(|_| "z"), WeightFn::point("z", q("3")));
        let b = WeightFn::from_pairs([("x", Bool::TT), ("y", Bool::TT)]);
        assert_eq!(b.substitute(|_| "z"), WeightFn::point("z", Bool::TT));
    }

    #[test]
    fn zero_entries_are_not_stored() {
        let f = WeightFn::from_pairs([("x", q("0")), ("y", q("1"))]);
        assert_eq!(f.support_size(), 1);
        assert_eq!(f, WeightFn::point("y", q("1")));
    }

    fn arb_fn() -> impl Strategy<Value = WeightFn<u8, Rational>> {
        prop::collection::vec((0u8..6, 0i64..5, 1i64..4), 0..6).prop_map(|v| {
            v.into_iter()
                .map(|(k, n, d)| (k, Rational::new(n.into(), d.into())))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn substitute_is_functorial(f in arb_fn(), s in prop::collection::vec(0u8..4, 6), t in prop::collection::vec(0u8..3, 4)) {
            let once = f.substitute(|k| s[*k as usize]).substitute(|k| t[*k as usize]);
            let composed = f.substitute(|k| t[s[*k as usize] as usize]);
            prop_assert_eq!(once, composed);
        }

        #[test]
        fn substitute_preserves_total(f in arb_fn(), s in prop::collection::vec(0u8..3, 6)) {
            prop_assert_eq!(f.substitute(|k| s[*k as usize]).total(), f.total());
        }

        #[test]
        fn class_weight_is_additive(f in arb_fn(), split in prop::collection::vec(any::<bool>(), 6)) {
            let left = f.class_weight(|k| split[*k as usize]);
            let right = f.class_weight(|k| !split[*k as usize]);
            prop_assert_eq!(left + right, f.total());
        }
    }
}
