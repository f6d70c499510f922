//! Commutative weight monoids and finitely supported weight functions.
//!
//! Every carrier implements [`Weight`], which is the commutative monoid
//! `(W, +, 0)` plus a handful of optional arithmetic capabilities used by
//! weight-term interpretations (products, quotients, minima). Monoid laws are
//! not checked at runtime; the property suite in the tests covers them.

mod carriers;
mod function;
mod row_column;

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use thiserror::Error;

pub use carriers::{Bool, ExtRational, Nat, Rational};
pub use function::WeightFn;
pub use row_column::{check_row_column, RowColumn, DEFAULT_CLOSURE_ROUNDS};

/// Static description of a weight monoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monoid {
    pub id: MonoidId,
    pub zerosumfree: bool,
    pub has_infinity: bool,
}

/// The built-in carriers, addressed by name in specification files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MonoidId {
    /// `({tt, ff}, or, ff)`
    Bool,
    /// `(N, +, 0)`
    Nat,
    /// `(Q>=0, +, 0)`
    Rat,
    /// `(Q>=0 + {inf}, +, 0)`
    RatInf,
}

impl MonoidId {
    pub const ALL: [MonoidId; 4] = [MonoidId::Bool, MonoidId::Nat, MonoidId::Rat, MonoidId::RatInf];

    pub fn name(self) -> &'static str {
        match self {
            MonoidId::Bool => "bool",
            MonoidId::Nat => "nat",
            MonoidId::Rat => "rat",
            MonoidId::RatInf => "ratinf",
        }
    }

    pub fn from_name(name: &str) -> Option<MonoidId> {
        match name {
            "bool" | "boolean" => Some(MonoidId::Bool),
            "nat" | "naturals" => Some(MonoidId::Nat),
            "rat" | "rational" => Some(MonoidId::Rat),
            "ratinf" | "rational-inf" => Some(MonoidId::RatInf),
            _ => None,
        }
    }
}

impl fmt::Display for MonoidId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("cannot parse weight `{text}` for monoid {monoid}")]
    Parse { text: String, monoid: MonoidId },
    #[error("row sums and column sums differ ({rows} vs {cols})")]
    SumMismatch { rows: String, cols: String },
}

/// A carrier of a commutative monoid with a few optional arithmetic
/// capabilities.
///
/// `Zero` and `Add` give the monoid; the remaining methods are only consulted
/// by interpretations that need them and return `None` when a carrier cannot
/// represent the result.
pub trait Weight:
    Clone + Eq + Ord + Hash + fmt::Debug + fmt::Display + Zero + Send + Sync + 'static
{
    const MONOID: Monoid;

    fn parse_weight(text: &str) -> Result<Self, WeightError>;

    fn one() -> Self;

    /// The `n`-fold sum of `one()`.
    fn from_count(n: u64) -> Self;

    fn mul(&self, rhs: &Self) -> Self;

    /// Quotient, `None` when `rhs` is zero or the carrier cannot represent it.
    fn checked_div(&self, rhs: &Self) -> Option<Self>;

    fn from_rational(r: &BigRational) -> Option<Self>;

    fn infinity() -> Option<Self> {
        None
    }

    fn is_infinite(&self) -> bool {
        false
    }

    /// A small random weight, zero included, for randomized suites.
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn sum<'a, I: IntoIterator<Item = &'a Self>>(items: I) -> Self {
        items
            .into_iter()
            .fold(Self::zero(), |acc, w| acc + w.clone())
    }
}

pub(crate) fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if text.is_empty() || text.starts_with('-') || text.starts_with('+') {
        return None;
    }
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        let r = BigRational::new(n, d);
        return (r >= BigRational::zero()).then_some(r);
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let int: BigInt = if int.is_empty() { BigInt::zero() } else { int.parse().ok()? };
        let frac_val: BigInt = frac.parse().ok()?;
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        return Some(BigRational::new(int * scale.clone() + frac_val, scale));
    }
    let n: BigInt = text.parse().ok()?;
    Some(BigRational::from_integer(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("3/6").unwrap().to_string(), "1/2");
        assert_eq!(parse_rational("4").unwrap().to_string(), "4");
        assert_eq!(parse_rational("0.25").unwrap().to_string(), "1/4");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("-1").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn monoid_names_round_trip() {
        for id in MonoidId::ALL {
            assert_eq!(MonoidId::from_name(id.name()), Some(id));
        }
    }
}
