use std::fmt;
use std::ops::Add;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use super::{parse_rational, Monoid, MonoidId, Weight, WeightError};

/// Naturals under addition.
pub type Nat = BigUint;

/// Non-negative rationals under addition. Negative values are rejected by
/// the parser; arithmetic used by the semantics never produces them.
pub type Rational = BigRational;

/// Booleans under disjunction: `tt`/`ff`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Bool(pub bool);

impl Bool {
    pub const TT: Bool = Bool(true);
    pub const FF: Bool = Bool(false);
}

impl fmt::Display for Bool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 { "tt" } else { "ff" })
    }
}

impl Add for Bool {
    type Output = Bool;
    fn add(self, rhs: Bool) -> Bool {
        Bool(self.0 || rhs.0)
    }
}

impl Zero for Bool {
    fn zero() -> Self {
        Bool(false)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
}

impl Weight for Bool {
    const MONOID: Monoid = Monoid { id: MonoidId::Bool, zerosumfree: true, has_infinity: false };

    fn parse_weight(text: &str) -> Result<Self, WeightError> {
        match text.trim() {
            "tt" | "true" | "1" => Ok(Bool(true)),
            "ff" | "false" | "0" => Ok(Bool(false)),
            other => Err(WeightError::Parse { text: other.to_string(), monoid: MonoidId::Bool }),
        }
    }

    fn one() -> Self {
        Bool(true)
    }

    fn from_count(n: u64) -> Self {
        Bool(n > 0)
    }

    fn mul(&self, rhs: &Self) -> Self {
        Bool(self.0 && rhs.0)
    }

    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        rhs.0.then_some(*self)
    }

    fn from_rational(r: &BigRational) -> Option<Self> {
        Some(Bool(!r.is_zero()))
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Bool(rng.gen_bool(0.5))
    }
}

impl Weight for BigUint {
    const MONOID: Monoid = Monoid { id: MonoidId::Nat, zerosumfree: true, has_infinity: false };

    fn parse_weight(text: &str) -> Result<Self, WeightError> {
        text.trim()
            .parse()
            .map_err(|_| WeightError::Parse { text: text.trim().to_string(), monoid: MonoidId::Nat })
    }

    fn one() -> Self {
        <BigUint as One>::one()
    }

    fn from_count(n: u64) -> Self {
        BigUint::from(n)
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() || !(self % rhs).is_zero() {
            return None;
        }
        Some(self / rhs)
    }

    fn from_rational(r: &BigRational) -> Option<Self> {
        if !r.is_integer() {
            return None;
        }
        r.to_integer().to_biguint()
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        BigUint::from(rng.gen_range(0u32..4))
    }
}

impl Weight for BigRational {
    const MONOID: Monoid = Monoid { id: MonoidId::Rat, zerosumfree: true, has_infinity: false };

    fn parse_weight(text: &str) -> Result<Self, WeightError> {
        parse_rational(text)
            .ok_or_else(|| WeightError::Parse { text: text.trim().to_string(), monoid: MonoidId::Rat })
    }

    fn one() -> Self {
        <BigRational as One>::one()
    }

    fn from_count(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        (!rhs.is_zero()).then(|| self / rhs)
    }

    fn from_rational(r: &BigRational) -> Option<Self> {
        Some(r.clone())
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        sample_rational(rng)
    }
}

fn sample_rational<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    if rng.gen_bool(0.15) {
        return BigRational::zero();
    }
    let n: i64 = rng.gen_range(1..7);
    let d: i64 = rng.gen_range(1..4);
    BigRational::new(n.into(), d.into())
}

/// Non-negative rationals extended with `inf`, where `inf + x = inf`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtRational {
    Finite(BigRational),
    Infinite,
}

impl ExtRational {
    pub fn finite(r: BigRational) -> Self {
        ExtRational::Finite(r)
    }

    pub fn as_finite(&self) -> Option<&BigRational> {
        match self {
            ExtRational::Finite(r) => Some(r),
            ExtRational::Infinite => None,
        }
    }
}

impl From<BigRational> for ExtRational {
    fn from(r: BigRational) -> Self {
        ExtRational::Finite(r)
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(r) => write!(f, "{r}"),
            ExtRational::Infinite => f.write_str("inf"),
        }
    }
}

impl Add for ExtRational {
    type Output = ExtRational;
    fn add(self, rhs: ExtRational) -> ExtRational {
        match (self, rhs) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a + b),
            _ => ExtRational::Infinite,
        }
    }
}

impl Zero for ExtRational {
    fn zero() -> Self {
        ExtRational::Finite(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        matches!(self, ExtRational::Finite(r) if r.is_zero())
    }
}

impl Weight for ExtRational {
    const MONOID: Monoid = Monoid { id: MonoidId::RatInf, zerosumfree: true, has_infinity: true };

    fn parse_weight(text: &str) -> Result<Self, WeightError> {
        let t = text.trim();
        if t == "inf" || t == "∞" {
            return Ok(ExtRational::Infinite);
        }
        parse_rational(t)
            .map(ExtRational::Finite)
            .ok_or_else(|| WeightError::Parse { text: t.to_string(), monoid: MonoidId::RatInf })
    }

    fn one() -> Self {
        ExtRational::Finite(<BigRational as One>::one())
    }

    fn from_count(n: u64) -> Self {
        ExtRational::Finite(BigRational::from_integer(BigInt::from(n)))
    }

    // 0 * inf = 0
    fn mul(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a * b),
            (x, y) if x.is_zero() || y.is_zero() => ExtRational::zero(),
            _ => ExtRational::Infinite,
        }
    }

    // x / inf = 0 for finite x, inf / inf = 1, inf / r = inf
    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        Some(match (self, rhs) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a / b),
            (ExtRational::Finite(_), ExtRational::Infinite) => ExtRational::zero(),
            (ExtRational::Infinite, ExtRational::Infinite) => ExtRational::one(),
            (ExtRational::Infinite, ExtRational::Finite(_)) => ExtRational::Infinite,
        })
    }

    fn from_rational(r: &BigRational) -> Option<Self> {
        Some(ExtRational::Finite(r.clone()))
    }

    fn infinity() -> Option<Self> {
        Some(ExtRational::Infinite)
    }

    fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinite)
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.gen_bool(0.1) {
            ExtRational::Infinite
        } else {
            ExtRational::Finite(sample_rational(rng))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn laws<W: Weight>(samples: &[W]) {
        for a in samples {
            assert_eq!(a.clone() + W::zero(), a.clone());
            assert_eq!(W::zero() + a.clone(), a.clone());
            for b in samples {
                assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
                if W::MONOID.zerosumfree && (a.clone() + b.clone()).is_zero() {
                    assert!(a.is_zero() && b.is_zero());
                }
                for c in samples {
                    assert_eq!((a.clone() + b.clone()) + c.clone(), a.clone() + (b.clone() + c.clone()));
                }
            }
        }
    }

    #[test]
    fn boolean_laws_exhaustive() {
        laws(&[Bool::FF, Bool::TT]);
    }

    #[test]
    fn randomized_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let nat: Vec<Nat> = (0..8).map(|_| Nat::sample(&mut rng)).collect();
            laws(&nat);
            let rat: Vec<Rational> = (0..8).map(|_| Rational::sample(&mut rng)).collect();
            laws(&rat);
            let ext: Vec<ExtRational> = (0..8).map(|_| ExtRational::sample(&mut rng)).collect();
            laws(&ext);
        }
    }

    #[test]
    fn infinity_absorbs() {
        let inf = ExtRational::Infinite;
        let two = ExtRational::parse_weight("2").unwrap();
        assert_eq!(inf.clone() + two.clone(), inf);
        assert_eq!(two.checked_div(&inf), Some(ExtRational::zero()));
        assert_eq!(inf.checked_div(&inf), Some(ExtRational::one()));
        assert_eq!(inf.mul(&ExtRational::zero()), ExtRational::zero());
        assert_eq!(ExtRational::parse_weight("inf").unwrap().to_string(), "inf");
        assert_eq!(ExtRational::Infinite.min(two.clone()), two);
    }

    #[test]
    fn rational_display_is_reduced() {
        let r = Rational::parse_weight("6/4").unwrap();
        assert_eq!(r.to_string(), "3/2");
        assert_eq!(Rational::parse_weight("4/2").unwrap().to_string(), "2");
        assert!(Rational::parse_weight("inf").is_err());
    }

    #[test]
    fn nat_division_is_exact_only() {
        let six = Nat::from(6u32);
        assert_eq!(six.checked_div(&Nat::from(3u32)), Some(Nat::from(2u32)));
        assert_eq!(six.checked_div(&Nat::from(4u32)), None);
        assert_eq!(six.checked_div(&Nat::zero()), None);
    }
}
