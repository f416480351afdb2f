//! Nonnegative arbitrary-precision counters extended with `+inf`.
//!
//! Return flows and flows live in `N ∪ {+inf}` with the conventions
//! `inf - 1 = inf` and `inf / a = inf` for finite `a > 0`. Finite values
//! can need hundreds of bits on path-like multigraphs, hence `BigUint`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExtendedCount {
    Finite(BigUint),
    Infinite,
}

pub use ExtendedCount::{Finite, Infinite};

impl ExtendedCount {
    pub fn zero() -> Self {
        Finite(BigUint::zero())
    }

    pub fn one() -> Self {
        Finite(BigUint::one())
    }

    pub fn from_u64(v: u64) -> Self {
        Finite(BigUint::from(v))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Infinite)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Finite(v) if v.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Finite(v) if v.is_one())
    }

    pub fn as_finite(&self) -> Option<&BigUint> {
        match self {
            Finite(v) => Some(v),
            Infinite => None,
        }
    }

    /// `self - 1` with `inf - 1 = inf`. Panics on finite zero: the walk
    /// machinery only decrements strictly positive counters.
    pub fn dec(&mut self) {
        match self {
            Finite(v) => {
                assert!(!v.is_zero(), "decrement of zero count");
                *v -= 1u32;
            }
            Infinite => {}
        }
    }

    pub fn inc(&mut self) {
        if let Finite(v) = self {
            *v += 1u32;
        }
    }

    pub fn checked_add(&self, other: &ExtendedCount) -> ExtendedCount {
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a + b),
            _ => Infinite,
        }
    }

    pub fn add_u64(&self, n: u64) -> ExtendedCount {
        match self {
            Finite(v) => Finite(v + BigUint::from(n)),
            Infinite => Infinite,
        }
    }

    /// Saturating subtraction of a finite amount; `inf - n = inf`.
    pub fn sub_finite(&self, n: &BigUint) -> ExtendedCount {
        match self {
            Finite(v) => {
                assert!(v >= n, "extended count underflow");
                Finite(v - n)
            }
            Infinite => Infinite,
        }
    }

    /// Floor division by a finite positive integer; `inf / a = inf`.
    pub fn div_floor_u64(&self, d: u64) -> ExtendedCount {
        assert!(d > 0, "division by zero");
        match self {
            Finite(v) => Finite(v.div_floor(&BigUint::from(d))),
            Infinite => Infinite,
        }
    }

    pub fn mul_u64(&self, m: u64) -> ExtendedCount {
        match self {
            Finite(v) => Finite(v * BigUint::from(m)),
            Infinite => {
                assert!(m > 0, "inf * 0 is undefined");
                Infinite
            }
        }
    }
}

impl PartialOrd for ExtendedCount {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedCount {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Infinite) => Ordering::Less,
            (Infinite, Finite(_)) => Ordering::Greater,
            (Infinite, Infinite) => Ordering::Equal,
        }
    }
}

impl From<u64> for ExtendedCount {
    fn from(v: u64) -> Self {
        ExtendedCount::from_u64(v)
    }
}

impl From<BigUint> for ExtendedCount {
    fn from(v: BigUint) -> Self {
        Finite(v)
    }
}

impl fmt::Display for ExtendedCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finite(v) => write!(f, "{v}"),
            Infinite => write!(f, "+inf"),
        }
    }
}

impl fmt::Debug for ExtendedCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs_decrement_and_division() {
        let mut inf = Infinite;
        inf.dec();
        assert!(inf.is_infinite());
        assert!(Infinite.div_floor_u64(7).is_infinite());
        assert_eq!(ExtendedCount::from(9u64).div_floor_u64(2), 4u64.into());
    }

    #[test]
    fn ordering_puts_infinity_last() {
        let mut v = vec![Infinite, 3u64.into(), ExtendedCount::zero(), 10u64.into()];
        v.sort();
        assert_eq!(
            v,
            vec![ExtendedCount::zero(), 3u64.into(), 10u64.into(), Infinite]
        );
    }
}
