//! Exact rationals, finite continued fractions of slopes in (0, 1/2], and the
//! mediant-parent split that drives the induction over baskets.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::basket::OrbifoldPoint;
use crate::error::{Error, Result};

/// Unbounded integer used for every integral quantity (Δ, plurigenera, σ).
pub type Integer = BigInt;

/// Exact rational number, always stored in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `num / den`, normalizing sign and common factors.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(num.into(), den)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The integer value, if the denominator is 1.
    pub fn to_integer(&self) -> Option<Integer> {
        self.is_integer().then(|| self.0.numer().clone())
    }

    pub fn floor(&self) -> Integer {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> Integer {
        self.0.ceil().to_integer()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn div(&self, other: &Rational) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rational(&self.0 / &other.0))
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

/// `rational_make`: normalized `num / den`; a zero denominator is an error.
pub fn rational_make(num: i64, den: i64) -> Result<Rational> {
    Rational::new(num, den)
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p`, `p/q` or `-p/q` with decimal integers.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MalformedRational(s.to_string());
        let t = s.trim();
        let parse = |x: &str| -> Result<BigInt> {
            let x = x.trim();
            if x.is_empty() || x.starts_with('+') {
                return Err(bad());
            }
            x.parse::<BigInt>().map_err(|_| bad())
        };
        match t.split_once('/') {
            None => Ok(Rational::from_integer(parse(t)?)),
            Some((n, d)) => {
                let d = parse(d)?;
                if d.is_zero() {
                    return Err(Error::ZeroDenominator);
                }
                Rational::new(parse(n)?, d)
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$m(&rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$m(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl<'a> AddAssign<&'a Rational> for Rational {
    fn add_assign(&mut self, rhs: &'a Rational) {
        self.0 += &rhs.0;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// `[0; a_1, ..., a_t]` for a slope in (0, 1/2]. Canonical form has
/// `a_1 >= 2` and `a_t >= 2` whenever `t > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    terms: Vec<u64>,
}

impl ContinuedFraction {
    /// Wraps raw terms. Only non-emptiness and positivity are enforced here;
    /// `cf_value` accepts any such sequence.
    pub fn new(terms: Vec<u64>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyContinuedFraction);
        }
        if terms.contains(&0) {
            return Err(Error::NonPositiveTerm);
        }
        Ok(ContinuedFraction { terms })
    }

    pub fn terms(&self) -> &[u64] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Drops the last term, giving the continued fraction of the parent
    /// convergent. `None` for a single-term expansion.
    pub fn parent(&self) -> Option<ContinuedFraction> {
        (self.terms.len() > 1).then(|| ContinuedFraction {
            terms: self.terms[..self.terms.len() - 1].to_vec(),
        })
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[0; ")?;
        for (i, a) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

/// Expands `q` in (0, 1/2] by the Euclidean algorithm.
pub fn cf_expand(q: &Rational) -> Result<ContinuedFraction> {
    let half = Rational::new(1, 2)?;
    if !q.is_positive() || *q > half {
        return Err(Error::OutOfUnitHalf(q.to_string()));
    }
    let mut num = q.numer().clone();
    let mut den = q.denom().clone();
    let mut terms = Vec::new();
    // q = num/den < 1, so the first step inverts.
    while !num.is_zero() {
        let (a, rem) = den.div_rem(&num);
        terms.push(
            a.to_u64()
                .ok_or_else(|| Error::Invariant("continued fraction term exceeds u64".into()))?,
        );
        den = num;
        num = rem;
    }
    ContinuedFraction::new(terms)
}

/// Evaluates `[0; a_1, ..., a_t]` exactly.
pub fn cf_value(cf: &ContinuedFraction) -> Result<Rational> {
    let (p, q) = convergent(cf.terms())?;
    Rational::new(p, q)
}

/// Numerator and denominator of `[0; terms]` via the standard recurrence.
fn convergent(terms: &[u64]) -> Result<(BigInt, BigInt)> {
    if terms.is_empty() {
        return Err(Error::EmptyContinuedFraction);
    }
    // h_{-1} = 1, h_{-2} = 0 for [a_0; ...] with a_0 = 0.
    let (mut p_prev, mut p) = (BigInt::one(), BigInt::zero());
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    for &a in terms {
        if a == 0 {
            return Err(Error::NonPositiveTerm);
        }
        let a = BigInt::from(a);
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
    Ok((p, q))
}

/// The split `(b, n) = (b1 + b2, r1 + r2)` of a non-atomic slope into its
/// continued-fraction parent and the complementary pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MediantSplit {
    /// Parent with the larger slope.
    pub larger: OrbifoldPoint,
    /// Parent with the smaller slope.
    pub smaller: OrbifoldPoint,
    /// Sign of `b1 r2 - b2 r1` with `(b1, r1)` the continued-fraction parent,
    /// before reordering. `-1` means the indices were switched.
    pub det_sign: i8,
}

impl MediantSplit {
    pub fn parents(&self) -> (OrbifoldPoint, OrbifoldPoint) {
        (self.larger, self.smaller)
    }
}

/// Mediant parents of `b / n` for `b >= 2`, gcd(b, n) = 1, b/n <= 1/2.
pub fn mediant_parents(b: u64, n: u64) -> Result<MediantSplit> {
    let point = OrbifoldPoint::new(b, n)?;
    if point.b() == 1 {
        return Err(Error::Atom { b, r: n });
    }
    let cf = cf_expand(&point.slope())?;
    let parent = cf
        .parent()
        .ok_or_else(|| Error::Invariant(format!("{b}/{n} has a one-term expansion")))?;
    let (pb, pr) = convergent(parent.terms())?;
    let (b1, r1) = (to_u64(&pb)?, to_u64(&pr)?);
    let (b2, r2) = (b - b1, n - r1);
    let p1 = OrbifoldPoint::new(b1, r1)?;
    let p2 = OrbifoldPoint::new(b2, r2)?;
    let det = determinant(p1, p2);
    match det {
        1 => Ok(MediantSplit { larger: p1, smaller: p2, det_sign: 1 }),
        -1 => Ok(MediantSplit { larger: p2, smaller: p1, det_sign: -1 }),
        d => Err(Error::Invariant(format!("parents of {b}/{n} have determinant {d}"))),
    }
}

fn to_u64(x: &BigInt) -> Result<u64> {
    x.to_u64()
        .ok_or_else(|| Error::Invariant(format!("{x} does not fit in u64")))
}

/// `b1 r2 - b2 r1`.
pub fn determinant(p1: OrbifoldPoint, p2: OrbifoldPoint) -> i128 {
    p1.b() as i128 * p2.r() as i128 - p2.b() as i128 * p1.r() as i128
}

/// True iff `b1 r2 - b2 r1 = ±1`.
pub fn is_unimodular(p1: OrbifoldPoint, p2: OrbifoldPoint) -> bool {
    determinant(p1, p2).abs() == 1
}

/// Compares slopes `b1/r1` and `b2/r2` without division.
pub fn cmp_slope(p1: OrbifoldPoint, p2: OrbifoldPoint) -> Ordering {
    (p1.b() as u128 * p2.r() as u128).cmp(&(p2.b() as u128 * p1.r() as u128))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn pt(b: u64, r: u64) -> OrbifoldPoint {
        OrbifoldPoint::new(b, r).unwrap()
    }

    #[test]
    fn make_normalizes() {
        assert_eq!(rational_make(2, 4).unwrap(), q(1, 2));
        assert_eq!(rational_make(-3, -6).unwrap(), q(1, 2));
        let r = rational_make(11, 2).unwrap();
        assert_eq!((r.numer().clone(), r.denom().clone()), (11.into(), 2.into()));
        assert_eq!(rational_make(1, 0), Err(Error::ZeroDenominator));
        assert_eq!(rational_make(3, -6).unwrap().to_string(), "-1/2");
    }

    #[test]
    fn parse_and_render() {
        assert_eq!("2/4".parse::<Rational>().unwrap(), q(1, 2));
        assert_eq!("-7".parse::<Rational>().unwrap().to_string(), "-7");
        assert_eq!(" 11/2 ".parse::<Rational>().unwrap().to_string(), "11/2");
        assert_eq!("2/0".parse::<Rational>(), Err(Error::ZeroDenominator));
        assert!("1.5".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
        assert!("1/".parse::<Rational>().is_err());
    }

    #[test]
    fn expand_examples() {
        assert_eq!(cf_expand(&q(2, 5)).unwrap().terms(), &[2, 2]);
        assert_eq!(cf_expand(&q(1, 7)).unwrap().terms(), &[7]);
        assert_eq!(cf_expand(&q(5, 12)).unwrap().terms(), &[2, 2, 2]);
        assert_eq!(cf_expand(&q(1, 2)).unwrap().terms(), &[2]);
    }

    #[test]
    fn expand_rejects_outside_half() {
        assert!(matches!(cf_expand(&q(3, 5)), Err(Error::OutOfUnitHalf(_))));
        assert!(matches!(cf_expand(&q(0, 1)), Err(Error::OutOfUnitHalf(_))));
        assert!(matches!(cf_expand(&q(-1, 3)), Err(Error::OutOfUnitHalf(_))));
    }

    #[test]
    fn value_examples() {
        let cf = |t: &[u64]| ContinuedFraction::new(t.to_vec()).unwrap();
        assert_eq!(cf_value(&cf(&[2, 2])).unwrap(), q(2, 5));
        assert_eq!(cf_value(&cf(&[9])).unwrap(), q(1, 9));
        assert_eq!(cf_value(&cf(&[3, 3])).unwrap(), q(3, 10));
        assert_eq!(ContinuedFraction::new(vec![]), Err(Error::EmptyContinuedFraction));
    }

    #[test]
    fn parents_examples() {
        let s = mediant_parents(2, 5).unwrap();
        assert_eq!(s.parents(), (pt(1, 2), pt(1, 3)));
        let s = mediant_parents(3, 10).unwrap();
        assert_eq!(s.parents(), (pt(1, 3), pt(2, 7)));
        assert_eq!(determinant(s.larger, s.smaller), 1);
        assert_eq!(mediant_parents(1, 7), Err(Error::Atom { b: 1, r: 7 }));
        assert_eq!(mediant_parents(2, 6), Err(Error::NonCoprime { b: 2, r: 6 }));
    }

    #[test]
    fn unimodular_examples() {
        assert!(is_unimodular(pt(1, 2), pt(1, 3)));
        assert!(!is_unimodular(pt(1, 2), pt(1, 2)));
        assert!(is_unimodular(pt(2, 5), pt(1, 3)));
    }
}
