//! Basket data model and the local Riemann–Roch terms M̄ʲ, Mʲ, Δʲ, l(m), σ, σ₁₂.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use serde::{Deserialize, Serialize};

use crate::arith::{Integer, Rational};
use crate::error::{Error, Result};

/// A basket element `(b, r)`: coprime, `0 < b <= r/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(u64, u64)", into = "(u64, u64)")]
pub struct OrbifoldPoint {
    b: u64,
    r: u64,
}

impl OrbifoldPoint {
    pub fn new(b: u64, r: u64) -> Result<Self> {
        if r < 2 {
            return Err(Error::IndexTooSmall { b, r });
        }
        if b.gcd(&r) != 1 {
            return Err(Error::NonCoprime { b, r });
        }
        if 2 * b as u128 > r as u128 {
            return Err(Error::SlopeTooLarge { b, r });
        }
        Ok(OrbifoldPoint { b, r })
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn slope(&self) -> Rational {
        Rational::new(self.b, self.r).expect("r >= 2")
    }

    /// Slope `b/r <= 1/12`.
    pub fn is_small_slope(&self) -> bool {
        12 * self.b as u128 <= self.r as u128
    }

    /// Canonical sort key `(r, b)`.
    pub fn key(&self) -> (u64, u64) {
        (self.r, self.b)
    }
}

impl TryFrom<(u64, u64)> for OrbifoldPoint {
    type Error = Error;
    fn try_from((b, r): (u64, u64)) -> Result<Self> {
        OrbifoldPoint::new(b, r)
    }
}

impl From<OrbifoldPoint> for (u64, u64) {
    fn from(p: OrbifoldPoint) -> Self {
        (p.b, p.r)
    }
}

impl PartialOrd for OrbifoldPoint {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrbifoldPoint {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for OrbifoldPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.b, self.r)
    }
}

/// Finite multiset of orbifold points, kept sorted by `(r, b)` with explicit
/// multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Basket {
    entries: Vec<(OrbifoldPoint, u64)>,
}

impl Basket {
    pub fn empty() -> Self {
        Basket::default()
    }

    pub fn from_points<I: IntoIterator<Item = OrbifoldPoint>>(points: I) -> Self {
        let mut counts: BTreeMap<OrbifoldPoint, u64> = BTreeMap::new();
        for p in points {
            *counts.entry(p).or_default() += 1;
        }
        Basket { entries: counts.into_iter().collect() }
    }

    /// Builds from `(point, multiplicity)` pairs; zero multiplicities vanish.
    pub fn from_counts<I: IntoIterator<Item = (OrbifoldPoint, u64)>>(counts: I) -> Self {
        let mut merged: BTreeMap<OrbifoldPoint, u64> = BTreeMap::new();
        for (p, k) in counts {
            if k > 0 {
                *merged.entry(p).or_default() += k;
            }
        }
        Basket { entries: merged.into_iter().collect() }
    }

    pub fn single(p: OrbifoldPoint) -> Self {
        Basket { entries: vec![(p, 1)] }
    }

    /// `(point, multiplicity)` in canonical order.
    pub fn entries(&self) -> &[(OrbifoldPoint, u64)] {
        &self.entries
    }

    /// Points with repetition, in canonical order.
    pub fn points(&self) -> impl Iterator<Item = OrbifoldPoint> + '_ {
        self.entries
            .iter()
            .flat_map(|&(p, k)| std::iter::repeat_n(p, k as usize))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of points counted with multiplicity.
    pub fn len(&self) -> u64 {
        self.entries.iter().map(|&(_, k)| k).sum()
    }

    /// Multiset union.
    pub fn union(&self, other: &Basket) -> Basket {
        Basket::from_counts(self.entries.iter().chain(other.entries.iter()).copied())
    }

    /// `lcm` of the indices, 1 for the empty basket.
    pub fn index_lcm(&self) -> BigInt {
        self.entries
            .iter()
            .fold(BigInt::from(1), |acc, (p, _)| acc.lcm(&BigInt::from(p.r())))
    }

    /// Pairs `[b, r]` with repetition, for serialization.
    pub fn to_pairs(&self) -> Vec<[u64; 2]> {
        self.points().map(|p| [p.b(), p.r()]).collect()
    }
}

impl fmt::Display for Basket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (p, k)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if *k == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}x{k}")?;
            }
        }
        write!(f, "}}")
    }
}

/// Validates raw `(b, r)` pairs into a canonical basket.
pub fn basket_validate<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Result<Basket> {
    let points = pairs
        .into_iter()
        .map(|(b, r)| OrbifoldPoint::new(b, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(Basket::from_points(points))
}

fn residue(j: u64, p: OrbifoldPoint) -> u64 {
    ((j as u128 * p.b as u128) % p.r as u128) as u64
}

/// M̄ʲ(b, r) = s(r − s) / 2r with s the residue of jb in [0, r).
pub fn mbar(j: u64, p: OrbifoldPoint) -> Rational {
    let s = residue(j, p) as u128;
    let r = p.r as u128;
    Rational::new(BigInt::from(s * (r - s)), BigInt::from(2 * r)).expect("r >= 2")
}

/// Mʲ(b, r) = jb(r − jb) / 2r; negative once jb > r.
pub fn m_lin(j: u64, p: OrbifoldPoint) -> Rational {
    let jb = BigInt::from(j) * BigInt::from(p.b);
    let r = BigInt::from(p.r);
    Rational::new(&jb * (&r - &jb), 2 * r).expect("r >= 2")
}

/// Δⁿ(b, r) = i·b·n − (i² + i)·r/2 with i = ⌊bn/r⌋.
pub fn delta(n: u64, p: OrbifoldPoint) -> Integer {
    delta_small(n, p).map(BigInt::from).unwrap_or_else(|| {
        let bn = BigInt::from(n) * BigInt::from(p.b);
        let r = BigInt::from(p.r);
        let i = bn.div_floor(&r);
        let tri: BigInt = (&i * &i + &i) / 2;
        &i * &bn - tri * r
    })
}

fn delta_small(n: u64, p: OrbifoldPoint) -> Option<i128> {
    let bn = (n as i128).checked_mul(p.b as i128)?;
    let r = p.r as i128;
    let i = bn / r;
    let tri = i.checked_mul(i)?.checked_add(i)? / 2;
    i.checked_mul(bn)?.checked_sub(tri.checked_mul(r)?)
}

/// 2r·Σ_{j=1}^{m−1} M̄ʲ(p) as an integer. Whole periods of jb mod r
/// contribute Σ_s s(r − s) = r(r² − 1)/6 each.
fn local_numerator(p: OrbifoldPoint, m: u64) -> BigInt {
    let terms = m.saturating_sub(1);
    let r = p.r as u128;
    let (periods, rest) = (terms / p.r, terms % p.r);
    let partial: u128 = (1..=rest)
        .map(|j| {
            let s = residue(j, p) as u128;
            s * (r - s)
        })
        .sum();
    let r = BigInt::from(r);
    BigInt::from(periods) * (&r * (&r * &r - 1) / 6) + BigInt::from(partial)
}

/// l(m) = Σ_p Σ_{j=1}^{m−1} M̄ʲ(p), with multiplicity.
pub fn l_correction(basket: &Basket, m: u64) -> Rational {
    basket
        .entries()
        .iter()
        .map(|&(p, k)| {
            Rational::new(local_numerator(p, m) * BigInt::from(k), BigInt::from(2 * p.r)).expect("r >= 2")
        })
        .sum()
}

/// `[l(0), l(1), ..., l(m_max)]`. Each point keeps an integer running sum
/// of s(r − s); rationals are formed once per point and m.
pub fn l_table(basket: &Basket, m_max: u64) -> Vec<Rational> {
    let mut sums = vec![BigInt::from(0); basket.entries().len()];
    let mut out = Vec::with_capacity(m_max as usize + 1);
    for m in 0..=m_max {
        if m >= 2 {
            for (acc, &(p, _)) in sums.iter_mut().zip(basket.entries()) {
                let s = residue(m - 1, p) as u128;
                *acc += BigInt::from(s * (p.r as u128 - s));
            }
        }
        out.push(
            sums.iter()
                .zip(basket.entries())
                .map(|(acc, &(p, k))| {
                    Rational::new(acc * BigInt::from(k), BigInt::from(2 * p.r)).expect("r >= 2")
                })
                .sum(),
        );
    }
    out
}

/// σ(B) = Σ bᵢ.
pub fn sigma(basket: &Basket) -> Integer {
    basket
        .entries()
        .iter()
        .map(|&(p, k)| BigInt::from(p.b) * BigInt::from(k))
        .sum()
}

/// σ₁₂(B) = Σ bᵢ over points with slope ≤ 1/12 (inclusive).
pub fn sigma12(basket: &Basket) -> Integer {
    basket
        .entries()
        .iter()
        .filter(|(p, _)| p.is_small_slope())
        .map(|&(p, k)| BigInt::from(p.b) * BigInt::from(k))
        .sum()
}

/// All admissible points with `r <= r_max`, ordered by `(r, b)`.
pub fn points_up_to(r_max: u64) -> Vec<OrbifoldPoint> {
    (2..=r_max)
        .flat_map(|r| (1..=r / 2).filter_map(move |b| OrbifoldPoint::new(b, r).ok()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(b: u64, r: u64) -> OrbifoldPoint {
        OrbifoldPoint::new(b, r).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn point_validation_names_each_failure() {
        assert_eq!(OrbifoldPoint::new(2, 4), Err(Error::NonCoprime { b: 2, r: 4 }));
        assert_eq!(OrbifoldPoint::new(3, 5), Err(Error::SlopeTooLarge { b: 3, r: 5 }));
        assert_eq!(OrbifoldPoint::new(1, 1), Err(Error::IndexTooSmall { b: 1, r: 1 }));
        assert_eq!(OrbifoldPoint::new(0, 5), Err(Error::NonCoprime { b: 0, r: 5 }));
    }

    #[test]
    fn validate_sorts_and_merges() {
        let b = basket_validate([(1, 3), (1, 2), (1, 3)]).unwrap();
        assert_eq!(b.entries(), &[(pt(1, 2), 1), (pt(1, 3), 2)]);
        assert_eq!(basket_validate([(2, 4)]), Err(Error::NonCoprime { b: 2, r: 4 }));
        assert_eq!(basket_validate([(3, 5)]), Err(Error::SlopeTooLarge { b: 3, r: 5 }));
    }

    #[test]
    fn mbar_examples() {
        assert_eq!(mbar(1, pt(1, 2)), q(1, 4));
        assert_eq!(mbar(6, pt(1, 2)), q(0, 1));
        assert_eq!(mbar(1, pt(2, 5)), q(3, 5));
    }

    #[test]
    fn m_lin_examples() {
        assert_eq!(m_lin(6, pt(1, 2)), q(-6, 1));
        assert_eq!(m_lin(0, pt(3, 7)), q(0, 1));
        assert_eq!(m_lin(5, pt(2, 5)), q(-5, 1));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(3, pt(1, 2)), 1.into());
        assert_eq!(delta(4, pt(1, 2)), 2.into());
        assert_eq!(delta(6, pt(1, 2)), 6.into());
        assert_eq!(delta(5, pt(2, 5)), 5.into());
        for p in points_up_to(30) {
            assert_eq!(delta(1, p), 0.into());
            assert_eq!(delta(2, p), 0.into());
        }
    }

    #[test]
    fn delta_large_inputs_use_bigint_path() {
        let p = pt(1, u64::MAX);
        let n = u64::MAX;
        // bn/r = 1, so Δ = bn - r = 0.
        assert_eq!(delta(n, p), 0.into());
        let direct = mbar(n, p) - m_lin(n, p);
        assert_eq!(direct, Rational::from_integer(delta(n, p)));
    }

    #[test]
    fn l_examples() {
        let b = basket_validate([(1, 2)]).unwrap();
        assert_eq!(l_correction(&b, 2), q(1, 4));
        assert_eq!(l_correction(&b, 1), q(0, 1));
        assert_eq!(l_correction(&Basket::empty(), 9), q(0, 1));
        let b = basket_validate([(1, 2), (2, 5)]).unwrap();
        assert_eq!(l_correction(&b, 2), q(17, 20));
    }

    #[test]
    fn sigma_examples() {
        let b = basket_validate([(1, 2), (2, 5)]).unwrap();
        assert_eq!(sigma(&b), 3.into());
        assert_eq!(sigma(&Basket::empty()), 0.into());
        assert_eq!(sigma(&basket_validate([(1, 2); 3]).unwrap()), 3.into());
        assert_eq!(sigma12(&basket_validate([(1, 12)]).unwrap()), 1.into());
        assert_eq!(sigma12(&basket_validate([(1, 11)]).unwrap()), 0.into());
        let b = basket_validate([(1, 13), (2, 25), (1, 2)]).unwrap();
        assert_eq!(sigma12(&b), 3.into());
    }
}
