//! Farey-style filtration of admissible slopes, enumeration of baskets under
//! σ-bounds, attachment of (χ, K³) with integral plurigenera, and the search
//! for a uniform m₀ with P_{m₀} ≥ 2.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{Integer, Rational};
use crate::basket::{l_table, points_up_to, Basket, OrbifoldPoint};
use crate::error::{Error, Result};
use crate::riemann_roch::{cubic_coefficient, ThreefoldInvariants};

/// How K³ is chosen for a basket and χ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum K3Policy {
    Explicit(Rational),
    /// Smallest K³ ∈ (1/D)ℤ with 0 < K³ ≤ `max` making every P_m admissible.
    /// `D` defaults to lcm(rᵢ)³.
    MinimalAdmissible {
        #[serde(default)]
        denominator: Option<u64>,
        max: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumConstraints {
    pub chi_min: i64,
    pub chi_max: i64,
    pub sigma_max: u64,
    #[serde(default = "yes")]
    pub require_sigma12_zero: bool,
    /// Index bound; mandatory when σ₁₂ = 0 is not required.
    #[serde(default)]
    pub r_max: Option<u64>,
    pub k3_policy: K3Policy,
    pub m_max: u64,
    #[serde(default = "yes")]
    pub require_nonneg_pm: bool,
}

fn yes() -> bool {
    true
}

impl EnumConstraints {
    pub fn validate(&self) -> Result<()> {
        if self.m_max < 2 {
            return Err(Error::InvalidConstraints("m_max must be at least 2".into()));
        }
        if self.chi_min > self.chi_max {
            return Err(Error::InvalidConstraints("chi_min exceeds chi_max".into()));
        }
        if !self.require_sigma12_zero && self.r_max.is_none() {
            return Err(Error::InvalidConstraints(
                "without sigma12 = 0 an r_max bound is needed for finiteness".into(),
            ));
        }
        Ok(())
    }
}

/// One basket with χ, K³ and its plurigenera P₂..P_{m_max}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub basket: Basket,
    pub chi_o: Integer,
    pub k3: Rational,
    /// `pm_table[i]` is P_{i+2}.
    pub pm_table: Vec<Integer>,
}

impl Candidate {
    pub fn invariants(&self) -> ThreefoldInvariants {
        ThreefoldInvariants::new(self.k3.clone(), self.chi_o.clone(), self.basket.clone())
    }

    pub fn p(&self, m: u64) -> Option<&Integer> {
        m.checked_sub(2).and_then(|i| self.pm_table.get(i as usize))
    }

    pub fn m_max(&self) -> u64 {
        self.pm_table.len() as u64 + 1
    }
}

#[derive(Serialize)]
struct CandidateRecord<'a> {
    basket: Vec<[u64; 2]>,
    chi: String,
    k3: &'a Rational,
    pm: Vec<String>,
}

impl Serialize for Candidate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CandidateRecord {
            basket: self.basket.to_pairs(),
            chi: self.chi_o.to_string(),
            k3: &self.k3,
            pm: self.pm_table.iter().map(ToString::to_string).collect(),
        }
        .serialize(s)
    }
}

/// S⁽ⁿ⁾: every coprime `(b, r)` with `r <= n` and `b/r <= 1/2`.
pub fn farey_stage(n: u64) -> Vec<OrbifoldPoint> {
    points_up_to(n)
}

/// Points allowed in baskets under the constraints, in `(r, b)` order.
pub fn admissible_points(c: &EnumConstraints) -> Result<Vec<OrbifoldPoint>> {
    c.validate()?;
    if c.sigma_max == 0 {
        return Ok(Vec::new());
    }
    // σ₁₂ = 0 forces b/r > 1/12, so r < 12b <= 12σ.
    let mut r_bound = if c.require_sigma12_zero { 12 * c.sigma_max - 1 } else { u64::MAX };
    if let Some(r) = c.r_max {
        r_bound = r_bound.min(r);
    }
    Ok(points_up_to(r_bound)
        .into_iter()
        .filter(|p| p.b() <= c.sigma_max)
        .filter(|p| !c.require_sigma12_zero || !p.is_small_slope())
        .collect())
}

/// Every multiset of points with Σ b ≤ `budget`, in lexicographic order of
/// the sorted point lists (points compared by `(r, b)`). This is a preorder
/// walk over nondecreasing index sequences; the empty basket comes first.
#[derive(Debug, Clone)]
pub struct BasketEnumerator {
    points: Vec<OrbifoldPoint>,
    chosen: Vec<usize>,
    used: u64,
    budget: u64,
    done: bool,
}

impl BasketEnumerator {
    /// `points` must be sorted by `(r, b)` for the order above to hold.
    pub fn new(points: Vec<OrbifoldPoint>, budget: u64) -> Self {
        BasketEnumerator { points, chosen: Vec::new(), used: 0, budget, done: false }
    }

    fn first_fitting(&self, from: usize) -> Option<usize> {
        (from..self.points.len()).find(|&i| self.used + self.points[i].b() <= self.budget)
    }

    fn advance(&mut self) {
        let from = self.chosen.last().copied().unwrap_or(0);
        if let Some(i) = self.first_fitting(from) {
            self.chosen.push(i);
            self.used += self.points[i].b();
            return;
        }
        while let Some(last) = self.chosen.pop() {
            self.used -= self.points[last].b();
            if let Some(i) = self.first_fitting(last + 1) {
                self.chosen.push(i);
                self.used += self.points[i].b();
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for BasketEnumerator {
    type Item = Basket;

    fn next(&mut self) -> Option<Basket> {
        if self.done {
            return None;
        }
        let basket = Basket::from_points(self.chosen.iter().map(|&i| self.points[i]));
        self.advance();
        Some(basket)
    }
}

pub fn enumerate_baskets(c: &EnumConstraints) -> Result<BasketEnumerator> {
    Ok(BasketEnumerator::new(admissible_points(c)?, c.sigma_max))
}

/// α_m = m(m−1)(2m−1)/(12D), the coefficient of the K³ numerator k in P_m
/// when K³ = k/D.
fn numerator_coefficients(d: &BigInt, m_max: u64) -> Vec<Rational> {
    let inv_d = Rational::new(1, d.clone()).expect("D > 0");
    (2..=m_max).map(|m| cubic_coefficient(m) * &inv_d).collect()
}

/// β_m = l(m) − (2m − 1)χ, the value of P_m at K³ = 0.
fn constant_term(l: &[Rational], chi: &Integer, m: u64) -> Rational {
    &l[m as usize] - &Rational::from_integer(BigInt::from(2 * m - 1) * chi)
}

/// All k making every P_m integral, as `k ≡ s (mod t)`. Shifting χ moves
/// each β_m by an integer, so the class does not depend on χ.
fn integrality_class(l: &[Rational], alphas: &[Rational]) -> Option<(BigInt, BigInt)> {
    let (mut s, mut t) = (BigInt::zero(), BigInt::one());
    for (alpha, m) in alphas.iter().zip(2u64..) {
        let (s2, t2) = solve_integrality(alpha, &l[m as usize])?;
        (s, t) = crt(&s, &t, &s2, &t2)?;
    }
    Some((s, t))
}

/// Smallest k ≥ 1 in the class, raised until every P_m ≥ 0 if asked.
fn minimal_numerator(
    l: &[Rational],
    alphas: &[Rational],
    chi: &Integer,
    (s, t): (&BigInt, &BigInt),
    nonneg: bool,
) -> Option<BigInt> {
    let mut lower = BigInt::one();
    if nonneg {
        for (alpha, m) in alphas.iter().zip(2u64..) {
            // α > 0 for m >= 2.
            let need = (-constant_term(l, chi, m)).div(alpha).ok()?.ceil();
            if need > lower {
                lower = need;
            }
        }
    }
    let gap = &lower - s;
    let steps = if gap.is_positive() { gap.div_ceil(t) } else { BigInt::zero() };
    Some(s + t * steps)
}

/// Solutions k of α·k + β ∈ ℤ, as `k ≡ s (mod t)`.
fn solve_integrality(alpha: &Rational, beta: &Rational) -> Option<(BigInt, BigInt)> {
    let l = alpha.denom().lcm(beta.denom());
    let a = alpha.numer() * (&l / alpha.denom());
    let b = -(beta.numer() * (&l / beta.denom()));
    solve_linear_congruence(&a, &b, &l)
}

/// a·k ≡ b (mod n), n > 0.
fn solve_linear_congruence(a: &BigInt, b: &BigInt, n: &BigInt) -> Option<(BigInt, BigInt)> {
    let a = a.mod_floor(n);
    let b = b.mod_floor(n);
    let g = a.gcd(n);
    if !(&b % &g).is_zero() {
        return None;
    }
    let modulus = n / &g;
    if modulus.is_one() {
        return Some((BigInt::zero(), BigInt::one()));
    }
    let inv = mod_inverse(&(&a / &g), &modulus)?;
    Some((((&b / &g) * inv).mod_floor(&modulus), modulus))
}

fn mod_inverse(a: &BigInt, n: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(n);
    e.gcd.is_one().then(|| e.x.mod_floor(n))
}

/// Intersects `k ≡ s1 (mod t1)` with `k ≡ s2 (mod t2)`.
fn crt(s1: &BigInt, t1: &BigInt, s2: &BigInt, t2: &BigInt) -> Option<(BigInt, BigInt)> {
    let g = t1.gcd(t2);
    let diff = s2 - s1;
    if !(&diff % &g).is_zero() {
        return None;
    }
    let lcm = t1 / &g * t2;
    let m2 = t2 / &g;
    let step = if m2.is_one() {
        BigInt::zero()
    } else {
        ((&diff / &g) * mod_inverse(&(t1 / &g).mod_floor(&m2), &m2)?).mod_floor(&m2)
    };
    Some(((s1 + t1 * step).mod_floor(&lcm), lcm))
}

/// Smallest K³ under the minimal-admissible policy, if any.
#[cfg(test)]
fn minimal_k3(basket: &Basket, chi: &Integer, d: &BigInt, max: &Rational, m_max: u64, nonneg: bool) -> Option<Rational> {
    let l = l_table(basket, m_max);
    let alphas = numerator_coefficients(d, m_max);
    let (s, t) = integrality_class(&l, &alphas)?;
    let k = minimal_numerator(&l, &alphas, chi, (&s, &t), nonneg)?;
    let k3 = Rational::new(k, d.clone()).ok()?;
    (k3 <= *max).then_some(k3)
}

/// P₂..P_{m_max} from a table of l(m), or `None` if one is not an integer
/// (or is negative, when `nonneg`).
fn pm_values(l: &[Rational], k3: &Rational, chi: &Integer, m_max: u64, nonneg: bool) -> Option<Vec<Integer>> {
    (2..=m_max)
        .map(|m| {
            (cubic_coefficient(m) * k3 + constant_term(l, chi, m))
                .to_integer()
                .filter(|p| !nonneg || !p.is_negative())
        })
        .collect()
}

#[cfg(test)]
fn plurigenus_table(inv: &ThreefoldInvariants, m_max: u64, nonneg: bool) -> Option<Vec<Integer>> {
    pm_values(&l_table(&inv.basket, m_max), &inv.k3, &inv.chi_o, m_max, nonneg)
}

/// Candidates for one basket across the χ range.
pub fn attach_invariants(basket: &Basket, c: &EnumConstraints) -> Vec<Candidate> {
    let l = l_table(basket, c.m_max);
    // Per-basket data for the minimal-admissible policy: D, α_m and the
    // integrality class of the numerator.
    let admissible = match &c.k3_policy {
        K3Policy::Explicit(_) => None,
        K3Policy::MinimalAdmissible { denominator, .. } => {
            let d = denominator.map(BigInt::from).unwrap_or_else(|| basket.index_lcm().pow(3));
            let alphas = numerator_coefficients(&d, c.m_max);
            match integrality_class(&l, &alphas) {
                Some(class) => Some((d, alphas, class)),
                None => return Vec::new(),
            }
        }
    };
    (c.chi_min..=c.chi_max)
        .filter_map(|chi| {
            let chi = BigInt::from(chi);
            let k3 = match (&c.k3_policy, &admissible) {
                (K3Policy::Explicit(k3), _) => k3.is_positive().then(|| k3.clone()),
                (K3Policy::MinimalAdmissible { max, .. }, Some((d, alphas, (s, t)))) => {
                    let k = minimal_numerator(&l, alphas, &chi, (s, t), c.require_nonneg_pm)?;
                    Rational::new(k, d.clone()).ok().filter(|k3| k3 <= max)
                }
                (K3Policy::MinimalAdmissible { .. }, None) => None,
            }?;
            let pm_table = pm_values(&l, &k3, &chi, c.m_max, c.require_nonneg_pm)?;
            Some(Candidate { basket: basket.clone(), chi_o: chi, k3, pm_table })
        })
        .collect()
}

/// All candidates, in canonical basket order then increasing χ. Baskets
/// are processed in parallel; the order does not depend on the pool size.
pub fn enumerate_candidates(c: &EnumConstraints) -> Result<Vec<Candidate>> {
    let baskets: Vec<Basket> = enumerate_baskets(c)?.collect();
    Ok(baskets
        .par_iter()
        .flat_map_iter(|b| attach_invariants(b, c))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct M0Report {
    pub m0: u64,
    /// Candidates still below 2 at the largest m < m₀ where any candidate is.
    pub witnesses: Vec<Candidate>,
}

/// Smallest m with P_m ≥ 2 for every candidate.
pub fn find_m0(candidates: &[Candidate]) -> Result<M0Report> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidateSet);
    }
    let horizon = candidates.iter().map(Candidate::m_max).min().unwrap_or(1);
    let two = BigInt::from(2);
    let failing = |m: u64| -> Vec<&Candidate> {
        candidates.iter().filter(|c| c.p(m).is_none_or(|p| *p < two)).collect()
    };
    let m0 = (2..=horizon)
        .find(|&m| failing(m).is_empty())
        .ok_or(Error::NoM0WithinHorizon { horizon })?;
    let witnesses = (2..m0)
        .rev()
        .map(failing)
        .find(|w| !w.is_empty())
        .map(|w| w.into_iter().cloned().collect())
        .unwrap_or_default();
    Ok(M0Report { m0, witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basket::basket_validate;

    fn pt(b: u64, r: u64) -> OrbifoldPoint {
        OrbifoldPoint::new(b, r).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn constraints(sigma_max: u64) -> EnumConstraints {
        EnumConstraints {
            chi_min: 1,
            chi_max: 1,
            sigma_max,
            require_sigma12_zero: true,
            r_max: None,
            k3_policy: K3Policy::Explicit(q(1, 1)),
            m_max: 13,
            require_nonneg_pm: true,
        }
    }

    #[test]
    fn farey_stages() {
        let new_at = |n: u64| -> Vec<(u64, u64)> {
            farey_stage(n).into_iter().filter(|p| p.r() == n && p.b() > 1).map(Into::into).collect()
        };
        assert_eq!(new_at(5), vec![(2, 5)]);
        assert!(new_at(6).is_empty());
        assert_eq!(new_at(7), vec![(2, 7), (3, 7)]);
        assert!(farey_stage(7).contains(&pt(1, 7)));
    }

    #[test]
    fn baskets_with_sigma_one() {
        let all: Vec<Basket> = enumerate_baskets(&constraints(1)).unwrap().collect();
        assert_eq!(all.len(), 11);
        assert_eq!(all[0], Basket::empty());
        assert!(all[1..].iter().all(|b| b.len() == 1 && b.entries()[0].0.b() == 1));
        assert_eq!(enumerate_baskets(&constraints(0)).unwrap().count(), 1);
    }

    #[test]
    fn unbounded_enumeration_is_rejected() {
        let mut c = constraints(2);
        c.require_sigma12_zero = false;
        assert!(matches!(enumerate_baskets(&c), Err(Error::InvalidConstraints(_))));
        c.r_max = Some(6);
        assert!(enumerate_baskets(&c).is_ok());
    }

    #[test]
    fn attach_explicit_examples() {
        let mut c = constraints(1);
        c.chi_min = -3;
        c.chi_max = -3;
        c.k3_policy = K3Policy::Explicit(q(2, 1));
        let got = attach_invariants(&Basket::empty(), &c);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].p(2), Some(&10.into()));

        let mut c = constraints(1);
        c.k3_policy = K3Policy::Explicit(q(11, 2));
        let got = attach_invariants(&basket_validate([(1, 2)]).unwrap(), &c);
        assert_eq!((got[0].p(2), got[0].p(3)), (Some(&0.into()), Some(&9.into())));

        let c = constraints(1);
        assert!(attach_invariants(&Basket::empty(), &c).is_empty());
    }

    #[test]
    fn minimal_admissible_matches_linear_search() {
        let basket = basket_validate([(1, 2), (1, 3)]).unwrap();
        let d = BigInt::from(216);
        for chi in -2..=3 {
            let chi = BigInt::from(chi);
            let fast = minimal_k3(&basket, &chi, &d, &q(50, 1), 14, true);
            let slow = (1..=50 * 216).map(|k| q(k, 216)).find(|k3| {
                let inv = ThreefoldInvariants::new(k3.clone(), chi.clone(), basket.clone());
                plurigenus_table(&inv, 14, true).is_some()
            });
            assert_eq!(fast, slow, "chi = {chi}");
        }
    }

    #[test]
    fn congruence_helpers() {
        // 4k ≡ 6 (mod 10) ⇒ k ≡ 4 (mod 5).
        assert_eq!(
            solve_linear_congruence(&4.into(), &6.into(), &10.into()),
            Some((4.into(), 5.into()))
        );
        assert_eq!(solve_linear_congruence(&4.into(), &5.into(), &10.into()), None);
        assert_eq!(crt(&2.into(), &3.into(), &3.into(), &4.into()), Some((11.into(), 12.into())));
        assert_eq!(crt(&1.into(), &2.into(), &0.into(), &4.into()), None);
    }

    fn cand(k3: Rational, chi: i64, basket: Basket, m_max: u64) -> Candidate {
        let inv = ThreefoldInvariants::new(k3, chi, basket);
        let pm_table = plurigenus_table(&inv, m_max, false).unwrap();
        Candidate { basket: inv.basket, chi_o: inv.chi_o, k3: inv.k3, pm_table }
    }

    #[test]
    fn m0_examples() {
        let x10 = cand(q(2, 1), -3, Basket::empty(), 10);
        assert_eq!(find_m0(std::slice::from_ref(&x10)).unwrap().m0, 2);
        let half = cand(q(11, 2), 1, basket_validate([(1, 2)]).unwrap(), 10);
        let r = find_m0(&[half.clone(), x10]).unwrap();
        assert_eq!(r.m0, 3);
        assert_eq!(r.witnesses, vec![half]);
        assert_eq!(find_m0(&[]), Err(Error::EmptyCandidateSet));
    }
}
