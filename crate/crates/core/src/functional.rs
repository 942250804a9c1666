//! Linear functionals Σ cⱼ M̄ʲ on baskets, the two plurigenus inequalities in
//! their P-, l- and M̄-forms, and brute-force checks of the two additivity
//! lemmas for Δ under mediant sums.

use std::fmt;

use num_bigint::BigInt;

use crate::arith::{cmp_slope, determinant, Integer, Rational};
use crate::basket::{delta, l_correction, m_lin, mbar, points_up_to, sigma12, Basket, OrbifoldPoint};
use crate::error::{Error, Result};
use crate::riemann_roch::{integral_plurigenus, ThreefoldInvariants};

/// Integer coefficients `c_1, ..., c_N` of M̄¹, ..., M̄ᴺ. Trailing zeros are
/// trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Functional {
    coeffs: Vec<i64>,
}

impl Functional {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0);
        }
        Functional { coeffs }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// `(j, c_j)` with `c_j != 0`.
    pub fn support(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i as u64 + 1, c))
    }

    pub fn max_index(&self) -> u64 {
        self.coeffs.len() as u64
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(i64::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Coefficients of M̄¹..M̄⁶ for the first inequality.
pub fn ineq1_functional() -> Functional {
    Functional::new(vec![-2, 1, 2, 1, 0, -1])
}

/// Coefficients of M̄¹..M̄¹² for the second inequality.
pub fn ineq2_functional() -> Functional {
    Functional::new(vec![-9, 1, 5, 5, 3, 0, 1, 0, 0, -1, 0, -1])
}

/// Ξ̄(B) = Σ_p Σ_j c_j M̄ʲ(p), with multiplicity.
pub fn xi_bar(f: &Functional, basket: &Basket) -> Rational {
    basket
        .entries()
        .iter()
        .map(|&(p, k)| xi_bar_point(f, p) * Rational::from_integer(k))
        .sum()
}

pub fn xi_bar_point(f: &Functional, p: OrbifoldPoint) -> Rational {
    f.support().map(|(j, c)| mbar(j, p) * Rational::from_integer(c)).sum()
}

/// Ξ(p) = Σ_j c_j Mʲ(p).
pub fn xi_lin(f: &Functional, p: OrbifoldPoint) -> Rational {
    f.support().map(|(j, c)| m_lin(j, p) * Rational::from_integer(c)).sum()
}

/// ΞΔ(p) = Σ_j c_j Δʲ(p).
pub fn xi_delta(f: &Functional, p: OrbifoldPoint) -> Integer {
    f.support().map(|(j, c)| delta(j, p) * c).sum()
}

/// `(Σ c_j j, Σ c_j j²)`. When the second moment vanishes, Ξ(b, r) = b·(first)/2.
pub fn functional_moments(f: &Functional) -> (Integer, Integer) {
    f.support().fold((BigInt::from(0), BigInt::from(0)), |(m1, m2), (j, c)| {
        let j = BigInt::from(j);
        (m1 + &j * c, m2 + &j * &j * c)
    })
}

/// An inequality in three equivalent shapes: a combination of plurigenera
/// and χ(𝒪_X), the same combination of l(m), and a functional on M̄ʲ. The
/// right-hand side in every shape is `sigma12_weight · σ₁₂(B)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InequalityForm {
    pub name: &'static str,
    /// `(m, coefficient of P_m)` in LHS − RHS.
    pub plurigenus_terms: Vec<(u64, i64)>,
    /// Coefficient of χ(𝒪_X) in LHS − RHS.
    pub chi_coeff: i64,
    pub sigma12_weight: i64,
    pub functional: Functional,
}

/// P₄ + P₅ + P₆ − 3P₂ − P₃ − P₇ ≥ 0.
pub fn ineq1() -> InequalityForm {
    InequalityForm {
        name: "ineq1",
        plurigenus_terms: vec![(2, -3), (3, -1), (4, 1), (5, 1), (6, 1), (7, -1)],
        chi_coeff: 0,
        sigma12_weight: 0,
        functional: ineq1_functional(),
    }
}

/// 2P₅ + 3P₆ + P₈ + P₁₀ + P₁₂ ≥ χ + 10P₂ + 4P₃ + P₇ + P₁₁ + P₁₃ + 14σ₁₂.
pub fn ineq2() -> InequalityForm {
    InequalityForm {
        name: "ineq2",
        plurigenus_terms: vec![
            (2, -10),
            (3, -4),
            (5, 2),
            (6, 3),
            (7, -1),
            (8, 1),
            (10, 1),
            (11, -1),
            (12, 1),
            (13, -1),
        ],
        chi_coeff: -1,
        sigma12_weight: 14,
        functional: ineq2_functional(),
    }
}

impl InequalityForm {
    /// Right-hand side `w · σ₁₂(B)`.
    pub fn target(&self, basket: &Basket) -> Rational {
        Rational::from_integer(sigma12(basket) * self.sigma12_weight)
    }

    pub fn target_point(&self, p: OrbifoldPoint) -> Integer {
        if p.is_small_slope() {
            BigInt::from(p.b()) * self.sigma12_weight
        } else {
            BigInt::from(0)
        }
    }

    /// Σ_m a_m l(m).
    pub fn l_form(&self, basket: &Basket) -> Rational {
        self.plurigenus_terms
            .iter()
            .map(|&(m, a)| l_correction(basket, m) * Rational::from_integer(a))
            .sum()
    }

    /// Expands Σ_m a_m l(m) into coefficients of M̄ʲ.
    pub fn expanded_functional(&self) -> Functional {
        let top = self.plurigenus_terms.iter().map(|&(m, _)| m).max().unwrap_or(1);
        let coeffs = (1..top)
            .map(|j| {
                self.plurigenus_terms
                    .iter()
                    .filter(|&&(m, _)| m > j)
                    .map(|&(_, a)| a)
                    .sum()
            })
            .collect();
        Functional::new(coeffs)
    }

    /// Σ_m a_m P_m + c_χ χ(𝒪_X), requiring integral plurigenera.
    pub fn p_form(&self, inv: &ThreefoldInvariants) -> Result<Integer> {
        let mut total = &inv.chi_o * self.chi_coeff;
        for &(m, a) in &self.plurigenus_terms {
            total += integral_plurigenus(inv, m)? * a;
        }
        Ok(total)
    }
}

/// Ξ̄ of one point against a target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingleVerdict {
    pub value: Rational,
    pub target: Rational,
    pub holds: bool,
}

impl SingleVerdict {
    pub fn slack(&self) -> Rational {
        &self.value - &self.target
    }
}

pub fn verify_single_basket(f: &Functional, p: OrbifoldPoint, target: &Rational) -> SingleVerdict {
    let value = xi_bar_point(f, p);
    SingleVerdict { holds: value >= *target, value, target: target.clone() }
}

/// Ξ̄(B) against `w · σ₁₂(B)` for an arbitrary basket.
pub fn verify_basket(form: &InequalityForm, basket: &Basket) -> SingleVerdict {
    let value = xi_bar(&form.functional, basket);
    let target = form.target(basket);
    SingleVerdict { holds: value >= target, value, target }
}

/// The three evaluations of one inequality on concrete invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PluriFormReport {
    pub which: &'static str,
    pub p_form: Rational,
    pub l_form: Rational,
    pub xi_bar: Rational,
    pub target: Rational,
    pub slack: Rational,
    pub agree: bool,
    pub holds: bool,
}

pub fn verify_plurigenus_form(inv: &ThreefoldInvariants, form: &InequalityForm) -> Result<PluriFormReport> {
    let p_form = Rational::from_integer(form.p_form(inv)?);
    let l_form = form.l_form(&inv.basket);
    let xb = xi_bar(&form.functional, &inv.basket);
    let target = form.target(&inv.basket);
    let agree = p_form == l_form && l_form == xb;
    let slack = &p_form - &target;
    Ok(PluriFormReport {
        which: form.name,
        holds: agree && !slack.is_negative(),
        p_form,
        l_form,
        xi_bar: xb,
        target,
        slack,
        agree,
    })
}

/// How a given `n` relates to a unimodular pair `(p1, p2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LemmaRoute {
    /// `n` is not `x r1 + y r2` with `x, y > 0`: Δⁿ is additive.
    NoDiff,
    /// `n = x r1 + y r2` with `0 < x <= r2`, `0 < y <= r1`: offset `−min(x, y)`.
    Diff { x: u64, y: u64 },
    /// Representable, but not inside the box; neither lemma applies.
    Outside,
}

impl LemmaRoute {
    /// The offset Δⁿ(p1 + p2) − Δⁿ(p1) − Δⁿ(p2) the lemmas predict.
    pub fn predicted_offset(&self) -> Option<i64> {
        match *self {
            LemmaRoute::NoDiff => Some(0),
            LemmaRoute::Diff { x, y } => Some(-(x.min(y) as i64)),
            LemmaRoute::Outside => None,
        }
    }
}

/// Classifies `n` against `(r1, r2)`.
pub fn classify(p1: OrbifoldPoint, p2: OrbifoldPoint, n: u64) -> LemmaRoute {
    let (r1, r2) = (p1.r(), p2.r());
    let mut representable = false;
    let mut x = 1u64;
    while x.saturating_mul(r1) < n {
        let rest = n - x * r1;
        if rest.is_multiple_of(r2) {
            let y = rest / r2;
            if x <= r2 && y <= r1 {
                return LemmaRoute::Diff { x, y };
            }
            representable = true;
        }
        x += 1;
    }
    if representable {
        LemmaRoute::Outside
    } else {
        LemmaRoute::NoDiff
    }
}

/// Δⁿ(p1 + p2) − Δⁿ(p1) − Δⁿ(p2).
pub fn additivity_offset(p1: OrbifoldPoint, p2: OrbifoldPoint, n: u64) -> Result<Integer> {
    let sum = mediant_sum(p1, p2)?;
    Ok(delta(n, sum) - delta(n, p1) - delta(n, p2))
}

/// `(b1 + b2, r1 + r2)` as a validated point.
pub fn mediant_sum(p1: OrbifoldPoint, p2: OrbifoldPoint) -> Result<OrbifoldPoint> {
    OrbifoldPoint::new(p1.b() + p2.b(), p1.r() + p2.r())
}

fn require_positive_det(p1: OrbifoldPoint, p2: OrbifoldPoint) -> Result<()> {
    let d = determinant(p1, p2);
    if d != 1 {
        return Err(Error::LemmaMisuse(format!("b1*r2 - b2*r1 = {d}, expected 1 for {p1} and {p2}")));
    }
    Ok(())
}

/// Whether some b/n lies strictly between the slopes of `p2` and `p1`.
fn fraction_between(p1: OrbifoldPoint, p2: OrbifoldPoint, n: u64) -> bool {
    let (lo, hi) = if cmp_slope(p1, p2).is_gt() { (p2, p1) } else { (p1, p2) };
    (0..=n).any(|b| {
        let num = b as u128;
        num * lo.r() as u128 > lo.b() as u128 * n as u128 && num * (hi.r() as u128) < hi.b() as u128 * n as u128
    })
}

/// Checks additivity of Δⁿ under a mediant sum when `n` is not a positive
/// combination of `r1, r2`. Also checks that no b/n lies between the slopes.
pub fn lemma_nodiff_check(p1: OrbifoldPoint, p2: OrbifoldPoint, n: u64) -> Result<bool> {
    require_positive_det(p1, p2)?;
    if n == 0 {
        return Err(Error::LemmaMisuse("n must be positive".into()));
    }
    match classify(p1, p2, n) {
        LemmaRoute::NoDiff => {}
        _ => {
            return Err(Error::LemmaMisuse(format!(
                "n = {n} is a positive combination of {} and {}",
                p1.r(),
                p2.r()
            )))
        }
    }
    let additive = additivity_offset(p1, p2, n)? == BigInt::from(0);
    Ok(additive && !fraction_between(p1, p2, n))
}

/// Result of checking the offset lemma at one `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffCheck {
    pub x: u64,
    pub y: u64,
    pub offset: Integer,
    pub holds: bool,
}

/// Computes the offset of Δⁿ under a mediant sum when `n = x r1 + y r2`
/// inside the box, and compares it with −min(x, y).
pub fn lemma_diff_check(p1: OrbifoldPoint, p2: OrbifoldPoint, n: u64) -> Result<DiffCheck> {
    require_positive_det(p1, p2)?;
    let LemmaRoute::Diff { x, y } = classify(p1, p2, n) else {
        return Err(Error::LemmaMisuse(format!(
            "n = {n} has no representation x*{} + y*{} with 0 < x <= {}, 0 < y <= {}",
            p1.r(),
            p2.r(),
            p2.r(),
            p1.r()
        )));
    };
    let offset = additivity_offset(p1, p2, n)?;
    let holds = offset == BigInt::from(-(x.min(y) as i64));
    Ok(DiffCheck { x, y, offset, holds })
}

/// Totals of an exhaustive lemma sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LemmaSweep {
    pub pairs: u64,
    pub nodiff_checked: u64,
    pub diff_checked: u64,
    /// Representable `n` outside the box, covered by neither lemma.
    pub outside_box: u64,
    pub mismatches: Vec<LemmaMismatch>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaMismatch {
    pub p1: (u64, u64),
    pub p2: (u64, u64),
    pub n: u64,
    pub route: LemmaRoute,
}

/// All ordered pairs with `b1 r2 − b2 r1 = 1`, `r1 <= r1_max`, `r2 <= r2_max`.
pub fn unimodular_pairs(r1_max: u64, r2_max: u64) -> Vec<(OrbifoldPoint, OrbifoldPoint)> {
    let left = points_up_to(r1_max);
    let right = points_up_to(r2_max);
    let mut out = Vec::new();
    for &p1 in &left {
        for &p2 in &right {
            if determinant(p1, p2) == 1 {
                out.push((p1, p2));
            }
        }
    }
    out
}

/// Runs both lemma checks for every unimodular pair and every `n <= 2 r1 r2`.
pub fn lemma_sweep(r1_max: u64, r2_max: u64) -> LemmaSweep {
    use rayon::prelude::*;

    let pairs = unimodular_pairs(r1_max, r2_max);
    let partials: Vec<LemmaSweep> = pairs
        .par_iter()
        .map(|&(p1, p2)| {
            let mut s = LemmaSweep { pairs: 1, ..LemmaSweep::default() };
            for n in 1..=2 * p1.r() * p2.r() {
                let route = classify(p1, p2, n);
                let ok = match route {
                    LemmaRoute::NoDiff => {
                        s.nodiff_checked += 1;
                        lemma_nodiff_check(p1, p2, n).unwrap_or(false)
                    }
                    LemmaRoute::Diff { .. } => {
                        s.diff_checked += 1;
                        lemma_diff_check(p1, p2, n).map(|d| d.holds).unwrap_or(false)
                    }
                    LemmaRoute::Outside => {
                        s.outside_box += 1;
                        true
                    }
                };
                if !ok {
                    s.mismatches.push(LemmaMismatch { p1: p1.into(), p2: p2.into(), n, route });
                }
            }
            s
        })
        .collect();
    partials.into_iter().fold(LemmaSweep::default(), |mut acc, s| {
        acc.pairs += s.pairs;
        acc.nodiff_checked += s.nodiff_checked;
        acc.diff_checked += s.diff_checked;
        acc.outside_box += s.outside_box;
        acc.mismatches.extend(s.mismatches);
        acc
    })
}
