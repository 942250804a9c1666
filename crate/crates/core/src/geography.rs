//! Constant chains behind the lower bounds χ(ω_X) ≥ −c·K³ and
//! P_m ≥ c′·m³·K³ (m ≥ m₁), and checks of those bounds on concrete data.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer as _;

use crate::arith::{Integer, Rational};
use crate::error::{Error, Result};
use crate::riemann_roch::{chi_mk, cubic_coefficient, ThreefoldInvariants};

/// Birationality level used by the general branch: every relevant P_t with
/// t ∈ {5, 6, 8, 10, 12} is dominated by P₁₂₀.
pub const GENERAL_LEVEL: u64 = 120;

/// c′ and m₁ quoted from the stronger external plurigenus results. Reported
/// beside the derived chain, never mixed into it.
pub const QUOTED_C_PRIME: (i64, i64) = (5, 89168);
pub const QUOTED_M1: u64 = 112;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantChain {
    pub m0_raw: u64,
    /// lcm(m0_raw, 120).
    pub m0: u64,
    /// 5·m₀ + 6: |mK| birational for m ≥ t₀.
    pub t0: u64,
    /// P_m ≥ c₁·m for m ≥ 12·m₀ + 10.
    pub c1: Rational,
    pub c1_threshold: u64,
    /// P_m ≥ (c₂·m / t)·P_t for m ≥ 10·m₀ + 2t + 10; c₂ = min(c₁, 1/4).
    pub c2: Rational,
    /// 10·m₀ + 34, the t = 12 instance of the c₂ threshold.
    pub m1: u64,
    /// 1 / (16·(1 + 116/c₂)).
    pub c_prime: Rational,
    /// 32·120³ from χ ≤ 8·P₁₂₀ ≤ 32·120³·K³.
    pub c_general: Rational,
    /// 8·(5m₀ + 6)³ from χ ≤ 8 and K³ ≥ 1/(5m₀ + 6)³.
    pub c_finite: Rational,
    pub c: Rational,
    pub quoted_c_prime: Rational,
    pub quoted_m1: u64,
}

pub fn derive_constants(m0_raw: u64) -> Result<ConstantChain> {
    if m0_raw < 2 {
        return Err(Error::InvalidConstraints("m0 must be at least 2".into()));
    }
    let m0 = m0_raw.lcm(&GENERAL_LEVEL);
    let t0 = 5 * m0 + 6;
    let c1 = Rational::new(1, 2 * m0)?;
    let c2 = c1.clone().min(Rational::new(1, 4)?);
    let c_prime = (Rational::from_integer(16) * (Rational::one() + Rational::from_integer(116).div(&c2)?)).recip()?;
    let c_general = Rational::from_integer(BigInt::from(32) * BigInt::from(GENERAL_LEVEL).pow(3));
    let c_finite = Rational::from_integer(BigInt::from(8) * BigInt::from(t0).pow(3));
    Ok(ConstantChain {
        m0_raw,
        m0,
        t0,
        c1,
        c1_threshold: 12 * m0 + 10,
        c2,
        m1: 10 * m0 + 34,
        c_prime,
        c: c_general.clone().max(c_finite.clone()),
        c_general,
        c_finite,
        quoted_c_prime: Rational::new(QUOTED_C_PRIME.0, QUOTED_C_PRIME.1)?,
        quoted_m1: QUOTED_M1,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChiBoundReport {
    pub chi_omega: Integer,
    /// −c·K³.
    pub bound: Rational,
    /// `None` when K³ ≤ 0.
    pub pass: Option<bool>,
    pub warning: Option<String>,
}

/// χ(ω_X) ≥ −c·K³ with c = `chain.c`.
pub fn check_chi_bound(inv: &ThreefoldInvariants, chain: &ConstantChain) -> ChiBoundReport {
    let chi_omega = inv.chi_omega();
    let bound = -(chain.c.clone() * &inv.k3);
    if !inv.is_general_type() {
        return ChiBoundReport {
            chi_omega,
            bound,
            pass: None,
            warning: Some(format!("K^3 = {} is not positive; not of general type", inv.k3)),
        };
    }
    let pass = Rational::from_integer(chi_omega.clone()) >= bound;
    ChiBoundReport { chi_omega, bound, pass: Some(pass), warning: None }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundCheck {
    pub bound: Rational,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PmBoundReport {
    pub m: u64,
    pub p_m: Rational,
    /// P_m ≥ c′·m³·K³, evaluated for m ≥ m₁.
    pub general: Option<BoundCheck>,
    /// P_m ≥ m³·K³/16, evaluated when χ(𝒪_X) ≤ 0.
    pub strong: Option<BoundCheck>,
}

/// P_m against c′·m³·K³. With χ(𝒪_X) ≤ 0 the m³K³/16 bound applies from
/// m = 2 and the m₁ threshold is only needed for the general bound.
pub fn check_pm_bound(inv: &ThreefoldInvariants, chain: &ConstantChain, m: u64) -> Result<PmBoundReport> {
    let nonpositive_chi = inv.chi_o <= BigInt::from(0);
    let threshold = if nonpositive_chi { 2 } else { chain.m1 };
    if m < threshold {
        return Err(Error::BelowThreshold { m, threshold });
    }
    let p_m = chi_mk(inv, m);
    let m3k3 = Rational::from_integer(BigInt::from(m).pow(3)) * &inv.k3;
    let general = (m >= chain.m1).then(|| {
        let bound = chain.c_prime.clone() * &m3k3;
        BoundCheck { pass: p_m >= bound, bound }
    });
    let strong = nonpositive_chi.then(|| {
        let bound = m3k3 * Rational::new(1, 16).expect("nonzero");
        BoundCheck { pass: p_m >= bound, bound }
    });
    Ok(PmBoundReport { m, p_m, general, strong })
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GrowthReport {
    /// `(s, t)` with `s <= t`, P_s, P_t > 0 and P_{s+t} < P_s + P_t − 1.
    pub superadditivity_violations: Vec<(u64, u64)>,
    pub superadditivity_checked: usize,
    /// `s` values where P_s > ⌊(s − t₀)/t⌋·(P_t − 1) was checked.
    pub derived_bound_checked: Vec<u64>,
    pub derived_bound_violations: Vec<u64>,
}

/// Diagnostics on a plurigenus table. Failures flag data that cannot come
/// from an actual 3-fold; they are not consequences of the formula alone.
pub fn growth_diagnostics(pm_table: &BTreeMap<u64, Integer>, m0: u64, t: u64) -> GrowthReport {
    let mut report = GrowthReport::default();
    let zero = BigInt::from(0);
    for (&s, ps) in pm_table {
        for (&u, pu) in pm_table.range(s..) {
            let (Some(sum), true, true) = (pm_table.get(&(s + u)), *ps > zero, *pu > zero) else {
                continue;
            };
            report.superadditivity_checked += 1;
            if *sum < ps + pu - 1 {
                report.superadditivity_violations.push((s, u));
            }
        }
    }
    let t0 = 5 * m0 + 6;
    if let Some(pt) = pm_table.get(&t).filter(|p| **p >= BigInt::from(2)) {
        for (&s, ps) in pm_table.range(t0..) {
            report.derived_bound_checked.push(s);
            let k = BigInt::from((s - t0) / t);
            if !(*ps > k * (pt - 1)) {
                report.derived_bound_violations.push(s);
            }
        }
    }
    report
}

/// m(m−1)(2m−1)/12 ≥ m³/16 for every m ≥ 2.
pub fn cubic_dominates_sixteenth(m: u64) -> bool {
    cubic_coefficient(m) >= Rational::from_integer(BigInt::from(m).pow(3)) * Rational::new(1, 16).expect("nonzero")
}
