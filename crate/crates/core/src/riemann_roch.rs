//! Reid's plurigenus formula
//!
//! χ(𝒪_X(mK_X)) = m(m−1)(2m−1)/12 · K³ − (2m−1)·χ(𝒪_X) + l(m)
//!
//! evaluated exactly for arbitrary rational K³. Plurigenera are identified
//! with χ(mK) for m ≥ 2 only; at m = 1 the formula gives −χ(𝒪_X) and says
//! nothing about P₁.

use num_bigint::BigInt;

use crate::arith::{Integer, Rational};
use crate::basket::{l_correction, sigma, Basket};
use crate::error::{Error, Result};

/// Numerical data of a minimal terminal 3-fold: K³, χ(𝒪_X) and its basket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreefoldInvariants {
    pub k3: Rational,
    pub chi_o: Integer,
    pub basket: Basket,
}

impl ThreefoldInvariants {
    pub fn new(k3: Rational, chi_o: impl Into<Integer>, basket: Basket) -> Self {
        ThreefoldInvariants { k3, chi_o: chi_o.into(), basket }
    }

    /// χ(ω_X) = −χ(𝒪_X) by Serre duality.
    pub fn chi_omega(&self) -> Integer {
        -self.chi_o.clone()
    }

    pub fn is_general_type(&self) -> bool {
        self.k3.is_positive()
    }
}

/// χ(mK) at a single m, with the integer value when there is one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlurigenusReport {
    pub m: u64,
    pub chi_mk: Rational,
    pub is_integral: bool,
    pub p_m: Option<Integer>,
}

/// m(m−1)(2m−1)/12, the coefficient of K³.
pub fn cubic_coefficient(m: u64) -> Rational {
    let m = BigInt::from(m);
    let num = &m * (&m - 1) * (2 * &m - 1);
    Rational::new(num, 12).expect("nonzero")
}

pub fn chi_mk(inv: &ThreefoldInvariants, m: u64) -> Rational {
    let linear = Rational::from_integer(BigInt::from(2 * m as i128 - 1) * &inv.chi_o);
    cubic_coefficient(m) * &inv.k3 - linear + l_correction(&inv.basket, m)
}

/// P_m for m ≥ 2. A non-integral χ(mK) is reported, not rejected.
pub fn plurigenus(inv: &ThreefoldInvariants, m: u64) -> PlurigenusReport {
    debug_assert!(m >= 2, "plurigenus is only identified with chi(mK) for m >= 2");
    let chi = chi_mk(inv, m);
    let p_m = chi.to_integer();
    PlurigenusReport { m, is_integral: p_m.is_some(), p_m, chi_mk: chi }
}

/// Integral P_m, or an inconsistent-invariants error.
pub fn integral_plurigenus(inv: &ThreefoldInvariants, m: u64) -> Result<Integer> {
    let report = plurigenus(inv, m);
    report.p_m.ok_or_else(|| Error::NonIntegralPlurigenus {
        m,
        value: report.chi_mk.to_string(),
    })
}

/// Solves the m = 2 formula for K³: K³ = 2(P₂ + 3χ − l(2)).
pub fn k3_from_p2(chi_o: &Integer, basket: &Basket, p2: &Integer) -> Rational {
    let rhs = Rational::from_integer(p2 + 3 * chi_o) - l_correction(basket, 2);
    rhs * Rational::from_integer(2)
}

/// Both sides of σ(B) = 10χ + 5P₂ − P₃.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaIdentity {
    pub sigma: Integer,
    pub rhs: Integer,
    pub p2: Integer,
    pub p3: Integer,
    pub holds: bool,
}

pub fn sigma_identity_check(inv: &ThreefoldInvariants) -> Result<SigmaIdentity> {
    let p2 = integral_plurigenus(inv, 2)?;
    let p3 = integral_plurigenus(inv, 3)?;
    let sigma = sigma(&inv.basket);
    let rhs = 10 * &inv.chi_o + 5 * &p2 - &p3;
    Ok(SigmaIdentity { holds: sigma == rhs, sigma, rhs, p2, p3 })
}
