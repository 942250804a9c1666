//! Shared inputs for the benchmarks in `benches/`.

use plurigeo_core::{Basket, EnumConstraints, K3Policy, OrbifoldPoint, Rational};

/// The σ₁₂ = 0 search used by the acceptance suite, at a chosen σ bound.
pub fn candidate_constraints(sigma_max: u64) -> EnumConstraints {
    EnumConstraints {
        chi_min: -8,
        chi_max: 8,
        sigma_max,
        require_sigma12_zero: true,
        r_max: None,
        k3_policy: K3Policy::MinimalAdmissible {
            denominator: None,
            max: Rational::from_integer(1_000_000),
        },
        m_max: 30,
        require_nonneg_pm: true,
    }
}

/// A basket with several indices, so that l(m) has a long period.
pub fn mixed_basket() -> Basket {
    Basket::from_points(
        [(1, 2), (2, 5), (3, 11), (5, 13), (7, 29)]
            .into_iter()
            .map(|(b, r)| OrbifoldPoint::new(b, r).expect("admissible")),
    )
}
