//! Exact Riemann–Roch basket calculus for minimal terminal 3-folds of general
//! type.
//!
//! * [`arith`]: exact rationals, continued fractions, mediant parents.
//! * [`basket`]: baskets and the local terms M̄ʲ, Mʲ, Δʲ, l(m), σ, σ₁₂.
//! * [`riemann_roch`]: χ(𝒪_X(mK_X)), plurigenera, σ = 10χ + 5P₂ − P₃.
//! * [`functional`]: the Ξ̄ / Ξ / ΞΔ calculus and the two plurigenus
//!   inequalities, plus brute-force checks of the Δ additivity lemmas.
//! * [`certificate`]: induction replay over mediant splits and an
//!   independent certificate verifier.
//! * [`enumeration`]: S⁽ⁿ⁾ filtration, basket enumeration, m₀ search.
//! * [`geography`]: constant chains for χ(ω) ≥ −c·K³ and P_m ≥ c′m³K³.

pub mod arith;
pub mod basket;
pub mod certificate;
pub mod enumeration;
pub mod error;
pub mod functional;
pub mod geography;
pub mod riemann_roch;

pub use arith::{cf_expand, cf_value, is_unimodular, mediant_parents, rational_make, ContinuedFraction, Integer, MediantSplit, Rational};
pub use basket::{basket_validate, delta, l_correction, l_table, m_lin, mbar, sigma, sigma12, Basket, OrbifoldPoint};
pub use certificate::{default_base_bounds, proof_replay, verify_certificate_text, Certificate, VerificationReport};
pub use enumeration::{attach_invariants, enumerate_baskets, enumerate_candidates, farey_stage, find_m0, Candidate, EnumConstraints, K3Policy};
pub use error::{Error, Result};
pub use functional::{
    functional_moments, ineq1, ineq1_functional, ineq2, ineq2_functional, lemma_diff_check, lemma_nodiff_check, lemma_sweep,
    verify_basket, verify_plurigenus_form, verify_single_basket, xi_bar, xi_delta, xi_lin, Functional, InequalityForm, LemmaRoute,
};
pub use geography::{check_chi_bound, check_pm_bound, derive_constants, growth_diagnostics, ConstantChain};
pub use riemann_roch::{chi_mk, k3_from_p2, plurigenus, sigma_identity_check, PlurigenusReport, ThreefoldInvariants};
