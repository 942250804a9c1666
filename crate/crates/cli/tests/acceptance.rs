//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use plurigeo_core::functional::xi_bar_point;
use plurigeo_core::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const SEED: u64 = 0x5eed_2024;
const GOLDEN_BUDGET: Duration = Duration::from_secs(1);
const LEMMA_BUDGET: Duration = Duration::from_secs(60);
const REPLAY_BUDGET: Duration = Duration::from_secs(60);
const REPLAY_R_MAX: u64 = 500;
const LEMMA_R_MAX: u64 = 25;
const CANCELLATION_SAMPLES: usize = 100;
const CANCELLATION_BASKETS: usize = 10;
const SIGMA_SAMPLES: usize = 200;

type Outcome = std::result::Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d).unwrap()
}

fn pt(b: u64, r: u64) -> OrbifoldPoint {
    OrbifoldPoint::new(b, r).unwrap()
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn golden_tables() -> Outcome {
    let start = Instant::now();
    let half = pt(1, 2);
    let deltas: Vec<BigInt> = [3, 4, 6].iter().map(|&n| delta(n, half)).collect();
    ensure(deltas == [1.into(), 2.into(), 6.into()], || format!("Δ(1,2) at 3,4,6 = {deltas:?}"))?;

    let f1 = ineq1_functional();
    let f2 = ineq2_functional();
    let xi1: Vec<Rational> = (2..=5).map(|r| xi_bar_point(&f1, pt(1, r))).collect();
    ensure(xi1 == [q(0, 1), q(0, 1), q(0, 1), q(1, 1)], || format!("Ξ̄₁(1, 2..5) = {xi1:?}"))?;

    let xi2: Vec<Rational> = (2..=11).map(|r| xi_bar_point(&f2, pt(1, r))).collect();
    let expected: Vec<Rational> = [0, 0, 0, 2, 5, 6, 8, 10, 12, 13].iter().map(|&v| q(v, 1)).collect();
    ensure(xi2 == expected, || format!("Ξ̄₂(1, 2..11) = {xi2:?}"))?;

    ensure(xi_bar_point(&f1, pt(2, 5)).is_zero(), || "Ξ̄₁(2,5) is not 0".into())?;
    let d = xi_delta(&f1, pt(2, 5));
    ensure(d == BigInt::from(-4), || format!("ΞΔ₁(2,5) = {d}"))?;

    let elapsed = start.elapsed();
    ensure(elapsed < GOLDEN_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("all golden values exact in {elapsed:?}"))
}

fn lemma_brute_force() -> Outcome {
    let start = Instant::now();
    let sweep = lemma_sweep(LEMMA_R_MAX, LEMMA_R_MAX);
    let elapsed = start.elapsed();
    ensure(sweep.mismatches.is_empty(), || format!("{} mismatches, first {:?}", sweep.mismatches.len(), sweep.mismatches[0]))?;
    ensure(sweep.pairs > 0, || "no unimodular pairs".into())?;
    ensure(elapsed < LEMMA_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} pairs, {} nodiff and {} diff cases, 0 exceptions ({} representable n outside the box) in {elapsed:?}",
        sweep.pairs, sweep.nodiff_checked, sweep.diff_checked, sweep.outside_box
    ))
}

fn proof_replay_both() -> Outcome {
    let start = Instant::now();
    let mut nodes = 0;
    for form in [ineq1(), ineq2()] {
        let cert = proof_replay(&form, REPLAY_R_MAX, &default_base_bounds(&form.functional, REPLAY_R_MAX))
            .map_err(|e| format!("{}: {e}", form.name))?;
        let summary = cert.summary();
        ensure(summary.all_hold, || format!("{}: negative slack {}", form.name, summary.min_slack))?;

        let check = cert.verify().map_err(|e| format!("{}: {e}", form.name))?;
        ensure(check.ok(), || format!("{}: {:?}", form.name, &check.failures[..check.failures.len().min(3)]))?;
        ensure(check.direct_matches == check.nodes, || format!("{}: direct ΞΔ matched {} of {}", form.name, check.direct_matches, check.nodes))?;

        for node in &cert.nodes {
            let p = node.point;
            let direct = verify_single_basket(&form.functional, p, &Rational::from_integer(form.target_point(p)));
            ensure(direct.holds && direct.value == node.xi_bar, || format!("{}: node {p} disagrees with direct evaluation", form.name))?;
        }
        let expected_count = points_count(REPLAY_R_MAX);
        ensure(cert.nodes.len() == expected_count, || format!("{}: {} nodes, expected {expected_count}", form.name, cert.nodes.len()))?;
        nodes += cert.nodes.len();

        if form.name == "ineq2" {
            let small: Vec<_> = summary
                .nonzero_offsets
                .iter()
                .filter(|((_, r), _)| *r <= 12)
                .cloned()
                .collect();
            let want = vec![((3, 10), BigInt::from(1)), ((5, 12), BigInt::from(1))];
            ensure(small == want, || format!("offsets in r <= 12: {small:?}"))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < REPLAY_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{nodes} nodes over both functionals, all verified; offsets +1 only at (3,10), (5,12) in {elapsed:?}"))
}

fn points_count(r_max: u64) -> usize {
    (2..=r_max)
        .map(|r| (1..=r / 2).filter(|&b| OrbifoldPoint::new(b, r).is_ok()).count())
        .sum()
}

fn random_basket(rng: &mut StdRng, max_len: usize, r_max: u64) -> Basket {
    let len = rng.gen_range(0..=max_len);
    let mut points = Vec::with_capacity(len);
    while points.len() < len {
        let r = rng.gen_range(2..=r_max);
        let b = rng.gen_range(1..=r / 2);
        if let Ok(p) = OrbifoldPoint::new(b, r) {
            points.push(p);
        }
    }
    Basket::from_points(points)
}

fn random_rational(rng: &mut StdRng) -> Rational {
    q(rng.gen_range(-100_000..=100_000), rng.gen_range(1..=5_000))
}

/// Σ_m a_m χ(mK) + c_χ χ over the rationals, with no integrality assumed.
fn p_form(form: &InequalityForm, inv: &ThreefoldInvariants) -> Rational {
    form.plurigenus_terms
        .iter()
        .map(|&(m, a)| chi_mk(inv, m) * Rational::from_integer(a))
        .sum::<Rational>()
        + Rational::from_integer(&inv.chi_o * form.chi_coeff)
}

fn cancellation() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    let baskets: Vec<Basket> = (0..CANCELLATION_BASKETS).map(|_| random_basket(&mut rng, 6, 60)).collect();
    let pairs: Vec<(Rational, i64)> =
        (0..CANCELLATION_SAMPLES).map(|_| (random_rational(&mut rng), rng.gen_range(-50..=50))).collect();
    let mut checked = 0;
    for basket in &baskets {
        for form in [ineq1(), ineq2()] {
            let l = form.l_form(basket);
            let xb = xi_bar(&form.functional, basket);
            ensure(l == xb, || format!("{}: l-form {l} != Ξ̄ {xb} on {basket}", form.name))?;
            for (k3, chi) in &pairs {
                let inv = ThreefoldInvariants::new(k3.clone(), *chi, basket.clone());
                let p = p_form(&form, &inv);
                ensure(p == l, || format!("{}: P-form {p} != {l} at K³={k3}, χ={chi} on {basket}", form.name))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} evaluations: P-form = l-form = Ξ̄, independent of K³ and χ"))
}

fn sigma_identity() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 1);
    let mut checked = 0;
    while checked < SIGMA_SAMPLES {
        let basket = random_basket(&mut rng, 6, 40);
        let chi = BigInt::from(rng.gen_range(-10..=10));
        let p2 = BigInt::from(rng.gen_range(0..=300));
        let k3 = k3_from_p2(&chi, &basket, &p2);
        if !k3.is_positive() {
            continue;
        }
        let inv = ThreefoldInvariants::new(k3, chi, basket);
        let s = sigma_identity_check(&inv).map_err(|e| format!("{e} on {}", inv.basket))?;
        ensure(s.holds, || format!("σ = {} but 10χ + 5P₂ − P₃ = {} on {}", s.sigma, s.rhs, inv.basket))?;
        checked += 1;
    }
    Ok(format!("σ = 10χ + 5P₂ − P₃ on {checked} random triples"))
}

/// Weighted monomials of degree `d` in four weight-1 variables and one of
/// weight 5.
fn monomials(d: i64) -> i64 {
    if d < 0 {
        return 0;
    }
    (0..=d / 5)
        .map(|k| {
            let e = d - 5 * k;
            (e + 1) * (e + 2) * (e + 3) / 6
        })
        .sum()
}

fn degree_ten_oracle() -> Outcome {
    let inv = ThreefoldInvariants::new(q(2, 1), -3, Basket::empty());
    let mut values = Vec::new();
    for m in 2..=9i64 {
        let h = monomials(m) - monomials(m - 10);
        let c = chi_mk(&inv, m as u64);
        ensure(c == q(h, 1), || format!("m = {m}: χ(mK) = {c}, monomials {h}"))?;
        values.push(h.to_string());
    }
    Ok(format!("χ(mK), m = 2..9: {}", values.join(", ")))
}

fn constants_and_candidates() -> Outcome {
    let chain = derive_constants(120).map_err(|e| e.to_string())?;
    let claimed = Rational::from_integer(BigInt::from(32) * BigInt::from(120).pow(3));
    ensure(chain.c_general == claimed, || format!("general-branch c = {}", chain.c_general))?;

    let constraints = EnumConstraints {
        chi_min: -8,
        chi_max: 8,
        sigma_max: 4,
        require_sigma12_zero: true,
        r_max: None,
        k3_policy: K3Policy::MinimalAdmissible { denominator: None, max: q(1_000_000, 1) },
        m_max: 30,
        require_nonneg_pm: true,
    };
    let candidates = enumerate_candidates(&constraints).map_err(|e| e.to_string())?;
    ensure(!candidates.is_empty(), || "no candidates".into())?;
    for c in &candidates {
        let inv = c.invariants();
        let chi = check_chi_bound(&inv, &chain);
        ensure(chi.pass == Some(true), || format!("χ bound fails on {} χ={} K³={}", c.basket, c.chi_o, c.k3))?;
        for form in [ineq1(), ineq2()] {
            let r = verify_plurigenus_form(&inv, &form).map_err(|e| e.to_string())?;
            ensure(r.holds, || format!("{} fails on {} χ={} K³={}", form.name, c.basket, c.chi_o, c.k3))?;
        }
    }
    Ok(format!(
        "c_general = {}; {} candidates pass the χ bound (c = {}) and both inequalities",
        chain.c_general,
        candidates.len(),
        chain.c
    ))
}

fn replay_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_plurigeo");
    for which in ["1", "2"] {
        let mut runs = Vec::new();
        for jobs in ["1", "8"] {
            let path = dir.path().join(format!("cert-{which}-{jobs}.txt"));
            let out = Command::new(bin)
                .args(["replay", "--which", which, "--r-max", "500", "--jobs", jobs, "--out"])
                .arg(&path)
                .output()
                .map_err(|e| e.to_string())?;
            ensure(out.status.success(), || format!("replay --which {which} --jobs {jobs} exited {}", out.status))?;
            let cert = fs::read(&path).map_err(|e| e.to_string())?;
            runs.push((out.stdout, cert));
        }
        ensure(runs[0] == runs[1], || format!("--which {which}: output differs between --jobs 1 and 8"))?;
    }
    Ok("summary and certificate bytes identical for --jobs 1 and 8".into())
}

fn main() {
    let criteria: [Check; 8] = [
        ("golden tables", golden_tables),
        ("lemma brute force", lemma_brute_force),
        ("proof replay", proof_replay_both),
        ("cancellation", cancellation),
        ("sigma identity", sigma_identity),
        ("degree-10 hypersurface oracle", degree_ten_oracle),
        ("constants and candidates", constants_and_candidates),
        ("replay determinism", replay_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
