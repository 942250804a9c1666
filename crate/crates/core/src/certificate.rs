//! Replay of the induction over mediant decompositions, producing a
//! line-oriented certificate, and an independent verifier for that text.
//!
//! Every admissible point `(b, r)` with `r <= r_max` gets one node. Atoms
//! `(1, r)` and the declared base points carry a directly evaluated ΞΔ; every
//! other point is split into its two mediant parents and its ΞΔ is the sum of
//! the parents' values plus the per-`j` offsets predicted by the two
//! additivity lemmas. A split is an induction step when
//!
//! ```text
//! margin = w·(σ₁₂(p₁) + σ₁₂(p₂) − σ₁₂(p)) + Σ c_j·offset_j >= 0
//! ```
//!
//! which is exactly what lets `Ξ̄(pᵢ) >= w·σ₁₂(pᵢ)` pass to the sum.
//!
//! File layout, one record per line, tokens separated by single spaces:
//!
//! ```text
//! plurigeo-certificate v1
//! functional -2 1 2 1 0 -1
//! sigma12-weight 0
//! r-max 12
//! node 1/2 atom xi_delta=-2 xi_bar=0 target=0
//! node 2/5 base parents=1/2,1/3 det=+1 terms=3:nodiff:0;4:nodiff:0;6:nodiff:0 offset=0 margin=0 xi_delta=-4 xi_bar=0 target=0
//! end nodes=16
//! ```
//!
//! A point `(b, r)` is written as its slope `b/r`, which is already reduced.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer as _;
use rayon::prelude::*;

use crate::arith::{mediant_parents, Integer, Rational};
use crate::basket::{delta, OrbifoldPoint};
use crate::error::{Error, Result};
use crate::functional::{classify, xi_delta, xi_lin, Functional, InequalityForm, LemmaRoute};

const HEADER: &str = "plurigeo-certificate v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Atom,
    Base,
    Split,
}

impl NodeKind {
    fn as_str(self) -> &'static str {
        match self {
            NodeKind::Atom => "atom",
            NodeKind::Base => "base",
            NodeKind::Split => "split",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermOffset {
    pub j: u64,
    pub route: LemmaRoute,
    pub offset: Integer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitRecord {
    pub larger: OrbifoldPoint,
    pub smaller: OrbifoldPoint,
    pub det_sign: i8,
    pub terms: Vec<TermOffset>,
    /// Σ c_j·offset_j.
    pub offset_total: Integer,
    pub margin: Integer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertNode {
    pub point: OrbifoldPoint,
    pub kind: NodeKind,
    pub split: Option<SplitRecord>,
    pub xi_delta: Integer,
    pub xi_bar: Rational,
    pub target: Integer,
}

impl CertNode {
    pub fn slack(&self) -> Rational {
        &self.xi_bar - &Rational::from_integer(self.target.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub functional: Functional,
    pub sigma12_weight: i64,
    pub r_max: u64,
    pub nodes: Vec<CertNode>,
}

/// Directly evaluated ΞΔ on the atoms `(1, r)`, `r <= r_max`, and on `(2, 5)`.
pub fn default_base_bounds(functional: &Functional, r_max: u64) -> BTreeMap<OrbifoldPoint, Integer> {
    let mut out = BTreeMap::new();
    for r in 2..=r_max {
        let p = OrbifoldPoint::new(1, r).expect("unit fraction");
        out.insert(p, xi_delta(functional, p));
    }
    if r_max >= 5 {
        let p = OrbifoldPoint::new(2, 5).expect("2/5");
        out.insert(p, xi_delta(functional, p));
    }
    out
}

/// Builds the certificate for every admissible point with `r <= r_max`.
/// Levels are processed in order of `r`; points within a level run on the
/// ambient rayon pool and are collected in order of `b`.
pub fn proof_replay(
    form: &InequalityForm,
    r_max: u64,
    base_bounds: &BTreeMap<OrbifoldPoint, Integer>,
) -> Result<Certificate> {
    let functional = &form.functional;
    let mut known: HashMap<OrbifoldPoint, Integer> = HashMap::new();
    let mut nodes = Vec::new();
    for r in 2..=r_max {
        let level: Vec<OrbifoldPoint> =
            (1..=r / 2).filter_map(|b| OrbifoldPoint::new(b, r).ok()).collect();
        let built: Vec<CertNode> = level
            .par_iter()
            .map(|&p| replay_node(form, p, base_bounds, &known))
            .collect::<Result<_>>()?;
        for node in built {
            known.insert(node.point, node.xi_delta.clone());
            nodes.push(node);
        }
    }
    Ok(Certificate {
        functional: functional.clone(),
        sigma12_weight: form.sigma12_weight,
        r_max,
        nodes,
    })
}

fn replay_node(
    form: &InequalityForm,
    p: OrbifoldPoint,
    base_bounds: &BTreeMap<OrbifoldPoint, Integer>,
    known: &HashMap<OrbifoldPoint, Integer>,
) -> Result<CertNode> {
    let f = &form.functional;
    let base = base_bounds.get(&p);
    let (kind, split) = if p.b() == 1 {
        (NodeKind::Atom, None)
    } else {
        let kind = if base.is_some() { NodeKind::Base } else { NodeKind::Split };
        (kind, Some(split_record(form, p)?))
    };
    let xi_delta = match (kind, base, &split) {
        (NodeKind::Atom, None, _) => return Err(Error::MissingBaseBound { b: p.b(), r: p.r() }),
        (_, Some(v), _) => v.clone(),
        (_, None, Some(s)) => {
            let parent = |q: OrbifoldPoint| {
                known
                    .get(&q)
                    .cloned()
                    .ok_or_else(|| Error::Invariant(format!("parent {q} of {p} not yet replayed")))
            };
            parent(s.larger)? + parent(s.smaller)? + &s.offset_total
        }
        (_, None, None) => unreachable!("non-atoms always carry a split"),
    };
    let xi_bar = Rational::from_integer(xi_delta.clone()) + xi_lin(f, p);
    Ok(CertNode { point: p, kind, split, xi_delta, xi_bar, target: form.target_point(p) })
}

fn split_record(form: &InequalityForm, p: OrbifoldPoint) -> Result<SplitRecord> {
    let s = mediant_parents(p.b(), p.r())?;
    let (p1, p2) = (s.larger, s.smaller);
    let mut terms = Vec::new();
    let mut offset_total = BigInt::from(0);
    for (j, c) in form.functional.support() {
        let route = classify(p1, p2, j);
        let actual = delta(j, p) - delta(j, p1) - delta(j, p2);
        if let Some(predicted) = route.predicted_offset() {
            if actual != BigInt::from(predicted) {
                return Err(Error::Invariant(format!(
                    "lemma prediction {predicted} differs from offset {actual} at j = {j} for {p}"
                )));
            }
        }
        offset_total += &actual * c;
        terms.push(TermOffset { j, route, offset: actual });
    }
    let w = form.sigma12_weight;
    let small = |q: OrbifoldPoint| -> i64 {
        if q.is_small_slope() {
            q.b() as i64
        } else {
            0
        }
    };
    let margin = BigInt::from(w) * (small(p1) + small(p2) - small(p)) + &offset_total;
    Ok(SplitRecord { larger: p1, smaller: p2, det_sign: s.det_sign, terms, offset_total, margin })
}

fn slope_str(p: OrbifoldPoint) -> String {
    format!("{}/{}", p.b(), p.r())
}

fn route_str(route: LemmaRoute) -> String {
    match route {
        LemmaRoute::NoDiff => "nodiff".to_string(),
        LemmaRoute::Diff { x, y } => format!("diff({x},{y})"),
        LemmaRoute::Outside => "outside".to_string(),
    }
}

/// Summary of a replayed certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplaySummary {
    pub nodes: usize,
    pub min_slack: Rational,
    pub min_slack_points: Vec<(u64, u64)>,
    /// Split nodes whose total offset is nonzero.
    pub nonzero_offsets: Vec<((u64, u64), Integer)>,
    pub all_hold: bool,
}

impl Certificate {
    /// Deterministic text form.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{HEADER}");
        let _ = writeln!(out, "functional {}", self.functional);
        let _ = writeln!(out, "sigma12-weight {}", self.sigma12_weight);
        let _ = writeln!(out, "r-max {}", self.r_max);
        for n in &self.nodes {
            let _ = write!(out, "node {} {}", slope_str(n.point), n.kind.as_str());
            if let Some(s) = &n.split {
                let terms: Vec<String> = s
                    .terms
                    .iter()
                    .map(|t| format!("{}:{}:{}", t.j, route_str(t.route), t.offset))
                    .collect();
                let _ = write!(
                    out,
                    " parents={},{} det={} terms={} offset={} margin={}",
                    slope_str(s.larger),
                    slope_str(s.smaller),
                    if s.det_sign > 0 { "+1" } else { "-1" },
                    terms.join(";"),
                    s.offset_total,
                    s.margin
                );
            }
            let _ = writeln!(out, " xi_delta={} xi_bar={} target={}", n.xi_delta, n.xi_bar, n.target);
        }
        let _ = writeln!(out, "end nodes={}", self.nodes.len());
        out
    }

    pub fn node(&self, b: u64, r: u64) -> Option<&CertNode> {
        self.nodes.iter().find(|n| n.point.b() == b && n.point.r() == r)
    }

    pub fn summary(&self) -> ReplaySummary {
        let min_slack = self.nodes.iter().map(CertNode::slack).min().unwrap_or_else(Rational::zero);
        let min_slack_points = self
            .nodes
            .iter()
            .filter(|n| n.slack() == min_slack)
            .map(|n| n.point.into())
            .collect();
        let nonzero_offsets = self
            .nodes
            .iter()
            .filter_map(|n| n.split.as_ref().map(|s| (n.point, s)))
            .filter(|(_, s)| s.offset_total != BigInt::from(0))
            .map(|(p, s)| (p.into(), s.offset_total.clone()))
            .collect();
        ReplaySummary {
            nodes: self.nodes.len(),
            all_hold: self.nodes.iter().all(|n| !n.slack().is_negative()),
            min_slack,
            min_slack_points,
            nonzero_offsets,
        }
    }

    /// Re-checks the rendered text with [`verify_certificate_text`].
    pub fn verify(&self) -> Result<VerificationReport> {
        verify_certificate_text(&self.render())
    }
}

/// Outcome of independent verification.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub nodes: usize,
    pub atoms: usize,
    pub base: usize,
    pub splits: usize,
    /// Nodes whose recorded ΞΔ matched a from-scratch recomputation.
    pub direct_matches: usize,
    pub failures: Vec<String>,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

// Verifier. Δ is recomputed here from the two parabolas
// (s(r − s) − jb(r − jb)) / 2r with s = jb mod r, not from the floor formula.

fn parabola_delta(j: i128, b: i128, r: i128) -> Option<i128> {
    let jb = j.checked_mul(b)?;
    let s = jb.rem_euclid(r);
    let num = s.checked_mul(r - s)?.checked_sub(jb.checked_mul(r - jb)?)?;
    let den = 2 * r;
    (num % den == 0).then_some(num / den)
}

fn parse_point(tok: &str, line: usize) -> Result<(i128, i128)> {
    let err = || Error::Certificate { line, msg: format!("bad point `{tok}`") };
    let (b, r) = tok.split_once('/').ok_or_else(err)?;
    Ok((b.parse().map_err(|_| err())?, r.parse().map_err(|_| err())?))
}

fn parse_int(tok: &str, line: usize) -> Result<i128> {
    tok.parse().map_err(|_| Error::Certificate { line, msg: format!("bad integer `{tok}`") })
}

fn field<'a>(fields: &'a HashMap<&str, &str>, key: &str, line: usize) -> Result<&'a str> {
    fields
        .get(key)
        .copied()
        .ok_or_else(|| Error::Certificate { line, msg: format!("missing `{key}`") })
}

fn expect_prefix<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, key: &str) -> Result<(usize, &'a str)> {
    let (no, text) = lines.next().ok_or(Error::Certificate { line: 0, msg: format!("missing `{key}`") })?;
    let rest = text
        .strip_prefix(key)
        .ok_or_else(|| Error::Certificate { line: no, msg: format!("expected `{key}`") })?;
    Ok((no, rest.trim()))
}

/// Independently verifies certificate text. Structural problems are errors;
/// mathematical discrepancies are collected as failures.
pub fn verify_certificate_text(text: &str) -> Result<VerificationReport> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or(Error::Certificate { line: 0, msg: "empty".into() })?;
    if header != HEADER {
        return Err(Error::Certificate { line: 1, msg: "bad header".into() });
    }
    let (no, coeffs) = expect_prefix(&mut lines, "functional")?;
    let coeffs: Vec<i128> = coeffs.split(' ').map(|t| parse_int(t, no)).collect::<Result<_>>()?;
    let (no, w) = expect_prefix(&mut lines, "sigma12-weight")?;
    let w = parse_int(w, no)?;
    let (no, r_max) = expect_prefix(&mut lines, "r-max")?;
    let r_max = parse_int(r_max, no)?;

    let mut report = VerificationReport::default();
    let mut seen: HashMap<(i128, i128), i128> = HashMap::new();
    let mut expected = (2..=r_max).flat_map(|r| (1..=r / 2).filter(move |b| b.gcd(&r) == 1).map(move |b| (b, r)));
    let small = |b: i128, r: i128| if 12 * b <= r { b } else { 0 };
    let mut ended = false;

    for (no, text) in lines.by_ref() {
        if let Some(rest) = text.strip_prefix("end nodes=") {
            if parse_int(rest, no)? as usize != report.nodes {
                report.failures.push(format!("line {no}: node count mismatch"));
            }
            ended = true;
            break;
        }
        let mut toks = text.split(' ');
        if toks.next() != Some("node") {
            return Err(Error::Certificate { line: no, msg: "expected node record".into() });
        }
        let (b, r) = parse_point(toks.next().unwrap_or(""), no)?;
        let kind = toks.next().unwrap_or("");
        let fields: HashMap<&str, &str> = toks.filter_map(|t| t.split_once('=')).collect();
        report.nodes += 1;
        let mut fail = |msg: String| report.failures.push(format!("line {no} ({b}/{r}): {msg}"));

        if expected.next() != Some((b, r)) {
            fail("point out of canonical order".into());
        }

        let delta_at = |j: i128, b: i128, r: i128| parabola_delta(j, b, r);
        let mut direct = 0i128;
        for (i, &c) in coeffs.iter().enumerate() {
            match delta_at(i as i128 + 1, b, r) {
                Some(d) => direct += c * d,
                None => fail(format!("Δ^{} not integral", i + 1)),
            }
        }
        let recorded = parse_int(field(&fields, "xi_delta", no)?, no)?;
        if recorded == direct {
            report.direct_matches += 1;
        } else {
            fail(format!("xi_delta {recorded} but direct evaluation gives {direct}"));
        }

        // Ξ̄ = ΞΔ + Σ c_j jb(r − jb)/2r.
        let lin_num: i128 = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let jb = (i as i128 + 1) * b;
                c * jb * (r - jb)
            })
            .sum();
        let xi_bar = Rational::new(BigInt::from(direct * 2 * r + lin_num), BigInt::from(2 * r))?;
        let recorded_bar: Rational = field(&fields, "xi_bar", no)?
            .parse()
            .map_err(|_| Error::Certificate { line: no, msg: "bad xi_bar".into() })?;
        if recorded_bar != xi_bar {
            fail(format!("xi_bar {recorded_bar} but recomputation gives {xi_bar}"));
        }
        let target = w * small(b, r);
        if parse_int(field(&fields, "target", no)?, no)? != target {
            fail(format!("target should be {target}"));
        }
        if xi_bar < Rational::from_integer(BigInt::from(target)) {
            fail(format!("xi_bar {xi_bar} below target {target}"));
        }

        match kind {
            "atom" => {
                report.atoms += 1;
                if b != 1 {
                    fail("atom with b != 1".into());
                }
            }
            "base" | "split" => {
                if kind == "base" {
                    report.base += 1;
                } else {
                    report.splits += 1;
                }
                let (left, right) = field(&fields, "parents", no)?
                    .split_once(',')
                    .ok_or(Error::Certificate { line: no, msg: "bad parents".into() })?;
                let (b1, r1) = parse_point(left, no)?;
                let (b2, r2) = parse_point(right, no)?;
                if b1 + b2 != b || r1 + r2 != r {
                    fail("parents do not sum to the node".into());
                }
                if b1 * r2 - b2 * r1 != 1 {
                    fail("parents are not unimodular with larger slope first".into());
                }
                if !matches!(field(&fields, "det", no)?, "+1" | "-1") {
                    fail("det must be +1 or -1".into());
                }
                let mut total = 0i128;
                let terms = field(&fields, "terms", no)?;
                let mut covered = Vec::new();
                for term in terms.split(';').filter(|t| !t.is_empty()) {
                    let parts: Vec<&str> = term.split(':').collect();
                    if parts.len() != 3 {
                        return Err(Error::Certificate { line: no, msg: format!("bad term `{term}`") });
                    }
                    let j = parse_int(parts[0], no)?;
                    let offset = parse_int(parts[2], no)?;
                    covered.push(j);
                    let c = coeffs.get((j - 1) as usize).copied().unwrap_or(0);
                    let actual = match (delta_at(j, b, r), delta_at(j, b1, r1), delta_at(j, b2, r2)) {
                        (Some(d), Some(d1), Some(d2)) => d - d1 - d2,
                        _ => {
                            fail(format!("Δ^{j} not integral"));
                            continue;
                        }
                    };
                    if actual != offset {
                        fail(format!("offset at j = {j} is {actual}, recorded {offset}"));
                    }
                    let reps: Vec<(i128, i128)> = (1..=j / r1)
                        .filter(|x| j - x * r1 > 0 && (j - x * r1) % r2 == 0)
                        .map(|x| (x, (j - x * r1) / r2))
                        .collect();
                    let boxed = reps.iter().find(|&&(x, y)| x <= r2 && y <= r1);
                    let route_ok = match parts[1] {
                        "nodiff" => reps.is_empty() && offset == 0,
                        "outside" => !reps.is_empty() && boxed.is_none(),
                        other => match boxed {
                            Some(&(x, y)) => other == format!("diff({x},{y})") && offset == -x.min(y),
                            None => false,
                        },
                    };
                    if !route_ok {
                        fail(format!("route `{}` at j = {j} is not justified", parts[1]));
                    }
                    total += c * offset;
                }
                let support: Vec<i128> =
                    (1..=coeffs.len() as i128).filter(|&j| coeffs[(j - 1) as usize] != 0).collect();
                if covered != support {
                    fail("terms do not cover the functional's support".into());
                }
                if parse_int(field(&fields, "offset", no)?, no)? != total {
                    fail(format!("offset total should be {total}"));
                }
                let margin = w * (small(b1, r1) + small(b2, r2) - small(b, r)) + total;
                if parse_int(field(&fields, "margin", no)?, no)? != margin {
                    fail(format!("margin should be {margin}"));
                }
                if kind == "split" {
                    if margin < 0 {
                        fail(format!("negative induction margin {margin}"));
                    }
                    match (seen.get(&(b1, r1)), seen.get(&(b2, r2))) {
                        (Some(&d1), Some(&d2)) => {
                            if d1 + d2 + total != recorded {
                                fail("xi_delta differs from parents plus offset".into());
                            }
                        }
                        _ => fail("parents not recorded earlier".into()),
                    }
                }
            }
            other => fail(format!("unknown node kind `{other}`")),
        }
        seen.insert((b, r), recorded);
    }
    if !ended {
        return Err(Error::Certificate { line: 0, msg: "missing end record".into() });
    }
    if expected.next().is_some() {
        report.failures.push("certificate omits admissible points".into());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::{ineq1, ineq2};

    fn replay(form: &InequalityForm, r_max: u64) -> Certificate {
        proof_replay(form, r_max, &default_base_bounds(&form.functional, r_max)).unwrap()
    }

    #[test]
    fn two_fifths_node_for_first_inequality() {
        let cert = replay(&ineq1(), 5);
        let node = cert.node(2, 5).unwrap();
        let split = node.split.as_ref().unwrap();
        assert_eq!((split.larger.key(), split.smaller.key()), ((2, 1), (3, 1)));
        assert_eq!(node.xi_delta, (-4).into());
        assert_eq!(node.kind, NodeKind::Base);
    }

    #[test]
    fn offsets_plus_one_exactly_at_three_tenths_and_five_twelfths() {
        let cert = replay(&ineq2(), 12);
        let s = cert.summary();
        assert_eq!(s.nonzero_offsets, vec![((3, 10), 1.into()), ((5, 12), 1.into())]);
        assert!(s.all_hold);
    }

    #[test]
    fn first_inequality_equality_cases_up_to_twelve() {
        let s = replay(&ineq1(), 12).summary();
        assert_eq!(s.min_slack, Rational::zero());
        assert_eq!(
            s.min_slack_points,
            vec![
                (1, 2), (1, 3), (1, 4), (2, 5), (2, 7), (3, 7), (3, 8),
                (4, 9), (3, 10), (3, 11), (4, 11), (5, 11), (5, 12),
            ]
        );
    }

    #[test]
    fn second_inequality_two_fifths_has_zero_total_offset() {
        let cert = replay(&ineq2(), 5);
        let split = cert.node(2, 5).unwrap().split.clone().unwrap();
        let offsets: Vec<(u64, i64)> = split
            .terms
            .iter()
            .filter(|t| t.offset != BigInt::from(0))
            .map(|t| (t.j, i64::try_from(&t.offset).unwrap()))
            .collect();
        assert_eq!(offsets, vec![(5, -1), (7, -1), (10, -2), (12, -2)]);
        assert_eq!(split.offset_total, 0.into());
    }

    #[test]
    fn missing_atom_bound_is_reported() {
        let form = ineq1();
        let mut bounds = default_base_bounds(&form.functional, 6);
        bounds.remove(&OrbifoldPoint::new(1, 4).unwrap());
        assert_eq!(proof_replay(&form, 6, &bounds), Err(Error::MissingBaseBound { b: 1, r: 4 }));
    }

    #[test]
    fn render_verifies_clean() {
        for form in [ineq1(), ineq2()] {
            let report = replay(&form, 40).verify().unwrap();
            assert!(report.ok(), "{:?}", report.failures);
            assert_eq!(report.direct_matches, report.nodes);
        }
    }

    #[test]
    fn verifier_catches_tampering() {
        let text = replay(&ineq1(), 8).render();
        let tampered: String = text
            .lines()
            .map(|l| {
                if l.starts_with("node 3/8 ") {
                    let (head, _) = l.split_once(" xi_delta=").unwrap();
                    format!("{head} xi_delta=0 xi_bar=0 target=0\n")
                } else {
                    format!("{l}\n")
                }
            })
            .collect();
        assert_ne!(text, tampered);
        assert!(!verify_certificate_text(&tampered).unwrap().ok());
        let dropped: String = text.lines().filter(|l| !l.starts_with("node 3/7")).map(|l| format!("{l}\n")).collect();
        assert!(!verify_certificate_text(&dropped).unwrap().ok());
        let bad_offset = text.replacen(":nodiff:0", ":nodiff:1", 1);
        assert!(!verify_certificate_text(&bad_offset).unwrap().ok());
        assert!(verify_certificate_text("nonsense").is_err());
    }
}
