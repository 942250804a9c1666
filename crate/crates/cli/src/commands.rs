//! Subcommand bodies. Each returns the text for standard output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use plurigeo_core::{
    default_base_bounds, derive_constants, enumerate_baskets, enumerate_candidates, find_m0, ineq1, ineq2,
    lemma_sweep, plurigenus, proof_replay, verify_basket, verify_certificate_text, verify_plurigenus_form,
    Basket, Candidate, Error, InequalityForm, LemmaRoute,
};
use serde_json::{json, Value};

use crate::input::{
    parse_basket_document, parse_basket_literal, parse_constraints, parse_document, read_source,
};
use crate::{Failure, Format};

fn line(value: Value) -> String {
    format!("{value}\n")
}

fn pair(p: (u64, u64)) -> Value {
    json!([p.0, p.1])
}

fn form(which: u8) -> InequalityForm {
    if which % 2 == 1 {
        ineq1()
    } else {
        ineq2()
    }
}

pub fn pluri(input: Option<&Path>, m_from: u64, m_to: u64, format: Format) -> Result<String, Failure> {
    if m_from < 2 || m_from > m_to {
        return Err(Failure::input(format!("need 2 <= m-from <= m-to, got {m_from}..{m_to}")));
    }
    let doc = parse_document(&read_source(input)?)?;
    let rows: Vec<_> = (m_from..=m_to).map(|m| plurigenus(&doc.invariants, m)).collect();
    Ok(match format {
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "m": r.m,
                        "chi_mk": r.chi_mk.to_string(),
                        "integral": r.is_integral,
                        "p_m": r.p_m.as_ref().map(ToString::to_string),
                    })
                })
                .collect();
            line(json!({
                "k3": doc.invariants.k3.to_string(),
                "chi": doc.invariants.chi_o.to_string(),
                "rows": rows,
            }))
        }
        Format::Csv => {
            let mut out = String::from("m,chi_mk,integral,p_m\n");
            for r in &rows {
                let p = r.p_m.as_ref().map(ToString::to_string).unwrap_or_default();
                let _ = writeln!(out, "{},{},{},{}", r.m, r.chi_mk, r.is_integral, p);
            }
            out
        }
    })
}

pub fn ineq(input: Option<&Path>, which: u8, basket: Option<&str>) -> Result<String, Failure> {
    let form = form(which);
    if which <= 2 {
        if basket.is_some() {
            return Err(Failure::input("forms 1 and 2 need a full document, not --basket"));
        }
        let doc = parse_document(&read_source(input)?)?;
        let report = verify_plurigenus_form(&doc.invariants, &form).map_err(|e| match e {
            Error::NonIntegralPlurigenus { .. } => Failure::input(format!("inconsistent invariants: {e}")),
            other => Failure::input(other.to_string()),
        })?;
        let out = line(json!({
            "which": which,
            "p_form": report.p_form.to_string(),
            "l_form": report.l_form.to_string(),
            "xi_bar": report.xi_bar.to_string(),
            "target": report.target.to_string(),
            "slack": report.slack.to_string(),
            "agree": report.agree,
            "pass": report.holds,
        }));
        return if report.holds { Ok(out) } else { Err(Failure::violation(out)) };
    }
    let basket: Basket = match basket {
        Some(text) => parse_basket_literal(text)?,
        None => parse_basket_document(&read_source(input)?)?,
    };
    let verdict = verify_basket(&form, &basket);
    let out = line(json!({
        "which": which,
        "xi_bar": verdict.value.to_string(),
        "target": verdict.target.to_string(),
        "slack": verdict.slack().to_string(),
        "pass": verdict.holds,
    }));
    if verdict.holds {
        Ok(out)
    } else {
        Err(Failure::violation(out))
    }
}

pub fn replay(which: u8, r_max: u64, out: Option<&Path>) -> Result<String, Failure> {
    let form = form(which);
    let bounds = default_base_bounds(&form.functional, r_max);
    let cert = proof_replay(&form, r_max, &bounds).map_err(|e| Failure::violation(format!("{e}\n")))?;
    let text = cert.render();
    if let Some(path) = out {
        fs::write(path, &text).map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))?;
    }
    let check = verify_certificate_text(&text).map_err(|e| Failure::violation(format!("{e}\n")))?;
    let summary = cert.summary();
    let verified = check.ok() && check.direct_matches == check.nodes;
    let offsets: Vec<Value> = summary
        .nonzero_offsets
        .iter()
        .map(|&(p, ref total)| json!({ "point": pair(p), "offset": total.to_string() }))
        .collect();
    let report = line(json!({
        "which": which,
        "r_max": r_max,
        "nodes": summary.nodes,
        "atoms": check.atoms,
        "base": check.base,
        "splits": check.splits,
        "min_slack": summary.min_slack.to_string(),
        "min_slack_points": summary.min_slack_points.iter().copied().map(pair).collect::<Vec<_>>(),
        "nonzero_offsets": offsets,
        "all_hold": summary.all_hold,
        "verified": verified,
        "failures": check.failures,
    }));
    if summary.all_hold && verified {
        Ok(report)
    } else {
        Err(Failure::violation(report))
    }
}

pub fn verify_cert(input: Option<&Path>) -> Result<String, Failure> {
    let text = read_source(input)?;
    let check = verify_certificate_text(&text).map_err(|e| Failure::input(e.to_string()))?;
    let out = line(json!({
        "nodes": check.nodes,
        "atoms": check.atoms,
        "base": check.base,
        "splits": check.splits,
        "direct_matches": check.direct_matches,
        "failures": check.failures,
        "pass": check.ok(),
    }));
    if check.ok() {
        Ok(out)
    } else {
        Err(Failure::violation(out))
    }
}

fn candidate_line(c: &Candidate) -> Result<String, Failure> {
    serde_json::to_string(c)
        .map(|s| s + "\n")
        .map_err(|e| Failure::io(format!("cannot serialize candidate: {e}")))
}

pub fn enumerate(input: Option<&Path>, baskets_only: bool, want_m0: bool) -> Result<String, Failure> {
    let constraints = parse_constraints(&read_source(input)?)?;
    let mut out = String::new();
    if baskets_only {
        for b in enumerate_baskets(&constraints).map_err(|e| Failure::input(e.to_string()))? {
            out.push_str(&line(json!({ "basket": b.to_pairs() })));
        }
        return Ok(out);
    }
    let candidates = enumerate_candidates(&constraints).map_err(|e| Failure::input(e.to_string()))?;
    for c in &candidates {
        out.push_str(&candidate_line(c)?);
    }
    if want_m0 {
        match find_m0(&candidates) {
            Ok(report) => {
                let witnesses: Vec<Value> = report
                    .witnesses
                    .iter()
                    .map(|c| json!({ "basket": c.basket.to_pairs(), "chi": c.chi_o.to_string(), "k3": c.k3.to_string() }))
                    .collect();
                out.push_str(&line(json!({ "m0": report.m0, "witnesses": witnesses })));
            }
            Err(e) => {
                out.push_str(&line(json!({ "m0": Value::Null, "error": e.to_string() })));
                return Err(Failure::violation(out));
            }
        }
    }
    Ok(out)
}

pub fn constants(m0: u64) -> Result<String, Failure> {
    let c = derive_constants(m0).map_err(|e| Failure::input(e.to_string()))?;
    Ok(line(json!({
        "m0_raw": c.m0_raw,
        "m0": c.m0,
        "t0": c.t0,
        "c1": c.c1.to_string(),
        "c1_threshold": c.c1_threshold,
        "c2": c.c2.to_string(),
        "m1": c.m1,
        "c_prime": c.c_prime.to_string(),
        "c_general": c.c_general.to_string(),
        "c_finite": c.c_finite.to_string(),
        "c": c.c.to_string(),
        "quoted_c_prime": c.quoted_c_prime.to_string(),
        "quoted_m1": c.quoted_m1,
        "c_prime_matches_quoted": c.c_prime == c.quoted_c_prime,
        "m1_matches_quoted": c.m1 == c.quoted_m1,
    })))
}

pub fn lemmas(r1_max: u64, r2_max: u64) -> Result<String, Failure> {
    if r1_max < 2 || r2_max < 2 {
        return Err(Failure::input("index bounds must be at least 2"));
    }
    let sweep = lemma_sweep(r1_max, r2_max);
    let mismatches: Vec<Value> = sweep
        .mismatches
        .iter()
        .map(|m| {
            let route = match m.route {
                LemmaRoute::NoDiff => "nodiff".to_string(),
                LemmaRoute::Diff { x, y } => format!("diff({x};{y})"),
                LemmaRoute::Outside => "outside".to_string(),
            };
            json!({ "p1": pair(m.p1), "p2": pair(m.p2), "n": m.n, "route": route })
        })
        .collect();
    let out = line(json!({
        "r1_max": r1_max,
        "r2_max": r2_max,
        "pairs": sweep.pairs,
        "nodiff_checked": sweep.nodiff_checked,
        "diff_checked": sweep.diff_checked,
        "outside_box": sweep.outside_box,
        "mismatches": mismatches,
        "pass": sweep.mismatches.is_empty(),
    }));
    if sweep.mismatches.is_empty() {
        Ok(out)
    } else {
        Err(Failure::violation(out))
    }
}
