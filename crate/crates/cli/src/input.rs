//! Reading invariants documents and constraint files.

use std::fs;
use std::io::{self, Read};
use std::path::Path;

use num_bigint::BigInt;
use plurigeo_core::{basket_validate, k3_from_p2, Basket, EnumConstraints, Rational, ThreefoldInvariants};
use serde::Deserialize;

use crate::Failure;

/// Reads a file, or standard input when no path (or `-`) is given.
pub fn read_source(path: Option<&Path>) -> Result<String, Failure> {
    match path {
        Some(p) if p != Path::new("-") => fs::read_to_string(p)
            .map_err(|e| Failure::io(format!("cannot read {}: {e}", p.display()))),
        _ => {
            let mut text = String::new();
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::io(format!("cannot read standard input: {e}")))?;
            Ok(text)
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    chi: Option<i64>,
    k3: Option<String>,
    p2: Option<i64>,
    basket: Vec<[u64; 2]>,
}

/// An invariants document: `chi`, exactly one of `k3` or `p2`, and `basket`.
#[derive(Debug, Clone)]
pub struct InvariantsDocument {
    pub invariants: ThreefoldInvariants,
}

fn parse_raw(text: &str) -> Result<RawDocument, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::input(format!("invalid document: {e}")))
}

fn parse_basket(pairs: &[[u64; 2]]) -> Result<Basket, Failure> {
    basket_validate(pairs.iter().map(|&[b, r]| (b, r)))
        .map_err(|e| Failure::input(format!("field `basket`: {e}")))
}

pub fn parse_document(text: &str) -> Result<InvariantsDocument, Failure> {
    let raw = parse_raw(text)?;
    let chi = raw.chi.ok_or_else(|| Failure::input("field `chi`: missing"))?;
    let chi = BigInt::from(chi);
    let basket = parse_basket(&raw.basket)?;
    let k3 = match (raw.k3, raw.p2) {
        (Some(k3), None) => k3
            .parse::<Rational>()
            .map_err(|e| Failure::input(format!("field `k3`: {e}")))?,
        (None, Some(p2)) => k3_from_p2(&chi, &basket, &BigInt::from(p2)),
        (Some(_), Some(_)) => return Err(Failure::input("fields `k3` and `p2`: give exactly one")),
        (None, None) => return Err(Failure::input("fields `k3` and `p2`: one is required")),
    };
    Ok(InvariantsDocument { invariants: ThreefoldInvariants::new(k3, chi, basket) })
}

/// Only the `basket` field of a document; the others are ignored.
pub fn parse_basket_document(text: &str) -> Result<Basket, Failure> {
    parse_basket(&parse_raw(text)?.basket)
}

/// A basket given inline as a list of pairs, e.g. `[[1,5],[1,6]]`.
pub fn parse_basket_literal(text: &str) -> Result<Basket, Failure> {
    let pairs: Vec<[u64; 2]> =
        serde_json::from_str(text).map_err(|e| Failure::input(format!("field `basket`: {e}")))?;
    parse_basket(&pairs)
}

pub fn parse_constraints(text: &str) -> Result<EnumConstraints, Failure> {
    let c: EnumConstraints =
        serde_json::from_str(text).map_err(|e| Failure::input(format!("invalid constraints: {e}")))?;
    c.validate().map_err(|e| Failure::input(e.to_string()))?;
    Ok(c)
}
