//! JSON form of an [`ActionSpec`].
//!
//! ```json
//! { "d": 2, "noetherian": true,
//!   "components": [
//!     { "multiplicity": 1, "char": 0, "min_poly": [0, 1], "xi": [[2, 1], [3, 1]] },
//!     { "multiplicity": 1, "char": 2,
//!       "generators": [ { "terms": [ { "exp": [0, 0], "coeff": 1 } ] } ] } ] }
//! ```
//!
//! Each `xi` entry lists `[num, den]` pairs, one per power-basis coordinate.
//! Integers too large for 64 bits may be given as decimal strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{ActionSpec, Component, LaurentPolynomial, PrimeComponent};
use crate::algebra::IntPolynomial;
use crate::error::{Error, Result};
use crate::field::build_field;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    d: usize,
    #[serde(default = "default_true")]
    noetherian: bool,
    components: Vec<RawComponent>,
}

fn default_true() -> bool {
    true
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    multiplicity: u32,
    char: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min_poly: Option<Vec<Int>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    xi: Option<Vec<Vec<Int>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generators: Option<Vec<RawGenerator>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    terms: Vec<RawTerm>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    exp: Vec<i64>,
    coeff: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Int {
    Small(i64),
    Big(String),
}

impl Int {
    fn value(&self, path: &str) -> Result<BigInt> {
        match self {
            Int::Small(v) => Ok(BigInt::from(*v)),
            Int::Big(s) => s.trim().parse().map_err(|_| schema(path, format!("not an integer: {s:?}"))),
        }
    }

    fn from_bigint(x: &BigInt) -> Self {
        match x.to_i64() {
            Some(v) => Int::Small(v),
            None => Int::Big(x.to_string()),
        }
    }
}

fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::Schema { path: path.to_string(), message: message.into() }
}

fn at(path: &str, e: Error) -> Error {
    match e {
        Error::Schema { .. } => e,
        other => schema(path, other.to_string()),
    }
}

/// Parses and fully validates a spec document. Every error carries the JSON
/// path of the offending value.
pub fn parse_spec(document: &str) -> Result<ActionSpec> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let raw: RawSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(if path.is_empty() || path == "." || path == "?" { "$" } else { &path }, e.into_inner().to_string())
    })?;
    if raw.d == 0 {
        return Err(schema("d", "must be at least 1"));
    }
    if raw.components.is_empty() {
        return Err(schema("components", "at least one component is required"));
    }
    let mut comps = Vec::with_capacity(raw.components.len());
    for (ci, rc) in raw.components.iter().enumerate() {
        let base = format!("components[{ci}]");
        if rc.multiplicity == 0 {
            return Err(schema(&format!("{base}.multiplicity"), "must be at least 1"));
        }
        let prime = if rc.char == 0 {
            parse_char0(rc, raw.d, &base)?
        } else {
            parse_charp(rc, raw.d, &base)?
        };
        comps.push(Component { prime, multiplicity: rc.multiplicity });
    }
    ActionSpec::new(raw.d, raw.noetherian, comps).map_err(|e| at("components", e))
}

fn parse_char0(rc: &RawComponent, d: usize, base: &str) -> Result<PrimeComponent> {
    if rc.generators.is_some() {
        return Err(schema(&format!("{base}.generators"), "not allowed when char = 0"));
    }
    let mp_path = format!("{base}.min_poly");
    let mp = rc.min_poly.as_ref().ok_or_else(|| schema(&mp_path, "required when char = 0"))?;
    let coeffs = mp
        .iter()
        .enumerate()
        .map(|(i, c)| c.value(&format!("{mp_path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let field = build_field(&IntPolynomial::new(coeffs)).map_err(|e| at(&mp_path, e))?;
    let xi_path = format!("{base}.xi");
    let xi = rc.xi.as_ref().ok_or_else(|| schema(&xi_path, "required when char = 0"))?;
    if xi.len() != d {
        return Err(schema(&xi_path, format!("has {} entries, expected d = {d}", xi.len())));
    }
    let n = field.degree();
    let mut elems = Vec::with_capacity(d);
    for (i, flat) in xi.iter().enumerate() {
        let p = format!("{xi_path}[{i}]");
        if flat.len() != 2 * n {
            return Err(schema(&p, format!("has {} integers, expected {} (num/den per coordinate)", flat.len(), 2 * n)));
        }
        let mut coords = Vec::with_capacity(n);
        for k in 0..n {
            let num = flat[2 * k].value(&format!("{p}[{}]", 2 * k))?;
            let den = flat[2 * k + 1].value(&format!("{p}[{}]", 2 * k + 1))?;
            if den.is_zero() {
                return Err(schema(&format!("{p}[{}]", 2 * k + 1), "zero denominator"));
            }
            coords.push(BigRational::new(num, den));
        }
        let x = field.element(coords).map_err(|e| at(&p, e))?;
        if x.is_zero() {
            return Err(schema(&p, "xi coordinate must be nonzero"));
        }
        elems.push(x);
    }
    PrimeComponent::char0(field, elems).map_err(|e| at(base, e))
}

fn parse_charp(rc: &RawComponent, d: usize, base: &str) -> Result<PrimeComponent> {
    let q = rc.char;
    if !crate::algebra::fp::is_prime(q) {
        return Err(schema(&format!("{base}.char"), format!("{q} is not 0 or a prime")));
    }
    if rc.min_poly.is_some() || rc.xi.is_some() {
        return Err(schema(base, "min_poly and xi are only allowed when char = 0"));
    }
    let gp = format!("{base}.generators");
    let raw = rc.generators.as_ref().ok_or_else(|| schema(&gp, "required when char > 0"))?;
    let mut gens = Vec::with_capacity(raw.len());
    for (gi, g) in raw.iter().enumerate() {
        let p = format!("{gp}[{gi}]");
        for (ti, t) in g.terms.iter().enumerate() {
            if t.exp.len() != d {
                return Err(schema(&format!("{p}.terms[{ti}].exp"), format!("has length {}, expected d = {d}", t.exp.len())));
            }
        }
        let lp = LaurentPolynomial::new(q, d, g.terms.iter().map(|t| (t.exp.clone(), t.coeff))).map_err(|e| at(&p, e))?;
        if lp.is_zero() {
            return Err(schema(&p, format!("generator is zero mod {q}")));
        }
        gens.push(lp);
    }
    PrimeComponent::charp(q, d, gens).map_err(|e| at(base, e))
}

/// Serializes to the document format accepted by [`parse_spec`].
pub fn to_json(spec: &ActionSpec) -> String {
    let raw = RawSpec {
        d: spec.d(),
        noetherian: spec.noetherian(),
        components: spec
            .components()
            .iter()
            .map(|c| match &c.prime {
                PrimeComponent::Char0 { field, xi } => RawComponent {
                    multiplicity: c.multiplicity,
                    char: 0,
                    min_poly: Some(field.min_poly().coeffs().iter().map(Int::from_bigint).collect()),
                    xi: Some(
                        xi.iter()
                            .map(|x| {
                                x.coords()
                                    .iter()
                                    .flat_map(|q| [Int::from_bigint(q.numer()), Int::from_bigint(q.denom())])
                                    .collect()
                            })
                            .collect(),
                    ),
                    generators: None,
                },
                PrimeComponent::CharP { q, generators, .. } => RawComponent {
                    multiplicity: c.multiplicity,
                    char: *q,
                    min_poly: None,
                    xi: None,
                    generators: Some(
                        generators
                            .iter()
                            .map(|g| RawGenerator {
                                terms: g.terms().map(|(e, c)| RawTerm { exp: e.clone(), coeff: c as i64 }).collect(),
                            })
                            .collect(),
                    ),
                },
            })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("spec serialization cannot fail")
}
