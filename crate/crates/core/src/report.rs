//! Serialization helpers shared by the report types, and the finding record.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize, Serializer};

use crate::ring::Elem;

pub fn serialize_big<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn serialize_opt_big<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

pub fn serialize_bigint<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn serialize_opt_bigint<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

pub fn serialize_ratio<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_ratio(v))
}

pub fn serialize_opt_ratio<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&fmt_ratio(v)),
        None => s.serialize_none(),
    }
}

/// `"num/den"` in lowest terms, always with a denominator.
pub fn fmt_ratio(v: &BigRational) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn big_to_f64(v: &BigUint) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}

pub fn ratio_to_f64(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// A paper-versus-oracle discrepancy, bound violation or audit failure.
/// `id` is stable across runs and is what a findings manifest lists.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Finding {
    pub id: String,
    pub detail: String,
    #[serde(default)]
    pub witnesses: Vec<String>,
}

impl Finding {
    pub fn new(id: impl Into<String>, detail: impl Into<String>) -> Self {
        Finding { id: id.into(), detail: detail.into(), witnesses: Vec::new() }
    }

    pub fn with_witnesses(mut self, w: Vec<String>) -> Self {
        self.witnesses = w;
        self
    }
}

/// An element as `c0+c1y+c2y^2`, zero terms dropped.
pub fn fmt_elem(x: &Elem) -> String {
    let terms: Vec<String> = x
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, c)| match i {
            0 => c.to_string(),
            1 if *c == 1 => "y".to_string(),
            1 => format!("{c}y"),
            _ if *c == 1 => format!("y^{i}"),
            _ => format!("{c}y^{i}"),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

/// `(x1,x2,...)`.
pub fn fmt_vector(v: &[Elem]) -> String {
    format!("({})", v.iter().map(fmt_elem).collect::<Vec<_>>().join(","))
}

/// `<(..),(..)>` for a list of generators.
pub fn fmt_span(gens: &[Vec<Elem>]) -> String {
    format!("<{}>", gens.iter().map(|g| fmt_vector(g)).collect::<Vec<_>>().join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_format() {
        assert_eq!(fmt_ratio(&ratio(4, 6)), "2/3");
        assert_eq!(fmt_ratio(&ratio(3, 1)), "3/1");
        assert_eq!(fmt_ratio(&ratio(-1, 2)), "-1/2");
    }
}
