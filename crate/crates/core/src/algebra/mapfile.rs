//! The JSON map file format.
//!
//! ```json
//! { "cyclotomic_order": 1, "num": [["0/1"], ["0/1"], ["1/1"]], "den": [["1/1"]] }
//! ```
//!
//! Each coefficient is an array of φ(m) strings `"p/q"`, the power-basis
//! coordinates (index i is the coefficient of ζ^i). Polynomials are listed
//! lowest degree first. Output is always the normalized map, so parsing a
//! non-normalized file and writing it back does not reproduce the input.

use std::path::Path;

use rug::Rational;
use serde::{Deserialize, Serialize};

use super::cyclotomic::{euler_phi, CycElement};
use super::poly::Polynomial;
use super::ratmap::RationalMap;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub cyclotomic_order: u32,
    pub num: Vec<Vec<String>>,
    pub den: Vec<Vec<String>>,
}

impl MapFile {
    pub fn from_map(map: &RationalMap) -> Self {
        let encode = |p: &Polynomial| -> Vec<Vec<String>> {
            p.coeffs()
                .iter()
                .map(|c| {
                    c.coeffs()
                        .iter()
                        .map(|r| format!("{}/{}", r.numer(), r.denom()))
                        .collect()
                })
                .collect()
        };
        MapFile {
            cyclotomic_order: map.order(),
            num: encode(map.num()),
            den: encode(map.den()),
        }
    }

    pub fn to_map(&self) -> Result<RationalMap> {
        let m = self.cyclotomic_order;
        if m == 0 {
            return Err(Error::InvalidCoefficient {
                field: "cyclotomic_order".into(),
                msg: "must be a positive integer".into(),
            });
        }
        let num = decode(m, &self.num, "num")?;
        let den = decode(m, &self.den, "den")?;
        RationalMap::new(num, den)
    }
}

fn decode(m: u32, coeffs: &[Vec<String>], name: &str) -> Result<Polynomial> {
    let phi = euler_phi(m);
    let mut out = Vec::with_capacity(coeffs.len());
    for (i, coords) in coeffs.iter().enumerate() {
        if coords.len() != phi {
            return Err(Error::InvalidCoefficient {
                field: format!("{name}[{i}]"),
                msg: format!("expected {phi} power-basis coordinates, found {}", coords.len()),
            });
        }
        let mut rs = Vec::with_capacity(phi);
        for (j, s) in coords.iter().enumerate() {
            let r = parse_rational(s).map_err(|msg| Error::InvalidCoefficient {
                field: format!("{name}[{i}][{j}]"),
                msg,
            })?;
            rs.push(r);
        }
        out.push(CycElement::from_coeffs(m, rs)?);
    }
    Ok(Polynomial::from_coeffs(m, out))
}

fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let t = s.trim();
    let bad = || format!("`{s}` is not a rational number p/q");
    if t.is_empty() || t.chars().any(|c| !(c.is_ascii_digit() || c == '-' || c == '+' || c == '/')) {
        return Err(bad());
    }
    let parsed = Rational::parse(t).map_err(|_| bad())?;
    if let Some((_, q)) = t.split_once('/') {
        if q.trim_start_matches(['+', '-']).chars().all(|c| c == '0') {
            return Err(format!("`{s}` has a zero denominator"));
        }
    }
    Ok(Rational::from(parsed))
}

/// Canonical JSON text of a map (pretty-printed, trailing newline).
pub fn to_json(map: &RationalMap) -> String {
    let mut s = serde_json::to_string_pretty(&MapFile::from_map(map)).expect("serializable");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<RationalMap> {
    let file: MapFile = serde_json::from_str(text).map_err(|e| Error::MalformedJson {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    file.to_map()
}

pub fn read_map(path: impl AsRef<Path>) -> Result<RationalMap> {
    from_json(&std::fs::read_to_string(path)?)
}

pub fn write_map(map: &RationalMap, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_json(map))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_z_squared() {
        let f = from_json(r#"{"cyclotomic_order":1,"num":[["0/1"],["0/1"],["1/1"]],"den":[["1/1"]]}"#)
            .unwrap();
        assert_eq!(f, RationalMap::polynomial(Polynomial::from_ints(1, &[0, 0, 1])));
    }

    #[test]
    fn zero_denominator_rejected() {
        let err = from_json(r#"{"cyclotomic_order":1,"num":[["1/1"]],"den":[["0/1"],["0/1"]]}"#)
            .unwrap_err();
        assert!(matches!(err, Error::ZeroDenominator));
    }

    #[test]
    fn non_normalized_input_is_reduced() {
        let text = r#"{"cyclotomic_order":1,"num":[["-1/1"],["0/1"],["1/1"]],"den":[["-1/1"],["1/1"]]}"#;
        let f = from_json(text).unwrap();
        assert_eq!(f, RationalMap::polynomial(Polynomial::from_ints(1, &[1, 1])));
        let back = serde_json::to_value(MapFile::from_map(&f)).unwrap();
        let orig: serde_json::Value = serde_json::from_str(text).unwrap();
        assert_ne!(back, orig);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let err = from_json(r#"{"cyclotomic_order":1,"num":[["x"]],"den":[["1"]]}"#).unwrap_err();
        match err {
            Error::InvalidCoefficient { field, .. } => assert_eq!(field, "num[0][0]"),
            e => panic!("unexpected {e:?}"),
        }
        let err = from_json("{\n \"cyclotomic_order\": 1,\n \"num\": [[\"1/1\"]\n").unwrap_err();
        assert!(matches!(err, Error::MalformedJson { line: 4, .. } | Error::MalformedJson { line: 3, .. }));
        let err = from_json(r#"{"cyclotomic_order":1,"num":[["1/0"]],"den":[["1"]]}"#).unwrap_err();
        assert!(matches!(err, Error::InvalidCoefficient { .. }));
        let err = from_json(r#"{"cyclotomic_order":3,"num":[["1/1"]],"den":[["1"],["2"]]}"#).unwrap_err();
        assert!(matches!(err, Error::InvalidCoefficient { .. }));
    }
}
