//! Polytope input files.
//!
//! ```json
//! { "name": "triangle", "dim": 2, "vertices": [[0, 0], ["1/2", 0], [0, 1]] }
//! ```
//!
//! Coordinates are JSON integers or strings holding an integer or `p/q` with
//! `q > 0`. Floats are rejected.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use polyk_core::{Polytope, Rational};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coord(pub Rational);

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| format!("invalid rational {s:?}"))?;
    let den: BigInt = den.parse().map_err(|_| format!("invalid rational {s:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    if den.is_negative() {
        return Err(format!("negative denominator in {s:?}"));
    }
    Ok(Rational::new(num, den))
}

impl<'de> Deserialize<'de> for Coord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct CoordVisitor;

        impl Visitor<'_> for CoordVisitor {
            type Value = Coord;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a \"p/q\" string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Coord, E> {
                Ok(Coord(Rational::from_integer(v.into())))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Coord, E> {
                Ok(Coord(Rational::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Coord, E> {
                Err(E::custom(format!(
                    "floating-point coordinate {v} not accepted; write it as \"p/q\""
                )))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Coord, E> {
                parse_rational(v).map(Coord).map_err(E::custom)
            }
        }

        d.deserialize_any(CoordVisitor)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeFile {
    pub name: String,
    pub dim: usize,
    pub vertices: Vec<Vec<Coord>>,
}

#[derive(Debug)]
pub enum InputError {
    Io(String),
    Parse(String),
    Invalid(String),
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Io(m) => write!(f, "cannot read input: {m}"),
            InputError::Parse(m) => write!(f, "parse error: {m}"),
            InputError::Invalid(m) => write!(f, "invalid polytope: {m}"),
        }
    }
}

impl PolytopeFile {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        serde_json::from_str(text).map_err(|e| InputError::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn polytope(&self) -> Result<Polytope, InputError> {
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|c| c.0.clone()).collect())
            .collect();
        Polytope::new(self.dim, vertices)
            .map(|p| p.with_name(self.name.clone()))
            .map_err(|e| InputError::Invalid(e.to_string()))
    }
}

pub fn load(path: &Path) -> Result<Polytope, InputError> {
    PolytopeFile::read(path)?.polytope()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(
            parse_rational("3/6").unwrap(),
            Rational::new(1.into(), 2.into())
        );
        assert_eq!(
            parse_rational("-7").unwrap(),
            Rational::from_integer((-7).into())
        );
        assert!(parse_rational("1/0")
            .unwrap_err()
            .contains("zero denominator"));
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn parses_mixed_coordinates() {
        let f = PolytopeFile::parse(r#"{"name":"t","dim":2,"vertices":[[0,0],["1/2",0],[0,"1"]]}"#)
            .unwrap();
        assert_eq!(f.vertices[1][0], Coord(Rational::new(1.into(), 2.into())));
        assert_eq!(f.polytope().unwrap().name(), Some("t"));
    }

    #[test]
    fn rejects_floats_and_bad_denominators_with_line() {
        let err = PolytopeFile::parse("{\"name\":\"t\",\"dim\":1,\n\"vertices\":[[0],[0.5]]}")
            .unwrap_err();
        assert!(err.to_string().contains("floating-point"), "{err}");
        let err =
            PolytopeFile::parse("{\"name\":\"t\",\"dim\":1,\n\"vertices\":[[0],\n[\"1/0\"]]}")
                .unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("zero denominator") && msg.contains("line 3"),
            "{msg}"
        );
    }

    #[test]
    fn reports_invalid_polytopes() {
        let f = PolytopeFile::parse(
            r#"{"name":"t","dim":2,"vertices":[[0,0],[1,0],[0,1],["1/2","1/4"]]}"#,
        )
        .unwrap();
        let err = f.polytope().unwrap_err();
        assert_eq!(err.to_string(), "invalid polytope: point 3 is not extreme");
    }
}
