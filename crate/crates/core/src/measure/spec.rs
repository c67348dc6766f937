//! JSON description of a measure.
//!
//! ```json
//! {
//!   "dimension": 3,
//!   "atoms": [{"q": "1/8", "mass": "32/49"}, {"q": 2, "mass": "17/49"}],
//!   "density": [{"from": 1, "to": 2, "coeffs": ["1/9"]}],
//!   "singular": [{"weight": 0.5, "carrier": [0, 1], "family": "cantor", "depth": 24}]
//! }
//! ```
//!
//! Numbers are either JSON numbers or strings `"p/q"`; integers and strings
//! are kept as exact rationals, so a parse/serialize/parse cycle is the
//! identity. Density pieces may also carry `"powers": [{"coef", "exponent",
//! "anchor"}]` terms `coef·(t - anchor)^exponent`, and singular components
//! may use `"family": "bernoulli"` with a digit probability `"p"`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::Ratio;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::oracle::{DigitMeasure, Family};
use super::{ratio_f64, Atom, DensityPiece, PowerTerm, SingularComponent, WilliamsonMeasure};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalar {
    Exact(Ratio<i64>),
    Float(f64),
}

impl Scalar {
    pub fn value(&self) -> f64 {
        match *self {
            Scalar::Exact(r) => ratio_f64(r),
            Scalar::Float(x) => x,
        }
    }

    pub fn exact(&self) -> Option<Ratio<i64>> {
        match *self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

impl From<Ratio<i64>> for Scalar {
    fn from(r: Ratio<i64>) -> Self {
        Scalar::Exact(r)
    }
}

impl FromStr for Scalar {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if let Ok(r) = Ratio::<i64>::from_str(s) {
            return Ok(Scalar::Exact(r));
        }
        if let Some(r) = parse_decimal(s) {
            return Ok(Scalar::Exact(r));
        }
        Err(format!("`{s}` is not a rational of the form p/q"))
    }
}

fn parse_decimal(s: &str) -> Option<Ratio<i64>> {
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s),
    };
    let (int, frac) = body.split_once('.')?;
    if frac.len() > 17 || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let denom = 10i64.checked_pow(frac.len() as u32)?;
    let int: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
    let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    let numer = int.checked_mul(denom)?.checked_add(frac)?;
    Some(Ratio::new(sign * numer, denom))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Scalar::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(_) => s.serialize_str(&self.to_string()),
            Scalar::Float(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct ScalarVisitor;

        impl Visitor<'_> for ScalarVisitor {
            type Value = Scalar;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a string \"p/q\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Scalar, E> {
                Ok(Scalar::Exact(Ratio::from_integer(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Scalar, E> {
                i64::try_from(v)
                    .map(|v| Scalar::Exact(Ratio::from_integer(v)))
                    .map_err(|_| E::custom("integer out of range"))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Scalar, E> {
                Ok(Scalar::Float(v))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Scalar, E> {
                v.parse().map_err(E::custom)
            }
        }

        d.deserialize_any(ScalarVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub q: Scalar,
    pub mass: Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSpec {
    pub coef: Scalar,
    pub exponent: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub from: Scalar,
    pub to: Scalar,
    #[serde(default)]
    pub coeffs: Vec<Scalar>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub powers: Vec<PowerSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularSpec {
    pub weight: Scalar,
    pub carrier: [Scalar; 2],
    pub family: String,
    pub depth: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub dimension: usize,
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
    #[serde(default)]
    pub density: Vec<PieceSpec>,
    #[serde(default)]
    pub singular: Vec<SingularSpec>,
}

impl MeasureSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            location: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Parse { location, message } => Error::Parse {
                location: format!("{}: {location}", path.display()),
                message,
            },
            other => other,
        })
    }

    /// Pretty-printed JSON with keys in sorted order.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("spec values are always serializable");
        serde_json::to_string_pretty(&value).expect("values are always serializable")
    }

    pub fn build(&self) -> Result<WilliamsonMeasure> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| match (a.q.exact(), a.mass.exact()) {
                (Some(q), Some(m)) => Atom::exact(q, m),
                _ => Atom::new(a.q.value(), a.mass.value()),
            })
            .collect();
        let pieces = self
            .density
            .iter()
            .map(|p| {
                let from = p.from.value();
                DensityPiece::with_powers(
                    from,
                    p.to.value(),
                    p.coeffs.iter().map(Scalar::value).collect(),
                    p.powers
                        .iter()
                        .map(|w| PowerTerm {
                            coef: w.coef.value(),
                            anchor: w.anchor.map_or(from, |a| a.value()),
                            exponent: w.exponent.value(),
                        })
                        .collect(),
                )
            })
            .collect();
        let mut singular = Vec::with_capacity(self.singular.len());
        for (i, s) in self.singular.iter().enumerate() {
            let family = match s.family.as_str() {
                "cantor" => Family::Cantor { depth: s.depth },
                "bernoulli" => {
                    let p = s.p.map(|p| p.value()).unwrap_or(f64::NAN);
                    if !(p > 0.0 && p < 1.0) {
                        return Err(Error::Parse {
                            location: format!("singular[{i}].p"),
                            message: "bernoulli family needs a digit probability in (0,1)".into(),
                        });
                    }
                    Family::Bernoulli { p, depth: s.depth }
                }
                other => {
                    return Err(Error::Parse {
                        location: format!("singular[{i}].family"),
                        message: format!("unknown family `{other}`"),
                    })
                }
            };
            if s.depth == 0 || s.depth > 60 {
                return Err(Error::Parse {
                    location: format!("singular[{i}].depth"),
                    message: "depth must lie in 1..=60".into(),
                });
            }
            singular.push(SingularComponent::new(
                s.weight.value(),
                s.carrier[0].value(),
                s.carrier[1].value(),
                Arc::new(DigitMeasure::from_family(family)),
            ));
        }
        WilliamsonMeasure::new(self.dimension, atoms, pieces, singular)
    }

    pub fn from_measure(m: &WilliamsonMeasure) -> Self {
        let atoms = m
            .atoms()
            .iter()
            .map(|a| match (a.exact_location, a.exact_mass) {
                (Some(q), Some(w)) => AtomSpec { q: q.into(), mass: w.into() },
                _ => AtomSpec { q: a.location.into(), mass: a.mass.into() },
            })
            .collect();
        let density = m
            .pieces()
            .iter()
            .map(|p| PieceSpec {
                from: p.from().into(),
                to: p.to().into(),
                coeffs: p.coeffs().iter().map(|&c| c.into()).collect(),
                powers: p
                    .powers()
                    .iter()
                    .map(|w| PowerSpec {
                        coef: w.coef.into(),
                        exponent: w.exponent.into(),
                        anchor: Some(w.anchor.into()),
                    })
                    .collect(),
            })
            .collect();
        let singular = m
            .singular()
            .iter()
            .map(|s| {
                let (family, depth, p) = match s.oracle.family() {
                    Family::Cantor { depth } => ("cantor", depth, None),
                    Family::Bernoulli { p, depth } => ("bernoulli", depth, Some(p.into())),
                };
                SingularSpec {
                    weight: s.weight.into(),
                    carrier: [s.offset.into(), s.scale.into()],
                    family: family.to_string(),
                    depth,
                    p,
                }
            })
            .collect();
        Self { dimension: m.dimension(), atoms, density, singular }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TWO_ATOM: &str = r#"{"dimension": 3,
        "atoms": [{"q": "1/8", "mass": "32/49"}, {"q": 2, "mass": "17/49"}]}"#;

    #[test]
    fn parses_rationals_exactly() {
        let spec = MeasureSpec::from_json(TWO_ATOM).unwrap();
        assert_eq!(spec.atoms[0].mass, Scalar::Exact(Ratio::new(32, 49)));
        let m = spec.build().unwrap();
        assert_eq!(m.atoms()[0].exact_mass, Some(Ratio::new(32, 49)));
    }

    #[test]
    fn round_trip() {
        let spec = MeasureSpec::from_json(TWO_ATOM).unwrap();
        let again = MeasureSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(spec, again);
        let rebuilt = MeasureSpec::from_measure(&spec.build().unwrap());
        assert_eq!(rebuilt, spec);
    }

    #[test]
    fn keys_sorted() {
        let text = MeasureSpec::from_json(TWO_ATOM).unwrap().to_json();
        let a = text.find("\"atoms\"").unwrap();
        let d = text.find("\"dimension\"").unwrap();
        assert!(a < d);
        assert!(text.find("\"mass\"").unwrap() < text.find("\"q\"").unwrap());
    }

    #[test]
    fn parse_error_has_location() {
        let err = MeasureSpec::from_json("{\"dimension\": 2,\n \"atoms\": [{\"q\": \"1/0x\"}]}").unwrap_err();
        match err {
            Error::Parse { location, .. } => assert!(location.starts_with("line 2")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn decimal_strings_are_exact() {
        assert_eq!("0.25".parse::<Scalar>().unwrap(), Scalar::Exact(Ratio::new(1, 4)));
        assert_eq!("-1.5".parse::<Scalar>().unwrap(), Scalar::Exact(Ratio::new(-3, 2)));
    }

    proptest! {
        #[test]
        fn rational_round_trip(p in -100_000i64..100_000, q in 1i64..100_000, x in -1e6f64..1e6) {
            let spec = MeasureSpec {
                dimension: 2,
                atoms: vec![AtomSpec { q: Scalar::Exact(Ratio::new(p, q)), mass: Scalar::Float(x) }],
                density: vec![],
                singular: vec![],
            };
            let again = MeasureSpec::from_json(&spec.to_json()).unwrap();
            prop_assert_eq!(spec, again);
        }
    }
}
