//! TOML input documents.

use std::collections::BTreeMap;

use killing_web::scalar::parse_rational;
use killing_web::tensor::{act_from_components, Act, KillingVectorParams};
use killing_web::{Error, Rational};
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Act,
    KillingVector,
    Potential,
    Pipeline,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileOptions {
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub mode: Option<String>,
}

/// Exact scalar written as an integer, a decimal or a `"p/q"` string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Scalar {
    pub fn to_rational(&self) -> Result<Rational, String> {
        match self {
            Scalar::Int(n) => Ok(Rational::from_integer((*n).into())),
            Scalar::Float(f) => parse_rational(&f.to_string()).ok_or_else(|| format!("not a finite number: {f}")),
            Scalar::Text(s) => parse_rational(s).ok_or_else(|| format!("not a rational: {s:?}")),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub kind: Kind,
    #[serde(default)]
    pub options: FileOptions,
    /// Sparse `C_ijkl`, keyed `"C1212"` or `"1212"`.
    pub components: Option<BTreeMap<String, Scalar>>,
    pub points: Option<Vec<[Scalar; 4]>>,
    /// Killing vector as a combination of `R12..R34` and `X1..X4`.
    pub vector: Option<BTreeMap<String, Scalar>>,
    pub potential: Option<String>,
    pub relations: Option<Vec<String>>,
    pub others_zero: Option<bool>,
}

#[derive(Debug)]
pub enum InputError {
    Parse(String),
    Invariant(Error),
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InputError::Parse(s) => write!(f, "parse error: {s}"),
            InputError::Invariant(e) => write!(f, "{e}"),
        }
    }
}

fn parse_err(s: impl Into<String>) -> InputError {
    InputError::Parse(s.into())
}

impl InputDocument {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        let doc: InputDocument = toml::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        doc.check_fields()?;
        Ok(doc)
    }

    fn check_fields(&self) -> Result<(), InputError> {
        let present = [
            ("components", self.components.is_some()),
            ("points", self.points.is_some()),
            ("vector", self.vector.is_some()),
            ("potential", self.potential.is_some()),
            ("relations", self.relations.is_some()),
            ("others_zero", self.others_zero.is_some()),
        ];
        let (required, allowed): (&[&str], &[&str]) = match self.kind {
            Kind::Act => (&["components"], &["components", "points"]),
            Kind::KillingVector => (&["vector"], &["vector"]),
            Kind::Potential => (&["potential"], &["potential", "components"]),
            Kind::Pipeline => (&["potential"], &["potential", "relations", "others_zero"]),
        };
        for (name, here) in present {
            if here && !allowed.contains(&name) {
                return Err(parse_err(format!("key `{name}` is not valid for kind {:?}", self.kind)));
            }
            if !here && required.contains(&name) {
                return Err(parse_err(format!("kind {:?} requires `{name}`", self.kind)));
            }
        }
        Ok(())
    }

    pub fn act(&self) -> Result<Option<Act<Rational>>, InputError> {
        let Some(comps) = &self.components else { return Ok(None) };
        let mut entries = Vec::with_capacity(comps.len());
        for (key, value) in comps {
            let digits = key.strip_prefix('C').unwrap_or(key);
            let idx: Vec<usize> = digits.chars().filter_map(|c| c.to_digit(10).map(|d| d as usize)).collect();
            if idx.len() != 4 || digits.chars().count() != 4 {
                return Err(parse_err(format!("component key {key:?} must be C followed by four digits")));
            }
            let v = value.to_rational().map_err(parse_err)?;
            entries.push(([idx[0], idx[1], idx[2], idx[3]], v));
        }
        act_from_components(&entries).map(Some).map_err(InputError::Invariant)
    }

    pub fn points(&self) -> Result<Vec<[Rational; 4]>, InputError> {
        let Some(pts) = &self.points else { return Ok(Vec::new()) };
        pts.iter()
            .map(|p| {
                let mut out: [Rational; 4] = std::array::from_fn(|_| Rational::from_integer(0.into()));
                for (k, s) in p.iter().enumerate() {
                    out[k] = s.to_rational().map_err(parse_err)?;
                }
                Ok(out)
            })
            .collect()
    }

    pub fn killing_vector(&self) -> Result<Option<KillingVectorParams<Rational>>, InputError> {
        let Some(terms) = &self.vector else { return Ok(None) };
        let mut kv = KillingVectorParams::<Rational>::zero();
        for (key, value) in terms {
            let v = value.to_rational().map_err(parse_err)?;
            let digits: Vec<usize> = key[1..].chars().filter_map(|c| c.to_digit(10).map(|d| d as usize)).collect();
            let basis = match (key.chars().next(), digits.as_slice()) {
                (Some('R'), [i, j]) if (1..=4).contains(i) && (1..=4).contains(j) && i != j && key.len() == 3 => {
                    KillingVectorParams::rotation(i - 1, j - 1)
                }
                (Some('X'), [i]) if (1..=4).contains(i) && key.len() == 2 => KillingVectorParams::translation(i - 1),
                _ => return Err(parse_err(format!("vector key {key:?} must be Rij or Xi"))),
            };
            kv = kv.add(&basis.scale(&v));
        }
        Ok(Some(kv))
    }
}
