//! Text formats: group spec strings, function files and family spec strings.
//!
//! Group specs are `gf:p^e[:c0,c1,...,1]` (modulus coefficients, constant
//! first), `zn:n1xn2x...`, and `cayley:<path>` pointing at a JSON file
//! `{"order": n, "add": [[...], ...]}`. A function file is
//! `{"group": <spec>, "table": [...]}` or `{"group": <spec>, "poly": "..."}`.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{is_prime, parse_poly, AlgebraError, GroupTable, DEFAULT_ORDER_LIMIT};
use crate::func::FuncTable;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("bad group spec {spec:?}: {msg}")]
    GroupSpec { spec: String, msg: String },
    #[error("bad family spec {spec:?}: {msg}")]
    FamilySpec { spec: String, msg: String },
    #[error("function file: {0}")]
    FunctionFile(String),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub type Result<T> = std::result::Result<T, InputError>;

fn group_err(spec: &str, msg: impl Into<String>) -> InputError {
    InputError::GroupSpec {
        spec: spec.to_string(),
        msg: msg.into(),
    }
}

fn parse_list(spec: &str, text: &str, sep: char) -> Result<Vec<usize>> {
    text.split(sep)
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| group_err(spec, format!("expected an integer, found {t:?}")))
        })
        .collect()
}

/// `(p, e)` from `p^e`, or from a bare prime power such as `9`.
fn parse_prime_power(spec: &str, text: &str) -> Result<(usize, usize)> {
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| group_err(spec, format!("expected an integer, found {t:?}")))
    };
    if let Some((p, e)) = text.split_once('^') {
        return Ok((parse(p)?, parse(e)?));
    }
    let q = parse(text)?;
    if q < 2 {
        return Err(group_err(spec, "field order must be at least 2"));
    }
    let p = (2..=q).find(|d| q % d == 0).unwrap();
    let mut e = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    if r != 1 || !is_prime(p as u64) {
        return Err(group_err(spec, format!("{q} is not a prime power")));
    }
    Ok((p, e))
}

#[derive(Deserialize)]
struct CayleyFile {
    order: usize,
    add: Vec<Vec<usize>>,
}

pub fn parse_group(spec: &str) -> Result<Arc<GroupTable>> {
    parse_group_with_limit(spec, DEFAULT_ORDER_LIMIT)
}

pub fn parse_group_with_limit(spec: &str, limit: usize) -> Result<Arc<GroupTable>> {
    let spec = spec.trim();
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| group_err(spec, "expected gf:, zn: or cayley:"))?;
    let group = match kind {
        "gf" => {
            let (pe, modulus) = match rest.split_once(':') {
                Some((pe, m)) => (pe, Some(parse_list(spec, m, ',')?)),
                None => (rest, None),
            };
            let (p, e) = parse_prime_power(spec, pe)?;
            GroupTable::field_with_limit(p, e, modulus.as_deref(), limit)?
        }
        "zn" => GroupTable::cyclic_product_with_limit(&parse_list(spec, rest, 'x')?, limit)?,
        "cayley" => {
            let text = std::fs::read_to_string(rest).map_err(|source| InputError::Io {
                path: rest.to_string(),
                source,
            })?;
            let file: CayleyFile = serde_json::from_str(&text)?;
            if file.add.len() != file.order {
                return Err(group_err(
                    spec,
                    format!("order {} but {} rows", file.order, file.add.len()),
                ));
            }
            GroupTable::from_cayley_with_limit(&file.add, limit)?
        }
        other => return Err(group_err(spec, format!("unknown group kind {other:?}"))),
    };
    Ok(Arc::new(group))
}

/// On-disk form of a function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionFile {
    pub group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<String>,
}

impl FunctionFile {
    pub fn from_table(group_spec: &str, f: &FuncTable) -> Self {
        FunctionFile {
            group: group_spec.to_string(),
            table: Some(f.values().to_vec()),
            poly: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn load(&self) -> Result<FuncTable> {
        let group = parse_group(&self.group)?;
        function_from_parts(&group, self.table.as_deref(), self.poly.as_deref())
    }
}

/// Builds a function from exactly one of a table or a polynomial string.
pub fn function_from_parts(
    group: &Arc<GroupTable>,
    table: Option<&[usize]>,
    poly: Option<&str>,
) -> Result<FuncTable> {
    match (table, poly) {
        (Some(t), None) => Ok(FuncTable::new(group.clone(), t.to_vec())?),
        (None, Some(p)) => Ok(parse_poly(p, group)?.eval(group)?),
        (Some(_), Some(_)) => Err(InputError::FunctionFile(
            "give either a table or a polynomial, not both".into(),
        )),
        (None, None) => Err(InputError::FunctionFile(
            "missing table or polynomial".into(),
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    /// `ppoly:<group>:a0,a1,...`
    PPolynomial { group: String, coeffs: Vec<usize> },
    /// `quadchar:p`
    QuadraticCharacter(usize),
    /// `monomial:<group>:d`
    Monomial { group: String, exponent: u64 },
}

pub fn parse_family(spec: &str) -> Result<FamilySpec> {
    let err = |msg: &str| InputError::FamilySpec {
        spec: spec.to_string(),
        msg: msg.to_string(),
    };
    let spec_t = spec.trim();
    let (kind, rest) = spec_t
        .split_once(':')
        .ok_or_else(|| err("expected ppoly:, quadchar: or monomial:"))?;
    let split_last = |rest: &str| {
        rest.rsplit_once(':')
            .map(|(g, a)| (g.to_string(), a.to_string()))
            .ok_or_else(|| err("expected <group>:<parameters>"))
    };
    match kind {
        "ppoly" => {
            let (group, args) = split_last(rest)?;
            let coeffs = args
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| err("coefficients must be element codes"))?;
            Ok(FamilySpec::PPolynomial { group, coeffs })
        }
        "quadchar" => rest
            .trim()
            .parse()
            .map(FamilySpec::QuadraticCharacter)
            .map_err(|_| err("expected a prime")),
        "monomial" => {
            let (group, d) = split_last(rest)?;
            let exponent = d.trim().parse().map_err(|_| err("expected an exponent"))?;
            Ok(FamilySpec::Monomial { group, exponent })
        }
        _ => Err(err("unknown family")),
    }
}
