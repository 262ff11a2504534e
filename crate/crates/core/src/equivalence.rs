//! Compositions, affine maps and affine/EA transforms, plus permutation parsing.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, GroupTable};
use crate::func::FuncTable;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivalenceError {
    #[error("{0} is not a permutation")]
    NotPermutation(&'static str),
    #[error("map is not additive: L({x} + {y}) != L({x}) + L({y})")]
    NotAdditive { x: usize, y: usize },
    #[error("cycle notation, position {pos}: {msg}")]
    Cycle { pos: usize, msg: String },
    #[error("one-line permutation: {0}")]
    OneLine(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub type Result<T> = std::result::Result<T, EquivalenceError>;

const EXHAUSTIVE_ADDITIVITY: usize = 64;
const ADDITIVITY_SAMPLES: usize = 10_000;

/// `x -> L(x) + c` with `L` additive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AffineMap {
    #[serde(serialize_with = "values")]
    linear: FuncTable,
    constant: usize,
}

fn values<S: serde::Serializer>(t: &FuncTable, s: S) -> std::result::Result<S::Ok, S::Error> {
    t.values().serialize(s)
}

fn check_additive(l: &FuncTable) -> Result<()> {
    let g = l.group();
    let q = l.order();
    let bad = |x: usize, y: usize| l.get(g.add(x, y)) != g.add(l.get(x), l.get(y));
    if q <= EXHAUSTIVE_ADDITIVITY {
        for x in 0..q {
            for y in 0..q {
                if bad(x, y) {
                    return Err(EquivalenceError::NotAdditive { x, y });
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(q as u64);
        for _ in 0..ADDITIVITY_SAMPLES {
            let (x, y) = (rng.gen_range(0..q), rng.gen_range(0..q));
            if bad(x, y) {
                return Err(EquivalenceError::NotAdditive { x, y });
            }
        }
    }
    Ok(())
}

impl AffineMap {
    pub fn new(linear: FuncTable, constant: usize) -> Result<Self> {
        linear.group().check_element(constant)?;
        check_additive(&linear)?;
        Ok(AffineMap { linear, constant })
    }

    /// `a*x + b` over a field.
    pub fn scalar(field: &Arc<GroupTable>, a: usize, b: usize) -> Result<Self> {
        field.check_element(a)?;
        let mut vals = Vec::with_capacity(field.order());
        for x in field.elements() {
            vals.push(field.mul(a, x)?);
        }
        AffineMap::new(FuncTable::new(field.clone(), vals)?, b)
    }

    pub fn identity(group: &Arc<GroupTable>) -> Self {
        AffineMap {
            linear: FuncTable::identity(group.clone()),
            constant: 0,
        }
    }

    pub fn zero(group: &Arc<GroupTable>) -> Self {
        AffineMap {
            linear: FuncTable::constant(group.clone(), 0).expect("0 is an element"),
            constant: 0,
        }
    }

    pub fn linear(&self) -> &FuncTable {
        &self.linear
    }

    pub fn constant(&self) -> usize {
        self.constant
    }

    pub fn is_permutation(&self) -> bool {
        self.linear.is_permutation()
    }

    pub fn table(&self) -> FuncTable {
        let g = self.linear.group();
        FuncTable::from_fn(g.clone(), |x| g.add(self.linear.get(x), self.constant))
            .expect("sums are group elements")
    }
}

fn require_permutation(phi: &FuncTable, what: &'static str) -> Result<()> {
    if phi.is_permutation() {
        Ok(())
    } else {
        Err(EquivalenceError::NotPermutation(what))
    }
}

/// `f ∘ φ`.
pub fn compose_right(f: &FuncTable, phi: &FuncTable) -> Result<FuncTable> {
    require_permutation(phi, "phi")?;
    Ok(f.compose(phi)?)
}

/// `φ ∘ f`.
pub fn compose_left(phi: &FuncTable, f: &FuncTable) -> Result<FuncTable> {
    require_permutation(phi, "phi")?;
    Ok(phi.compose(f)?)
}

/// `A1 ∘ f ∘ A2`.
pub fn affine_transform(f: &FuncTable, a1: &AffineMap, a2: &AffineMap) -> Result<FuncTable> {
    if !a1.is_permutation() {
        return Err(EquivalenceError::NotPermutation("A1"));
    }
    if !a2.is_permutation() {
        return Err(EquivalenceError::NotPermutation("A2"));
    }
    Ok(a1.table().compose(&f.compose(&a2.table())?)?)
}

/// `A2 ∘ f ∘ A1 + A3`.
pub fn ea_transform(
    f: &FuncTable,
    a1: &AffineMap,
    a2: &AffineMap,
    a3: &AffineMap,
) -> Result<FuncTable> {
    let inner = affine_transform(f, a2, a1)?;
    Ok(inner.add(&a3.table())?)
}

/// Seeded random affine permutation `a*x + b` over a field.
pub fn random_affine_permutation(field: &Arc<GroupTable>, rng: &mut impl Rng) -> Result<AffineMap> {
    let q = field.order();
    AffineMap::scalar(field, rng.gen_range(1..q), rng.gen_range(0..q))
}

/// Seeded uniformly random permutation of the group elements.
pub fn random_permutation(group: &Arc<GroupTable>, rng: &mut impl Rng) -> FuncTable {
    use rand::seq::SliceRandom;
    let mut v: Vec<usize> = group.elements().collect();
    v.shuffle(rng);
    FuncTable::new(group.clone(), v).expect("a shuffle of the elements")
}

/// Parses `(a b c)(d)` notation; unlisted points are fixed.
///
/// Elements inside a cycle are separated by whitespace or commas. A cycle
/// with no separators, such as `(2345)`, is read digit by digit, which is only
/// accepted when the order is at most 10.
pub fn parse_cycles(text: &str, group: &Arc<GroupTable>) -> Result<FuncTable> {
    let q = group.order();
    let mut map: Vec<usize> = (0..q).collect();
    let mut used = vec![false; q];
    let err = |pos: usize, msg: String| EquivalenceError::Cycle { pos, msg };
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'(' => {
                let start = i + 1;
                let end = text[start..]
                    .find(')')
                    .map(|e| start + e)
                    .ok_or_else(|| err(i, "unclosed cycle".into()))?;
                let body = &text[start..end];
                let elems = cycle_elements(body, start, q)?;
                for (j, &(pos, a)) in elems.iter().enumerate() {
                    if a >= q {
                        return Err(err(pos, format!("element {a} out of range for order {q}")));
                    }
                    if used[a] {
                        return Err(err(pos, format!("element {a} appears twice")));
                    }
                    used[a] = true;
                    map[a] = elems[(j + 1) % elems.len()].1;
                }
                i = end + 1;
            }
            c => return Err(err(i, format!("unexpected character {:?}", c as char))),
        }
    }
    Ok(FuncTable::new(group.clone(), map)?)
}

fn cycle_elements(body: &str, offset: usize, q: usize) -> Result<Vec<(usize, usize)>> {
    let err = |pos: usize, msg: String| EquivalenceError::Cycle { pos, msg };
    let trimmed = body.trim();
    if trimmed.is_empty() {
        return Err(err(offset, "empty cycle".into()));
    }
    let separated = trimmed.contains(|c: char| c.is_whitespace() || c == ',');
    let mut out = Vec::new();
    if !separated && trimmed.len() > 1 {
        if q > 10 {
            return Err(err(
                offset,
                format!("cycle {trimmed:?} needs separators when the order exceeds 10"),
            ));
        }
        for (k, ch) in body.char_indices() {
            if ch.is_whitespace() {
                continue;
            }
            let d = ch
                .to_digit(10)
                .ok_or_else(|| err(offset + k, format!("expected a digit, found {ch:?}")))?;
            out.push((offset + k, d as usize));
        }
        return Ok(out);
    }
    let mut k = 0;
    for tok in body.split(|c: char| c.is_whitespace() || c == ',') {
        if !tok.is_empty() {
            let n = tok.parse::<usize>().map_err(|_| {
                err(
                    offset + k,
                    format!("expected an element code, found {tok:?}"),
                )
            })?;
            out.push((offset + k, n));
        }
        k += tok.len() + 1;
    }
    Ok(out)
}

/// A permutation in one-line notation, the JSON array `[φ(0), φ(1), ...]`.
pub fn parse_one_line(text: &str, group: &Arc<GroupTable>) -> Result<FuncTable> {
    let v: Vec<usize> =
        serde_json::from_str(text).map_err(|e| EquivalenceError::OneLine(e.to_string()))?;
    let t = FuncTable::new(group.clone(), v)?;
    require_permutation(&t, "one-line table")?;
    Ok(t)
}

/// One-line notation when the text starts with `[`, cycle notation otherwise.
pub fn parse_permutation(text: &str, group: &Arc<GroupTable>) -> Result<FuncTable> {
    if text.trim_start().starts_with('[') {
        parse_one_line(text, group)
    } else {
        parse_cycles(text, group)
    }
}
