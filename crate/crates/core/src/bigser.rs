//! Serde helpers for big integers: plain JSON numbers when they fit in 64
//! bits, decimal strings otherwise.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::ser::SerializeSeq;
use serde::Serializer;

pub fn biguint<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    match n.to_u64() {
        Some(v) => s.serialize_u64(v),
        None => s.serialize_str(&n.to_string()),
    }
}

struct Big<'a>(&'a BigUint);

impl serde::Serialize for Big<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        biguint(self.0, s)
    }
}

pub fn biguint_seq<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for n in v {
        seq.serialize_element(&Big(n))?;
    }
    seq.end()
}

/// Integers that fit in `i64` as numbers, everything else as `"p/q"` or a decimal string.
pub fn rational<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    if r.is_integer() {
        if let Some(v) = r.numer().to_i64() {
            return s.serialize_i64(v);
        }
    }
    s.serialize_str(&r.to_string())
}
