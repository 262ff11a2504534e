use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{self, FieldTables};
use super::{AlgebraError, Result};

/// Default maximum group order accepted by the constructors.
pub const DEFAULT_ORDER_LIMIT: usize = 4096;

/// Orders up to this size get an explicit addition table cached at construction.
const CACHED_ADD_LIMIT: usize = 512;

/// Associativity is checked exhaustively up to this order, sampled above it.
const EXHAUSTIVE_ASSOC_LIMIT: usize = 64;
const ASSOC_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupKind {
    CyclicProduct,
    FieldAdditive,
    Cayley,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Structure {
    /// `Z_{n1} x ... x Z_{nk}`, first factor least significant.
    CyclicProduct { factors: Vec<usize> },
    /// `GF(p^e)` with defining polynomial `modulus` (constant first, monic).
    Field {
        p: usize,
        e: usize,
        modulus: Vec<usize>,
    },
    /// An explicit Cayley table.
    Cayley,
}

/// A finite group of order `q` on the codes `0..q`, immutable after construction.
#[derive(Debug, Clone)]
pub struct GroupTable {
    order: usize,
    structure: Structure,
    radices: Vec<usize>,
    add: Option<Vec<u32>>,
    neg: Vec<u32>,
    abelian: bool,
    field: Option<FieldTables>,
}

impl PartialEq for GroupTable {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && self.structure == other.structure
            && (self.structure != Structure::Cayley || self.add == other.add)
    }
}

impl Eq for GroupTable {}

impl GroupTable {
    /// `GF(p^e)`. Without an explicit modulus the default primitive polynomial is used.
    pub fn field(p: usize, e: usize, modulus: Option<&[usize]>) -> Result<Self> {
        Self::field_with_limit(p, e, modulus, DEFAULT_ORDER_LIMIT)
    }

    pub fn field_with_limit(
        p: usize,
        e: usize,
        modulus: Option<&[usize]>,
        limit: usize,
    ) -> Result<Self> {
        if !field::is_prime(p as u64) {
            return Err(AlgebraError::NotPrime(p as u64));
        }
        if e == 0 {
            return Err(AlgebraError::InvalidGroup(
                "field degree must be >= 1".into(),
            ));
        }
        let order = (p as u128).checked_pow(e as u32).unwrap_or(u128::MAX);
        if order > limit as u128 {
            return Err(AlgebraError::OrderLimit { order, limit });
        }
        let q = order as usize;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != e + 1 || m[e] != 1 {
                    return Err(AlgebraError::InvalidModulus(format!(
                        "expected {} coefficients ending in 1 (monic, degree {e}), got {m:?}",
                        e + 1
                    )));
                }
                if let Some(&c) = m.iter().find(|&&c| c >= p) {
                    return Err(AlgebraError::InvalidModulus(format!(
                        "coefficient {c} is not reduced mod {p}"
                    )));
                }
                if !field::is_irreducible(p, m) {
                    return Err(AlgebraError::Reducible(format_poly(m)));
                }
                m.to_vec()
            }
            None => field::default_modulus(p, e),
        };
        let tables = FieldTables::build(p, e, &modulus)?;
        let radices = vec![p; e];
        let mut g = GroupTable {
            order: q,
            structure: Structure::Field { p, e, modulus },
            radices,
            add: None,
            neg: Vec::new(),
            abelian: true,
            field: Some(tables),
        };
        g.fill_digitwise();
        Ok(g)
    }

    /// The direct product `Z_{n1} x ... x Z_{nk}`.
    pub fn cyclic_product(factors: &[usize]) -> Result<Self> {
        Self::cyclic_product_with_limit(factors, DEFAULT_ORDER_LIMIT)
    }

    pub fn cyclic_product_with_limit(factors: &[usize], limit: usize) -> Result<Self> {
        if factors.is_empty() {
            return Err(AlgebraError::InvalidGroup("empty factor list".into()));
        }
        if let Some(&n) = factors.iter().find(|&&n| n < 2) {
            return Err(AlgebraError::InvalidGroup(format!(
                "cyclic factor {n} must be >= 2"
            )));
        }
        let order = factors
            .iter()
            .try_fold(1u128, |acc, &n| acc.checked_mul(n as u128))
            .unwrap_or(u128::MAX);
        if order > limit as u128 {
            return Err(AlgebraError::OrderLimit { order, limit });
        }
        let mut g = GroupTable {
            order: order as usize,
            structure: Structure::CyclicProduct {
                factors: factors.to_vec(),
            },
            radices: factors.to_vec(),
            add: None,
            neg: Vec::new(),
            abelian: true,
            field: None,
        };
        g.fill_digitwise();
        Ok(g)
    }

    /// A group from an explicit Cayley table `add[x][y] = x + y`.
    ///
    /// The table must be a Latin square with identity code 0 and must be
    /// associative (checked exhaustively up to order 64, on random triples above).
    pub fn from_cayley(rows: &[Vec<usize>]) -> Result<Self> {
        Self::from_cayley_with_limit(rows, DEFAULT_ORDER_LIMIT)
    }

    pub fn from_cayley_with_limit(rows: &[Vec<usize>], limit: usize) -> Result<Self> {
        let q = rows.len();
        if q == 0 {
            return Err(AlgebraError::InvalidGroup("empty Cayley table".into()));
        }
        if q > limit {
            return Err(AlgebraError::OrderLimit {
                order: q as u128,
                limit,
            });
        }
        let mut add = vec![0u32; q * q];
        for (x, row) in rows.iter().enumerate() {
            if row.len() != q {
                return Err(AlgebraError::InvalidGroup(format!(
                    "row {x} has {} entries, expected {q}",
                    row.len()
                )));
            }
            for (y, &v) in row.iter().enumerate() {
                if v >= q {
                    return Err(AlgebraError::ElementOutOfRange { code: v, order: q });
                }
                add[x * q + y] = v as u32;
            }
        }
        let at = |x: usize, y: usize| add[x * q + y] as usize;
        let mut seen = vec![false; q];
        for x in 0..q {
            seen.iter_mut().for_each(|s| *s = false);
            for y in 0..q {
                seen[at(x, y)] = true;
            }
            if seen.iter().any(|s| !s) {
                return Err(AlgebraError::InvalidGroup(format!(
                    "row {x} is not a permutation"
                )));
            }
            seen.iter_mut().for_each(|s| *s = false);
            for y in 0..q {
                seen[at(y, x)] = true;
            }
            if seen.iter().any(|s| !s) {
                return Err(AlgebraError::InvalidGroup(format!(
                    "column {x} is not a permutation"
                )));
            }
            if at(0, x) != x || at(x, 0) != x {
                return Err(AlgebraError::InvalidGroup(
                    "code 0 is not the identity".into(),
                ));
            }
        }
        let assoc = |x: usize, y: usize, z: usize| at(at(x, y), z) == at(x, at(y, z));
        let associative = if q <= EXHAUSTIVE_ASSOC_LIMIT {
            (0..q).all(|x| (0..q).all(|y| (0..q).all(|z| assoc(x, y, z))))
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            (0..ASSOC_SAMPLES).all(|_| {
                assoc(
                    rng.gen_range(0..q),
                    rng.gen_range(0..q),
                    rng.gen_range(0..q),
                )
            })
        };
        if !associative {
            return Err(AlgebraError::InvalidGroup(
                "operation is not associative".into(),
            ));
        }
        let mut neg = vec![0u32; q];
        for x in 0..q {
            let y = (0..q).find(|&y| at(x, y) == 0).unwrap();
            neg[x] = y as u32;
        }
        let abelian = (0..q).all(|x| (x + 1..q).all(|y| at(x, y) == at(y, x)));
        Ok(GroupTable {
            order: q,
            structure: Structure::Cayley,
            radices: Vec::new(),
            add: Some(add),
            neg,
            abelian,
            field: None,
        })
    }

    fn fill_digitwise(&mut self) {
        let q = self.order;
        self.neg = (0..q).map(|x| self.neg_digitwise(x) as u32).collect();
        if q <= CACHED_ADD_LIMIT {
            let mut t = Vec::with_capacity(q * q);
            for x in 0..q {
                for y in 0..q {
                    t.push(self.add_digitwise(x, y) as u32);
                }
            }
            self.add = Some(t);
        }
    }

    fn add_digitwise(&self, mut x: usize, mut y: usize) -> usize {
        let mut out = 0;
        let mut place = 1;
        for &n in &self.radices {
            let d = (x % n + y % n) % n;
            out += d * place;
            place *= n;
            x /= n;
            y /= n;
        }
        out
    }

    fn neg_digitwise(&self, mut x: usize) -> usize {
        let mut out = 0;
        let mut place = 1;
        for &n in &self.radices {
            let d = (n - x % n) % n;
            out += d * place;
            place *= n;
            x /= n;
        }
        out
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn kind(&self) -> GroupKind {
        match self.structure {
            Structure::CyclicProduct { .. } => GroupKind::CyclicProduct,
            Structure::Field { .. } => GroupKind::FieldAdditive,
            Structure::Cayley => GroupKind::Cayley,
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    pub fn is_field(&self) -> bool {
        self.field.is_some()
    }

    /// Characteristic and degree for field kind.
    pub fn field_params(&self) -> Option<(usize, usize)> {
        match self.structure {
            Structure::Field { p, e, .. } => Some((p, e)),
            _ => None,
        }
    }

    #[inline]
    pub fn add(&self, x: usize, y: usize) -> usize {
        match &self.add {
            Some(t) => t[x * self.order + y] as usize,
            None => self.add_digitwise(x, y),
        }
    }

    #[inline]
    pub fn neg(&self, x: usize) -> usize {
        self.neg[x] as usize
    }

    /// `x + (-y)`.
    #[inline]
    pub fn sub(&self, x: usize, y: usize) -> usize {
        self.add(x, self.neg(y))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn check_element(&self, code: usize) -> Result<usize> {
        if code < self.order {
            Ok(code)
        } else {
            Err(AlgebraError::ElementOutOfRange {
                code,
                order: self.order,
            })
        }
    }

    fn tables(&self) -> Result<&FieldTables> {
        self.field
            .as_ref()
            .ok_or_else(|| AlgebraError::NotAField(self.describe()))
    }

    /// Field product of two codes.
    pub fn mul(&self, a: usize, b: usize) -> Result<usize> {
        Ok(self.tables()?.mul(a, b))
    }

    pub fn pow(&self, a: usize, k: u64) -> Result<usize> {
        Ok(self.tables()?.pow(a, k))
    }

    pub fn inv(&self, a: usize) -> Result<Option<usize>> {
        Ok(self.tables()?.inv(a))
    }

    /// The fixed generator `g` of the multiplicative group (smallest code of order `q-1`).
    pub fn generator(&self) -> Result<usize> {
        Ok(self.tables()?.generator)
    }

    /// `g^j` for the fixed generator.
    pub fn gen_pow(&self, j: u64) -> Result<usize> {
        Ok(self.tables()?.gen_pow(j))
    }

    /// Mixed-radix digits of a code (least significant first).
    pub fn digits(&self, code: usize) -> Vec<usize> {
        let mut c = code;
        self.radices
            .iter()
            .map(|&n| {
                let d = c % n;
                c /= n;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.radices.len()
            || digits.iter().zip(&self.radices).any(|(d, n)| d >= n)
        {
            return Err(AlgebraError::InvalidGroup(format!(
                "digits {digits:?} do not fit radices {:?}",
                self.radices
            )));
        }
        Ok(digits
            .iter()
            .zip(&self.radices)
            .rev()
            .fold(0, |acc, (d, n)| acc * n + d))
    }

    /// Canonical group spec string, e.g. `gf:2^3:1,1,0,1` or `zn:2x3`.
    pub fn describe(&self) -> String {
        match &self.structure {
            Structure::Field { p, e, modulus } => {
                if *e == 1 {
                    format!("gf:{p}")
                } else {
                    let m: Vec<String> = modulus.iter().map(|c| c.to_string()).collect();
                    format!("gf:{p}^{e}:{}", m.join(","))
                }
            }
            Structure::CyclicProduct { factors } => {
                let f: Vec<String> = factors.iter().map(|n| n.to_string()).collect();
                format!("zn:{}", f.join("x"))
            }
            Structure::Cayley => format!("cayley(order {})", self.order),
        }
    }

    /// Rows of the addition table, for serialization of Cayley groups.
    pub fn cayley_rows(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|x| (0..self.order).map(|y| self.add(x, y)).collect())
            .collect()
    }
}

fn format_poly(m: &[usize]) -> String {
    let terms: Vec<String> = m
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| match (i, c) {
            (0, c) => c.to_string(),
            (1, 1) => "x".to_string(),
            (1, c) => format!("{c}*x"),
            (i, 1) => format!("x^{i}"),
            (i, c) => format!("{c}*x^{i}"),
        })
        .collect();
    terms.join(" + ")
}
