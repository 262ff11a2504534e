use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::{AlgebraError, GroupTable, Result};
use crate::func::FuncTable;

/// A polynomial over a field, as a sparse map from exponent to nonzero coefficient code.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<u64, usize>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Sums the given `(exponent, coefficient)` terms in `field`, dropping zeros.
    pub fn from_terms(
        field: &GroupTable,
        terms: impl IntoIterator<Item = (u64, usize)>,
    ) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (k, c) in terms {
            field.check_element(c)?;
            let entry = out.entry(k).or_insert(0);
            *entry = field.add(*entry, c);
        }
        out.retain(|_, c| *c != 0);
        Ok(Polynomial { terms: out })
    }

    /// `x^k`.
    pub fn monomial(k: u64) -> Self {
        Polynomial {
            terms: BTreeMap::from([(k, 1)]),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, usize)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    pub fn coefficient(&self, k: u64) -> usize {
        self.terms.get(&k).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Applies `x^q = x` so that every exponent is below `q`.
    pub fn reduced(&self, field: &GroupTable) -> Self {
        let q = field.order() as u64;
        let terms = self.terms().map(|(k, c)| {
            let k = if k >= q { (k - 1) % (q - 1) + 1 } else { k };
            (k, c)
        });
        Self::from_terms(field, terms).expect("coefficients already validated")
    }

    /// Evaluates at a single element.
    pub fn eval_at(&self, field: &GroupTable, x: usize) -> Result<usize> {
        let mut acc = 0;
        for (k, c) in self.terms() {
            let xk = field.pow(x, k)?;
            acc = field.add(acc, field.mul(c, xk)?);
        }
        Ok(acc)
    }

    /// The lookup table of this polynomial over `field`.
    pub fn eval(&self, field: &Arc<GroupTable>) -> Result<FuncTable> {
        if !field.is_field() {
            return Err(AlgebraError::NotAField(field.describe()));
        }
        let values = field
            .elements()
            .map(|x| self.eval_at(field, x))
            .collect::<Result<Vec<_>>>()?;
        FuncTable::new(field.clone(), values)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&k, &c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (k, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, c) => write!(f, "{c}*x")?,
                (k, 1) => write!(f, "x^{k}")?,
                (k, c) => write!(f, "{c}*x^{k}")?,
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: &'a GroupTable,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(AlgebraError::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a non-negative integer");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<u64>().or_else(|_| {
            self.pos = start;
            self.err("integer too large")
        })
    }

    fn exponent(&mut self) -> Result<u64> {
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.integer()
        } else {
            Ok(1)
        }
    }

    /// One factor: integer coefficient, `g^j`, or `x^k`. Returns (coefficient, x-exponent).
    fn factor(&mut self) -> Result<(usize, u64)> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Ok((1, self.exponent()?))
            }
            Some(b'g') => {
                let at = self.pos;
                self.pos += 1;
                let j = self.exponent()?;
                match self.field.field_params() {
                    Some((_, e)) if e > 1 => Ok((self.field.gen_pow(j)?, 0)),
                    _ => {
                        self.pos = at;
                        self.err("generator powers `g^j` are only available over extension fields")
                    }
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let at = self.pos;
                let n = self.integer()?;
                let p = self.field.field_params().map(|(p, _)| p).unwrap_or(0) as u64;
                if n >= p {
                    self.pos = at;
                    return self.err(format!(
                        "coefficient {n} out of range for characteristic {p}"
                    ));
                }
                Ok((n as usize, 0))
            }
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }

    fn term(&mut self) -> Result<(usize, u64)> {
        let (mut coeff, mut k) = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                }
                Some(b'x') | Some(b'g') => {}
                Some(c) if c.is_ascii_digit() => {}
                _ => break,
            }
            let (c2, k2) = self.factor()?;
            coeff = self.field.mul(coeff, c2)?;
            k = k.checked_add(k2).ok_or_else(|| AlgebraError::Parse {
                pos: self.pos,
                msg: "exponent overflow".into(),
            })?;
        }
        Ok((coeff, k))
    }

    fn poly(&mut self) -> Result<Vec<(u64, usize)>> {
        let mut terms = Vec::new();
        let mut negate = false;
        match self.peek() {
            Some(b'-') => {
                negate = true;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        loop {
            let (c, k) = self.term()?;
            let c = if negate { self.field.neg(c) } else { c };
            terms.push((k, c));
            match self.peek() {
                Some(b'+') => negate = false,
                Some(b'-') => negate = true,
                None => break,
                Some(c) => return self.err(format!("unexpected character '{}'", c as char)),
            }
            self.pos += 1;
        }
        Ok(terms)
    }
}

/// Parses `c*x^k`, `x^k`, `c` and `g^j` terms joined by `+`/`-`.
///
/// Integer coefficients must be below the characteristic; `g` denotes the
/// group's fixed multiplicative generator and is accepted only over extension
/// fields. Juxtaposed factors (`3x`) multiply like `*`.
pub fn parse_poly(text: &str, field: &GroupTable) -> Result<Polynomial> {
    if !field.is_field() {
        return Err(AlgebraError::NotAField(field.describe()));
    }
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
        field,
    };
    let terms = parser.poly()?;
    Polynomial::from_terms(field, terms)
}
