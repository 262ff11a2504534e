//! Prime-field polynomial helpers and multiplicative tables for `GF(p^e)`.

use super::{AlgebraError, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn trim(mut a: Vec<usize>) -> Vec<usize> {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn inv_mod(a: usize, p: usize) -> usize {
    // p is prime and a != 0
    let mut result = 1;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}

/// Remainder of `a` modulo `d` over GF(p); coefficient vectors are constant first.
fn poly_rem(a: &[usize], d: &[usize], p: usize) -> Vec<usize> {
    let d = trim(d.to_vec());
    let dd = d.len() - 1;
    let lead_inv = inv_mod(d[dd], p);
    let mut r = trim(a.to_vec());
    while r.len() > dd && !(r.len() == 1 && r[0] == 0) {
        let shift = r.len() - 1 - dd;
        let factor = r[r.len() - 1] * lead_inv % p;
        for (i, &c) in d.iter().enumerate() {
            let idx = i + shift;
            r[idx] = (r[idx] + p * p - factor * c % p) % p;
        }
        r = trim(r);
        if r.len() - 1 < dd {
            break;
        }
    }
    r
}

/// Product of two residues modulo a monic `modulus` of degree `e`.
pub(crate) fn mul_mod(a: &[usize], b: &[usize], modulus: &[usize], p: usize) -> Vec<usize> {
    let e = modulus.len() - 1;
    let mut prod = vec![0usize; 2 * e.max(1)];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    let mut r = poly_rem(&prod, modulus, p);
    r.resize(e, 0);
    r
}

/// Irreducibility over GF(p) by exhaustive trial division with every monic
/// polynomial of degree up to half the degree of `modulus`.
pub fn is_irreducible(p: usize, modulus: &[usize]) -> bool {
    let m = trim(modulus.to_vec());
    let e = m.len() - 1;
    if e == 0 {
        return false;
    }
    if e == 1 {
        return true;
    }
    for k in 1..=e / 2 {
        let count = p.pow(k as u32);
        for code in 0..count {
            let mut d = digits(code, p, k);
            d.push(1);
            let r = poly_rem(&m, &d, p);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

pub(crate) fn digits(mut code: usize, p: usize, e: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(e);
    for _ in 0..e {
        out.push(code % p);
        code /= p;
    }
    out
}

pub(crate) fn undigits(d: &[usize], p: usize) -> usize {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// The default defining polynomial for `GF(p^e)`: the monic primitive
/// polynomial of degree `e` whose lower coefficients (constant first, read as
/// base-`p` digits) form the smallest code. For `e = 1` this is `x`.
pub fn default_modulus(p: usize, e: usize) -> Vec<usize> {
    if e == 1 {
        return vec![0, 1];
    }
    let q = p.pow(e as u32);
    for code in 1..q {
        let mut m = digits(code, p, e);
        if m[0] == 0 {
            continue;
        }
        m.push(1);
        if is_irreducible(p, &m) && element_order_is_full(&x_residue(e), &m, p, q) {
            return m;
        }
    }
    unreachable!("every finite field has a primitive polynomial")
}

fn x_residue(e: usize) -> Vec<usize> {
    let mut x = vec![0; e];
    x[1 % e] = 1;
    x
}

fn pow_mod(base: &[usize], mut exp: usize, modulus: &[usize], p: usize) -> Vec<usize> {
    let e = modulus.len() - 1;
    let mut result = vec![0; e];
    result[0] = 1;
    let mut b = base.to_vec();
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(&result, &b, modulus, p);
        }
        b = mul_mod(&b, &b, modulus, p);
        exp >>= 1;
    }
    result
}

fn element_order_is_full(a: &[usize], modulus: &[usize], p: usize, q: usize) -> bool {
    let n = q - 1;
    let one = {
        let mut v = vec![0; modulus.len() - 1];
        v[0] = 1;
        v
    };
    if pow_mod(a, n, modulus, p) != one {
        return false;
    }
    prime_factors(n)
        .into_iter()
        .all(|r| pow_mod(a, n / r, modulus, p) != one)
}

/// Discrete exponential and logarithm tables with respect to a fixed
/// generator of the multiplicative group.
#[derive(Debug, Clone)]
pub(crate) struct FieldTables {
    pub exp: Vec<u32>,
    pub log: Vec<u32>,
    pub generator: usize,
}

impl FieldTables {
    pub fn build(p: usize, e: usize, modulus: &[usize]) -> Result<Self> {
        let q = p.pow(e as u32);
        if q == 2 {
            return Ok(FieldTables {
                exp: vec![1],
                log: vec![0, 0],
                generator: 1,
            });
        }
        // smallest code of full multiplicative order; for a primitive modulus this is x
        let generator = (1..q)
            .find(|&c| element_order_is_full(&digits(c, p, e), modulus, p, q))
            .ok_or_else(|| AlgebraError::InvalidModulus("no element of order q-1".into()))?;
        let g = digits(generator, p, e);
        let mut exp = Vec::with_capacity(q - 1);
        let mut log = vec![0u32; q];
        let mut cur = digits(1, p, e);
        for i in 0..q - 1 {
            let code = undigits(&cur, p);
            exp.push(code as u32);
            log[code] = i as u32;
            cur = mul_mod(&cur, &g, modulus, p);
        }
        Ok(FieldTables {
            exp,
            log,
            generator,
        })
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.exp.len();
        self.exp[(self.log[a] as usize + self.log[b] as usize) % n] as usize
    }

    #[inline]
    pub fn pow(&self, a: usize, k: u64) -> usize {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = self.exp.len() as u64;
        self.exp[((self.log[a] as u64 * (k % n)) % n) as usize] as usize
    }

    #[inline]
    pub fn gen_pow(&self, j: u64) -> usize {
        let n = self.exp.len() as u64;
        self.exp[(j % n) as usize] as usize
    }

    pub fn inv(&self, a: usize) -> Option<usize> {
        if a == 0 {
            return None;
        }
        let n = self.exp.len();
        Some(self.exp[(n - self.log[a] as usize) % n] as usize)
    }
}
