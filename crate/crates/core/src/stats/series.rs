use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{preimage_distribution, PreimageDistribution, Result, StatsError};
use crate::bigser;
use crate::func::FuncTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSide {
    /// The partial sum is at least `M_0`.
    Upper,
    /// The partial sum is at most `M_0`.
    Lower,
}

/// Partial alternating sum `sum_{s=2}^{last_s} (-1)^s N_s / s!`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub last_s: usize,
    #[serde(serialize_with = "bigser::rational")]
    pub partial: BigRational,
    pub side: BoundSide,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct M0Expansion {
    /// The full alternating sum, equal to `M_0`.
    pub m0: u64,
    /// `N_2/2 - N_3/6`.
    #[serde(serialize_with = "bigser::rational")]
    pub lower: BigRational,
    /// `N_2/2`.
    #[serde(serialize_with = "bigser::rational")]
    pub upper: BigRational,
    pub truncations: Vec<Truncation>,
}

fn ratio(n: &BigUint, d: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(n.clone()), BigInt::from(d.clone()))
}

/// Terms `N_s / s!` for `s = 2..=u`, in exact rational arithmetic.
fn scaled_terms(dist: &PreimageDistribution) -> Vec<BigRational> {
    let mut fact = BigUint::one();
    let mut out = Vec::new();
    for s in 1..=dist.u {
        fact *= s as u64;
        if s >= 2 {
            out.push(ratio(&dist.n_s(s), &fact));
        }
    }
    out
}

/// Recovers `M_0` from the alternating sum of `N_s / s!`, along with the
/// two-term bounds and every truncation of the sum.
///
/// A truncation ending at even `s` bounds `M_0` from above, one ending at odd
/// `s` from below. Any mismatch with the directly counted `M_0` is reported as
/// [`StatsError::IdentityViolation`].
pub fn m0_from_ns(f: &FuncTable) -> Result<M0Expansion> {
    let dist = preimage_distribution(f);
    let terms = scaled_terms(&dist);
    let m0 = BigRational::from_integer(BigInt::from(dist.m0()));
    let mut partial = BigRational::zero();
    let mut truncations = Vec::with_capacity(terms.len());
    for (i, t) in terms.iter().enumerate() {
        let s = i + 2;
        if s % 2 == 0 {
            partial += t;
        } else {
            partial -= t;
        }
        let side = if s % 2 == 0 {
            BoundSide::Upper
        } else {
            BoundSide::Lower
        };
        let holds = match side {
            BoundSide::Upper => partial >= m0,
            BoundSide::Lower => partial <= m0,
        };
        if !holds {
            return Err(StatsError::IdentityViolation(format!(
                "truncation at s = {s} gives {partial}, on the wrong side of M_0 = {m0}"
            )));
        }
        truncations.push(Truncation {
            last_s: s,
            partial: partial.clone(),
            side,
        });
    }
    if partial != m0 {
        return Err(StatsError::IdentityViolation(format!(
            "alternating sum {partial} differs from M_0 = {m0}"
        )));
    }
    let n2_half = terms.first().cloned().unwrap_or_else(BigRational::zero);
    let n3_sixth = terms.get(1).cloned().unwrap_or_else(BigRational::zero);
    Ok(M0Expansion {
        m0: dist.m0(),
        lower: &n2_half - &n3_sixth,
        upper: n2_half,
        truncations,
    })
}

/// `P_f(z) = sum_r M_r z^r`, cross-checked against the expansion around `z = 1`
/// (`q + q(z-1) + sum_s N_s/s! (z-1)^s`), together with `P_f(1) = P_f'(1) = q`.
pub fn generating_poly_eval(f: &FuncTable, z: &BigRational) -> Result<BigRational> {
    let dist = preimage_distribution(f);
    let q = BigRational::from_integer(BigInt::from(dist.q()));

    let mut direct = BigRational::zero();
    let mut zr = BigRational::one();
    for &m in &dist.m {
        direct += &zr * BigRational::from_integer(BigInt::from(m));
        zr *= z;
    }

    let w = z - BigRational::one();
    let mut expanded = &q + &q * &w;
    let mut wpow = &w * &w;
    for t in scaled_terms(&dist) {
        expanded += &t * &wpow;
        wpow *= &w;
    }
    if direct != expanded {
        return Err(StatsError::IdentityViolation(format!(
            "P_f({z}) = {direct} directly but {expanded} from the N_s expansion"
        )));
    }

    let at_one: u64 = dist.m.iter().sum();
    let slope: u64 = dist.m.iter().enumerate().map(|(r, &m)| r as u64 * m).sum();
    if at_one != f.order() as u64 || slope != f.order() as u64 {
        return Err(StatsError::IdentityViolation(format!(
            "P_f(1) = {at_one}, P_f'(1) = {slope}, q = {}",
            f.order()
        )));
    }
    Ok(direct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GroupTable;
    use std::sync::Arc;

    fn func(factors: &[usize], values: &[usize]) -> FuncTable {
        let g = Arc::new(GroupTable::cyclic_product(factors).unwrap());
        FuncTable::new(g, values.to_vec()).unwrap()
    }

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn pair_function_m0() {
        let f = func(&[7], &[0, 0, 2, 2, 4, 4, 6]);
        let e = m0_from_ns(&f).unwrap();
        assert_eq!(e.m0, 3);
        // no point has three or more preimages, so the upper bound is attained
        assert_eq!(e.upper, int(3));
        assert_eq!(e.lower, int(3));
        assert_eq!(e.truncations.len(), 1);
    }

    #[test]
    fn constant_alternating_sum() {
        // sum_{s=2}^{5} (-1)^s C(5, s) = 10 - 10 + 5 - 1 = 4
        let c = func(&[5], &[2; 5]);
        let e = m0_from_ns(&c).unwrap();
        assert_eq!(e.m0, 4);
        let partials: Vec<BigRational> = e.truncations.iter().map(|t| t.partial.clone()).collect();
        assert_eq!(partials, vec![int(10), int(0), int(5), int(4)]);
    }

    #[test]
    fn generating_polynomial() {
        let f = func(&[7], &[0, 0, 2, 2, 4, 4, 6]);
        assert_eq!(generating_poly_eval(&f, &int(1)).unwrap(), int(7));
        assert_eq!(generating_poly_eval(&f, &int(0)).unwrap(), int(3));
        let id = func(&[7], &[0, 1, 2, 3, 4, 5, 6]);
        assert_eq!(generating_poly_eval(&id, &int(2)).unwrap(), int(14));
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let h = func(&[7], &[0, 0, 0, 3, 4, 5, 6]);
        // 2 + 4/2 + 1/8
        assert_eq!(
            generating_poly_eval(&h, &half).unwrap(),
            BigRational::new(BigInt::from(33), BigInt::from(8))
        );
    }
}
