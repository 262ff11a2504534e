//! Preimage statistics, differential statistics and the counting identities
//! relating them.

mod differential;
mod report;
mod series;

pub use differential::{
    ambiguity, derivative_imbalance, difference_operator, difference_operator_with,
    differential_uniformity, is_planar, Ambiguity, Ddt, NonabelianPolicy,
};
pub use report::{analyze, analyze_with, StatsReport};
pub use series::{generating_poly_eval, m0_from_ns, BoundSide, M0Expansion, Truncation};

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::func::FuncTable;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("difference-based statistics require an abelian group")]
    Nonabelian,
    #[error("the direction of a difference operator must be nonzero")]
    ZeroDirection,
    #[error("tuple size must be at least 2, got {0}")]
    TupleSize(usize),
    #[error("identity violated: {0}")]
    IdentityViolation(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub type Result<T> = std::result::Result<T, StatsError>;

/// Counts `M_r` of codomain points with exactly `r` preimages, for `r = 0..=u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreimageDistribution {
    pub m: Vec<u64>,
    pub u: usize,
    pub v: usize,
}

impl PreimageDistribution {
    pub fn q(&self) -> u64 {
        self.m.iter().sum()
    }

    pub fn m0(&self) -> u64 {
        self.m[0]
    }

    /// `N_s = sum_{r >= s} (r)_s M_r`.
    pub fn n_s(&self, s: usize) -> BigUint {
        let mut total = BigUint::from(0u32);
        for r in s..self.m.len() {
            if self.m[r] != 0 {
                total += falling_factorial(r, s) * self.m[r];
            }
        }
        total
    }

    /// `N_s` for `s = 2..=u` (empty for permutations).
    pub fn n_sequence(&self) -> Vec<BigUint> {
        (2..=self.u).map(|s| self.n_s(s)).collect()
    }
}

pub(crate) fn falling_factorial(r: usize, s: usize) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for i in 0..s {
        acc *= (r - i) as u64;
    }
    acc
}

pub fn preimage_distribution(f: &FuncTable) -> PreimageDistribution {
    let counts = f.preimage_counts();
    let u = counts.iter().copied().max().unwrap_or(0);
    let mut m = vec![0u64; u + 1];
    for c in counts {
        m[c] += 1;
    }
    let v = f.order() - m[0] as usize;
    PreimageDistribution { m, u, v }
}

/// Number of ordered `s`-tuples of pairwise distinct points with a common image.
pub fn n_s(f: &FuncTable, s: usize) -> Result<BigUint> {
    if s < 2 {
        return Err(StatsError::TupleSize(s));
    }
    Ok(preimage_distribution(f).n_s(s))
}

/// `N_2(f)` as a machine integer.
pub fn n2(f: &FuncTable) -> u64 {
    f.preimage_counts()
        .iter()
        .map(|&c| (c as u64) * (c as u64).saturating_sub(1))
        .sum()
}

/// `Nb_f = sum_b (#f^{-1}(b) - 1)^2`.
pub fn imbalance(f: &FuncTable) -> u64 {
    f.preimage_counts()
        .iter()
        .map(|&c| {
            let d = c as i64 - 1;
            (d * d) as u64
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PresBounds {
    /// `u(f)`.
    pub lower: usize,
    /// `q - V(f) + 1`.
    pub upper: usize,
    pub lb_eq_ub: bool,
    /// `f` is a permutation, or exactly one image point has more than one preimage.
    pub char_holds: bool,
}

/// Lower and upper bounds on the permutation resemblance from the preimage shape.
pub fn pres_bounds(f: &FuncTable) -> Result<PresBounds> {
    let counts = f.preimage_counts();
    let q = f.order();
    let v = counts.iter().filter(|&&c| c > 0).count();
    let u = counts.iter().copied().max().unwrap_or(0);
    let lower = u;
    let upper = q - v + 1;
    let multi = counts.iter().filter(|&&c| c > 1).count();
    let char_holds = multi <= 1;
    let lb_eq_ub = lower == upper;
    if lb_eq_ub != char_holds {
        return Err(StatsError::IdentityViolation(format!(
            "u = {u}, q - V + 1 = {upper}, but the single-collision shape test gave {char_holds}"
        )));
    }
    Ok(PresBounds {
        lower,
        upper,
        lb_eq_ub,
        char_holds,
    })
}
