use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{Result, StatsError};
use crate::func::FuncTable;

/// How difference operators treat nonabelian groups.
///
/// With `RightNegation` the operator is `x -> f(x + a) + (-f(x))`, the
/// negation on the right. This is a fixed convention; the abelian theory
/// does not carry over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NonabelianPolicy {
    #[default]
    Reject,
    RightNegation,
}

fn admit(f: &FuncTable, policy: NonabelianPolicy) -> Result<()> {
    if f.group().is_abelian() || policy == NonabelianPolicy::RightNegation {
        Ok(())
    } else {
        Err(StatsError::Nonabelian)
    }
}

/// `x -> f(x + a) - f(x)`.
pub fn difference_operator(f: &FuncTable, a: usize) -> Result<FuncTable> {
    difference_operator_with(f, a, NonabelianPolicy::Reject)
}

pub fn difference_operator_with(
    f: &FuncTable,
    a: usize,
    policy: NonabelianPolicy,
) -> Result<FuncTable> {
    admit(f, policy)?;
    let g = f.group();
    g.check_element(a)?;
    if a == 0 {
        return Err(StatsError::ZeroDirection);
    }
    Ok(FuncTable::from_fn(g.clone(), |x| {
        g.sub(f.get(g.add(x, a)), f.get(x))
    })?)
}

/// Difference distribution table: row `a` (for `a = 1..q`), column `b`, entry
/// `#{x : f(x + a) - f(x) = b}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ddt {
    q: usize,
    counts: Vec<u32>,
}

impl Ddt {
    pub fn compute(f: &FuncTable, policy: NonabelianPolicy) -> Result<Ddt> {
        admit(f, policy)?;
        let g = f.group();
        let q = f.order();
        let mut counts = vec![0u32; q.saturating_sub(1) * q];
        counts.par_chunks_mut(q).enumerate().for_each(|(i, row)| {
            let a = i + 1;
            for x in 0..q {
                row[g.sub(f.get(g.add(x, a)), f.get(x))] += 1;
            }
        });
        Ok(Ddt { q, counts })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    /// Row for direction `a` (`1 <= a < q`).
    pub fn row(&self, a: usize) -> &[u32] {
        assert!(a >= 1 && a < self.q, "direction {a} out of range");
        &self.counts[(a - 1) * self.q..a * self.q]
    }

    pub fn get(&self, a: usize, b: usize) -> u32 {
        self.row(a)[b]
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &[u32])> {
        self.counts
            .chunks(self.q.max(1))
            .enumerate()
            .map(|(i, r)| (i + 1, r))
    }

    /// `delta_f`, the largest entry.
    pub fn differential_uniformity(&self) -> usize {
        self.counts.iter().copied().max().unwrap_or(0) as usize
    }

    /// `NB_f`, the sum over directions of the imbalance of each row.
    pub fn derivative_imbalance(&self) -> u64 {
        self.counts
            .iter()
            .map(|&c| {
                let d = c as i64 - 1;
                (d * d) as u64
            })
            .sum()
    }

    pub fn ambiguity(&self) -> Ambiguity {
        let mut alpha = BTreeMap::new();
        for &c in &self.counts {
            *alpha.entry(c as usize).or_insert(0u64) += 1;
        }
        let rows: Vec<u64> = self
            .rows()
            .map(|(_, r)| r.iter().map(|&c| choose2(c as u64)).sum())
            .collect();
        let total = rows.iter().sum();
        Ambiguity { total, alpha, rows }
    }
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Ambiguity `A(f)`, the profile `alpha_i` (number of `(a, b)` with `i`
/// solutions), and the row ambiguities `A_{r=a}` for `a = 1..q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ambiguity {
    pub total: u64,
    pub alpha: BTreeMap<usize, u64>,
    pub rows: Vec<u64>,
}

pub fn differential_uniformity(f: &FuncTable) -> Result<usize> {
    Ok(Ddt::compute(f, NonabelianPolicy::Reject)?.differential_uniformity())
}

/// Every difference operator is a permutation.
pub fn is_planar(f: &FuncTable) -> Result<bool> {
    Ok(differential_uniformity(f)? == 1)
}

pub fn derivative_imbalance(f: &FuncTable) -> Result<u64> {
    Ok(Ddt::compute(f, NonabelianPolicy::Reject)?.derivative_imbalance())
}

pub fn ambiguity(f: &FuncTable) -> Result<Ambiguity> {
    Ok(Ddt::compute(f, NonabelianPolicy::Reject)?.ambiguity())
}
