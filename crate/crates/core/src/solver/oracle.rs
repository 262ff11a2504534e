//! Brute-force reference: `pres(f) = min_h V(f - h)` over all permutations `h`.

use super::{Result, SolverError};
use crate::func::FuncTable;

/// Largest order accepted by [`pres_oracle_bruteforce`].
pub const ORACLE_MAX_ORDER: usize = 8;

/// `res(f, h) = V(f - h)` with `(f - h)(x) = f(x) + (-h(x))`.
pub fn resemblance(f: &FuncTable, h: &FuncTable) -> Result<usize> {
    Ok(f.sub(h)?.image_size())
}

fn distinct_differences(f: &FuncTable, h: &[usize], seen: &mut [bool]) -> usize {
    let g = f.group();
    seen.iter_mut().for_each(|s| *s = false);
    let mut n = 0;
    for (x, &hx) in h.iter().enumerate() {
        let d = g.sub(f.get(x), hx);
        if !seen[d] {
            seen[d] = true;
            n += 1;
        }
    }
    n
}

/// Enumerates all `q!` permutations with Heap's algorithm.
pub fn pres_oracle_bruteforce(f: &FuncTable) -> Result<usize> {
    let q = f.order();
    if q > ORACLE_MAX_ORDER {
        return Err(SolverError::OracleTooLarge {
            q,
            max: ORACLE_MAX_ORDER,
        });
    }
    let mut h: Vec<usize> = (0..q).collect();
    let mut seen = vec![false; q];
    let mut best = distinct_differences(f, &h, &mut seen);
    let mut c = vec![0usize; q];
    let mut i = 0;
    while i < q && best > 1 {
        if c[i] < i {
            if i % 2 == 0 {
                h.swap(0, i);
            } else {
                h.swap(c[i], i);
            }
            best = best.min(distinct_differences(f, &h, &mut seen));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(best)
}
