//! Reference computations written directly from the definitions, kept
//! independent of the library's own algorithms.

#![allow(dead_code)]

use std::sync::Arc;

use permres::{FuncTable, GroupTable};
use rand::Rng;

pub fn field(p: usize, e: usize) -> Arc<GroupTable> {
    Arc::new(GroupTable::field(p, e, None).unwrap())
}

pub fn cyclic(factors: &[usize]) -> Arc<GroupTable> {
    Arc::new(GroupTable::cyclic_product(factors).unwrap())
}

pub fn table(g: &Arc<GroupTable>, v: &[usize]) -> FuncTable {
    FuncTable::new(g.clone(), v.to_vec()).unwrap()
}

pub fn random_function(g: &Arc<GroupTable>, rng: &mut impl Rng) -> FuncTable {
    let q = g.order();
    FuncTable::new(g.clone(), (0..q).map(|_| rng.gen_range(0..q)).collect()).unwrap()
}

pub fn image_size(v: &[usize]) -> usize {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.dedup();
    s.len()
}

pub fn is_bijection(v: &[usize]) -> bool {
    image_size(v) == v.len()
}

/// `min_h V(f - h)` over every permutation `h`, by recursive enumeration.
pub fn brute_force_pres(f: &FuncTable) -> usize {
    let g = f.group();
    let q = f.order();
    fn rec(
        f: &FuncTable,
        g: &GroupTable,
        x: usize,
        used: &mut Vec<bool>,
        diffs: &mut Vec<usize>,
        best: &mut usize,
    ) {
        let q = used.len();
        if image_size(diffs) >= *best {
            return;
        }
        if x == q {
            *best = image_size(diffs);
            return;
        }
        for y in 0..q {
            if !used[y] {
                used[y] = true;
                diffs.push(g.add(f.get(x), g.neg(y)));
                rec(f, g, x + 1, used, diffs, best);
                diffs.pop();
                used[y] = false;
            }
        }
    }
    let mut best = q + 1;
    rec(f, g, 0, &mut vec![false; q], &mut Vec::new(), &mut best);
    best
}

/// `max_{a != 0, b} #{x : f(x+a) - f(x) = b}`.
pub fn du(f: &FuncTable) -> usize {
    let g = f.group();
    let q = f.order();
    let mut best = 0;
    for a in 1..q {
        let mut count = vec![0; q];
        for x in 0..q {
            let d = g.add(f.get(g.add(x, a)), g.neg(f.get(x)));
            count[d] += 1;
        }
        best = best.max(*count.iter().max().unwrap());
    }
    best
}

/// Sum over `a != 0` of `sum_b (c_{a,b} - 1)^2`.
pub fn derivative_imbalance(f: &FuncTable) -> u64 {
    let g = f.group();
    let q = f.order();
    let mut total = 0i64;
    for a in 1..q {
        let mut count = vec![0i64; q];
        for x in 0..q {
            count[g.add(f.get(g.add(x, a)), g.neg(f.get(x)))] += 1;
        }
        total += count.iter().map(|c| (c - 1) * (c - 1)).sum::<i64>();
    }
    total as u64
}

/// Preimage sizes indexed by value.
pub fn fibers(f: &FuncTable) -> Vec<usize> {
    let mut c = vec![0; f.order()];
    for &v in f.values() {
        c[v] += 1;
    }
    c
}

/// Permutation, or exactly one value with several preimages and the rest with one.
pub fn lbub_shape(f: &FuncTable) -> bool {
    let c = fibers(f);
    let multi = c.iter().filter(|&&n| n > 1).count();
    let single = c.iter().filter(|&&n| n == 1).count();
    multi == 0 || (multi == 1 && single + 1 == image_size(f.values()))
}

/// Ordered `s`-tuples of distinct points with one common image, by enumeration.
pub fn tuples_direct(f: &FuncTable, s: usize) -> u64 {
    fn rec(f: &FuncTable, s: usize, chosen: &mut Vec<usize>) -> u64 {
        if chosen.len() == s {
            return 1;
        }
        let mut n = 0;
        for x in 0..f.order() {
            if chosen.contains(&x) {
                continue;
            }
            if let Some(&first) = chosen.first() {
                if f.get(first) != f.get(x) {
                    continue;
                }
            }
            chosen.push(x);
            n += rec(f, s, chosen);
            chosen.pop();
        }
        n
    }
    rec(f, s, &mut Vec::new())
}

pub fn binom(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// `f(0) = 0` and every nonzero value has exactly `d` nonzero preimages.
pub fn d_to_one(f: &FuncTable) -> Option<usize> {
    if f.get(0) != 0 || (1..f.order()).any(|x| f.get(x) == 0) {
        return None;
    }
    let c = fibers(f);
    let sizes: Vec<usize> = c[1..].iter().copied().filter(|&n| n > 0).collect();
    let d = *sizes.first()?;
    sizes.iter().all(|&n| n == d).then_some(d)
}

/// `f(x) - f(y)` avoids `c_i - c_j` for `i != j`, over nonzero `x, y`.
pub fn shift_condition(f: &FuncTable, c: &[usize]) -> bool {
    let g = f.group();
    let q = f.order();
    for x in 1..q {
        for y in 1..q {
            let d = g.add(f.get(x), g.neg(f.get(y)));
            for &ci in c {
                for &cj in c {
                    if ci != cj && g.add(ci, g.neg(cj)) == d {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Direct exponentiation by repeated multiplication.
pub fn power_map(g: &Arc<GroupTable>, d: u64) -> FuncTable {
    FuncTable::from_fn(g.clone(), |x| {
        let mut acc = 1;
        for _ in 0..d {
            acc = g.mul(acc, x).unwrap();
        }
        acc
    })
    .unwrap()
}
