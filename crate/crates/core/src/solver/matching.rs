//! Feasibility of a shift set as bipartite perfect matching.
//!
//! Domain points `x` sit on the left, codomain points `y` on the right, and
//! `x -- y` is an edge when `y = c + f(x)` for some shift `c`. A perfect
//! matching is exactly a function `g` with image inside the shift set for
//! which `g + f` is a bijection: `g(x) = y - f(x)`.

use crate::func::FuncTable;

const UNMATCHED: usize = usize::MAX;

/// Reusable buffers for repeated feasibility tests on one function.
pub(crate) struct Matcher<'a> {
    f: &'a FuncTable,
    image: Vec<usize>,
    uniformity: usize,
    match_right: Vec<usize>,
    match_left: Vec<usize>,
    seen: Vec<u32>,
    stamp: u32,
}

impl<'a> Matcher<'a> {
    pub fn new(f: &'a FuncTable) -> Self {
        let q = f.order();
        Matcher {
            f,
            image: f.image(),
            uniformity: f.uniformity(),
            match_right: vec![UNMATCHED; q],
            match_left: vec![UNMATCHED; q],
            seen: vec![0; q],
            stamp: 0,
        }
    }

    fn next_stamp(&mut self) -> u32 {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.seen.iter_mut().for_each(|s| *s = 0);
            self.stamp = 1;
        }
        self.stamp
    }

    /// Every codomain point must be reachable: `G = C + im f`.
    fn covers(&mut self, shifts: &[usize]) -> bool {
        let q = self.f.order();
        if shifts.len() * self.image.len() < q {
            return false;
        }
        let g = self.f.group();
        let stamp = self.next_stamp();
        let mut hit = 0;
        for &c in shifts {
            for &b in &self.image {
                let y = g.add(c, b);
                if self.seen[y] != stamp {
                    self.seen[y] = stamp;
                    hit += 1;
                }
            }
        }
        hit == q
    }

    fn augment(&mut self, x: usize, shifts: &[usize], stamp: u32) -> bool {
        let f = self.f;
        let fx = f.get(x);
        for &c in shifts {
            let y = f.group().add(c, fx);
            if self.seen[y] == stamp {
                continue;
            }
            self.seen[y] = stamp;
            let owner = self.match_right[y];
            if owner == UNMATCHED || self.augment(owner, shifts, stamp) {
                self.match_right[y] = x;
                self.match_left[x] = y;
                return true;
            }
        }
        false
    }

    /// Whether some `g` with image inside `shifts` makes `g + f` a bijection.
    ///
    /// Left vertices are scanned in code order and each vertex tries shifts in
    /// the given order, so the matching found is deterministic.
    pub fn feasible(&mut self, shifts: &[usize]) -> bool {
        // g is injective on every preimage class, so |C| >= u(f)
        if shifts.len() < self.uniformity || !self.covers(shifts) {
            return false;
        }
        let q = self.f.order();
        self.match_right.iter_mut().for_each(|m| *m = UNMATCHED);
        self.match_left.iter_mut().for_each(|m| *m = UNMATCHED);
        for x in 0..q {
            let stamp = self.next_stamp();
            if !self.augment(x, shifts, stamp) {
                return false;
            }
        }
        true
    }

    /// The witness `g(x) = y - f(x)` from the last successful [`feasible`](Self::feasible).
    pub fn witness(&self) -> Vec<usize> {
        let g = self.f.group();
        (0..self.f.order())
            .map(|x| g.sub(self.match_left[x], self.f.get(x)))
            .collect()
    }
}
