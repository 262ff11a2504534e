//! Exact permutation resemblance.
//!
//! `pres(f)` is found by increasing `k` from `u(f)` and, for each `k`,
//! enumerating shift sets `{0} ∪ S` with `S` a `(k-1)`-subset of the nonzero
//! codes in lexicographic order. Pinning `0` loses nothing: if `g + f` is a
//! bijection then so is `(-c + g) + f`. Each candidate is decided by bipartite
//! perfect matching. The search stops at `q - V(f) + 1`, where a feasible set
//! always exists.

mod matching;
mod oracle;
mod upper;

pub use oracle::{pres_oracle_bruteforce, resemblance, ORACLE_MAX_ORDER};
pub use upper::construct_upper_bound_g;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::func::FuncTable;
use crate::stats::StatsError;
use matching::Matcher;

/// Default largest group order accepted by [`pres_exact`].
pub const DEFAULT_MAX_ORDER: usize = 31;
/// Default number of optimal shift sets retained when enumerating all of them.
pub const DEFAULT_KEEP_OPTIMAL: usize = 100;

const CHUNK: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("exact solving requires an abelian group unless nonabelian input is allowed")]
    Nonabelian,
    #[error("group order {q} exceeds the solver limit {max}")]
    OrderTooLarge { q: usize, max: usize },
    #[error("brute-force oracle is limited to order {max}, got {q}")]
    OracleTooLarge { q: usize, max: usize },
    #[error("malformed shift set: {0}")]
    MalformedShiftSet(String),
    #[error("search stopped before an optimum was certified: {0}")]
    BoundLimited(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error("internal check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub type Result<T> = std::result::Result<T, SolverError>;

/// A candidate image `{c_1 = 0 < c_2 < ... < c_k}` for the shifting function `g`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ShiftSet(Vec<usize>);

impl ShiftSet {
    pub fn new(shifts: Vec<usize>) -> Result<Self> {
        if shifts.first() != Some(&0) {
            return Err(SolverError::MalformedShiftSet(format!(
                "{shifts:?} must start with 0"
            )));
        }
        if shifts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SolverError::MalformedShiftSet(format!(
                "{shifts:?} is not strictly increasing"
            )));
        }
        Ok(ShiftSet(shifts))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: usize) -> bool {
        self.0.binary_search(&c).is_ok()
    }

    fn check_range(&self, q: usize) -> Result<()> {
        match self.0.last() {
            Some(&c) if c >= q => Err(SolverError::MalformedShiftSet(format!(
                "shift {c} out of range for order {q}"
            ))),
            _ => Ok(()),
        }
    }
}

/// A witness `g` with image inside `shifts` making `g + f` a bijection, if any.
pub fn feasible_shift_set(f: &FuncTable, shifts: &ShiftSet) -> Result<Option<FuncTable>> {
    shifts.check_range(f.order())?;
    let mut m = Matcher::new(f);
    if m.feasible(shifts.as_slice()) {
        Ok(Some(FuncTable::new(f.group().clone(), m.witness())?))
    } else {
        Ok(None)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresOptions {
    /// Largest `k` to try; below `q - V(f) + 1` this can end bound-limited.
    pub max_k: Option<usize>,
    /// Worker threads: 1 is serial, 0 uses the global pool.
    pub jobs: usize,
    /// Also count every optimal shift set at the optimal `k`.
    pub enumerate_all_optimal: bool,
    /// How many optimal shift sets (with witnesses) to retain.
    pub keep_optimal: usize,
    /// Cap on the total number of shift sets examined.
    pub max_sets: Option<u64>,
    pub time_limit: Option<Duration>,
    pub max_order: usize,
    /// Accept nonabelian groups; `g + f` is then `x -> g(x) + f(x)` and the
    /// normalization `0 ∈ C` comes from left translation.
    pub allow_nonabelian: bool,
}

impl Default for PresOptions {
    fn default() -> Self {
        PresOptions {
            max_k: None,
            jobs: 1,
            enumerate_all_optimal: false,
            keep_optimal: DEFAULT_KEEP_OPTIMAL,
            max_sets: None,
            time_limit: None,
            max_order: DEFAULT_MAX_ORDER,
            allow_nonabelian: false,
        }
    }
}

impl PresOptions {
    pub fn parallel(jobs: usize) -> Self {
        PresOptions {
            jobs,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    MatchingSearch,
    BruteForceOracle,
    ClosedForm,
}

/// Exhaustive record of one `k` at which no shift set was feasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchedK {
    pub k: usize,
    pub sets: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OptimalWitness {
    pub shifts: ShiftSet,
    #[serde(serialize_with = "table_values")]
    pub g: FuncTable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OptimalSets {
    /// Number of optimal shift sets containing 0.
    pub count: u64,
    pub first: Vec<OptimalWitness>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub max_sets: Option<u64>,
    pub time_limit_ms: Option<u128>,
}

/// Certified value of `pres(f)` with a verified witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PresCertificate {
    pub pres: usize,
    #[serde(rename = "shifts")]
    pub witness_shifts: ShiftSet,
    #[serde(rename = "g", serialize_with = "table_values")]
    pub witness_g: FuncTable,
    pub method: Method,
    /// Every `k` below `pres` that was searched, all infeasible.
    pub searched: Vec<SearchedK>,
    /// Sets examined at `k = pres` before the first feasible one (inclusive).
    pub sets_at_optimum: u64,
    pub verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal: Option<OptimalSets>,
    pub budget: Budget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitReason {
    MaxK,
    MaxSets,
    TimeLimit,
}

/// Partial result of a search that ran out of budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundLimited {
    pub status: &'static str,
    pub reason: LimitReason,
    /// Every shift set smaller than this was ruled out.
    pub proven_lower: usize,
    /// `V(g)` for the constructed upper-bound witness.
    pub known_upper: usize,
    #[serde(serialize_with = "table_values")]
    pub upper_witness: FuncTable,
    pub searched: Vec<SearchedK>,
    pub budget: Budget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum SolveOutcome {
    Exact(PresCertificate),
    BoundLimited(BoundLimited),
}

impl SolveOutcome {
    pub fn certificate(&self) -> Option<&PresCertificate> {
        match self {
            SolveOutcome::Exact(c) => Some(c),
            SolveOutcome::BoundLimited(_) => None,
        }
    }

    pub fn into_certificate(self) -> Result<PresCertificate> {
        match self {
            SolveOutcome::Exact(c) => Ok(c),
            SolveOutcome::BoundLimited(b) => Err(SolverError::BoundLimited(format!(
                "{:?} after proving pres >= {} (known upper {})",
                b.reason, b.proven_lower, b.known_upper
            ))),
        }
    }

    pub fn pres(&self) -> Option<usize> {
        self.certificate().map(|c| c.pres)
    }
}

fn table_values<S: Serializer>(t: &FuncTable, s: S) -> std::result::Result<S::Ok, S::Error> {
    t.values().serialize(s)
}

/// Binomial coefficient, saturating.
pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Lexicographic `(k-1)`-subsets of `1..q`, each emitted with a leading 0.
struct ShiftSets {
    q: usize,
    current: Vec<usize>,
    done: bool,
}

impl ShiftSets {
    fn new(q: usize, k: usize) -> Self {
        let done = k == 0 || k > q;
        ShiftSets {
            q,
            current: (0..k).collect(),
            done,
        }
    }

    /// Appends up to `limit` sets to `out` (flattened); returns how many.
    fn fill(&mut self, out: &mut Vec<usize>, limit: usize) -> usize {
        let k = self.current.len();
        let mut n = 0;
        while n < limit && !self.done {
            out.extend_from_slice(&self.current);
            n += 1;
            // advance positions 1..k; position 0 stays pinned at 0
            let mut i = k;
            loop {
                if i <= 1 {
                    self.done = true;
                    break;
                }
                i -= 1;
                if self.current[i] < self.q - (k - i) {
                    self.current[i] += 1;
                    for j in i + 1..k {
                        self.current[j] = self.current[j - 1] + 1;
                    }
                    break;
                }
            }
        }
        n
    }
}

enum Scan {
    /// Index (within the k-level enumeration) of the first feasible set.
    Found(u64, Vec<usize>),
    Exhausted(u64),
    Limited(LimitReason),
}

struct Search<'a> {
    f: &'a FuncTable,
    opts: &'a PresOptions,
    started: Instant,
    examined: u64,
}

impl<'a> Search<'a> {
    fn over_time(&self) -> bool {
        self.opts
            .time_limit
            .is_some_and(|t| self.started.elapsed() > t)
    }

    fn chunk_limit(&self) -> Option<usize> {
        match self.opts.max_sets {
            Some(cap) => {
                let left = cap.saturating_sub(self.examined);
                Some(left.min(CHUNK as u64) as usize)
            }
            None => Some(CHUNK),
        }
    }

    /// First feasible set in the lexicographic enumeration at this `k`.
    fn scan(&mut self, k: usize) -> Scan {
        let q = self.f.order();
        let mut sets = ShiftSets::new(q, k);
        let mut buf = Vec::with_capacity(CHUNK * k);
        let mut offset = 0u64;
        let mut serial = Matcher::new(self.f);
        loop {
            if self.over_time() {
                return Scan::Limited(LimitReason::TimeLimit);
            }
            let limit = self.chunk_limit().unwrap();
            buf.clear();
            let n = sets.fill(&mut buf, limit.max(1));
            if n == 0 {
                return Scan::Exhausted(offset);
            }
            if limit == 0 {
                return Scan::Limited(LimitReason::MaxSets);
            }
            let hit = if self.opts.jobs == 1 {
                buf.chunks(k).position(|c| serial.feasible(c))
            } else {
                let f = self.f;
                buf.par_chunks(k)
                    .map_init(|| Matcher::new(f), |m, c| m.feasible(c))
                    .position_first(|ok| ok)
            };
            match hit {
                Some(i) => {
                    self.examined += i as u64 + 1;
                    let set = buf[i * k..(i + 1) * k].to_vec();
                    return Scan::Found(offset + i as u64 + 1, set);
                }
                None => {
                    self.examined += n as u64;
                    offset += n as u64;
                }
            }
        }
    }

    /// Every feasible set at this `k`: total count plus the first `keep`.
    fn all_feasible(&mut self, k: usize, keep: usize) -> (u64, Vec<Vec<usize>>) {
        let q = self.f.order();
        let mut sets = ShiftSets::new(q, k);
        let mut buf = Vec::with_capacity(CHUNK * k);
        let mut count = 0u64;
        let mut kept = Vec::new();
        let mut serial = Matcher::new(self.f);
        loop {
            buf.clear();
            if sets.fill(&mut buf, CHUNK) == 0 {
                break;
            }
            let flags: Vec<bool> = if self.opts.jobs == 1 {
                buf.chunks(k).map(|c| serial.feasible(c)).collect()
            } else {
                let f = self.f;
                buf.par_chunks(k)
                    .map_init(|| Matcher::new(f), |m, c| m.feasible(c))
                    .collect()
            };
            for (i, ok) in flags.into_iter().enumerate() {
                if ok {
                    count += 1;
                    if kept.len() < keep {
                        kept.push(buf[i * k..(i + 1) * k].to_vec());
                    }
                }
            }
        }
        (count, kept)
    }
}

fn witness_for(f: &FuncTable, shifts: &[usize]) -> Result<FuncTable> {
    let mut m = Matcher::new(f);
    if !m.feasible(shifts) {
        return Err(SolverError::Internal(format!(
            "shift set {shifts:?} reported feasible but no matching found"
        )));
    }
    Ok(FuncTable::new(f.group().clone(), m.witness())?)
}

fn verify_witness(f: &FuncTable, g: &FuncTable, shifts: &ShiftSet) -> Result<()> {
    let sum = g.add(f)?;
    if !sum.is_permutation() {
        return Err(SolverError::Internal("g + f is not a bijection".into()));
    }
    if g.image() != shifts.as_slice() {
        return Err(SolverError::Internal(format!(
            "image of g {:?} differs from the shift set {:?}",
            g.image(),
            shifts.as_slice()
        )));
    }
    Ok(())
}

/// Computes `pres(f)` with a certificate of optimality.
pub fn pres_exact(f: &FuncTable, opts: &PresOptions) -> Result<SolveOutcome> {
    if opts.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| SolverError::ThreadPool(e.to_string()))?;
        pool.install(|| solve(f, opts))
    } else {
        solve(f, opts)
    }
}

/// `pres(f)` with default options, failing if the certificate cannot be produced.
pub fn pres(f: &FuncTable) -> Result<usize> {
    Ok(pres_exact(f, &PresOptions::default())?
        .into_certificate()?
        .pres)
}

fn solve(f: &FuncTable, opts: &PresOptions) -> Result<SolveOutcome> {
    let q = f.order();
    if !f.group().is_abelian() && !opts.allow_nonabelian {
        return Err(SolverError::Nonabelian);
    }
    if q > opts.max_order {
        return Err(SolverError::OrderTooLarge {
            q,
            max: opts.max_order,
        });
    }
    let budget = Budget {
        max_sets: opts.max_sets,
        time_limit_ms: opts.time_limit.map(|t| t.as_millis()),
    };
    let u = f.uniformity();
    let upper = q - f.image_size() + 1;
    let top = opts.max_k.map_or(upper, |m| m.min(upper));
    let mut search = Search {
        f,
        opts,
        started: Instant::now(),
        examined: 0,
    };
    let mut searched = Vec::new();
    let limited = |reason, proven_lower, searched: Vec<SearchedK>| {
        let g = construct_upper_bound_g(f);
        Ok(SolveOutcome::BoundLimited(BoundLimited {
            status: "bound-limited",
            reason,
            proven_lower,
            known_upper: g.image_size(),
            upper_witness: g,
            searched,
            budget,
        }))
    };
    let start = u.max(1);
    for k in start..=top {
        match search.scan(k) {
            Scan::Exhausted(sets) => {
                if sets != binomial(q - 1, k - 1) {
                    return Err(SolverError::Internal(format!(
                        "examined {sets} shift sets of size {k}, expected C({}, {})",
                        q - 1,
                        k - 1
                    )));
                }
                searched.push(SearchedK { k, sets });
            }
            Scan::Limited(reason) => return limited(reason, k, searched),
            Scan::Found(sets_at_optimum, set) => {
                let shifts = ShiftSet::new(set)?;
                let g = witness_for(f, shifts.as_slice())?;
                verify_witness(f, &g, &shifts)?;
                let optimal = if opts.enumerate_all_optimal {
                    let (count, kept) = search.all_feasible(k, opts.keep_optimal);
                    let first = kept
                        .into_iter()
                        .map(|s| {
                            let shifts = ShiftSet::new(s)?;
                            let g = witness_for(f, shifts.as_slice())?;
                            verify_witness(f, &g, &shifts)?;
                            Ok(OptimalWitness { shifts, g })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Some(OptimalSets { count, first })
                } else {
                    None
                };
                return Ok(SolveOutcome::Exact(PresCertificate {
                    pres: k,
                    witness_shifts: shifts,
                    witness_g: g,
                    method: Method::MatchingSearch,
                    searched,
                    sets_at_optimum,
                    verified: true,
                    optimal,
                    budget,
                }));
            }
        }
    }
    if top < upper {
        return limited(LimitReason::MaxK, top + 1, searched);
    }
    Err(SolverError::Internal(format!(
        "no feasible shift set up to q - V + 1 = {upper}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, GroupTable};
    use std::sync::Arc;

    fn poly(p: usize, text: &str) -> FuncTable {
        let g = Arc::new(GroupTable::field(p, 1, None).unwrap());
        parse_poly(text, &g).unwrap().eval(&g).unwrap()
    }

    fn table(p: usize, values: &[usize]) -> FuncTable {
        let g = Arc::new(GroupTable::field(p, 1, None).unwrap());
        FuncTable::new(g, values.to_vec()).unwrap()
    }

    #[test]
    fn enumeration_order() {
        let mut it = ShiftSets::new(5, 3);
        let mut buf = Vec::new();
        assert_eq!(it.fill(&mut buf, 100), 6);
        let sets: Vec<&[usize]> = buf.chunks(3).collect();
        assert_eq!(
            sets,
            vec![
                [0, 1, 2],
                [0, 1, 3],
                [0, 1, 4],
                [0, 2, 3],
                [0, 2, 4],
                [0, 3, 4]
            ]
        );
        let mut single = ShiftSets::new(4, 1);
        buf.clear();
        assert_eq!(single.fill(&mut buf, 10), 1);
        assert_eq!(buf, vec![0]);
        assert_eq!(binomial(22, 10), 646_646);
        assert_eq!(binomial(5, 7), 0);
    }

    #[test]
    fn shift_set_validation() {
        assert!(ShiftSet::new(vec![0, 2, 5]).is_ok());
        assert!(ShiftSet::new(vec![1, 2]).is_err());
        assert!(ShiftSet::new(vec![0, 3, 3]).is_err());
        assert!(ShiftSet::new(vec![]).is_err());
        let f = poly(7, "x");
        let s = ShiftSet::new(vec![0, 7]).unwrap();
        assert!(matches!(
            feasible_shift_set(&f, &s),
            Err(SolverError::MalformedShiftSet(_))
        ));
    }

    #[test]
    fn feasibility_examples() {
        let id = poly(7, "x");
        let g = feasible_shift_set(&id, &ShiftSet::new(vec![0]).unwrap())
            .unwrap()
            .unwrap();
        assert!(g.values().iter().all(|&v| v == 0));

        let f = table(7, &[0, 0, 2, 2, 4, 4, 6]);
        let g = feasible_shift_set(&f, &ShiftSet::new(vec![0, 1]).unwrap())
            .unwrap()
            .unwrap();
        assert!(g.add(&f).unwrap().is_permutation());
        assert_eq!(g.image(), vec![0, 1]);
        // the alternating witness turning f into the identity is also valid
        let alt = FuncTable::new(f.group().clone(), vec![0, 1, 0, 1, 0, 1, 0]).unwrap();
        assert_eq!(alt.add(&f).unwrap(), FuncTable::identity(f.group().clone()));

        let sq = poly(7, "x^2");
        for c in 1..7 {
            let s = ShiftSet::new(vec![0, c]).unwrap();
            assert!(feasible_shift_set(&sq, &s).unwrap().is_none());
        }
    }

    #[test]
    fn exact_values() {
        assert_eq!(pres(&poly(5, "x^2 - x^3")).unwrap(), 3);
        assert_eq!(pres(&poly(7, "x^3")).unwrap(), 3);
        assert_eq!(pres(&poly(7, "x")).unwrap(), 1);
        assert_eq!(pres(&table(7, &[0, 0, 0, 3, 4, 5, 6])).unwrap(), 3);
        assert_eq!(pres(&table(7, &[0, 0, 2, 2, 4, 4, 6])).unwrap(), 2);
        assert_eq!(pres(&poly(7, "3")).unwrap(), 7);
    }

    #[test]
    fn certificate_contents() {
        let f = poly(5, "x^2 - x^3");
        let c = pres_exact(&f, &PresOptions::default())
            .unwrap()
            .into_certificate()
            .unwrap();
        assert_eq!(c.pres, 3);
        assert_eq!(c.searched, vec![SearchedK { k: 2, sets: 4 }]);
        assert!(c.verified);
        assert_eq!(c.witness_g.image_size(), 3);
        let json = serde_json::to_value(&c).unwrap();
        assert_eq!(json["pres"], 3);
        assert_eq!(json["searched"][0]["k"], 2);
        assert_eq!(json["method"], "matching-search");
        assert_eq!(json["verified"], true);
    }

    #[test]
    fn bound_limited_results() {
        let sq = poly(11, "x^2");
        let opts = PresOptions {
            max_k: Some(2),
            ..Default::default()
        };
        match pres_exact(&sq, &opts).unwrap() {
            SolveOutcome::BoundLimited(b) => {
                assert_eq!(b.reason, LimitReason::MaxK);
                assert_eq!(b.proven_lower, 3);
                assert!(b.known_upper <= 6);
                assert!(b.upper_witness.add(&sq).unwrap().is_permutation());
            }
            other => panic!("{other:?}"),
        }
        let opts = PresOptions {
            max_sets: Some(3),
            ..Default::default()
        };
        let out = pres_exact(&sq, &opts).unwrap();
        assert!(matches!(
            out,
            SolveOutcome::BoundLimited(BoundLimited {
                reason: LimitReason::MaxSets,
                ..
            })
        ));
        assert!(out.into_certificate().is_err());
        let big = Arc::new(GroupTable::field(37, 1, None).unwrap());
        assert!(matches!(
            pres_exact(&FuncTable::identity(big), &PresOptions::default()),
            Err(SolverError::OrderTooLarge { .. })
        ));
    }

    #[test]
    fn serial_and_parallel_agree() {
        let sq = poly(13, "x^2");
        let serial = pres_exact(
            &sq,
            &PresOptions {
                enumerate_all_optimal: true,
                ..Default::default()
            },
        )
        .unwrap();
        let parallel = pres_exact(
            &sq,
            &PresOptions {
                jobs: 4,
                enumerate_all_optimal: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(serial, parallel);
    }
}
