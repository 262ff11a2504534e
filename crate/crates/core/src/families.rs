//! Function families with known resemblance, their explicit witnesses, and the
//! planar-to-permutation pipeline.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{is_prime, AlgebraError, GroupTable, Polynomial};
use crate::func::FuncTable;
use crate::solver::{self, PresOptions, ShiftSet, SolverError};
use crate::stats::{differential_uniformity, is_planar, StatsError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("{0} requires a field")]
    NotAField(String),
    #[error("planar functions need odd characteristic, got {0}")]
    EvenCharacteristic(usize),
    #[error("{0} is not an odd prime")]
    NotOddPrime(usize),
    #[error("bad coefficients: {0}")]
    Coefficients(String),
    #[error("witness check failed: {0}")]
    Witness(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub type Result<T> = std::result::Result<T, FamilyError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Predicted {
    Exact(usize),
    Interval { lo: usize, hi: usize },
}

impl Predicted {
    pub fn upper(&self) -> usize {
        match *self {
            Predicted::Exact(v) => v,
            Predicted::Interval { hi, .. } => hi,
        }
    }
}

/// Where a prediction and its witness come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// Kernel size of an additive polynomial, witness from coset transversals.
    PPolynomialKernel,
    /// Explicit shift sets for `x^((p-1)/2)`.
    QuadraticCharacter,
    /// Exact search, used where no construction applies.
    Solver,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyPrediction {
    #[serde(serialize_with = "values")]
    pub f: FuncTable,
    pub predicted_pres: Predicted,
    #[serde(serialize_with = "opt_values")]
    pub witness_g: Option<FuncTable>,
    /// Image of the witness, ascending.
    pub witness_shifts: Option<Vec<usize>>,
    pub source: Source,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn values<S: serde::Serializer>(t: &FuncTable, s: S) -> std::result::Result<S::Ok, S::Error> {
    t.values().serialize(s)
}

fn opt_values<S: serde::Serializer>(
    t: &Option<FuncTable>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    t.as_ref().map(|t| t.values()).serialize(s)
}

fn check_witness(f: &FuncTable, g: &FuncTable, expected_v: usize) -> Result<()> {
    if !g.add(f)?.is_permutation() {
        return Err(FamilyError::Witness("g + f is not a bijection".into()));
    }
    if g.image_size() != expected_v {
        return Err(FamilyError::Witness(format!(
            "V(g) = {}, expected {expected_v}",
            g.image_size()
        )));
    }
    Ok(())
}

fn prediction(f: FuncTable, pres: usize, g: FuncTable, source: Source) -> Result<FamilyPrediction> {
    check_witness(&f, &g, pres)?;
    Ok(FamilyPrediction {
        witness_shifts: Some(g.image()),
        f,
        predicted_pres: Predicted::Exact(pres),
        witness_g: Some(g),
        source,
        note: None,
    })
}

/// `L(x) = sum_i a_i x^(p^i)` over `GF(p^e)`, with `pres(L) = #ker L = u(L)`.
///
/// The witness sends the `i`-th smallest point of every fiber of `L` to the
/// smallest element of the `i`-th coset of `im L`, cosets ordered by their
/// smallest element.
pub fn gen_p_polynomial(field: &Arc<GroupTable>, coeffs: &[usize]) -> Result<FamilyPrediction> {
    let (p, e) = field
        .field_params()
        .ok_or_else(|| FamilyError::NotAField(field.describe()))?;
    if coeffs.is_empty() || coeffs.len() > e {
        return Err(FamilyError::Coefficients(format!(
            "expected between 1 and {e} coefficients, got {}",
            coeffs.len()
        )));
    }
    let terms = coeffs
        .iter()
        .enumerate()
        .map(|(i, &a)| ((p as u64).pow(i as u32), a));
    let l = Polynomial::from_terms(field, terms)?.eval(field)?;
    let q = field.order();
    let kernel = l.values().iter().filter(|&&v| v == 0).count();

    let image = l.image();
    let mut coset_of = vec![usize::MAX; q];
    let mut reps = Vec::new();
    for y in 0..q {
        if coset_of[y] == usize::MAX {
            let i = reps.len();
            reps.push(y);
            for &b in &image {
                coset_of[field.add(y, b)] = i;
            }
        }
    }
    // rank of x within its fiber, counted in ascending code order
    let mut seen = vec![0usize; q];
    let mut g = vec![0; q];
    for x in 0..q {
        let b = l.get(x);
        g[x] = reps[seen[b]];
        seen[b] += 1;
    }
    let g = FuncTable::new(field.clone(), g)?;
    prediction(l, kernel, g, Source::PPolynomialKernel)
}

fn quadchar_sets(p: usize) -> (Vec<usize>, Vec<usize>) {
    if p % 4 == 3 {
        let mut s = vec![0];
        for t in 1..=(p - 3) / 4 {
            s.extend([4 * t - 1, 4 * t]);
        }
        (s.clone(), s)
    } else {
        let mut base = vec![0];
        for t in 1..=(p - 5) / 4 {
            base.extend([4 * t - 1, 4 * t]);
        }
        let mut plus = base.clone();
        plus.push(p - 3);
        let mut minus = base;
        minus.push(p - 2);
        (plus, minus)
    }
}

/// `x^((p-1)/2)` over `F_p`: resemblance `(p-1)/2` when `p = 3 mod 4`, `(p+1)/2`
/// when `p = 1 mod 4`.
///
/// For `p >= 7` the witness is explicit: `g(0) = 0` and the preimages of `1`
/// and of `-1`, ascending, go to the ascending elements of their target sets.
/// For `p` in `{3, 5}` the value and witness come from the solver.
pub fn gen_quadratic_character(p: usize) -> Result<FamilyPrediction> {
    if p < 3 || !is_prime(p as u64) {
        return Err(FamilyError::NotOddPrime(p));
    }
    let field = Arc::new(GroupTable::field(p, 1, None)?);
    let f = Polynomial::monomial(((p - 1) / 2) as u64).eval(&field)?;
    let pres = if p % 4 == 3 {
        (p - 1) / 2
    } else {
        p.div_ceil(2)
    };
    if p < 7 {
        let cert = solver::pres_exact(&f, &PresOptions::default())?.into_certificate()?;
        let mut out = prediction(f, cert.pres, cert.witness_g, Source::Solver)?;
        if cert.pres != pres {
            return Err(FamilyError::Witness(format!(
                "solver gives {} for p = {p}, expected {pres}",
                cert.pres
            )));
        }
        out.note = Some(format!(
            "p = {p} is below the explicit construction; solved exactly"
        ));
        return Ok(out);
    }
    let (plus, minus) = quadchar_sets(p);
    let (mut i_plus, mut i_minus) = (0, 0);
    let mut g = vec![0; p];
    for x in 1..p {
        if f.get(x) == 1 {
            g[x] = plus[i_plus];
            i_plus += 1;
        } else {
            g[x] = minus[i_minus];
            i_minus += 1;
        }
    }
    let g = FuncTable::new(field, g)?;
    prediction(f, pres, g, Source::QuadraticCharacter)
}

/// `x^d` over an odd-characteristic field, tagged with its planarity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanarMonomial {
    pub exponent: u64,
    #[serde(serialize_with = "values")]
    pub f: FuncTable,
    pub planar: bool,
    /// `f(0) = 0` and every nonzero image has exactly two nonzero preimages.
    pub two_to_one: bool,
}

pub fn gen_planar_monomial(field: &Arc<GroupTable>, exponent: u64) -> Result<PlanarMonomial> {
    let (p, _) = field
        .field_params()
        .ok_or_else(|| FamilyError::NotAField(field.describe()))?;
    if p == 2 {
        return Err(FamilyError::EvenCharacteristic(p));
    }
    let f = Polynomial::monomial(exponent).eval(field)?;
    let planar = is_planar(&f)?;
    Ok(PlanarMonomial {
        exponent,
        two_to_one: is_two_to_one(&f),
        planar,
        f,
    })
}

/// `f(0) = 0` and `f` is exactly `d`-to-1 on nonzero points; returns `d`.
pub fn nonzero_fiber_size(f: &FuncTable) -> Option<usize> {
    if f.get(0) != 0 {
        return None;
    }
    let mut counts = vec![0usize; f.order()];
    for x in 1..f.order() {
        counts[f.get(x)] += 1;
    }
    if counts[0] != 0 {
        return None;
    }
    let mut sizes = counts.into_iter().filter(|&c| c > 0);
    let d = sizes.next()?;
    sizes.all(|c| c == d).then_some(d)
}

pub fn is_two_to_one(f: &FuncTable) -> bool {
    nonzero_fiber_size(f) == Some(2)
}

/// Whether `f(x) - f(y)` avoids every difference `c_i - c_j` (`i != j`) for all
/// nonzero `x, y`.
///
/// Meaningful when `f(0) = 0`: it is then necessary for `C` to witness
/// `pres(f) = u(f) = #C` with `f` being `#C`-to-1 on nonzero points.
pub fn shift_difference_condition(f: &FuncTable, shifts: &ShiftSet) -> bool {
    let grp = f.group();
    let q = f.order();
    let c = shifts.as_slice();
    let mut forbidden = vec![false; q];
    for &a in c {
        for &b in c {
            if a != b {
                forbidden[grp.sub(a, b)] = true;
            }
        }
    }
    let mut vals: Vec<usize> = (1..q).map(|x| f.get(x)).collect();
    vals.sort_unstable();
    vals.dedup();
    vals.iter()
        .all(|&a| vals.iter().all(|&b| !forbidden[grp.sub(a, b)]))
}

pub const DEFAULT_CANDIDATE_CAP: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineOptions {
    pub candidate_cap: usize,
    pub solver: PresOptions,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            candidate_cap: DEFAULT_CANDIDATE_CAP,
            solver: PresOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub shifts: ShiftSet,
    #[serde(serialize_with = "values")]
    pub g: FuncTable,
    /// Differential uniformity of the permutation `g + f`.
    pub delta: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineReport {
    #[serde(serialize_with = "values")]
    pub f: FuncTable,
    pub planar: bool,
    pub delta_f: usize,
    pub pres: usize,
    /// All optimal shift sets; only the first `candidates.len()` are examined.
    pub optimal_sets: u64,
    pub candidates: Vec<Candidate>,
    pub best_delta: usize,
    /// `delta_f * (pres^2 - pres + 1)`.
    pub bound: usize,
    /// Distinct values of `delta` over the candidates.
    pub distinct_deltas: Vec<usize>,
}

/// Turns optimal witnesses `g` for `f` into permutations `g + f` and records
/// their differential uniformity against `delta_f * (pres^2 - pres + 1)`.
pub fn lowdu_pipeline(f: &FuncTable, opts: &PipelineOptions) -> Result<PipelineReport> {
    let delta_f = differential_uniformity(f)?;
    let solver_opts = PresOptions {
        enumerate_all_optimal: true,
        keep_optimal: opts.candidate_cap.max(1),
        ..opts.solver.clone()
    };
    let cert = solver::pres_exact(f, &solver_opts)?.into_certificate()?;
    let optimal = cert
        .optimal
        .ok_or_else(|| FamilyError::Witness("solver returned no optimal sets".into()))?;
    let pres = cert.pres;
    let bound = delta_f * (pres * pres - pres + 1);
    let candidates = optimal
        .first
        .into_par_iter()
        .take(opts.candidate_cap)
        .map(|w| -> Result<Candidate> {
            let sum = w.g.add(f)?;
            if !sum.is_permutation() {
                return Err(FamilyError::Witness("g + f is not a bijection".into()));
            }
            let delta = differential_uniformity(&sum)?;
            if delta > bound {
                return Err(FamilyError::Witness(format!(
                    "delta(g + f) = {delta} exceeds {bound} for shifts {:?}",
                    w.shifts.as_slice()
                )));
            }
            Ok(Candidate {
                shifts: w.shifts,
                g: w.g,
                delta,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let distinct: BTreeSet<usize> = candidates.iter().map(|c| c.delta).collect();
    Ok(PipelineReport {
        f: f.clone(),
        planar: delta_f == 1,
        delta_f,
        pres,
        optimal_sets: optimal.count,
        best_delta: distinct.first().copied().unwrap_or(0),
        distinct_deltas: distinct.into_iter().collect(),
        bound,
        candidates,
    })
}

fn join(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

impl PipelineReport {
    /// One row per candidate: `index,shifts,g,delta,bound`, lists space separated.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,shifts,g,delta,bound\n");
        for (i, c) in self.candidates.iter().enumerate() {
            out.push_str(&format!(
                "{i},{},{},{},{}\n",
                join(c.shifts.as_slice()),
                join(c.g.values()),
                c.delta,
                self.bound
            ));
        }
        out
    }
}
