//! Sweeps that recheck the library's theorems and identities on many inputs.

use std::sync::Arc;

use permres::algebra::{GroupTable, Polynomial};
use permres::equivalence::{
    affine_transform, compose_left, compose_right, ea_transform, parse_cycles,
    random_affine_permutation, random_permutation, AffineMap,
};
use permres::families::{
    gen_p_polynomial, gen_quadratic_character, lowdu_pipeline, nonzero_fiber_size,
    shift_difference_condition, PipelineOptions, Predicted,
};
use permres::input::parse_group;
use permres::solver::{pres_exact, pres_oracle_bruteforce, PresOptions, ORACLE_MAX_ORDER};
use permres::stats::{
    analyze, differential_uniformity, is_planar, m0_from_ns, pres_bounds, StatsError,
};
use permres::FuncTable;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CliError, Result};

pub const SUITES: &[&str] = &[
    "oracle",
    "bounds",
    "lbub-shape",
    "p-polynomial",
    "quadratic-character",
    "right-invariance",
    "affine-invariance",
    "equivalence-examples",
    "du-bound",
    "planar",
    "shift-difference",
    "series",
    "ambiguity",
];

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub q_max: usize,
    pub samples: usize,
    pub p_list: Vec<usize>,
    pub field: String,
    pub seed: u64,
    pub jobs: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub check: String,
    pub params: String,
    pub pass: bool,
    pub detail: String,
}

struct Ctx<'a> {
    opts: &'a VerifyOptions,
    rng: ChaCha8Rng,
    solver: PresOptions,
    out: Vec<Check>,
}

impl Ctx<'_> {
    fn record(
        &mut self,
        suite: &'static str,
        check: &str,
        params: String,
        pass: bool,
        detail: String,
    ) {
        self.out.push(Check {
            suite,
            check: check.to_string(),
            params,
            pass,
            detail,
        });
    }

    fn pres(&self, f: &FuncTable) -> Result<usize> {
        Ok(pres_exact(f, &self.solver)?.into_certificate()?.pres)
    }

    fn random_function(&mut self, g: &Arc<GroupTable>) -> FuncTable {
        let q = g.order();
        let v = (0..q).map(|_| self.rng.gen_range(0..q)).collect();
        FuncTable::new(g.clone(), v).expect("values in range")
    }
}

/// Abelian groups of order at most `q_max` used by the random sweeps.
fn sweep_groups(q_max: usize) -> Result<Vec<(String, Arc<GroupTable>)>> {
    let mut specs: Vec<String> = (2..=q_max).map(|n| format!("zn:{n}")).collect();
    specs.extend(
        [
            "zn:2x2", "zn:2x4", "zn:2x2x2", "zn:3x3", "gf:2^2", "gf:2^3", "gf:3^2", "gf:2^4",
        ]
        .map(String::from),
    );
    let mut out = Vec::new();
    for s in specs {
        let g = parse_group(&s)?;
        if g.order() <= q_max {
            out.push((s, g));
        }
    }
    Ok(out)
}

pub fn run(suite: &str, opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut ctx = Ctx {
        opts,
        rng: ChaCha8Rng::seed_from_u64(opts.seed),
        solver: PresOptions {
            jobs: opts.jobs,
            ..Default::default()
        },
        out: Vec::new(),
    };
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(CliError::usage(format!(
            "unknown suite {suite:?}; expected all or one of {}",
            SUITES.join(", ")
        )));
    };
    for name in names {
        match name {
            "oracle" => oracle(&mut ctx)?,
            "bounds" => bounds(&mut ctx)?,
            "lbub-shape" => lbub_shape(&mut ctx)?,
            "p-polynomial" => p_polynomial(&mut ctx)?,
            "quadratic-character" => quadratic_character(&mut ctx)?,
            "right-invariance" => right_invariance(&mut ctx)?,
            "affine-invariance" => affine_invariance(&mut ctx)?,
            "equivalence-examples" => equivalence_examples(&mut ctx)?,
            "du-bound" => du_bound(&mut ctx)?,
            "planar" => planar(&mut ctx)?,
            "shift-difference" => shift_difference(&mut ctx)?,
            "series" => series(&mut ctx)?,
            "ambiguity" => ambiguity(&mut ctx)?,
            _ => unreachable!(),
        }
    }
    Ok(ctx.out)
}

fn oracle(ctx: &mut Ctx) -> Result<()> {
    let q_max = ctx.opts.q_max.min(ORACLE_MAX_ORDER);
    for (spec, g) in sweep_groups(q_max)? {
        let mut bad = 0;
        for _ in 0..ctx.opts.samples {
            let f = ctx.random_function(&g);
            if ctx.pres(&f)? != pres_oracle_bruteforce(&f)? {
                bad += 1;
            }
        }
        let params = format!("{spec} samples={}", ctx.opts.samples);
        ctx.record(
            "oracle",
            "solver equals brute force",
            params,
            bad == 0,
            format!("mismatches={bad}"),
        );
    }
    Ok(())
}

fn bounds(ctx: &mut Ctx) -> Result<()> {
    for (spec, g) in sweep_groups(ctx.opts.q_max)? {
        let q = g.order();
        let mut bad = Vec::new();
        let mut fs = vec![
            FuncTable::identity(g.clone()),
            FuncTable::constant(g.clone(), 0)?,
        ];
        for _ in 0..ctx.opts.samples {
            fs.push(ctx.random_function(&g));
        }
        for f in &fs {
            let p = ctx.pres(f)?;
            let (u, v) = (f.uniformity(), f.image_size());
            let n2 = permres::stats::n2(f) as usize;
            if p < u || p > q - v + 1 {
                bad.push(format!("u={u} pres={p} ub={}", q - v + 1));
            }
            if 2 * p > n2 + 2 {
                bad.push(format!("pres={p} above N_2/2+1 with N_2={n2}"));
            }
            if (p == 1) != f.is_permutation() || (p == q) != f.is_constant() {
                bad.push(format!("pres={p} for {:?}", f.values()));
            }
        }
        let params = format!("{spec} samples={}", fs.len());
        let detail = bad.first().cloned().unwrap_or_default();
        ctx.record(
            "bounds",
            "u <= pres <= q-V+1",
            params,
            bad.is_empty(),
            detail,
        );
    }
    Ok(())
}

/// Permutation, or a single point with more than one preimage.
fn shape_holds(f: &FuncTable) -> bool {
    let counts = f.preimage_counts();
    counts.iter().filter(|&&c| c > 1).count() <= 1
}

fn lbub_shape(ctx: &mut Ctx) -> Result<()> {
    let check =
        |ctx: &mut Ctx, spec: &str, fs: &mut dyn Iterator<Item = FuncTable>| -> Result<()> {
            let (mut n, mut bad) = (0, 0);
            for f in fs {
                n += 1;
                let q = f.order();
                let b = pres_bounds(&f)?;
                let equal = f.uniformity() == q - f.image_size() + 1;
                let mismatch = equal != shape_holds(&f) || b.lb_eq_ub != equal;
                if mismatch || (equal && q <= ctx.opts.q_max && ctx.pres(&f)? != f.uniformity()) {
                    bad += 1;
                }
            }
            ctx.record(
                "lbub-shape",
                "u = q-V+1 iff shape",
                format!("{spec} functions={n}"),
                bad == 0,
                format!("failures={bad}"),
            );
            Ok(())
        };
    for n in 2..=ctx.opts.q_max.min(5) {
        let spec = format!("zn:{n}");
        let g = parse_group(&spec)?;
        let total = n.pow(n as u32);
        let mut all = (0..total).map(|mut code| {
            let v = (0..n)
                .map(|_| {
                    let d = code % n;
                    code /= n;
                    d
                })
                .collect();
            FuncTable::new(g.clone(), v).expect("values in range")
        });
        check(ctx, &spec, &mut all)?;
    }
    for p in [7, 11, 13] {
        let spec = format!("gf:{p}");
        let g = parse_group(&spec)?;
        let mut fs: Vec<FuncTable> = (0..ctx.opts.samples)
            .map(|_| ctx.random_function(&g))
            .collect();
        // random tables rarely have the shape, so add near-permutations
        for _ in 0..ctx.opts.samples {
            let mut v: Vec<usize> = random_permutation(&g, &mut ctx.rng).into_values();
            let k = ctx.rng.gen_range(1..p);
            let target = v[0];
            for x in v.iter_mut().take(k + 1) {
                *x = target;
            }
            fs.push(FuncTable::new(g.clone(), v)?);
        }
        check(ctx, &spec, &mut fs.into_iter())?;
    }
    Ok(())
}

fn p_polynomial(ctx: &mut Ctx) -> Result<()> {
    for spec in ["gf:2^2", "gf:2^3", "gf:3^2", "gf:2^4", "gf:3^3"] {
        let g = parse_group(spec)?;
        if g.order() > ctx.opts.q_max.max(4) {
            continue;
        }
        let (_, e) = g.field_params().expect("field");
        let q = g.order();
        let mut bad = Vec::new();
        for _ in 0..ctx.opts.samples.min(12) {
            let coeffs: Vec<usize> = (0..e).map(|_| ctx.rng.gen_range(0..q)).collect();
            let fp = gen_p_polynomial(&g, &coeffs)?;
            let p = ctx.pres(&fp.f)?;
            if fp.predicted_pres != Predicted::Exact(p) || p != fp.f.uniformity() {
                bad.push(format!(
                    "{coeffs:?}: predicted {:?}, solved {p}",
                    fp.predicted_pres
                ));
            }
        }
        let detail = bad.first().cloned().unwrap_or_default();
        ctx.record(
            "p-polynomial",
            "pres(L) = #ker L = u(L)",
            spec.to_string(),
            bad.is_empty(),
            detail,
        );
    }
    Ok(())
}

fn quadratic_character(ctx: &mut Ctx) -> Result<()> {
    for &p in &ctx.opts.p_list.clone() {
        let fp = gen_quadratic_character(p)?;
        let solved = ctx.pres(&fp.f)?;
        let predicted = fp.predicted_pres.upper();
        ctx.record(
            "quadratic-character",
            "predicted equals solved",
            format!("p={p}"),
            solved == predicted,
            format!("predicted={predicted} solved={solved}"),
        );
    }
    Ok(())
}

fn square(field: &Arc<GroupTable>) -> Result<FuncTable> {
    Ok(Polynomial::monomial(2).eval(field)?)
}

fn right_invariance(ctx: &mut Ctx) -> Result<()> {
    let g = parse_group(&ctx.opts.field)?;
    let f = square(&g)?;
    let base = ctx.pres(&f)?;
    let mut counts = f.preimage_counts();
    counts.sort_unstable();
    let mut bad = 0;
    for _ in 0..ctx.opts.samples {
        let phi = random_permutation(&g, &mut ctx.rng);
        let h = compose_right(&f, &phi)?;
        let mut hc = h.preimage_counts();
        hc.sort_unstable();
        if ctx.pres(&h)? != base || h.image() != f.image() || hc != counts {
            bad += 1;
        }
    }
    let params = format!("{} x^2 samples={}", ctx.opts.field, ctx.opts.samples);
    ctx.record(
        "right-invariance",
        "pres(f o phi) = pres(f)",
        params,
        bad == 0,
        format!("failures={bad}"),
    );
    Ok(())
}

fn affine_invariance(ctx: &mut Ctx) -> Result<()> {
    let g = parse_group(&ctx.opts.field)?;
    let f = square(&g)?;
    let base = ctx.pres(&f)?;
    let mut bad = 0;
    for _ in 0..ctx.opts.samples {
        let a1 = random_affine_permutation(&g, &mut ctx.rng)?;
        let a2 = random_affine_permutation(&g, &mut ctx.rng)?;
        if ctx.pres(&affine_transform(&f, &a1, &a2)?)? != base {
            bad += 1;
        }
    }
    let params = format!("{} x^2 samples={}", ctx.opts.field, ctx.opts.samples);
    ctx.record(
        "affine-invariance",
        "pres(A1 o f o A2) = pres(f)",
        params,
        bad == 0,
        format!("failures={bad}"),
    );
    Ok(())
}

fn equivalence_examples(ctx: &mut Ctx) -> Result<()> {
    let g7 = parse_group("gf:7")?;
    let f = square(&g7)?;
    let phi = parse_cycles("(0)(1)(2345)(6)", &g7)?;
    let left = compose_left(&phi, &f)?;
    let (a, b) = (ctx.pres(&left)?, ctx.pres(&f)?);
    ctx.record(
        "equivalence-examples",
        "left composition changes pres",
        "gf:7 x^2 (2345)".into(),
        a == 2 && b == 3 && left.image_size() == f.image_size(),
        format!("pres(phi o f)={a} pres(f)={b}"),
    );
    for spec in ["gf:2^2", "gf:2^3"] {
        let g = parse_group(spec)?;
        let (_, e) = g.field_params().expect("field");
        // x + (x^2 + ... + x^(2^(e-1))) is the trace
        let rest = Polynomial::from_terms(&g, (1..e).map(|i| (1u64 << i, 1)))?.eval(&g)?;
        let a3 = AffineMap::new(rest, 0)?;
        let id = AffineMap::identity(&g);
        let x = FuncTable::identity(g.clone());
        let tr = ea_transform(&x, &id, &id, &a3)?;
        let (px, pt) = (ctx.pres(&x)?, ctx.pres(&tr)?);
        ctx.record(
            "equivalence-examples",
            "EA transform changes pres",
            format!("{spec} x -> trace"),
            px == 1 && pt > 1 && tr.image() == vec![0, 1],
            format!("pres(x)={px} pres(trace)={pt}"),
        );
    }
    Ok(())
}

fn du_bound(ctx: &mut Ctx) -> Result<()> {
    let g = parse_group(&ctx.opts.field)?;
    let f = square(&g)?;
    let report = lowdu_pipeline(
        &f,
        &PipelineOptions {
            solver: ctx.solver.clone(),
            ..Default::default()
        },
    )?;
    let ok = report.candidates.iter().all(|c| {
        c.delta <= report.bound && c.g.add(&f).map(|s| s.is_permutation()).unwrap_or(false)
    });
    ctx.record(
        "du-bound",
        "optimal witnesses within pres^2-pres+1",
        format!(
            "{} x^2 candidates={}",
            ctx.opts.field,
            report.candidates.len()
        ),
        ok,
        format!(
            "pres={} best={} bound={}",
            report.pres, report.best_delta, report.bound
        ),
    );
    let mut bad = 0;
    for _ in 0..ctx.opts.samples {
        let f = ctx.random_function(&g);
        let h = ctx.random_function(&g);
        let v = h.image_size();
        if differential_uniformity(&h.add(&f)?)? > differential_uniformity(&f)? * (v * v - v + 1) {
            bad += 1;
        }
    }
    ctx.record(
        "du-bound",
        "delta(g+f) <= delta(f)(V(g)^2-V(g)+1)",
        format!("{} pairs={}", ctx.opts.field, ctx.opts.samples),
        bad == 0,
        format!("failures={bad}"),
    );
    Ok(())
}

fn planar(ctx: &mut Ctx) -> Result<()> {
    for spec in [
        "gf:3", "gf:5", "gf:7", "gf:3^2", "gf:11", "gf:13", "gf:17", "gf:19", "gf:23", "gf:5^2",
        "gf:3^3",
    ] {
        let g = parse_group(spec)?;
        let q = g.order();
        if q > ctx.opts.q_max.max(7) {
            continue;
        }
        let f = square(&g)?;
        let p = ctx.pres(&f)?;
        let planar = is_planar(&f)?;
        let two_to_one = nonzero_fiber_size(&f) == Some(2);
        let mut ok = planar && two_to_one && 2 * f.image_size() > q && 2 * p <= q + 1;
        if q > 5 {
            ok &= p > 2;
        }
        ctx.record(
            "planar",
            "x^2 planar with pres in (2,(q+1)/2]",
            spec.to_string(),
            ok,
            format!("V={} pres={p}", f.image_size()),
        );
    }
    Ok(())
}

fn shift_difference(ctx: &mut Ctx) -> Result<()> {
    let mut runs = 0;
    let mut bad = 0;
    for (_, g) in sweep_groups(ctx.opts.q_max)? {
        let q = g.order();
        for _ in 0..ctx.opts.samples {
            // a d-to-1 map on nonzero points with f(0) = 0
            let divisors: Vec<usize> = (1..q).filter(|d| (q - 1) % d == 0).collect();
            let d = divisors[ctx.rng.gen_range(0..divisors.len())];
            let mut pts: Vec<usize> = (1..q).collect();
            pts.shuffle(&mut ctx.rng);
            let mut targets: Vec<usize> = (1..q).collect();
            targets.shuffle(&mut ctx.rng);
            let mut v = vec![0; q];
            for (i, &x) in pts.iter().enumerate() {
                v[x] = targets[i / d];
            }
            let f = FuncTable::new(g.clone(), v)?;
            debug_assert_eq!(nonzero_fiber_size(&f), Some(d));
            let cert = pres_exact(&f, &ctx.solver)?.into_certificate()?;
            if cert.pres == d && f.uniformity() == d {
                runs += 1;
                if !shift_difference_condition(&f, &cert.witness_shifts) {
                    bad += 1;
                }
            }
        }
    }
    let g7 = gen_quadratic_character(7)?;
    let s = permres::ShiftSet::new(vec![0, 3, 4])?;
    let explicit = shift_difference_condition(&g7.f, &s);
    ctx.record(
        "shift-difference",
        "quadratic character p=7 with {0,3,4}",
        "gf:7".into(),
        explicit,
        String::new(),
    );
    ctx.record(
        "shift-difference",
        "witness of pres=u=d passes",
        format!("q<={} runs={runs}", ctx.opts.q_max),
        bad == 0,
        format!("failures={bad}"),
    );
    Ok(())
}

fn identity_check(r: std::result::Result<(), StatsError>) -> Result<Option<String>> {
    match r {
        Ok(()) => Ok(None),
        Err(StatsError::IdentityViolation(m)) => Ok(Some(m)),
        Err(e) => Err(e.into()),
    }
}

fn series(ctx: &mut Ctx) -> Result<()> {
    for (spec, g) in sweep_groups(ctx.opts.q_max)? {
        let mut failures = Vec::new();
        for _ in 0..ctx.opts.samples {
            let f = ctx.random_function(&g);
            // both calls check their identities and report violations as errors
            let r = m0_from_ns(&f).and_then(|e| {
                let report = analyze(&f)?;
                if e.m0 != report.m[0] {
                    return Err(StatsError::IdentityViolation("M_0 mismatch".into()));
                }
                Ok(())
            });
            if let Some(m) = identity_check(r)? {
                failures.push(m);
            }
        }
        ctx.record(
            "series",
            "M_0 alternating sum, truncations, Nb=N_2, V>=q-N_2/2",
            format!("{spec} samples={}", ctx.opts.samples),
            failures.is_empty(),
            failures.first().cloned().unwrap_or_default(),
        );
    }
    Ok(())
}

fn ambiguity(ctx: &mut Ctx) -> Result<()> {
    for (spec, g) in sweep_groups(ctx.opts.q_max)? {
        let mut bad = 0;
        for _ in 0..ctx.opts.samples {
            let f = ctx.random_function(&g);
            let a = permres::stats::ambiguity(&f)?;
            let nb = permres::stats::derivative_imbalance(&f)?;
            if 2 * a.total != nb {
                bad += 1;
            }
        }
        ctx.record(
            "ambiguity",
            "A = NB/2",
            format!("{spec} samples={}", ctx.opts.samples),
            bad == 0,
            format!("failures={bad}"),
        );
    }
    Ok(())
}

pub fn to_csv(checks: &[Check]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for c in checks {
        w.serialize(c).map_err(|e| CliError::usage(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
