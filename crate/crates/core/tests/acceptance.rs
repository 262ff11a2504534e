//! Acceptance gate: one test per criterion, each printing a PASS/FAIL line
//! with its runtime.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::*;
use permres::algebra::Polynomial;
use permres::equivalence::{
    affine_transform, compose_left, compose_right, ea_transform, parse_cycles, random_permutation,
    AffineMap,
};
use permres::families::{
    gen_p_polynomial, gen_quadratic_character, lowdu_pipeline, shift_difference_condition,
    PipelineOptions, Predicted,
};
use permres::solver::{pres_exact, pres_oracle_bruteforce, PresOptions, SolveOutcome};
use permres::stats::{
    ambiguity, imbalance, m0_from_ns, n_s, preimage_distribution, pres_bounds, BoundSide,
};
use permres::{FuncTable, ShiftSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, what: &str, limit: Duration, body: impl FnOnce() -> String) {
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(body));
    let took = start.elapsed();
    match outcome {
        Ok(detail) if took <= limit => {
            println!("criterion {n:2} PASS [{took:.2?} of {limit:?}] {what}: {detail}")
        }
        Ok(detail) => {
            println!("criterion {n:2} FAIL [{took:.2?} over {limit:?}] {what}: {detail}");
            panic!("criterion {n} exceeded its time limit");
        }
        Err(e) => {
            println!("criterion {n:2} FAIL [{took:.2?}] {what}");
            std::panic::resume_unwind(e);
        }
    }
}

fn exact(f: &FuncTable) -> permres::PresCertificate {
    match pres_exact(f, &PresOptions::default()).unwrap() {
        SolveOutcome::Exact(c) => c,
        SolveOutcome::BoundLimited(b) => panic!("budget triggered: {b:?}"),
    }
}

fn pres(f: &FuncTable) -> usize {
    let c = exact(f);
    let sum = c.witness_g.add(f).unwrap();
    assert!(is_bijection(sum.values()));
    assert_eq!(image_size(c.witness_g.values()), c.pres);
    c.pres
}

#[test]
fn criterion_01_solver_matches_brute_force() {
    report(
        1,
        "solver equals brute force",
        Duration::from_secs(120),
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(101);
            let mut total = 0;
            for g in [cyclic(&[5]), cyclic(&[6]), field(7, 1)] {
                for _ in 0..200 {
                    let f = random_function(&g, &mut rng);
                    let truth = brute_force_pres(&f);
                    assert_eq!(pres(&f), truth, "{:?}", f.values());
                    assert_eq!(pres_oracle_bruteforce(&f).unwrap(), truth);
                    total += 1;
                }
            }
            let g5 = field(5, 1);
            let g7 = field(7, 1);
            let named = [
                Polynomial::from_terms(&g5, [(2, 1), (3, 4)])
                    .unwrap()
                    .eval(&g5)
                    .unwrap(),
                power_map(&g7, 3),
                power_map(&g7, 2),
                FuncTable::identity(g7.clone()),
                table(&g7, &[0, 0, 2, 2, 4, 4, 6]),
                table(&g7, &[0, 0, 0, 3, 4, 5, 6]),
                FuncTable::constant(g5.clone(), 0).unwrap(),
            ];
            for f in &named {
                assert_eq!(pres(f), brute_force_pres(f), "{:?}", f.values());
                total += 1;
            }
            format!("{total} functions agree")
        },
    );
}

#[test]
fn criterion_02_cubic_example_over_f5() {
    report(
        2,
        "pres(x^2 - x^3) over F_5",
        Duration::from_secs(1),
        || {
            let g = field(5, 1);
            let f = Polynomial::from_terms(&g, [(2, 1), (3, 4)])
                .unwrap()
                .eval(&g)
                .unwrap();
            assert_eq!(f.values(), &[0, 0, 1, 2, 2]);
            let b = pres_bounds(&f).unwrap();
            assert_eq!((b.lower, b.upper), (2, 3));
            assert_eq!(pres(&f), 3);
            "pres 3, bounds (2, 3)".into()
        },
    );
}

#[test]
fn criterion_03_quadratic_character() {
    report(
        3,
        "quadratic character values and witnesses",
        Duration::from_secs(300),
        || {
            let mut out = Vec::new();
            for p in [7usize, 11, 13, 17, 19, 23] {
                let expected = if p % 4 == 3 {
                    (p - 1) / 2
                } else {
                    p.div_ceil(2)
                };
                let fam = gen_quadratic_character(p).unwrap();
                assert_eq!(fam.f, power_map(&field(p, 1), ((p - 1) / 2) as u64));
                let g = fam.witness_g.as_ref().unwrap();
                assert!(is_bijection(g.add(&fam.f).unwrap().values()));
                assert_eq!(image_size(g.values()), expected);
                assert_eq!(fam.predicted_pres, Predicted::Exact(expected));
                let solved = pres(&fam.f);
                assert_eq!(solved, expected, "p = {p}");
                out.push(format!("p={p}:{solved}"));
            }
            out.join(" ")
        },
    );
}

/// `sum_i a_i x^(p^i)` evaluated by repeated multiplication.
fn p_poly_direct(g: &std::sync::Arc<permres::GroupTable>, coeffs: &[usize]) -> FuncTable {
    let (p, _) = g.field_params().unwrap();
    let mut vals = vec![0; g.order()];
    for (i, &a) in coeffs.iter().enumerate() {
        let m = power_map(g, (p as u64).pow(i as u32));
        for (x, v) in vals.iter_mut().enumerate() {
            *v = g.add(*v, g.mul(a, m.get(x)).unwrap());
        }
    }
    FuncTable::new(g.clone(), vals).unwrap()
}

#[test]
fn criterion_04_p_polynomials() {
    report(
        4,
        "p-polynomials have pres = kernel size = u",
        Duration::from_secs(300),
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(404);
            let mut summary = Vec::new();
            for (p, e) in [(2, 2), (2, 3), (3, 2), (2, 4), (3, 3)] {
                let g = field(p, e);
                let q = g.order();
                let mut seen = BTreeSet::new();
                while seen.len() < 10 {
                    let coeffs: Vec<usize> = (0..e).map(|_| rng.gen_range(0..q)).collect();
                    if !seen.insert(coeffs.clone()) {
                        continue;
                    }
                    let fam = gen_p_polynomial(&g, &coeffs).unwrap();
                    assert_eq!(fam.f, p_poly_direct(&g, &coeffs));
                    let kernel = fam.f.values().iter().filter(|&&v| v == 0).count();
                    assert_eq!(*fibers(&fam.f).iter().max().unwrap(), kernel);
                    let w = fam.witness_g.as_ref().unwrap();
                    assert!(is_bijection(w.add(&fam.f).unwrap().values()));
                    assert_eq!(image_size(w.values()), kernel);
                    assert_eq!(fam.predicted_pres, Predicted::Exact(kernel));
                    assert_eq!(pres(&fam.f), kernel, "{coeffs:?} over GF({q})");
                }
                summary.push(format!("GF({q}):10"));
            }
            summary.join(" ")
        },
    );
}

#[test]
fn criterion_05_bound_equality_shape() {
    report(
        5,
        "u = q-V+1 exactly for the shape",
        Duration::from_secs(120),
        || {
            let mut checked = 0;
            for n in 2..=5usize {
                let g = cyclic(&[n]);
                for mut code in 0..n.pow(n as u32) {
                    let v: Vec<usize> = (0..n)
                        .map(|_| {
                            let d = code % n;
                            code /= n;
                            d
                        })
                        .collect();
                    let f = table(&g, &v);
                    let u = *fibers(&f).iter().max().unwrap();
                    let equal = u == n - image_size(&v) + 1;
                    assert_eq!(equal, lbub_shape(&f), "{v:?}");
                    assert_eq!(pres_bounds(&f).unwrap().lb_eq_ub, equal);
                    checked += 1;
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(505);
            let primes = [7, 11, 13];
            let mut hits = 0;
            for i in 0..10_000 {
                let g = field(primes[i % 3], 1);
                let q = g.order();
                let f = if i % 2 == 0 {
                    random_function(&g, &mut rng)
                } else {
                    // collapse a random prefix of a permutation onto one value
                    let mut v = random_permutation(&g, &mut rng).into_values();
                    let k = rng.gen_range(0..q);
                    let t = v[0];
                    v.iter_mut().take(k + 1).for_each(|x| *x = t);
                    if rng.gen_bool(0.3) {
                        let j = rng.gen_range(0..q);
                        v[j] = v[rng.gen_range(0..q)];
                    }
                    table(&g, &v)
                };
                let u = *fibers(&f).iter().max().unwrap();
                let equal = u == q - image_size(f.values()) + 1;
                hits += equal as usize;
                assert_eq!(equal, lbub_shape(&f));
                let b = pres_bounds(&f).unwrap();
                assert_eq!((b.lb_eq_ub, b.char_holds), (equal, equal));
                checked += 1;
            }
            format!("{checked} functions, {hits} random ones attain equality")
        },
    );
}

fn groups_up_to_16() -> Vec<std::sync::Arc<permres::GroupTable>> {
    let mut gs: Vec<_> = (2..=16).map(|n| cyclic(&[n])).collect();
    for f in [
        &[2, 2][..],
        &[2, 4],
        &[2, 2, 2],
        &[3, 3],
        &[2, 6],
        &[4, 4],
        &[2, 2, 4],
        &[2, 2, 2, 2],
        &[2, 8],
    ] {
        gs.push(cyclic(f));
    }
    for (p, e) in [(2, 2), (2, 3), (3, 2), (2, 4)] {
        gs.push(field(p, e));
    }
    gs
}

#[test]
fn criterion_06_counting_identities() {
    report(
        6,
        "M_0 series, truncations, Nb = N_2, A = NB/2, V bound",
        Duration::from_secs(60),
        || {
            let gs = groups_up_to_16();
            let mut rng = ChaCha8Rng::seed_from_u64(606);
            for i in 0..1000 {
                let g = &gs[i % gs.len()];
                let f = if i % 7 == 0 {
                    // skewed tables reach larger uniformity
                    let k = rng.gen_range(1..=g.order());
                    FuncTable::from_fn(g.clone(), |x| x % k).unwrap()
                } else {
                    random_function(g, &mut rng)
                };
                let q = f.order();
                let c = fibers(&f);
                let u = *c.iter().max().unwrap();
                let m: Vec<usize> = (0..=u)
                    .map(|r| c.iter().filter(|&&n| n == r).count())
                    .collect();
                let m0 = m[0];

                let n2 = tuples_direct(&f, 2);
                assert_eq!(imbalance(&f), n2);
                assert_eq!(n_s(&f, 2).unwrap(), n2.into());
                if q <= 10 && u >= 3 {
                    assert_eq!(n_s(&f, 3).unwrap(), tuples_direct(&f, 3).into());
                }
                assert!(2 * image_size(f.values()) as u64 + n2 >= 2 * q as u64);

                // N_s / s! = sum_r C(r, s) M_r, so partial sums are integers
                let e = m0_from_ns(&f).unwrap();
                assert_eq!(e.m0 as usize, m0);
                let mut partial = 0i128;
                for (idx, s) in (2..=u).enumerate() {
                    let term: i128 = (s..=u).map(|r| binom(r, s) * m[r] as i128).sum();
                    partial += if s % 2 == 0 { term } else { -term };
                    let t = &e.truncations[idx];
                    assert_eq!(t.last_s, s);
                    assert_eq!(t.partial.to_string(), partial.to_string());
                    if s % 2 == 0 {
                        assert_eq!(t.side, BoundSide::Upper);
                        assert!(partial >= m0 as i128);
                    } else {
                        assert_eq!(t.side, BoundSide::Lower);
                        assert!(partial <= m0 as i128);
                    }
                }
                assert_eq!(partial, m0 as i128);

                let nb = derivative_imbalance(&f);
                let a = ambiguity(&f).unwrap();
                assert_eq!(2 * a.total, nb);
                assert_eq!(
                    preimage_distribution(&f).m,
                    m.iter().map(|&x| x as u64).collect::<Vec<_>>()
                );
            }
            format!("1000 functions over {} groups", gs.len())
        },
    );
}

#[test]
fn criterion_07_pair_over_f7() {
    report(
        7,
        "golden pair f, h over F_7",
        Duration::from_secs(1),
        || {
            let g = field(7, 1);
            let f = table(&g, &[0, 0, 2, 2, 4, 4, 6]);
            let h = table(&g, &[0, 0, 0, 3, 4, 5, 6]);
            assert_eq!(preimage_distribution(&f).m, vec![3, 1, 3]);
            assert_eq!(preimage_distribution(&h).m, vec![2, 4, 0, 1]);
            // the trailing M_3 = 0 of f is implicit
            assert_eq!(n_s(&f, 3).unwrap(), 0u32.into());
            assert_eq!(n_s(&f, 2).unwrap(), 6u32.into());
            assert_eq!(n_s(&h, 2).unwrap(), 6u32.into());
            assert_eq!((pres(&f), pres(&h)), (2, 3));
            let alt = table(&g, &[0, 1, 0, 1, 0, 1, 0]);
            assert_eq!(alt.add(&f).unwrap(), FuncTable::identity(g.clone()));
            "f: (3,1,3,0) pres 2; h: (2,4,0,1) pres 3".into()
        },
    );
}

fn random_affine(g: &std::sync::Arc<permres::GroupTable>, rng: &mut impl Rng) -> AffineMap {
    let (_, e) = g.field_params().unwrap();
    let q = g.order();
    loop {
        let coeffs: Vec<usize> = (0..e).map(|_| rng.gen_range(0..q)).collect();
        let l = p_poly_direct(g, &coeffs);
        if is_bijection(l.values()) {
            return AffineMap::new(l, rng.gen_range(0..q)).unwrap();
        }
    }
}

#[test]
fn criterion_08_invariance() {
    report(
        8,
        "right and affine invariance, counterexamples",
        Duration::from_secs(180),
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(808);
            for (p, e) in [(7, 1), (3, 2)] {
                let g = field(p, e);
                let f = power_map(&g, 2);
                let base = pres(&f);
                for _ in 0..50 {
                    let phi = random_permutation(&g, &mut rng);
                    assert_eq!(pres(&compose_right(&f, &phi).unwrap()), base);
                    let (a1, a2) = (random_affine(&g, &mut rng), random_affine(&g, &mut rng));
                    let t = affine_transform(&f, &a1, &a2).unwrap();
                    if g.order() <= 8 {
                        assert_eq!(brute_force_pres(&t), base);
                    }
                    assert_eq!(pres(&t), base);
                }
            }
            let g7 = field(7, 1);
            let sq = power_map(&g7, 2);
            assert_eq!(brute_force_pres(&sq), 3);
            let phi = parse_cycles("(0)(1)(2345)(6)", &g7).unwrap();
            let left = compose_left(&phi, &sq).unwrap();
            assert_eq!((pres(&left), brute_force_pres(&left)), (2, 2));

            let g8 = field(2, 3);
            let x = FuncTable::identity(g8.clone());
            let a3 = AffineMap::new(p_poly_direct(&g8, &[0, 1, 1]), 0).unwrap();
            let id = AffineMap::identity(&g8);
            let tr = ea_transform(&x, &id, &id, &a3).unwrap();
            assert_eq!(tr, p_poly_direct(&g8, &[1, 1, 1]));
            let (px, pt) = (brute_force_pres(&x), brute_force_pres(&tr));
            assert_eq!((pres(&x), pres(&tr)), (px, pt));
            assert!(px == 1 && pt > 1);
            format!("pres(x^2)=3, pres(phi o x^2)=2, pres(trace)={pt}")
        },
    );
}

#[test]
fn criterion_09_pipeline_bounds() {
    report(
        9,
        "planar squares and the uniformity bound",
        Duration::from_secs(300),
        || {
            let mut out = Vec::new();
            for (p, e) in [(7, 1), (3, 2), (11, 1), (13, 1)] {
                let g = field(p, e);
                let q = g.order();
                let f = power_map(&g, 2);
                assert_eq!(du(&f), 1);
                let r = lowdu_pipeline(
                    &f,
                    &PipelineOptions {
                        candidate_cap: usize::MAX,
                        ..Default::default()
                    },
                )
                .unwrap();
                assert!(
                    r.pres > 2 && 2 * r.pres <= q + 1,
                    "q = {q}, pres = {}",
                    r.pres
                );
                assert_eq!(r.candidates.len() as u64, r.optimal_sets);
                let bound = r.pres * r.pres - r.pres + 1;
                for c in &r.candidates {
                    let sum = c.g.add(&f).unwrap();
                    assert!(is_bijection(sum.values()));
                    assert_eq!(image_size(c.g.values()), r.pres);
                    let d = du(&sum);
                    assert_eq!(d, c.delta);
                    assert!(d <= bound);
                }
                out.push(format!(
                    "q={q}:pres={} sets={} best={}",
                    r.pres, r.optimal_sets, r.best_delta
                ));
            }
            let g7 = field(7, 1);
            let mut rng = ChaCha8Rng::seed_from_u64(909);
            for _ in 0..100 {
                let f = random_function(&g7, &mut rng);
                let h = random_function(&g7, &mut rng);
                let v = image_size(h.values());
                assert!(du(&h.add(&f).unwrap()) <= du(&f) * (v * v - v + 1));
            }
            out.join(" ")
        },
    );
}

#[test]
fn criterion_10_shift_difference_condition() {
    report(
        10,
        "witnesses of pres = u = d avoid shift differences",
        Duration::from_secs(10),
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(1010);
            let mut runs = 0;
            for (p, e) in [(5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1)] {
                let g = field(p, e);
                let q = g.order();
                let ds: Vec<usize> = (1..q).filter(|d| (q - 1).is_multiple_of(*d)).collect();
                for _ in 0..40 {
                    let d = ds[rng.gen_range(0..ds.len())];
                    let perm = random_permutation(&g, &mut rng);
                    let pts: Vec<usize> = (0..q).map(|x| perm.get(x)).filter(|&x| x != 0).collect();
                    let mut v = vec![0; q];
                    let other = random_permutation(&g, &mut rng);
                    let targets: Vec<usize> =
                        other.values().iter().copied().filter(|&x| x != 0).collect();
                    for (i, &x) in pts.iter().enumerate() {
                        v[x] = targets[i / d];
                    }
                    let f = table(&g, &v);
                    assert_eq!(d_to_one(&f), Some(d));
                    let c = exact(&f);
                    if c.pres == d && *fibers(&f).iter().max().unwrap() == d {
                        runs += 1;
                        let shifts = c.witness_shifts.as_slice();
                        assert!(shift_condition(&f, shifts), "{v:?} with {shifts:?}");
                        assert!(shift_difference_condition(&f, &c.witness_shifts));
                    }
                }
            }
            assert!(runs > 0);
            let qc = gen_quadratic_character(7).unwrap();
            let s = ShiftSet::new(vec![0, 3, 4]).unwrap();
            assert!(shift_condition(&qc.f, s.as_slice()));
            assert!(shift_difference_condition(&qc.f, &s));
            format!("{runs} solver runs with pres = u = d, quadratic character {{0,3,4}} passes")
        },
    );
}
