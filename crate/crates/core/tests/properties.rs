mod common;

use std::sync::Arc;

use common::*;
use permres::algebra::{parse_poly, GroupTable};
use permres::equivalence::{compose_left, compose_right};
use permres::solver::{construct_upper_bound_g, feasible_shift_set, pres_exact, PresOptions};
use permres::stats::{
    analyze, differential_uniformity, imbalance, m0_from_ns, n_s, preimage_distribution,
    pres_bounds,
};
use permres::{FuncTable, ShiftSet};
use proptest::prelude::*;

fn group_specs() -> Vec<Vec<usize>> {
    vec![
        vec![2],
        vec![3],
        vec![4],
        vec![5],
        vec![6],
        vec![7],
        vec![2, 2],
        vec![2, 3],
        vec![2, 4],
        vec![3, 3],
    ]
}

/// A random function on a small abelian group.
fn small_function(max_order: usize) -> impl Strategy<Value = FuncTable> {
    let specs: Vec<Vec<usize>> = group_specs()
        .into_iter()
        .filter(|f| f.iter().product::<usize>() <= max_order)
        .collect();
    proptest::sample::select(specs).prop_flat_map(|factors| {
        let q: usize = factors.iter().product();
        proptest::collection::vec(0..q, q).prop_map(move |v| table(&cyclic(&factors), &v))
    })
}

fn permutation_of(q: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..q).collect::<Vec<usize>>()).prop_shuffle()
}

fn solve(f: &FuncTable, jobs: usize) -> permres::PresCertificate {
    pres_exact(f, &PresOptions::parallel(jobs))
        .unwrap()
        .into_certificate()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pres_within_bounds(f in small_function(9)) {
        let c = solve(&f, 1);
        let q = f.order();
        let u = *fibers(&f).iter().max().unwrap();
        let v = image_size(f.values());
        prop_assert!(u <= c.pres && c.pres <= q - v + 1);
        prop_assert_eq!(c.pres == 1, is_bijection(f.values()));
        prop_assert_eq!(c.pres == q, v == 1);
        prop_assert!(is_bijection(c.witness_g.add(&f).unwrap().values()));
        prop_assert_eq!(c.witness_g.image(), c.witness_shifts.as_slice().to_vec());
        prop_assert!(c.searched.iter().all(|s| s.k < c.pres));
        if pres_bounds(&f).unwrap().lb_eq_ub {
            prop_assert_eq!(c.pres, u);
        }
    }

    #[test]
    fn solver_matches_reference(f in small_function(7)) {
        prop_assert_eq!(solve(&f, 1).pres, brute_force_pres(&f));
    }

    #[test]
    fn parallel_certificate_is_identical(f in small_function(9)) {
        prop_assert_eq!(solve(&f, 1), solve(&f, 3));
    }

    #[test]
    fn feasibility_is_monotone(f in small_function(9), picks in proptest::collection::vec(any::<bool>(), 9), extra in 1usize..9) {
        let q = f.order();
        let mut small = vec![0];
        small.extend((1..q).filter(|&c| picks[c]));
        let mut big = small.clone();
        let add = extra % q;
        if !big.contains(&add) {
            big.push(add);
            big.sort_unstable();
        }
        let small = ShiftSet::new(small).unwrap();
        let big = ShiftSet::new(big).unwrap();
        if let Some(g) = feasible_shift_set(&f, &small).unwrap() {
            prop_assert!(is_bijection(g.add(&f).unwrap().values()));
            prop_assert!(g.image().iter().all(|c| small.contains(*c)));
            prop_assert!(feasible_shift_set(&f, &big).unwrap().is_some());
        }
    }

    #[test]
    fn upper_bound_witness(f in small_function(9)) {
        let g = construct_upper_bound_g(&f);
        prop_assert!(is_bijection(g.add(&f).unwrap().values()));
        prop_assert!(image_size(g.values()) <= f.order() - image_size(f.values()) + 1);
    }

    #[test]
    fn distribution_sums(f in small_function(9)) {
        let d = preimage_distribution(&f);
        let q = f.order() as u64;
        prop_assert_eq!(d.m.iter().sum::<u64>(), q);
        prop_assert_eq!(d.m.iter().enumerate().map(|(r, &m)| r as u64 * m).sum::<u64>(), q);
        prop_assert_eq!(d.v as u64, q - d.m[0]);
        prop_assert!(*d.m.last().unwrap() >= 1);
    }

    #[test]
    fn tuple_counts_match_enumeration(f in small_function(9)) {
        let u = *fibers(&f).iter().max().unwrap();
        for s in 2..=u.min(4) {
            prop_assert_eq!(n_s(&f, s).unwrap(), tuples_direct(&f, s).into());
        }
        prop_assert_eq!(imbalance(&f), tuples_direct(&f, 2));
        prop_assert_eq!(m0_from_ns(&f).unwrap().m0 as usize, f.order() - image_size(f.values()));
    }

    #[test]
    fn differential_identities(f in small_function(9)) {
        let r = analyze(&f).unwrap();
        prop_assert_eq!(r.delta, Some(du(&f)));
        prop_assert_eq!(r.nbb, Some(derivative_imbalance(&f)));
        prop_assert_eq!(2 * r.ambiguity.unwrap(), r.nbb.unwrap());
        prop_assert_eq!(r.row_ambiguity.as_ref().unwrap().iter().sum::<u64>(), r.ambiguity.unwrap());
    }

    #[test]
    fn composition_preserves_images(v in proptest::collection::vec(0usize..7, 7), phi in permutation_of(7)) {
        let g = field(7, 1);
        let f = table(&g, &v);
        let phi = table(&g, &phi);
        let right = compose_right(&f, &phi).unwrap();
        prop_assert_eq!(right.image(), f.image());
        prop_assert_eq!(fibers(&right), fibers(&f));
        let left = compose_left(&phi, &f).unwrap();
        prop_assert_eq!(image_size(left.values()), image_size(f.values()));
    }

    #[test]
    fn group_axioms(factors in proptest::collection::vec(2usize..6, 1..4)) {
        let g = GroupTable::cyclic_product(&factors).unwrap();
        let q = g.order();
        for x in 0..q {
            prop_assert_eq!(g.add(x, g.neg(x)), 0);
            prop_assert_eq!(g.add(x, 0), x);
            let row: Vec<usize> = (0..q).map(|y| g.add(x, y)).collect();
            prop_assert!(is_bijection(&row));
        }
    }
}

#[test]
fn planar_squares_have_large_images() {
    for (p, e) in [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1)] {
        let g = field(p, e);
        let f = power_map(&g, 2);
        assert_eq!(du(&f), 1);
        assert!(2 * image_size(f.values()) > g.order());
    }
}

#[test]
fn statistics_do_not_depend_on_the_modulus() {
    let a = Arc::new(GroupTable::field(2, 4, Some(&[1, 1, 0, 0, 1])).unwrap());
    let b = Arc::new(GroupTable::field(2, 4, Some(&[1, 0, 0, 1, 1])).unwrap());
    for poly in ["x^3", "x^7", "x^2 + x", "x^5 + x^3 + x"] {
        let fa = parse_poly(poly, &a).unwrap().eval(&a).unwrap();
        let fb = parse_poly(poly, &b).unwrap().eval(&b).unwrap();
        let (ra, rb) = (analyze(&fa).unwrap(), analyze(&fb).unwrap());
        assert_eq!(
            (ra.v, ra.u, &ra.m, ra.delta, ra.nbb),
            (rb.v, rb.u, &rb.m, rb.delta, rb.nbb),
            "{poly}"
        );
        assert_eq!(differential_uniformity(&fa).unwrap(), du(&fb));
    }
}

#[test]
fn field_arithmetic_by_definition() {
    for (p, e) in [(2, 3), (3, 2), (5, 2), (2, 6)] {
        let g = field(p, e);
        let q = g.order() as u64;
        for a in 0..g.order() {
            assert_eq!(g.pow(a, q).unwrap(), a);
            for b in 0..g.order() {
                let c = (a * 7 + b) % g.order();
                let lhs = g.mul(a, g.add(b, c)).unwrap();
                let rhs = g.add(g.mul(a, b).unwrap(), g.mul(a, c).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
        let zero = parse_poly(&format!("x^{q} - x"), &g)
            .unwrap()
            .eval(&g)
            .unwrap();
        assert!(zero.values().iter().all(|&v| v == 0));
    }
}
