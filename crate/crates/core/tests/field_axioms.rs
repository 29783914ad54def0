mod common;

use std::sync::Arc;

use nps_core::gfield::{gaussian_solve, FieldSpec};
use proptest::prelude::*;

use common::{check_field_axioms, det, naive_mul};

#[test]
fn axioms_hold_exhaustively() {
    for q in [5, 7, 8, 16] {
        check_field_axioms(&FieldSpec::of_order(q).unwrap());
    }
}

#[test]
fn extension_multiplication_matches_schoolbook() {
    for q in [4, 8, 9, 16] {
        let f = FieldSpec::of_order(q).unwrap();
        let poly = f.reduction_poly().unwrap().to_vec();
        for a in 0..q {
            for b in 0..q {
                assert_eq!(f.mul(a, b), naive_mul(f.characteristic(), &poly, a, b), "GF({q}) {a}*{b}");
            }
        }
    }
    // a non-default irreducible polynomial for GF(8): x^3 + x^2 + 1
    let f = FieldSpec::new(2, 3, Some(&[1, 0, 1, 1])).unwrap();
    for a in 0..8 {
        for b in 0..8 {
            assert_eq!(f.mul(a, b), naive_mul(2, &[1, 0, 1, 1], a, b));
        }
    }
}

#[test]
fn prime_multiplication_is_modular() {
    for p in [2, 3, 5, 7, 11, 13] {
        let f = FieldSpec::prime(p).unwrap();
        for a in 0..p {
            for b in 0..p {
                assert_eq!(f.mul(a, b), a * b % p);
                assert_eq!(f.add(a, b), (a + b) % p);
            }
        }
    }
}

#[test]
fn alpha_is_primitive() {
    for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 49, 64, 81, 128, 256] {
        let f = FieldSpec::of_order(q).unwrap();
        let a = f.alpha();
        let mut x = 1;
        let mut order = 0;
        loop {
            x = f.mul(x, a);
            order += 1;
            if x == 1 {
                break;
            }
        }
        assert_eq!(order, q - 1, "order of alpha in GF({q})");
        // alpha_pow agrees with repeated multiplication
        let mut x = 1;
        for k in 0..(2 * q as u64) {
            assert_eq!(f.alpha_pow(k), x);
            x = f.mul(x, a);
        }
    }
}

#[test]
fn pow_matches_repeated_multiplication() {
    let f = FieldSpec::of_order(9).unwrap();
    for a in 1..9 {
        let mut x = 1;
        for k in 0..20i64 {
            assert_eq!(f.pow(a, k), Some(x));
            assert_eq!(f.pow(a, -k), f.inv(x));
            x = f.mul(x, a);
        }
    }
    assert_eq!(f.pow(0, 0), Some(1));
    assert_eq!(f.pow(0, 3), Some(0));
    assert_eq!(f.pow(0, -1), None);
}

fn arb_system() -> impl Strategy<Value = (u32, Vec<Vec<u32>>, Vec<u32>)> {
    (prop::sample::select(vec![2u32, 3, 4, 5, 7, 8, 9, 11, 16]), 1usize..=5).prop_flat_map(|(q, k)| {
        (
            Just(q),
            prop::collection::vec(prop::collection::vec(0..q, k), k),
            prop::collection::vec(0..q, k),
        )
    })
}

fn apply(f: &FieldSpec, a: &[Vec<u32>], x: &[u32]) -> Vec<u32> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(0, |acc, (&c, &v)| f.add(acc, f.mul(c, v))))
        .collect()
}

proptest! {
    #[test]
    fn solve_agrees_with_determinant((q, a, x) in arb_system()) {
        let f: Arc<FieldSpec> = FieldSpec::of_order(q).unwrap();
        let b = apply(&f, &a, &x);
        let d = det(&f, &a);
        let solved = f.solve(a.clone(), b.clone());
        if d == 0 {
            prop_assert!(solved.is_err());
            prop_assert!(f.rank(a.clone()) < a.len());
        } else {
            prop_assert_eq!(solved.unwrap(), x.clone());
            prop_assert_eq!(f.rank(a.clone()), a.len());
            let ea: Vec<Vec<_>> = a.iter().map(|r| r.iter().map(|&v| f.element(v).unwrap()).collect()).collect();
            let eb: Vec<_> = b.iter().map(|&v| f.element(v).unwrap()).collect();
            let ex: Vec<u32> = gaussian_solve(&ea, &eb).unwrap().iter().map(|e| e.value()).collect();
            prop_assert_eq!(ex, x);
        }
    }

    #[test]
    fn element_operators_match_raw(q in prop::sample::select(vec![4u32, 5, 9, 16]), a in 0u32..16, b in 0u32..16) {
        let f = FieldSpec::of_order(q).unwrap();
        let (a, b) = (a % q, b % q);
        let (ea, eb) = (f.element(a).unwrap(), f.element(b).unwrap());
        prop_assert_eq!((&ea + &eb).value(), f.add(a, b));
        prop_assert_eq!((&ea - &eb).value(), f.sub(a, b));
        prop_assert_eq!((&ea * &eb).value(), f.mul(a, b));
        prop_assert_eq!(ea.inv().ok().map(|e| e.value()), f.inv(a));
    }
}
