use std::cmp::Ordering;

use num::{BigInt, BigRational, One};
use proptest::prelude::*;

use mumford::case_catalog::{a_family_grid, case_ab, CaseId, Family};
use mumford::finite_groups::BranchDatum;
use mumford::hurwitz_bounds::{
    attaining_genera, exceptional_genera, exceptional_orders, f_compare, hurwitz_genus, lambda_criterion, CoverData,
};

/// Tame ramification only.
const LARGE_PRIME: u32 = 1_000_003;

/// F(x)/(x − 1) enclosed in an interval of width below 10⁻³⁰.
fn f_ratio(x: u64) -> (BigRational, BigRational) {
    let scale = BigInt::from(10).pow(40);
    let xb = BigInt::from(x);
    let r = (&xb * &scale * &scale).sqrt();
    let at = |s: BigInt| {
        let num = &xb * 4 * &scale + (&xb + 1) * 2 * s;
        BigRational::new(num, (&xb - 1) * &scale)
    };
    (at(r.clone()), at(r + 1))
}

fn ratio_cmp(x: u64, y: u64) -> Ordering {
    let (xl, xh) = f_ratio(x);
    let (yl, yh) = f_ratio(y);
    if xh < yl {
        Ordering::Less
    } else if yh < xl {
        Ordering::Greater
    } else {
        panic!("intervals for {x} and {y} overlap")
    }
}

#[test]
fn f_ratio_falls_to_six_then_rises() {
    for x in 2..6 {
        assert_eq!(ratio_cmp(x, x + 1), Ordering::Greater, "x = {x}");
    }
    for x in 6..2000 {
        assert_eq!(ratio_cmp(x, x + 1), Ordering::Less, "x = {x}");
    }
}

#[test]
fn twelve_exceeds_f_ratio_only_for_five_to_eight() {
    let twelve = BigRational::from_integer(12.into());
    let below: Vec<u64> = (2..=10_000).filter(|&g| f_ratio(g).1 < twelve).collect();
    assert_eq!(below, vec![5, 6, 7, 8]);
    assert_eq!(exceptional_genera(10_000), below);
}

#[test]
fn exceptional_orders_per_genus() {
    assert_eq!(exceptional_orders(5), vec![47, 48]);
    assert_eq!(exceptional_orders(6), vec![59, 60]);
    assert_eq!(exceptional_orders(7), vec![71, 72]);
    assert_eq!(exceptional_orders(8), vec![83, 84]);
}

#[test]
fn f_is_attained_at_perfect_squares() {
    // F(s²) = 2s(s + 1)² is an integer.
    for s in 2u64..40 {
        let g = BigInt::from(s * s);
        let f = BigInt::from(2 * s * (s + 1) * (s + 1));
        assert_eq!(f_compare(&f, &g), Ordering::Equal);
        assert_eq!(f_compare(&(&f - 1), &g), Ordering::Less);
        assert_eq!(f_compare(&(&f + 1), &g), Ordering::Greater);
    }
}

#[test]
fn attaining_genera_solve_lambda_b_equals_f() {
    for (a, b) in [(1, 12), (5, 72), (3, 20), (11, 240)] {
        let (a, b) = (BigInt::from(a), BigInt::from(b));
        for g in attaining_genera(&a, &b) {
            let lambda = (&g - 1) / &a;
            assert_eq!(f_compare(&(&lambda * &b), &g), Ordering::Equal);
        }
    }
    assert_eq!(attaining_genera(&1.into(), &12.into()), vec![BigInt::from(4), BigInt::from(9)]);
}

#[test]
fn lambda_one_fails_for_the_double_borel_and_top_cases() {
    let one = BigInt::one();
    for (p, t) in [(3, 1), (5, 1), (7, 1), (2, 2), (3, 2)] {
        let id = CaseId::new(Family::A(1), p).with_t(t).with_ti(1, 2 * t);
        let (a, b) = case_ab(&id).unwrap();
        assert!(!lambda_criterion(&one, &a, &b), "{id}");
    }
    for (p, t) in [(5, 2), (7, 2), (3, 3)] {
        let id = CaseId::new(Family::A(5), p).with_t(t).with_ti(5, t);
        let (a, b) = case_ab(&id).unwrap();
        assert!(!lambda_criterion(&one, &a, &b), "{id}");
    }
}

#[test]
fn grid_orders_are_positive() {
    for id in a_family_grid(&[2, 3], 2, 4) {
        let (_, b) = case_ab(&id).unwrap();
        assert!(b > BigInt::from(0), "{id}");
    }
}

proptest! {
    #[test]
    fn f_ratio_is_increasing_past_six(x in 6u64..1_000_000) {
        prop_assert_eq!(ratio_cmp(x, x + 1), Ordering::Less);
    }

    #[test]
    fn f_compare_agrees_with_the_interval(n in 1u64..100_000, g in 2u64..20_000) {
        let (lo, hi) = f_ratio(g);
        let per = BigRational::new(n.into(), (g - 1).into());
        let exact = f_compare(&n.into(), &g.into());
        if per < lo {
            prop_assert_eq!(exact, Ordering::Less);
        } else if per > hi {
            prop_assert_eq!(exact, Ordering::Greater);
        }
    }

    #[test]
    fn hurwitz_genus_grows_with_the_group(
        es in prop::collection::vec(2u128..10, 3..5),
        n in 1u64..500,
    ) {
        let branches: Vec<BranchDatum> = es.iter().map(|&e| BranchDatum::tame(e)).collect();
        let lcm = es.iter().fold(1u128, |l, &e| num::integer::lcm(l, e)) as u64;
        let small = CoverData::new(LARGE_PRIME, lcm * n, branches.clone()).unwrap();
        let big = CoverData::new(LARGE_PRIME, lcm * (n + 1), branches).unwrap();
        let ratio = small.genus_ratio();
        prop_assert_eq!(ratio.clone(), big.genus_ratio());
        let (gs, gb) = (hurwitz_genus(&small), hurwitz_genus(&big));
        if ratio > BigRational::from_integer(0.into()) {
            prop_assert!(gb > gs);
        } else {
            prop_assert!(gb <= gs);
        }
    }
}
