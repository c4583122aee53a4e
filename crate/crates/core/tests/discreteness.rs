use proptest::prelude::*;

use mumford::discreteness::{asm_construction, disks_disjoint, isometric_circle, Disk};
use mumford::localfield::{make_field, Digit, LocalElement, LocalField};
use mumford::matrix::Mat2;

fn field(p: u32) -> LocalField {
    LocalField::with_precision(make_field(p, 1).unwrap(), 32)
}

fn element(k: &LocalField, lo: i64, digits: &[u32]) -> LocalElement {
    let q = k.q();
    let terms: Vec<(i64, Digit)> = digits.iter().enumerate().map(|(i, d)| (lo + i as i64, (d % q) as Digit)).collect();
    k.from_terms(&terms)
}

#[test]
fn shifted_copies_separate_only_below_the_unit_disk() {
    for p in [2, 3] {
        let sep = asm_construction(p, 1, -1, 3, 32).unwrap();
        assert!(sep.free_product.disjoint, "p={p}");
        assert_eq!(sep.generators as u64, sep.expected_rank);
        let words = sep.words.expect("word check ran");
        assert!(words.is_free(), "p={p}: {:?}", words.violations);
        let touch = asm_construction(p, 1, 0, 3, 32).unwrap();
        assert!(!touch.free_product.disjoint, "p={p}");
        assert!(touch.free_product.witness.is_some());
        assert!(touch.words.is_none());
    }
}

proptest! {
    #[test]
    fn ultrametric_disks_nest_or_miss(
        p in prop_oneof![Just(2u32), Just(3), Just(5)],
        c1 in prop::collection::vec(0u32..5, 3), c2 in prop::collection::vec(0u32..5, 3),
        r1 in -2i64..=3, r2 in -2i64..=3,
    ) {
        let k = field(p);
        let (c1, c2) = (element(&k, -1, &c1), element(&k, -1, &c2));
        let d1 = Disk::Proper { center: c1.clone(), radius_val: r1 };
        let d2 = Disk::Proper { center: c2.clone(), radius_val: r2 };
        let apart = disks_disjoint(&d1, &d2).unwrap();
        let meet = d1.contains(&c2).unwrap() || d2.contains(&c1).unwrap();
        prop_assert_eq!(apart, !meet);
        if !apart {
            // the smaller disk lies inside the larger one
            let (small, big) = if r1 >= r2 { (&c1, &d2) } else { (&c2, &d1) };
            prop_assert!(big.contains(small).unwrap());
        }
    }

    #[test]
    fn conjugating_by_a_translation_moves_the_circle(
        p in prop_oneof![Just(3u32), Just(5)],
        entries in prop::collection::vec(prop::collection::vec(0u32..5, 2), 4),
        shift in prop::collection::vec(0u32..5, 2),
    ) {
        let k = field(p);
        let e: Vec<LocalElement> = entries.iter().map(|d| element(&k, 0, d)).collect();
        let g = Mat2::new(e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone());
        prop_assume!(g.det().valuation().unwrap().is_some() && e[2].valuation().unwrap().is_some());
        let s = element(&k, -1, &shift);
        let tr = Mat2::translation(s.clone());
        let back = Mat2::translation(-s.clone());
        let h = tr.checked_mul(&g).unwrap().checked_mul(&back).unwrap();
        match (isometric_circle(&g).unwrap(), isometric_circle(&h).unwrap()) {
            (Disk::Proper { center: c, radius_val: r }, Disk::Proper { center: c2, radius_val: r2 }) => {
                prop_assert_eq!(r, r2);
                let moved = &c + &s;
                let d = Disk::Proper { center: c2, radius_val: r2 };
                prop_assert!(d.contains(&moved).unwrap());
            }
            other => prop_assert!(false, "improper circle {:?}", other),
        }
    }
}
