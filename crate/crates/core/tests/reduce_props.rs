mod common;

use common::*;
use formred::forms::BinaryForm;
use formred::reduce::{
    minimize, reduce_com, reduce_hyperbolic, scale_lemma, scale_search, shift_descent,
    shift_window_min, MinimizeOptions, TieRule,
};
use num_bigint::BigInt;
use proptest::prelude::*;

fn height(f: &BinaryForm) -> BigInt {
    f.height().unwrap()
}

fn stage_heights(r: &formred::ReductionReport) -> Vec<BigInt> {
    r.stages.iter().map(|s| s.height.parse().unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn descent_is_locally_optimal(f in totally_complex(), k in -40i64..=40, patience in 1usize..=4) {
        let g = f.shift(k);
        let r = shift_descent(&g, patience).unwrap();
        prop_assert!(r.output_height <= height(&g));
        for d in -(patience as i64)..=(patience as i64) {
            prop_assert!(r.output_height <= height(&r.output.shift(d)), "d = {}", d);
        }
    }

    #[test]
    fn pipeline_never_increases_height(f in totally_complex(), k in -40i64..=40) {
        let g = f.shift(k);
        let r = minimize(&g, &MinimizeOptions::default()).unwrap();
        let hs = stage_heights(&r);
        prop_assert_eq!(&hs[0], &height(&g));
        prop_assert!(hs.windows(2).all(|w| w[1] <= w[0]), "{:?}", hs);
        prop_assert_eq!(hs.last().unwrap(), &r.output_height);
        let hyp = reduce_hyperbolic(&g).unwrap().output_height;
        let com = reduce_com(&g, TieRule::default()).unwrap().output_height;
        prop_assert!(r.output_height <= hyp && r.output_height <= com);
    }

    #[test]
    fn shift_cannot_hide_height(f in totally_complex(), k in -50i64..=50) {
        let opts = MinimizeOptions::default();
        let a = minimize(&f, &opts).unwrap().output_height;
        let b = minimize(&f.shift(k), &opts).unwrap().output_height;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn window_minimum_matches_brute_force(f in totally_complex(), k in -30i64..=30) {
        let g = f.shift(k);
        let (shift, best, h) = shift_window_min(&g).unwrap().unwrap();
        prop_assert_eq!(g.shift(shift), best);
        let brute = (-200i64..=200).map(|d| g.shift(d).height().unwrap()).min().unwrap();
        prop_assert_eq!(h, brute);
    }

    #[test]
    fn scaling_never_loses(f in totally_complex(), k in -10i64..=10) {
        let g = f.shift(k).primitive().unwrap();
        let lemma = scale_lemma(&g).unwrap();
        let search = scale_search(&g, 16).unwrap();
        prop_assert!(lemma.output_height <= height(&g));
        prop_assert!(search.output_height <= lemma.output_height);
        let (u, v) = search.scale;
        prop_assert_eq!(g.scale(u, v).primitive().unwrap(), search.output);
    }
}

#[test]
fn scale_search_is_stable_under_larger_bounds() {
    let forms = [
        BinaryForm::from_i64s(&[1, 0, 4]).unwrap(),
        BinaryForm::from_i64s(&[4, 0, 0, 1]).unwrap(),
        BinaryForm::from_i64s(&[1, 0, 9, 0, 81]).unwrap(),
        pentagon().shift(5),
    ];
    for f in &forms {
        let small = scale_search(f, 8).unwrap();
        for bound in [16, 32, 64] {
            assert_eq!(scale_search(f, bound).unwrap().output_height, small.output_height, "{f}");
        }
    }
}

#[test]
fn window_finds_minimum_missed_by_local_descent() {
    // heights along the orbit: 2881 at shift 0, a bump, then 3330 at shift 6
    let f = BinaryForm::from_i64s(&[1, -20, 157, -504, 212, 1344, 3060]).unwrap().shift(-1);
    assert_eq!(height(&f), BigInt::from(2881));
    let from_far = shift_descent(&f.shift(3), 3).unwrap();
    assert_eq!(from_far.output_height, BigInt::from(3330));
    let (k, _, h) = shift_window_min(&f.shift(3)).unwrap().unwrap();
    assert_eq!((k, h), (-3, BigInt::from(2881)));
}
