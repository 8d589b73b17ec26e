#![allow(dead_code)]

use formred::forms::{BinaryForm, UnimodularMatrix};
use formred::hyper::UhpPoint;
use proptest::prelude::*;

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

pub fn close_pt(a: UhpPoint, b: UhpPoint, tol: f64) -> bool {
    close(a.t, b.t, tol) && close(a.u, b.u, tol)
}

/// Product of `T^k` and `S` generators; entries stay small.
pub fn sl2z() -> impl Strategy<Value = UnimodularMatrix> {
    prop::collection::vec((-3i64..=3, any::<bool>()), 0..4).prop_map(|word| {
        word.into_iter().fold(UnimodularMatrix::IDENTITY, |m, (k, flip)| {
            let m = m.compose(&UnimodularMatrix::translation(k));
            if flip {
                m.compose(&UnimodularMatrix::INVERSION)
            } else {
                m
            }
        })
    })
}

/// Distinct Gaussian integers in the upper half-plane.
pub fn upper_roots(k: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::btree_set((-6i64..=6, 1i64..=6), k).prop_map(|s| s.into_iter().collect())
}

pub fn totally_complex() -> impl Strategy<Value = BinaryForm> {
    upper_roots(1..=4).prop_map(|r| BinaryForm::from_upper_roots(&r).unwrap())
}

/// Multiplies integer polynomials given in descending order.
pub fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Form with distinct real roots `reals` and conjugate pairs `pairs`.
pub fn mixed_form(reals: &[i64], pairs: &[(i64, i64)]) -> BinaryForm {
    let mut c = vec![1i64];
    for &r in reals {
        c = poly_mul(&c, &[1, -r]);
    }
    for &(x, y) in pairs {
        c = poly_mul(&c, &[1, -2 * x, x * x + y * y]);
    }
    BinaryForm::from_i64s(&c).unwrap()
}

pub fn triangle() -> BinaryForm {
    BinaryForm::from_upper_roots(&[(1, 19), (2, 19), (19, 1)]).unwrap()
}

pub fn pentagon() -> BinaryForm {
    BinaryForm::from_upper_roots(&[(1, 5), (1, 6), (2, 6), (3, 3), (6, 1)]).unwrap()
}
