#![allow(dead_code)]

use proptest::prelude::*;
use ptds::{ExpPoly, Term, C};

pub fn c(re: f64, im: f64) -> C<f64> {
    C::new(re, im)
}

pub fn complex(bound: f64) -> impl Strategy<Value = C<f64>> {
    (-bound..bound, -bound..bound).prop_map(|(a, b)| C::new(a, b))
}

pub fn term() -> impl Strategy<Value = Term<f64>> {
    (
        complex(2.0),
        (0u32..3, 0u32..3, 0u32..3),
        proptest::array::uniform3(complex(1.0)),
    )
        .prop_map(|(coeff, (a, b, p), phase)| Term {
            coeff,
            powers: [a, b, p],
            phase,
        })
}

pub fn exppoly() -> impl Strategy<Value = ExpPoly<f64>> {
    proptest::collection::vec(term(), 1..5).prop_map(ExpPoly::from_terms)
}

pub fn point() -> impl Strategy<Value = (f64, f64, f64)> {
    (-1.0..1.0, -1.0..1.0, -1.0..1.0)
}

/// Relative distance `|a - b| / max(1, |b|)`.
pub fn rel(a: C<f64>, b: C<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Deterministic point cloud in a box, via a fixed-seed LCG.
pub fn points(n: usize, half: f64, seed: u64) -> Vec<(f64, f64, f64)> {
    let mut s = seed;
    let mut next = move || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    (0..n).map(|_| (half * next(), half * next(), half * next())).collect()
}
