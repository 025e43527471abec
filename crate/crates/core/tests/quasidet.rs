mod common;

use common::{c, complex};
use proptest::prelude::*;
use ptds::linalg::CMat;
use ptds::quasidet::{quasidet, sylvester_check, sylvester_sides, SylvesterBlocks};
use ptds::{Error, C};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMat<f64>> {
    proptest::collection::vec(complex(1.0), rows * cols)
        .prop_map(move |v| CMat::from_fn(rows, cols, |i, j| v[i * cols + j]))
}

fn blocks(b: usize) -> impl Strategy<Value = SylvesterBlocks<f64>> {
    proptest::collection::vec(matrix(b, b), 9).prop_map(|m| SylvesterBlocks {
        e: m[0].clone(),
        f: m[1].clone(),
        g: m[2].clone(),
        h: m[3].clone(),
        a: m[4].clone(),
        b: m[5].clone(),
        j: m[6].clone(),
        c: m[7].clone(),
        d: m[8].clone(),
    })
}

fn rel_gap(a: &CMat<f64>, b: &CMat<f64>) -> f64 {
    (a - b).max_abs() / a.max_abs().max(1.0)
}

fn check_instance(s: &SylvesterBlocks<f64>) -> Result<(), TestCaseError> {
    let (lhs, rhs) = match sylvester_sides(s) {
        Err(Error::SingularMinor(_)) => return Err(TestCaseError::reject("singular minor")),
        other => other.unwrap(),
    };
    prop_assert!(rel_gap(&lhs, &rhs) <= 1e-9, "gap {}", rel_gap(&lhs, &rhs));
    prop_assert!(sylvester_check(s, 1e-9).unwrap());
    let mut bumped = rhs.clone();
    bumped[(0, 0)] += c(0.01, 0.0);
    prop_assert!(rel_gap(&lhs, &bumped) > 1e-9);
    Ok(())
}

#[test]
fn two_by_two_boxed_at_corner() {
    let m = CMat::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(3.0, 0.0), c(4.0, 0.0)]]);
    let q = quasidet(&m, &[1], &[1]).unwrap();
    assert!((q[(0, 0)] - c(-2.0, 0.0)).norm() < 1e-14);
}

#[test]
fn identity_boxed_on_the_diagonal() {
    let m = CMat::<f64>::identity(5);
    for k in 0..5 {
        assert_eq!(quasidet(&m, &[k], &[k]).unwrap()[(0, 0)], C::new(1.0, 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn reduces_to_a_determinant_ratio(m in matrix(4, 4)) {
        let minor = m.select(&[0, 1, 2], &[0, 1, 2]);
        prop_assume!(minor.cond1() < 1e8);
        let q = quasidet(&m, &[3], &[3]).unwrap()[(0, 0)];
        let ratio = m.det() / minor.det();
        prop_assert!((q - ratio).norm() <= 1e-10 * ratio.norm().max(1.0));
        // negative control: a different boxed entry gives a different value
        let other = m.det() / m.select(&[1, 2, 3], &[1, 2, 3]).det();
        prop_assume!((other - ratio).norm() > 1e-6);
        prop_assert!((q - other).norm() > 1e-9 * ratio.norm().max(1.0));
    }

    #[test]
    fn sylvester_identity_scalar_entries(s in blocks(1)) {
        check_instance(&s)?;
    }

    #[test]
    fn sylvester_identity_block_entries(s in blocks(2)) {
        check_instance(&s)?;
    }
}
