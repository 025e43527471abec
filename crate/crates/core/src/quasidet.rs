//! Quasi-determinants over complex scalars and square complex blocks.
//!
//! `|M|_{box} = m_box - r (M^box)^{-1} c`, where `M^box` drops the boxed rows and
//! columns, `r` is the boxed rows restricted to the remaining columns and `c` the
//! remaining rows restricted to the boxed columns. For commutative 1×1 boxes this is
//! `det M / det M^box` up to the usual sign convention on the boxed position.

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::scalar::{lit, Real};

/// Condition estimate above which a minor counts as singular.
pub const MINOR_COND_LIMIT: f64 = 1e12;

/// Quasi-determinant boxed on the given rows and columns.
pub fn quasidet<T: Real>(m: &CMat<T>, box_rows: &[usize], box_cols: &[usize]) -> Result<CMat<T>> {
    let rest_rows: Vec<usize> = (0..m.rows()).filter(|i| !box_rows.contains(i)).collect();
    let rest_cols: Vec<usize> = (0..m.cols()).filter(|j| !box_cols.contains(j)).collect();
    if rest_rows.len() != rest_cols.len() {
        return Err(Error::InvalidParameter(
            "boxed part must leave a square minor".into(),
        ));
    }
    let boxed = m.select(box_rows, box_cols);
    if rest_rows.is_empty() {
        return Ok(boxed);
    }
    let minor = m.select(&rest_rows, &rest_cols);
    let cond = minor.cond1();
    if !(cond <= lit(MINOR_COND_LIMIT)) {
        return Err(Error::SingularMinor(cond.to_f64().unwrap_or(f64::INFINITY)));
    }
    let r = m.select(box_rows, &rest_cols);
    let c = m.select(&rest_rows, box_cols);
    let sol = minor.lu().solve(&c).expect("nonsingular minor");
    Ok(&boxed - &(&r * &sol))
}

/// Quasi-determinant of a matrix made of `b×b` blocks, boxed on block `(bi, bj)`.
pub fn quasidet_block<T: Real>(m: &CMat<T>, b: usize, bi: usize, bj: usize) -> Result<CMat<T>> {
    let rows: Vec<usize> = (bi * b..(bi + 1) * b).collect();
    let cols: Vec<usize> = (bj * b..(bj + 1) * b).collect();
    quasidet(m, &rows, &cols)
}

/// Assembles a block matrix from a grid of equally sized blocks.
pub fn assemble<T: Real>(blocks: &[Vec<&CMat<T>>]) -> CMat<T> {
    let b = blocks[0][0].rows();
    let nr = blocks.len();
    let nc = blocks[0].len();
    CMat::from_fn(nr * b, nc * b, |i, j| blocks[i / b][j / b][(i % b, j % b)])
}

/// Blocks of the 3×3 identity `|E F G; H A B; J C [D]|`.
#[derive(Clone, Debug)]
pub struct SylvesterBlocks<T: Real> {
    pub e: CMat<T>,
    pub f: CMat<T>,
    pub g: CMat<T>,
    pub h: CMat<T>,
    pub a: CMat<T>,
    pub b: CMat<T>,
    pub j: CMat<T>,
    pub c: CMat<T>,
    pub d: CMat<T>,
}

/// Both sides of the noncommutative Sylvester identity with `E` as pivot:
/// `|E F G; H A B; J C [D]| = |E G; J [D]| - |E F; J [C]| |E F; H [A]|^{-1} |E G; H [B]|`.
pub fn sylvester_sides<T: Real>(s: &SylvesterBlocks<T>) -> Result<(CMat<T>, CMat<T>)> {
    let bs = s.e.rows();
    let full = assemble(&[
        vec![&s.e, &s.f, &s.g],
        vec![&s.h, &s.a, &s.b],
        vec![&s.j, &s.c, &s.d],
    ]);
    let lhs = quasidet_block(&full, bs, 2, 2)?;
    let q = |tl: &CMat<T>, tr: &CMat<T>, bl: &CMat<T>, br: &CMat<T>| {
        quasidet_block(&assemble(&[vec![tl, tr], vec![bl, br]]), bs, 1, 1)
    };
    let dd = q(&s.e, &s.g, &s.j, &s.d)?;
    let cc = q(&s.e, &s.f, &s.j, &s.c)?;
    let aa = q(&s.e, &s.f, &s.h, &s.a)?;
    let bb = q(&s.e, &s.g, &s.h, &s.b)?;
    let cond = aa.cond1();
    if !(cond <= lit(MINOR_COND_LIMIT)) {
        return Err(Error::SingularMinor(cond.to_f64().unwrap_or(f64::INFINITY)));
    }
    let rhs = &dd - &(&cc * &aa.lu().solve(&bb).expect("nonsingular"));
    Ok((lhs, rhs))
}

/// Checks the Sylvester identity to relative tolerance `tol`.
pub fn sylvester_check<T: Real>(s: &SylvesterBlocks<T>, tol: T) -> Result<bool> {
    let (lhs, rhs) = sylvester_sides(s)?;
    let scale = T::one().max(lhs.max_abs());
    Ok((&lhs - &rhs).max_abs() <= tol * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{clit, C};
    use num_traits::One;

    #[test]
    fn two_by_two_example() {
        let m = CMat::<f64>::from_rows(&[
            vec![clit(1.0, 0.0), clit(2.0, 0.0)],
            vec![clit(3.0, 0.0), clit(4.0, 0.0)],
        ]);
        let q = quasidet(&m, &[1], &[1]).unwrap();
        assert!((q[(0, 0)] - clit(-2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn identity_boxed_on_diagonal_is_one() {
        let m = CMat::<f64>::identity(4);
        for k in 0..4 {
            let q = quasidet(&m, &[k], &[k]).unwrap();
            assert!((q[(0, 0)] - C::one()).norm() < 1e-15);
        }
    }

    #[test]
    fn singular_minor_is_reported() {
        let m = CMat::<f64>::from_rows(&[
            vec![C::one(), C::one(), C::one()],
            vec![C::one(), C::one(), C::one()],
            vec![C::one(), C::one(), clit(2.0, 0.0)],
        ]);
        assert!(matches!(quasidet(&m, &[2], &[2]), Err(Error::SingularMinor(_))));
    }
}
