//! Dense complex matrices with LU factorization (partial pivoting).

use std::ops::{Index, IndexMut, Mul, Sub};

use num_traits::{One, Zero};

use crate::scalar::{C, Real};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { C::one() } else { C::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<C<T>>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Copy of the rows and columns listed.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).fold(C::zero(), |s, i| s + self[(i, i)])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    /// Induced 1-norm (largest column sum).
    pub fn norm1(&self) -> T {
        (0..self.cols)
            .map(|j| (0..self.rows).fold(T::zero(), |s, i| s + self[(i, j)].norm()))
            .fold(T::zero(), T::max)
    }

    pub fn scale(&self, c: C<T>) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * c)
    }

    /// Each row divided by its largest entry modulus (zero rows are kept).
    pub fn row_scaled(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows {
            let m = (0..self.cols).fold(T::zero(), |m, j| m.max(self[(i, j)].norm()));
            if m > T::zero() {
                for j in 0..self.cols {
                    out[(i, j)] = out[(i, j)] / m;
                }
            }
        }
        out
    }

    pub fn lu(&self) -> Lu<T> {
        Lu::new(self)
    }

    pub fn det(&self) -> C<T> {
        self.lu().det()
    }

    /// `None` when the matrix is exactly singular.
    pub fn inverse(&self) -> Option<Self> {
        self.lu().inverse()
    }

    /// 1-norm condition number estimate `‖A‖₁‖A⁻¹‖₁` (infinite when singular).
    pub fn cond1(&self) -> T {
        match self.inverse() {
            Some(inv) => self.norm1() * inv.norm1(),
            None => T::infinity(),
        }
    }
}

impl<T: Real> Index<(usize, usize)> for CMat<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for CMat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &CMat<T> {
    type Output = CMat<T>;
    fn mul(self, rhs: Self) -> CMat<T> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Sub for &CMat<T> {
    type Output = CMat<T>;
    fn sub(self, rhs: Self) -> CMat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }
}

/// LU factorization `PA = LU` with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu<T: Real> {
    lu: CMat<T>,
    perm: Vec<usize>,
    sign: T,
    singular: bool,
}

impl<T: Real> Lu<T> {
    /// Panics on non-square input.
    pub fn new(a: &CMat<T>) -> Self {
        assert!(a.is_square(), "LU needs a square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let mut singular = false;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, T::zero()), |b, c| if c.1 > b.1 { c } else { b });
            if pmax == T::zero() {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let v = lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - f * v;
                }
            }
        }
        Self {
            lu,
            perm,
            sign,
            singular,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> C<T> {
        if self.singular {
            return C::zero();
        }
        (0..self.lu.rows).fold(C::from(self.sign), |d, i| d * self.lu[(i, i)])
    }

    /// Solves `A X = B`; `None` when singular.
    pub fn solve(&self, b: &CMat<T>) -> Option<CMat<T>> {
        if self.singular {
            return None;
        }
        let n = self.lu.rows;
        assert_eq!(b.rows, n, "dimension mismatch");
        let mut x = CMat::from_fn(n, b.cols, |i, j| b[(self.perm[i], j)]);
        for c in 0..b.cols {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s = s - self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s = s - self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<CMat<T>> {
        self.solve(&CMat::identity(self.lu.rows))
    }
}
