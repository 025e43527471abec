//! Truncated power series in a real perturbation parameter δ with exp-polynomial
//! coefficients.

use num_traits::Zero;

use crate::exppoly::ExpPoly;
use crate::scalar::{C, Real};

/// `Σ_{n ≤ order} c_n δ^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<T: Real> {
    coeffs: Vec<ExpPoly<T>>,
}

impl<T: Real> Jet<T> {
    /// Panics on an empty coefficient list.
    pub fn new(coeffs: Vec<ExpPoly<T>>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Self { coeffs }
    }

    pub fn constant(c: ExpPoly<T>, order: usize) -> Self {
        let mut coeffs = vec![ExpPoly::zero(); order + 1];
        coeffs[0] = c;
        Self { coeffs }
    }

    /// Lifts a complex series into a jet of constants.
    pub fn from_series(series: &[C<T>]) -> Self {
        Self::new(series.iter().map(|&c| ExpPoly::constant(c)).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[ExpPoly<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &ExpPoly<T> {
        &self.coeffs[n]
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs[..=order.min(self.order())].to_vec())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Self::new((0..=n).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Self::new(
            (0..=n)
                .map(|k| {
                    (0..=k).fold(ExpPoly::zero(), |acc, j| {
                        &acc + &(&self.coeffs[j] * &other.coeffs[k - j])
                    })
                })
                .collect(),
        )
    }

    pub fn scale(&self, c: C<T>) -> Self {
        self.map(|e| e.scale(c))
    }

    /// Applies `f` to every coefficient (valid for operations commuting with real δ).
    pub fn map(&self, f: impl Fn(&ExpPoly<T>) -> ExpPoly<T>) -> Self {
        Self::new(self.coeffs.iter().map(f).collect())
    }

    /// Derivative with respect to the expansion point: `Σ (n+1) c_{n+1} δ^n`.
    /// The order drops by one; an order-0 jet has no derivative.
    pub fn shift_derivative(&self) -> Option<Self> {
        if self.order() == 0 {
            return None;
        }
        Some(Self::new(
            (0..self.order())
                .map(|n| self.coeffs[n + 1].scale(C::from(T::from_usize(n + 1).unwrap())))
                .collect(),
        ))
    }

    /// `exp(g)` for a series `g` whose constant term is taken as zero, via
    /// `E_n = (1/n) Σ_{k=1}^{n} k g_k E_{n-k}`.
    pub fn exp_series(g: &Self) -> Self {
        let order = g.order();
        let mut e: Vec<ExpPoly<T>> = Vec::with_capacity(order + 1);
        e.push(ExpPoly::constant(C::from(T::one())));
        for n in 1..=order {
            let mut acc = ExpPoly::zero();
            for k in 1..=n {
                let kk = C::from(T::from_usize(k).unwrap());
                acc = &acc + &(&g.coeffs[k] * &e[n - k]).scale(kk);
            }
            e.push(acc.scale(C::from(T::one() / T::from_usize(n).unwrap())));
        }
        Self::new(e)
    }
}

/// Cauchy product of complex series truncated to the shorter length.
pub fn series_mul<T: Real>(a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
    let n = a.len().min(b.len());
    (0..n)
        .map(|k| (0..=k).fold(C::zero(), |acc, j| acc + a[j] * b[k - j]))
        .collect()
}

/// Series of `c·exp(κδ)`: `c κ^n / n!`.
pub fn exp_series_scalar<T: Real>(c: C<T>, kappa: C<T>, order: usize) -> Vec<C<T>> {
    let mut out = Vec::with_capacity(order + 1);
    let mut cur = c;
    for n in 0..=order {
        out.push(cur);
        cur = cur * kappa / T::from_usize(n + 1).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exppoly::Var;
    use crate::scalar::clit;

    #[test]
    fn order_is_min_of_operands() {
        let a = Jet::<f64>::constant(ExpPoly::var(Var::X), 3);
        let b = Jet::<f64>::constant(ExpPoly::var(Var::Y), 1);
        assert_eq!(a.mul(&b).order(), 1);
        assert_eq!(a.add(&b).order(), 1);
    }

    #[test]
    fn exp_series_matches_scalar_exponential() {
        let k = clit::<f64>(0.3, 0.7);
        let g = Jet::from_series(&[C::zero(), k, C::zero(), C::zero(), C::zero()]);
        let e = Jet::exp_series(&g);
        let want = exp_series_scalar(clit(1.0, 0.0), k, 4);
        for n in 0..=4 {
            assert!((e.coeff(n).eval(0.0, 0.0, 0.0) - want[n]).norm() < 1e-15);
        }
    }

    #[test]
    fn shift_derivative_of_polynomial_series() {
        // (1 + δ)^3 expanded, derivative 3(1 + δ)^2
        let j = Jet::<f64>::from_series(&[1.0, 3.0, 3.0, 1.0].map(|v| clit(v, 0.0)));
        let d = j.shift_derivative().unwrap();
        let got: Vec<f64> = d.coeffs().iter().map(|c| c.eval(0.0, 0.0, 0.0).re).collect();
        assert_eq!(got, vec![3.0, 6.0, 3.0]);
    }
}
