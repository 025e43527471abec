//! Exp-polynomials: finite sums of `c·x^a y^b t^c·exp(px + qy + st)` with complex
//! coefficients and phases.
//!
//! The class is closed under sums, products, partial derivatives, x-antiderivatives,
//! complex conjugation and the reflection `x -> -x`, which is everything the Darboux
//! machinery needs.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::{cre, C, Real};

/// Coefficients below this modulus are dropped during canonicalization.
pub const COEFF_TOL: f64 = 1e-14;
/// Phases are identified after rounding to this grid.
pub const PHASE_GRID: f64 = 1e-12;

/// Independent variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X,
    Y,
    T,
}

impl Var {
    fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y => 1,
            Var::T => 2,
        }
    }
}

/// One monomial-times-exponential term.
#[derive(Clone, Debug, PartialEq)]
pub struct Term<T: Real> {
    pub coeff: C<T>,
    pub powers: [u32; 3],
    pub phase: [C<T>; 3],
}

type PhaseKey = [(i64, i64); 3];

fn grid_key<T: Real>(v: T) -> i64 {
    (v.to_f64().unwrap_or(0.0) / PHASE_GRID).round() as i64
}

fn phase_key<T: Real>(phase: &[C<T>; 3]) -> PhaseKey {
    [0, 1, 2].map(|k| (grid_key(phase[k].re), grid_key(phase[k].im)))
}

fn snap<T: Real>(v: T) -> T {
    if v.abs() < T::from_f64(PHASE_GRID).unwrap() {
        T::zero()
    } else {
        v
    }
}

/// Canonical exp-polynomial; see the module docs.
///
/// Terms are kept sorted by phase, so evaluation computes each distinct exponential once.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPoly<T: Real> {
    terms: Vec<Term<T>>,
}

impl<T: Real> Default for ExpPoly<T> {
    fn default() -> Self {
        Self { terms: Vec::new() }
    }
}

impl<T: Real> ExpPoly<T> {
    /// Builds the canonical form of an arbitrary term list.
    pub fn from_terms(terms: impl IntoIterator<Item = Term<T>>) -> Self {
        let mut acc: BTreeMap<(PhaseKey, [u32; 3]), (C<T>, [C<T>; 3])> = BTreeMap::new();
        for mut term in terms {
            for p in term.phase.iter_mut() {
                *p = C::new(snap(p.re), snap(p.im));
            }
            let key = (phase_key(&term.phase), term.powers);
            acc.entry(key)
                .and_modify(|(c, _)| *c = *c + term.coeff)
                .or_insert((term.coeff, term.phase));
        }
        let tol = T::from_f64(COEFF_TOL).unwrap();
        let terms = acc
            .into_iter()
            .filter(|(_, (c, _))| c.norm() > tol)
            .map(|((_, powers), (coeff, phase))| Term {
                coeff,
                powers,
                phase,
            })
            .collect();
        Self { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C<T>) -> Self {
        Self::term(c, [0, 0, 0], [C::zero(); 3])
    }

    /// A single term `c·x^a y^b t^c·exp(px + qy + st)`.
    pub fn term(coeff: C<T>, powers: [u32; 3], phase: [C<T>; 3]) -> Self {
        Self::from_terms([Term {
            coeff,
            powers,
            phase,
        }])
    }

    pub fn monomial(coeff: C<T>, powers: [u32; 3]) -> Self {
        Self::term(coeff, powers, [C::zero(); 3])
    }

    /// `exp(px + qy + st)`.
    pub fn exp(phase: [C<T>; 3]) -> Self {
        Self::term(C::one(), [0, 0, 0], phase)
    }

    /// The coordinate function of `var`.
    pub fn var(var: Var) -> Self {
        let mut powers = [0; 3];
        powers[var.index()] = 1;
        Self::monomial(C::one(), powers)
    }

    /// Linear form `a x + b y + c t`.
    pub fn linear(coeffs: [C<T>; 3]) -> Self {
        Self::from_terms((0..3).map(|k| {
            let mut powers = [0; 3];
            powers[k] = 1;
            Term {
                coeff: coeffs[k],
                powers,
                phase: [C::zero(); 3],
            }
        }))
    }

    pub fn terms(&self) -> &[Term<T>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Distinct phases present, in canonical order.
    pub fn phases(&self) -> Vec<[C<T>; 3]> {
        let mut out: Vec<[C<T>; 3]> = Vec::new();
        let mut last: Option<PhaseKey> = None;
        for term in &self.terms {
            let key = phase_key(&term.phase);
            if last != Some(key) {
                out.push(term.phase);
                last = Some(key);
            }
        }
        out
    }

    /// Evaluates at a real point.
    pub fn eval(&self, x: T, y: T, t: T) -> C<T> {
        self.eval_complex([cre(x), cre(y), cre(t)])
    }

    /// Evaluates at a complexified point.
    pub fn eval_complex(&self, pt: [C<T>; 3]) -> C<T> {
        let mut sum = C::zero();
        let mut last: Option<PhaseKey> = None;
        let mut e = C::one();
        for term in &self.terms {
            let key = phase_key(&term.phase);
            if last != Some(key) {
                let arg = term.phase[0] * pt[0] + term.phase[1] * pt[1] + term.phase[2] * pt[2];
                e = arg.exp();
                last = Some(key);
            }
            let mut mono = term.coeff;
            for k in 0..3 {
                if term.powers[k] > 0 {
                    mono = mono * pt[k].powu(term.powers[k]);
                }
            }
            sum = sum + mono * e;
        }
        sum
    }

    /// `order`-th partial derivative.
    pub fn derivative(&self, var: Var, order: u32) -> Self {
        let k = var.index();
        let mut cur = self.clone();
        for _ in 0..order {
            let mut out = Vec::with_capacity(2 * cur.terms.len());
            for term in &cur.terms {
                if term.powers[k] > 0 {
                    let mut powers = term.powers;
                    powers[k] -= 1;
                    out.push(Term {
                        coeff: term.coeff * T::from_u32(term.powers[k]).unwrap(),
                        powers,
                        phase: term.phase,
                    });
                }
                if !term.phase[k].is_zero() {
                    out.push(Term {
                        coeff: term.coeff * term.phase[k],
                        powers: term.powers,
                        phase: term.phase,
                    });
                }
            }
            cur = Self::from_terms(out);
        }
        cur
    }

    /// Antiderivative in x plus `constant` (a phase-free constant term).
    ///
    /// Uses `∫x^a e^{px} dx = e^{px} Σ_k (-1)^k a!/(a-k)! x^{a-k} / p^{k+1}` for `p ≠ 0`
    /// and the power rule for `p = 0`.
    pub fn antideriv_x(&self, constant: C<T>) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() * 2 + 1);
        for term in &self.terms {
            let [a, b, c] = term.powers;
            let p = term.phase[0];
            if p.is_zero() {
                out.push(Term {
                    coeff: term.coeff / T::from_u32(a + 1).unwrap(),
                    powers: [a + 1, b, c],
                    phase: term.phase,
                });
            } else {
                let inv = p.inv();
                let mut factor = term.coeff * inv;
                for k in 0..=a {
                    out.push(Term {
                        coeff: factor,
                        powers: [a - k, b, c],
                        phase: term.phase,
                    });
                    factor = -factor * T::from_u32(a - k).unwrap() * inv;
                }
            }
        }
        out.push(Term {
            coeff: constant,
            powers: [0, 0, 0],
            phase: [C::zero(); 3],
        });
        Self::from_terms(out)
    }

    /// Pointwise complex conjugate for real arguments.
    pub fn conj(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|t| Term {
            coeff: t.coeff.conj(),
            powers: t.powers,
            phase: t.phase.map(|p| p.conj()),
        }))
    }

    /// `g(x, y, t) = f(-x, y, t)`.
    pub fn reflect_x(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|t| {
            let mut phase = t.phase;
            phase[0] = -phase[0];
            Term {
                coeff: if t.powers[0] % 2 == 1 { -t.coeff } else { t.coeff },
                powers: t.powers,
                phase,
            }
        }))
    }

    /// `g(x, y, t) = conj(f(-x, y, t))`.
    pub fn reflect_conj(&self) -> Self {
        self.conj().reflect_x()
    }

    /// Multiplies by `exp(delta · (x, y, t))`.
    pub fn shift_phase(&self, delta: [C<T>; 3]) -> Self {
        Self::from_terms(self.terms.iter().map(|t| Term {
            coeff: t.coeff,
            powers: t.powers,
            phase: [0, 1, 2].map(|k| t.phase[k] + delta[k]),
        }))
    }

    pub fn scale(&self, c: C<T>) -> Self {
        Self::from_terms(self.terms.iter().map(|t| Term {
            coeff: t.coeff * c,
            powers: t.powers,
            phase: t.phase,
        }))
    }

    /// Largest coefficient modulus of `self - other` after canonicalization.
    pub fn distance(&self, other: &Self) -> T {
        (self - other)
            .terms
            .iter()
            .fold(T::zero(), |m, t| m.max(t.coeff.norm()))
    }
}

impl<T: Real> Add for &ExpPoly<T> {
    type Output = ExpPoly<T>;
    fn add(self, rhs: Self) -> ExpPoly<T> {
        ExpPoly::from_terms(self.terms.iter().chain(rhs.terms.iter()).cloned())
    }
}

impl<T: Real> Sub for &ExpPoly<T> {
    type Output = ExpPoly<T>;
    fn sub(self, rhs: Self) -> ExpPoly<T> {
        self + &(-rhs)
    }
}

impl<T: Real> Neg for &ExpPoly<T> {
    type Output = ExpPoly<T>;
    fn neg(self) -> ExpPoly<T> {
        self.scale(-C::one())
    }
}

impl<T: Real> Mul for &ExpPoly<T> {
    type Output = ExpPoly<T>;
    fn mul(self, rhs: Self) -> ExpPoly<T> {
        let mut out = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                out.push(Term {
                    coeff: a.coeff * b.coeff,
                    powers: [0, 1, 2].map(|k| a.powers[k] + b.powers[k]),
                    phase: [0, 1, 2].map(|k| a.phase[k] + b.phase[k]),
                });
            }
        }
        ExpPoly::from_terms(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Real> $tr for ExpPoly<T> {
            type Output = ExpPoly<T>;
            fn $m(self, rhs: Self) -> ExpPoly<T> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<T: Real> Neg for ExpPoly<T> {
    type Output = ExpPoly<T>;
    fn neg(self) -> ExpPoly<T> {
        -&self
    }
}

impl<T: Real> fmt::Display for ExpPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, term) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", term.coeff)?;
            for (k, name) in ["x", "y", "t"].iter().enumerate() {
                match term.powers[k] {
                    0 => {}
                    1 => write!(f, "·{name}")?,
                    p => write!(f, "·{name}^{p}")?,
                }
            }
            if term.phase.iter().any(|p| !p.is_zero()) {
                write!(
                    f,
                    "·exp(({})x + ({})y + ({})t)",
                    term.phase[0], term.phase[1], term.phase[2]
                )?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::clit;

    type E = ExpPoly<f64>;

    fn close(a: C<f64>, b: C<f64>) -> bool {
        (a - b).norm() <= 1e-12 * (1.0 + b.norm())
    }

    #[test]
    fn eval_examples() {
        let one = clit(1.0, 0.0);
        let f = E::exp([clit(-1.0, 0.0), C::zero(), C::zero()]);
        assert!(close(f.eval(0.0, 0.0, 0.0), one));
        let g = E::term(one, [1, 0, 0], [clit(2.0, 0.0), C::zero(), C::zero()]);
        assert!(close(g.eval(1.0, 0.0, 0.0), clit(2f64.exp(), 0.0)));
        let h = &E::monomial(clit(0.0, 1.0), [1, 0, 0]) + &E::monomial(one, [0, 2, 0]);
        assert!(close(h.eval(2.0, 3.0, 0.0), clit(9.0, 2.0)));
    }

    #[test]
    fn derivative_examples() {
        let p = clit(0.3, -1.2);
        let f = E::exp([p, C::zero(), C::zero()]);
        assert!(f.derivative(Var::X, 1).distance(&f.scale(p)) < 1e-15);
        let x2 = E::monomial(C::one(), [2, 0, 0]);
        assert!(x2.derivative(Var::X, 2).distance(&E::constant(clit(2.0, 0.0))) < 1e-15);
        let xe = E::term(C::one(), [1, 0, 0], [C::one(), C::zero(), C::zero()]);
        let want = &E::exp([C::one(), C::zero(), C::zero()]) + &xe;
        assert!(xe.derivative(Var::X, 1).distance(&want) < 1e-15);
    }

    #[test]
    fn antiderivative_examples() {
        let e2 = E::exp([clit(2.0, 0.0), C::zero(), C::zero()]);
        assert!(e2.antideriv_x(C::zero()).distance(&e2.scale(clit(0.5, 0.0))) < 1e-15);
        let x = E::var(Var::X);
        let want = E::monomial(clit(0.5, 0.0), [2, 0, 0]);
        assert!(x.antideriv_x(C::zero()).distance(&want) < 1e-15);
        let xe = E::term(C::one(), [1, 0, 0], [C::one(), C::zero(), C::zero()]);
        let ex = E::exp([C::one(), C::zero(), C::zero()]);
        let want = &xe - &ex;
        assert!(xe.antideriv_x(C::zero()).distance(&want) < 1e-15);
    }

    #[test]
    fn reflect_conj_examples() {
        let ix = E::monomial(clit(0.0, 1.0), [1, 0, 0]);
        assert!(ix.reflect_conj().distance(&ix) < 1e-15);
        let f = E::exp([clit(1.0, 1.0), C::zero(), C::zero()]);
        let want = E::exp([clit(-1.0, 1.0), C::zero(), C::zero()]);
        assert!(f.reflect_conj().distance(&want) < 1e-15);
        let g = &E::var(Var::Y) + &E::constant(clit(0.0, 2.0));
        let want = &E::var(Var::Y) + &E::constant(clit(0.0, -2.0));
        assert!(g.reflect_conj().distance(&want) < 1e-15);
    }

    #[test]
    fn canonical_form_merges_and_drops() {
        let a = E::monomial(clit(1.0, 0.0), [1, 0, 0]);
        let b = E::monomial(clit(-1.0, 0.0), [1, 0, 0]);
        assert!((&a + &b).is_zero());
        let p1 = [clit(1.0, 0.0), C::zero(), C::zero()];
        let p2 = [clit(1.0 + 1e-14, 0.0), C::zero(), C::zero()];
        let s = &E::exp(p1) + &E::exp(p2);
        assert_eq!(s.terms().len(), 1);
        assert!(E::constant(clit(1e-15, 0.0)).is_zero());
    }
}
