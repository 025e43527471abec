//! Eigenfunctions of the Lax pair on the constant background, their superposed
//! (rational-generating) variants, Taylor jets in the spectral angle, adjoint partners
//! and Lax-pair residuals.
//!
//! With `λ = r e^{iφ}` and `ω = α_k x + β_k y + γ_k t`,
//! `α_k = -(α/2)(λ + ερ²/λ)`, `β_k = (λ - ερ²/λ)/2`, `γ_k = iα⁻¹α_kβ_k`,
//! the eigenfunction is `ξ = ρ_k e^ω`, `η = (λρ_k/ρ) e^ω`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exppoly::{ExpPoly, Var};
use crate::jet::{exp_series_scalar, series_mul, Jet};
use crate::scalar::{cre, im_unit, lit, C, Real};

/// Normalization `ρ_k` of an eigenfunction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Normalization<T: Real> {
    /// `ρ_k = c·exp(-iφ_k/2)`, so `ρ_k⁻¹∂_φρ_k = -i/2`.
    HalfAngle(C<T>),
    /// `ρ_k = c`, independent of φ.
    Constant(C<T>),
}

impl<T: Real> Default for Normalization<T> {
    fn default() -> Self {
        Normalization::HalfAngle(C::one())
    }
}

/// Per-eigenfunction parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralParams<T: Real> {
    pub r: T,
    pub phi: T,
    pub norm: Normalization<T>,
    /// Superposition constant `F = e + i f`.
    pub f_cal: C<T>,
}

impl<T: Real> SpectralParams<T> {
    pub fn new(r: T, phi: T) -> Self {
        Self {
            r,
            phi,
            norm: Normalization::default(),
            f_cal: C::zero(),
        }
    }

    pub fn with_f(mut self, e: T, f: T) -> Self {
        self.f_cal = C::new(e, f);
        self
    }

    pub fn with_norm(mut self, norm: Normalization<T>) -> Self {
        self.norm = norm;
        self
    }

    pub fn lambda(&self) -> C<T> {
        C::from_polar(self.r, self.phi)
    }

    fn validate(&self) -> Result<()> {
        if self.r == T::zero() || !self.r.is_finite() || !self.phi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "spectral radius must be finite and nonzero (r = {}, φ = {})",
                self.r, self.phi
            )));
        }
        Ok(())
    }
}

/// Global equation parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlobalParams<T: Real> {
    pub epsilon: T,
    pub alpha_sq: T,
    pub rho: T,
}

impl<T: Real> GlobalParams<T> {
    /// Validates `ε, α² ∈ {±1}` and `ρ ≠ 0`.
    pub fn new(epsilon: T, alpha_sq: T, rho: T) -> Result<Self> {
        let unit = |v: T| v == T::one() || v == -T::one();
        if !unit(epsilon) {
            return Err(Error::InvalidParameter(format!("epsilon must be ±1, got {epsilon}")));
        }
        if !unit(alpha_sq) {
            return Err(Error::InvalidParameter(format!("alpha_sq must be ±1, got {alpha_sq}")));
        }
        if rho == T::zero() || !rho.is_finite() {
            return Err(Error::InvalidParameter("background amplitude must be nonzero".into()));
        }
        Ok(Self {
            epsilon,
            alpha_sq,
            rho,
        })
    }

    /// DS-I (`α = 1`) on the unit background.
    pub fn ds1(epsilon: T) -> Result<Self> {
        Self::new(epsilon, T::one(), T::one())
    }

    /// DS-II (`α = i`) on the unit background.
    pub fn ds2(epsilon: T) -> Result<Self> {
        Self::new(epsilon, -T::one(), T::one())
    }

    pub fn is_ds2(&self) -> bool {
        self.alpha_sq < T::zero()
    }

    /// `α = 1` for DS-I and the branch `α = +i` for DS-II.
    pub fn alpha(&self) -> C<T> {
        if self.is_ds2() {
            im_unit()
        } else {
            C::one()
        }
    }

    /// Seed potential `u = ρ`.
    pub fn u0(&self) -> C<T> {
        cre(self.rho)
    }

    /// Seed potential `v = ερ`.
    pub fn v0(&self) -> C<T> {
        cre(self.epsilon * self.rho)
    }

    /// Seed mean field `w = ερ²`.
    pub fn w0(&self) -> C<T> {
        cre(self.epsilon * self.rho * self.rho)
    }
}

/// Exponents `(α_k, β_k, γ_k)` of `ω` at the given spectral point.
pub fn phase<T: Real>(sp: &SpectralParams<T>, gp: &GlobalParams<T>) -> [C<T>; 3] {
    let s = phase_series(sp, gp, 0);
    [s[0][0], s[1][0], s[2][0]]
}

/// Taylor series in δ of `(α_k, β_k, γ_k)` at `φ + δ`.
fn phase_series<T: Real>(sp: &SpectralParams<T>, gp: &GlobalParams<T>, order: usize) -> [Vec<C<T>>; 3] {
    let i = im_unit::<T>();
    let lam = sp.lambda();
    let l = exp_series_scalar(lam, i, order);
    let linv = exp_series_scalar(lam.inv(), -i, order);
    let er2 = cre(gp.epsilon * gp.rho * gp.rho);
    let alpha = gp.alpha();
    let half = lit::<T>(0.5);
    let a: Vec<C<T>> = (0..=order).map(|n| -alpha * half * (l[n] + er2 * linv[n])).collect();
    let b: Vec<C<T>> = (0..=order).map(|n| (l[n] - er2 * linv[n]) * half).collect();
    let g: Vec<C<T>> = series_mul(&a, &b).into_iter().map(|v| i / alpha * v).collect();
    [a, b, g]
}

fn norm_series<T: Real>(sp: &SpectralParams<T>, order: usize) -> Vec<C<T>> {
    match sp.norm {
        Normalization::HalfAngle(c) => {
            let half_i = im_unit::<T>() * lit::<T>(0.5);
            exp_series_scalar(c * (-half_i * sp.phi).exp(), -half_i, order)
        }
        Normalization::Constant(c) => {
            let mut s = vec![C::zero(); order + 1];
            s[0] = c;
            s
        }
    }
}

/// Jets of `(ξ, η)` in δ at `φ + δ`, to the given order.
pub fn eigen_jet<T: Real>(
    sp: &SpectralParams<T>,
    gp: &GlobalParams<T>,
    order: usize,
) -> Result<(Jet<T>, Jet<T>)> {
    sp.validate()?;
    let [a, b, g] = phase_series(sp, gp, order);
    let base = ExpPoly::exp([a[0], b[0], g[0]]);
    let mut lin = vec![ExpPoly::zero()];
    lin.extend((1..=order).map(|n| ExpPoly::linear([a[n], b[n], g[n]])));
    let growth = Jet::exp_series(&Jet::new(lin)).map(|c| c * &base);
    let rho_k = norm_series(sp, order);
    let lam = exp_series_scalar(sp.lambda(), im_unit(), order);
    let eta_pref: Vec<C<T>> = series_mul(&lam, &rho_k)
        .into_iter()
        .map(|v| v / gp.rho)
        .collect();
    let xi = Jet::from_series(&rho_k).mul(&growth);
    let eta = Jet::from_series(&eta_pref).mul(&growth);
    Ok((xi, eta))
}

/// Jets of the superposed eigenfunction `(F + ∂_φ)(ξ, η)` at `φ + δ`.
pub fn superposed_jet<T: Real>(
    sp: &SpectralParams<T>,
    gp: &GlobalParams<T>,
    order: usize,
) -> Result<(Jet<T>, Jet<T>)> {
    let (xi, eta) = eigen_jet(sp, gp, order + 1)?;
    let sup = |j: &Jet<T>| {
        j.truncate(order)
            .scale(sp.f_cal)
            .add(&j.shift_derivative().expect("order >= 1"))
    };
    Ok((sup(&xi), sup(&eta)))
}

/// Plain eigenfunction `(ξ, η)`.
pub fn make_eigenfunction<T: Real>(
    sp: &SpectralParams<T>,
    gp: &GlobalParams<T>,
) -> Result<(ExpPoly<T>, ExpPoly<T>)> {
    let (xi, eta) = eigen_jet(sp, gp, 0)?;
    Ok((xi.coeff(0).clone(), eta.coeff(0).clone()))
}

/// Superposed eigenfunction `(P_k ξ_k, Q_k η_k)`.
///
/// `P_k = F + ρ_k⁻¹ρ_{k,φ} + (-iαβ_k)x + (-iα⁻¹α_k)y + ½(λ² + ρ⁴/λ²)t` and
/// `Q_k = P_k + i`: the exact φ-derivative of `η_k` (its prefactor carries an extra `λ`).
pub fn make_superposed<T: Real>(
    sp: &SpectralParams<T>,
    gp: &GlobalParams<T>,
) -> Result<(ExpPoly<T>, ExpPoly<T>)> {
    let (xi, eta) = superposed_jet(sp, gp, 0)?;
    Ok((xi.coeff(0).clone(), eta.coeff(0).clone()))
}

/// Symmetric 2×2 eigenfunction matrix `θ = [[ξ, -ε η̄(-x)], [η, ξ̄(-x)]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenMatrix<T: Real> {
    pub entries: [[ExpPoly<T>; 2]; 2],
}

impl<T: Real> EigenMatrix<T> {
    pub fn new(xi: &ExpPoly<T>, eta: &ExpPoly<T>, gp: &GlobalParams<T>) -> Self {
        let eps = cre(gp.epsilon);
        Self {
            entries: [
                [xi.clone(), eta.reflect_conj().scale(-eps)],
                [eta.clone(), xi.reflect_conj()],
            ],
        }
    }

    pub fn eval(&self, x: T, y: T, t: T) -> [[C<T>; 2]; 2] {
        [0, 1].map(|i| [0, 1].map(|j| self.entries[i][j].eval(x, y, t)))
    }

    pub fn map(&self, f: impl Fn(&ExpPoly<T>) -> ExpPoly<T>) -> Self {
        Self {
            entries: [0, 1].map(|i| [0, 1].map(|j| f(&self.entries[i][j]))),
        }
    }

    /// `max |θ̄(x) - σ θ(-x) σ⁻¹|` with `σ = [[0, -ε], [1, 0]]`.
    pub fn symmetry_defect(&self, x: T, y: T, t: T, epsilon: T) -> T {
        let a = self.eval(x, y, t);
        let b = self.eval(-x, y, t);
        let e = cre(epsilon);
        // σ b σ⁻¹ with σ⁻¹ = [[0, 1], [-ε, 0]]
        let sb = [[-e * b[1][0], -e * b[1][1]], [b[0][0], b[0][1]]];
        let rhs = [
            [-e * sb[0][1], sb[0][0]],
            [-e * sb[1][1], sb[1][0]],
        ];
        let mut m = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((a[i][j].conj() - rhs[i][j]).norm());
            }
        }
        m
    }
}

/// Adjoint partner of a column for DS-II: `φ = iκ θ(-x)` with `κ = diag(1, ε)`.
///
/// The reflection carries no conjugation; conjugation enters through `φ†` in `Ω`.
pub fn make_adjoint<T: Real>(theta: &[ExpPoly<T>; 2], gp: &GlobalParams<T>) -> [ExpPoly<T>; 2] {
    let i = im_unit::<T>();
    [
        theta[0].reflect_x().scale(i),
        theta[1].reflect_x().scale(i * gp.epsilon),
    ]
}

/// Largest entry modulus of the Lax residuals `L Φ`, `M Φ` for `Φ = (ξ, η)` on the
/// constant background, with exact symbolic derivatives:
/// `Φ_y - JΦ_x - PΦ` and `Φ_t - iα⁻¹JΦ_xx - iα⁻¹PΦ_x - α⁻¹VΦ`, where
/// `J = α⁻¹diag(1, -1)`, `P = [[0, u], [-v, 0]]` and `V = 0` (constant potentials).
pub fn lax_residual<T: Real>(
    xi: &ExpPoly<T>,
    eta: &ExpPoly<T>,
    gp: &GlobalParams<T>,
    points: &[(T, T, T)],
) -> T {
    let i = im_unit::<T>();
    let ainv = gp.alpha().inv();
    let (u, v) = (gp.u0(), gp.v0());
    let d = |f: &ExpPoly<T>, var, n| f.derivative(var, n);
    let (xi_x, xi_xx, xi_y, xi_t) = (d(xi, Var::X, 1), d(xi, Var::X, 2), d(xi, Var::Y, 1), d(xi, Var::T, 1));
    let (eta_x, eta_xx, eta_y, eta_t) = (
        d(eta, Var::X, 1),
        d(eta, Var::X, 2),
        d(eta, Var::Y, 1),
        d(eta, Var::T, 1),
    );
    let mut worst = T::zero();
    for &(x, y, t) in points {
        let e = |f: &ExpPoly<T>| f.eval(x, y, t);
        let (a, b) = (e(xi), e(eta));
        let (ax, bx) = (e(&xi_x), e(&eta_x));
        let l1 = e(&xi_y) - ainv * ax - u * b;
        let l2 = e(&eta_y) + ainv * bx + v * a;
        let m1 = e(&xi_t) - i * ainv * ainv * e(&xi_xx) - i * ainv * u * bx;
        let m2 = e(&eta_t) + i * ainv * ainv * e(&eta_xx) + i * ainv * v * ax;
        for r in [l1, l2, m1, m2] {
            worst = worst.max(r.norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::clit;
    use std::f64::consts::PI;

    fn close(a: C<f64>, b: C<f64>) -> bool {
        (a - b).norm() < 1e-13
    }

    #[test]
    fn ds1_unit_eigenfunction() {
        let gp = GlobalParams::ds1(1.0).unwrap();
        let sp = SpectralParams::new(1.0, 0.0).with_norm(Normalization::Constant(C::one()));
        let [a, b, g] = phase(&sp, &gp);
        assert!(close(a, clit(-1.0, 0.0)) && close(b, C::zero()) && close(g, C::zero()));
        let (xi, eta) = make_eigenfunction(&sp, &gp).unwrap();
        let want = ExpPoly::exp([clit(-1.0, 0.0), C::zero(), C::zero()]);
        assert!(xi.distance(&want) < 1e-15 && eta.distance(&want) < 1e-15);
    }

    #[test]
    fn ds1_beta_for_r_two() {
        let gp = GlobalParams::ds1(1.0).unwrap();
        let [_, b, _] = phase(&SpectralParams::new(2.0, 0.0), &gp);
        assert!(close(b, clit(0.75, 0.0)));
    }

    #[test]
    fn ds2_alpha_vanishes_at_lambda_i() {
        let gp = GlobalParams::ds2(1.0).unwrap();
        let [a, _, _] = phase(&SpectralParams::new(1.0, PI / 2.0), &gp);
        assert!(a.norm() < 1e-15);
    }

    #[test]
    fn gamma_identity() {
        let gp = GlobalParams::ds2(-1.0).unwrap();
        let sp = SpectralParams::new(1.7, 0.4);
        let [a, b, g] = phase(&sp, &gp);
        assert!(close(g, im_unit::<f64>() / gp.alpha() * a * b));
    }

    #[test]
    fn superposed_linear_part_in_t() {
        // DS-I, ε = 1, r = 1, φ = 0, F = 0: P₁ has t-coefficient ½(1 + 1) = 1
        let gp = GlobalParams::ds1(1.0).unwrap();
        let sp = SpectralParams::new(1.0, 0.0);
        let (xi, _) = make_superposed(&sp, &gp).unwrap();
        let (plain, _) = make_eigenfunction(&sp, &gp).unwrap();
        let t = 0.7;
        let p_at = |t: f64| xi.eval(0.0, 0.0, t) / plain.eval(0.0, 0.0, t);
        assert!(close(p_at(t) - p_at(0.0), clit(t, 0.0)));
        // constant part ρ⁻¹ρ_φ = -i/2
        assert!(close(p_at(0.0), clit(0.0, -0.5)));
    }

    #[test]
    fn adjoint_examples() {
        let gp = GlobalParams::ds2(1.0).unwrap();
        let one = ExpPoly::<f64>::constant(C::one());
        let phi = make_adjoint(&[one.clone(), ExpPoly::zero()], &gp);
        assert!(phi[0].distance(&ExpPoly::constant(clit(0.0, 1.0))) < 1e-15 && phi[1].is_zero());
        let ex = ExpPoly::exp([C::one(), C::zero(), C::zero()]);
        let phi = make_adjoint(&[ex, ExpPoly::zero()], &gp);
        let want = ExpPoly::term(clit(0.0, 1.0), [0, 0, 0], [clit(-1.0, 0.0), C::zero(), C::zero()]);
        assert!(phi[0].distance(&want) < 1e-15);
        let gm = GlobalParams::ds2(-1.0).unwrap();
        let phi = make_adjoint(&[ExpPoly::zero(), one], &gm);
        assert!(phi[1].distance(&ExpPoly::constant(clit(0.0, -1.0))) < 1e-15);
    }

    #[test]
    fn rejects_zero_radius_and_bad_globals() {
        let gp = GlobalParams::ds1(1.0).unwrap();
        assert!(make_eigenfunction(&SpectralParams::new(0.0, 1.0), &gp).is_err());
        assert!(GlobalParams::new(1.0, 1.0, 0.0).is_err());
        assert!(GlobalParams::new(0.5, 1.0, 1.0).is_err());
    }
}
