//! DS-II solutions from the binary Darboux transformation.
//!
//! Columns `θ_j` solve the Lax pair, adjoint columns `φ_i = iκθ_i(-x)` with
//! `κ = diag(1, ε)` solve the adjoint pair, and the potential matrix is
//! `Ω = ∂⁻¹(P†Θ) + C`. Then `u_n = u + 2α⁻¹(ΘΩ⁻¹P†)₁₂` and
//! `w_n = w - 2α⁻²[ln det Ω]_xx`.

use num_traits::Zero;

use crate::dt1::{spec_jets, EigenSpec, NEAR_SINGULAR_COND, SINGULAR_DET};
use crate::error::{Error, Result};
use crate::exppoly::{ExpPoly, Var};
use crate::linalg::CMat;
use crate::quasidet::quasidet;
use crate::scalar::{cre, lit, C, Real};
use crate::solution::{Flag, Meta, Sample, Solution};
use crate::spectra::{make_adjoint, phase, GlobalParams};

/// Relative threshold of the parameter guard.
pub const GUARD_TOL: f64 = 1e-9;

type Column<T> = [ExpPoly<T>; 2];

fn first_phase<T: Real>(col: &[ExpPoly<T>]) -> [C<T>; 3] {
    col.iter()
        .find_map(|e| e.phases().first().copied())
        .unwrap_or([C::zero(); 3])
}

/// Symbolic `Ω_ij = ∂⁻¹(φ_i†θ_j) + c_ij`.
///
/// Errors with a parameter guard when an entry would need an antiderivative of a
/// term whose exponential has no `x` dependence but still depends on `y` or `t`:
/// no constant of integration keeps such an `Ω` compatible with the Lax flows.
pub fn omega<T: Real>(
    thetas: &[Column<T>],
    phis: &[Column<T>],
    constants: &CMat<T>,
) -> Result<Vec<ExpPoly<T>>> {
    let n = thetas.len();
    if phis.len() != n || constants.rows() != n || constants.cols() != n {
        return Err(Error::InvalidParameter("Ω needs n columns, n adjoints and an n×n constant matrix".into()));
    }
    let tiny = lit::<T>(GUARD_TOL);
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let ph = [phis[i][0].conj(), phis[i][1].conj()];
        for j in 0..n {
            let integrand = &(&ph[0] * &thetas[j][0]) + &(&ph[1] * &thetas[j][1]);
            for term in integrand.terms() {
                let [px, py, pt] = term.phase;
                let scale = T::one() + py.norm() + pt.norm();
                if px.norm() <= tiny * scale && (py.norm() > tiny || pt.norm() > tiny) {
                    return Err(Error::ParameterGuard(format!(
                        "Ω[{i}][{j}]: exponential loses its x dependence"
                    )));
                }
            }
            out.push(integrand.antideriv_x(constants[(i, j)]));
        }
    }
    Ok(out)
}

/// n-fold DS-II solution.
#[derive(Clone, Debug)]
pub struct Ds2Solution<T: Real> {
    gp: GlobalParams<T>,
    n: usize,
    /// 2×n, row-major, columns rescaled.
    theta: Vec<ExpPoly<T>>,
    /// n×2, row-major (`P†`), rows rescaled.
    p_dag: Vec<ExpPoly<T>>,
    omega: Vec<ExpPoly<T>>,
    omega_x: Vec<ExpPoly<T>>,
    omega_xx: Vec<ExpPoly<T>>,
    /// Unscaled matrices for identities that are not scale invariant entry by entry.
    raw_theta: Vec<ExpPoly<T>>,
    raw_p_dag: Vec<ExpPoly<T>>,
    raw_omega: Vec<ExpPoly<T>>,
    raw_omega_x: Vec<ExpPoly<T>>,
    meta: Meta,
}

struct Frame<T: Real> {
    omega: CMat<T>,
    inv: CMat<T>,
    flag: Flag,
}

fn eval<T: Real>(m: &[ExpPoly<T>], rows: usize, cols: usize, x: T, y: T, t: T) -> CMat<T> {
    CMat::from_fn(rows, cols, |i, j| m[i * cols + j].eval(x, y, t))
}

impl<T: Real> Ds2Solution<T> {
    fn build(
        thetas: &[Column<T>],
        phis: &[Column<T>],
        constants: &CMat<T>,
        gp: &GlobalParams<T>,
        meta: Meta,
    ) -> Result<Self> {
        if !gp.is_ds2() {
            return Err(Error::InvalidParameter(
                "the binary transformation targets DS-II (alpha_sq = -1)".into(),
            ));
        }
        let n = thetas.len();
        if n == 0 {
            return Err(Error::InvalidParameter("need at least one column".into()));
        }
        let raw_omega = omega(thetas, phis, constants)?;
        let raw_theta: Vec<ExpPoly<T>> = (0..2)
            .flat_map(|r| thetas.iter().map(move |c| c[r].clone()))
            .collect();
        let raw_p_dag: Vec<ExpPoly<T>> = phis
            .iter()
            .flat_map(|c| [c[0].conj(), c[1].conj()])
            .collect();
        let b: Vec<[C<T>; 3]> = thetas.iter().map(|c| first_phase(c)).collect();
        let a: Vec<[C<T>; 3]> = (0..n)
            .map(|i| first_phase(&raw_p_dag[2 * i..2 * i + 2]))
            .collect();
        let neg = |p: [C<T>; 3]| p.map(|v| -v);
        let add = |p: [C<T>; 3], q: [C<T>; 3]| [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
        let theta = (0..2 * n)
            .map(|k| raw_theta[k].shift_phase(neg(b[k % n])))
            .collect();
        let p_dag = (0..2 * n)
            .map(|k| raw_p_dag[k].shift_phase(neg(a[k / 2])))
            .collect();
        let omega: Vec<ExpPoly<T>> = (0..n * n)
            .map(|k| raw_omega[k].shift_phase(neg(add(a[k / n], b[k % n]))))
            .collect();
        let dx = |v: &[ExpPoly<T>]| v.iter().map(|e| e.derivative(Var::X, 1)).collect::<Vec<_>>();
        let omega_x = dx(&omega);
        let omega_xx = dx(&omega_x);
        let raw_omega_x = dx(&raw_omega);
        Ok(Self {
            gp: *gp,
            n,
            theta,
            p_dag,
            omega,
            omega_x,
            omega_xx,
            raw_theta,
            raw_p_dag,
            raw_omega,
            raw_omega_x,
            meta,
        })
    }

    pub fn global(&self) -> &GlobalParams<T> {
        &self.gp
    }

    /// Number of columns.
    pub fn order(&self) -> usize {
        self.n
    }

    fn frame(&self, x: T, y: T, t: T) -> std::result::Result<Frame<T>, C<T>> {
        let n = self.n;
        let omega = eval(&self.omega, n, n, x, y, t);
        let scaled = omega.row_scaled();
        if scaled.det().norm() < lit(SINGULAR_DET) {
            return Err(omega.det());
        }
        let inv = omega.inverse().ok_or_else(|| omega.det())?;
        let flag = if scaled.cond1() > lit(NEAR_SINGULAR_COND) {
            Flag::NearSingular
        } else {
            Flag::Regular
        };
        Ok(Frame { omega, inv, flag })
    }

    /// Both sides of `tr |[Ω, P†], [Θ, [0]]| = -∂_x ln det Ω` at a point, the
    /// quasi-determinant boxed on the 2×2 zero block. The right side is
    /// `-Σ_j det(Ω with column j replaced by Ω_x's) / det Ω`.
    pub fn remark_identity(&self, x: T, y: T, t: T) -> Result<(C<T>, C<T>)> {
        let n = self.n;
        let om = eval(&self.raw_omega, n, n, x, y, t);
        let omx = eval(&self.raw_omega_x, n, n, x, y, t);
        let th = eval(&self.raw_theta, 2, n, x, y, t);
        let pd = eval(&self.raw_p_dag, n, 2, x, y, t);
        let big = CMat::from_fn(n + 2, n + 2, |i, j| match (i < n, j < n) {
            (true, true) => om[(i, j)],
            (true, false) => pd[(i, j - n)],
            (false, true) => th[(i - n, j)],
            (false, false) => C::zero(),
        });
        let q = quasidet(&big, &[n, n + 1], &[n, n + 1])?;
        let det = om.det();
        if det.norm() == T::zero() {
            return Err(Error::SingularPoint("det Ω = 0".into()));
        }
        let mut s: C<T> = C::zero();
        for j in 0..n {
            let mut m = om.clone();
            for i in 0..n {
                m[(i, j)] = omx[(i, j)];
            }
            s = s + m.det();
        }
        Ok((q.trace(), -s / det))
    }
}

impl<T: Real> Solution<T> for Ds2Solution<T> {
    fn sample(&self, x: T, y: T, t: T) -> Sample<T> {
        let n = self.n;
        match self.frame(x, y, t) {
            Err(det) => Sample::singular(det, true),
            Ok(f) => {
                let th = eval(&self.theta, 2, n, x, y, t);
                let pd = eval(&self.p_dag, n, 2, x, y, t);
                let r = &(&th * &f.inv) * &pd;
                let two = cre(lit::<T>(2.0));
                let u = self.gp.u0() + two / self.gp.alpha() * r[(0, 1)];
                let ox = eval(&self.omega_x, n, n, x, y, t);
                let oxx = eval(&self.omega_xx, n, n, x, y, t);
                let a = &f.inv * &ox;
                let lnxx = (&f.inv * &oxx).trace() - (&a * &a).trace();
                Sample {
                    u,
                    w: Some(self.gp.w0() - two / (self.gp.alpha() * self.gp.alpha()) * lnxx),
                    denominator: f.omega.det(),
                    flag: f.flag,
                }
            }
        }
    }

    fn meta(&self) -> &Meta {
        &self.meta
    }

    fn denominator(&self, x: T, y: T, t: T) -> C<T> {
        eval(&self.omega, self.n, self.n, x, y, t).det()
    }
}

/// Solution from explicit columns. Adjoints default to `iκθ(-x)`; passing them
/// explicitly is recorded in the metadata.
pub fn ds2_from_columns<T: Real>(
    thetas: &[Column<T>],
    phis: Option<&[Column<T>]>,
    constants: Option<&CMat<T>>,
    gp: &GlobalParams<T>,
) -> Result<Ds2Solution<T>> {
    let n = thetas.len();
    let mut meta = Meta::new("ds2 binary").param("n", n);
    let owned;
    let phis = match phis {
        Some(p) => {
            meta = meta.note("adjoint columns supplied explicitly");
            p
        }
        None => {
            owned = thetas.iter().map(|c| make_adjoint(c, gp)).collect::<Vec<_>>();
            &owned[..]
        }
    };
    let zero = CMat::zeros(n, n);
    Ds2Solution::build(thetas, phis, constants.unwrap_or(&zero), gp, meta)
}

/// The guard on spectral pairs: `r_k + r_j e^{i(φ_j+φ_k)}` and
/// `1 + ερ²/(λ_j λ̄_k)` must stay away from zero for every pair (including `k = j`).
pub fn check_guard<T: Real>(specs: &[EigenSpec<T>], gp: &GlobalParams<T>) -> Result<()> {
    let tol = lit::<T>(GUARD_TOL);
    for (k, sk) in specs.iter().enumerate() {
        for (j, sj) in specs.iter().enumerate() {
            let base = cre(sk.sp.r) + C::from_polar(sj.sp.r, sj.sp.phi + sk.sp.phi);
            if base.norm() <= tol * (sk.sp.r.abs() + sj.sp.r.abs()) {
                return Err(Error::ParameterGuard(format!(
                    "r_{} + r_{} e^(i(φ_{} + φ_{})) vanishes",
                    k + 1,
                    j + 1,
                    j + 1,
                    k + 1
                )));
            }
            let (aj, ak) = (phase(&sj.sp, gp)[0], phase(&sk.sp, gp)[0]);
            if (aj - ak.conj()).norm() <= tol * (aj.norm() + ak.norm()) {
                return Err(Error::ParameterGuard(format!(
                    "x-exponent of Ω[{}][{}] vanishes",
                    k + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

fn spec_meta<T: Real>(label: &str, specs: &[EigenSpec<T>], gp: &GlobalParams<T>) -> Meta {
    let mut meta = Meta::new(label).param("epsilon", gp.epsilon).param("rho", gp.rho);
    for (k, s) in specs.iter().enumerate() {
        meta = meta
            .param(&format!("r{}", k + 1), s.sp.r)
            .param(&format!("phi{}", k + 1), s.sp.phi)
            .param(&format!("F{}", k + 1), s.sp.f_cal)
            .param(&format!("superposed{}", k + 1), s.superposed);
    }
    meta
}

fn constants_or_zero<T: Real>(c: Option<&CMat<T>>, n: usize) -> CMat<T> {
    c.cloned().unwrap_or_else(|| CMat::zeros(n, n))
}

/// n-fold solution from spectral parameters (one column per eigenfunction).
pub fn ds2_solution<T: Real>(
    specs: &[EigenSpec<T>],
    constants: Option<&CMat<T>>,
    gp: &GlobalParams<T>,
) -> Result<Ds2Solution<T>> {
    ds2_highorder(specs, &vec![1; specs.len()], constants, gp)
}

/// High-order solution: eigenfunction `i` contributes its first `r_i` Taylor
/// coefficients in the spectral angle as columns.
pub fn ds2_highorder<T: Real>(
    specs: &[EigenSpec<T>],
    multiplicities: &[usize],
    constants: Option<&CMat<T>>,
    gp: &GlobalParams<T>,
) -> Result<Ds2Solution<T>> {
    if specs.len() != multiplicities.len() {
        return Err(Error::InvalidParameter("one multiplicity per eigenfunction".into()));
    }
    if multiplicities.iter().any(|&m| m == 0) {
        return Err(Error::InvalidParameter("multiplicities must be positive".into()));
    }
    check_guard(specs, gp)?;
    let mut thetas = Vec::new();
    for (s, &m) in specs.iter().zip(multiplicities) {
        let (xi, eta) = spec_jets(s, gp, m - 1)?;
        for k in 0..m {
            thetas.push([xi[k].clone(), eta[k].clone()]);
        }
    }
    let phis: Vec<Column<T>> = thetas.iter().map(|c| make_adjoint(c, gp)).collect();
    let n = thetas.len();
    let mut meta = spec_meta(
        if n == specs.len() { "ds2 binary" } else { "ds2 high-order" },
        specs,
        gp,
    );
    for (k, m) in multiplicities.iter().enumerate() {
        meta = meta.param(&format!("mult{}", k + 1), m);
    }
    let c = constants_or_zero(constants, n);
    if c.max_abs() > T::zero() {
        meta = meta.note("nonzero integration constants");
    }
    Ds2Solution::build(&thetas, &phis, &c, gp, meta)
}
