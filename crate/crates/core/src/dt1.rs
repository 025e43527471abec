//! DS-I solutions from the N-fold Darboux transformation in determinant form and its
//! generalized (high-order) variant.
//!
//! `Σ` stacks the block rows `∂^{N-1}Ψ, …, ∂Ψ, Ψ` of N symmetric eigenfunction
//! matrices, `D = ∂^N Ψ`, `s₁ = (DΣ⁻¹)` restricted to its first 2×2 block, and
//! `u_N = u + 2α⁻¹(s₁)₁₂`, `w_N = w - 2α⁻²[ln det Σ]_xx`.
//!
//! Every column carries a single exponential factor; it is removed symbolically
//! before evaluation so that `det Σ` becomes the polynomial denominator of the
//! solution. Both `u` and `w` are invariant under this rescaling.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exppoly::{ExpPoly, Var};
use crate::linalg::CMat;
use crate::scalar::{cre, lit, C, Real};
use crate::solution::{Flag, Meta, Sample, Solution};
use crate::spectra::{
    make_eigenfunction, make_superposed, superposed_jet, eigen_jet, EigenMatrix, GlobalParams,
    SpectralParams,
};

/// Samples whose row-scaled `|det Σ|` falls below this are tagged singular.
pub const SINGULAR_DET: f64 = 1e-12;
/// Samples whose condition estimate exceeds this are tagged near-singular.
pub const NEAR_SINGULAR_COND: f64 = 1e12;

/// How an eigenfunction enters a construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenSpec<T: Real> {
    pub sp: SpectralParams<T>,
    /// Use the superposed (rational-generating) eigenfunction.
    pub superposed: bool,
}

impl<T: Real> EigenSpec<T> {
    pub fn plain(sp: SpectralParams<T>) -> Self {
        Self { sp, superposed: false }
    }

    pub fn superposed(sp: SpectralParams<T>) -> Self {
        Self { sp, superposed: true }
    }
}

/// Jets of an eigenfunction (plain or superposed) to the given order.
pub(crate) fn spec_jets<T: Real>(
    spec: &EigenSpec<T>,
    gp: &GlobalParams<T>,
    order: usize,
) -> Result<(Vec<ExpPoly<T>>, Vec<ExpPoly<T>>)> {
    let (xi, eta) = if spec.superposed {
        superposed_jet(&spec.sp, gp, order)?
    } else {
        eigen_jet(&spec.sp, gp, order)?
    };
    Ok((xi.coeffs().to_vec(), eta.coeffs().to_vec()))
}

fn column_phase<T: Real>(a: &ExpPoly<T>, b: &ExpPoly<T>) -> [C<T>; 3] {
    a.phases()
        .first()
        .or(b.phases().first())
        .copied()
        .unwrap_or([C::zero(); 3])
}

fn require_ds1<T: Real>(gp: &GlobalParams<T>) -> Result<()> {
    if gp.is_ds2() {
        return Err(Error::InvalidParameter(
            "the differential Darboux transformation needs alpha_sq = +1; use the binary transformation for DS-II".into(),
        ));
    }
    Ok(())
}

fn eval_mat<T: Real>(m: &[ExpPoly<T>], rows: usize, cols: usize, x: T, y: T, t: T) -> CMat<T> {
    CMat::from_fn(rows, cols, |i, j| m[i * cols + j].eval(x, y, t))
}

/// One-fold transform at a point: `ũ = u + 2α⁻¹S₁₂`, `w̃ = w - 2α²[ln det θ]_xx`
/// with `S = θ_x θ⁻¹`.
pub fn onefold_potential<T: Real>(
    theta: &EigenMatrix<T>,
    gp: &GlobalParams<T>,
    x: T,
    y: T,
    t: T,
) -> Result<(C<T>, C<T>)> {
    require_ds1(gp)?;
    let e = &theta.entries;
    let det = &(&e[0][0] * &e[1][1]) - &(&e[0][1] * &e[1][0]);
    let th = theta.eval(x, y, t);
    let d = det.eval(x, y, t);
    if d.norm() < lit(SINGULAR_DET) {
        return Err(Error::SingularPoint(format!("|det θ| = {}", d.norm())));
    }
    let thx = theta.map(|f| f.derivative(Var::X, 1)).eval(x, y, t);
    // S₁₂ = (θ_x adj(θ))₁₂ / det θ
    let s12 = (thx[0][0] * (-th[0][1]) + thx[0][1] * th[0][0]) / d;
    let dx = det.derivative(Var::X, 1).eval(x, y, t);
    let dxx = det.derivative(Var::X, 2).eval(x, y, t);
    let lnxx = dxx / d - (dx / d) * (dx / d);
    let alpha = gp.alpha();
    let two = cre(lit::<T>(2.0));
    Ok((gp.u0() + two / alpha * s12, gp.w0() - two * alpha * alpha * lnxx))
}

/// N-fold DS-I solution.
#[derive(Clone, Debug)]
pub struct Ds1Solution<T: Real> {
    gp: GlobalParams<T>,
    dim: usize,
    sigma: Vec<ExpPoly<T>>,
    sigma_x: Vec<ExpPoly<T>>,
    sigma_xx: Vec<ExpPoly<T>>,
    d: Vec<ExpPoly<T>>,
    d_x: Vec<ExpPoly<T>>,
    meta: Meta,
}

/// Intermediate per-point quantities.
struct Frame<T: Real> {
    sigma: CMat<T>,
    inv: CMat<T>,
    s1: CMat<T>,
    flag: Flag,
}

impl<T: Real> Ds1Solution<T> {
    fn build(blocks: &[EigenMatrix<T>], gp: &GlobalParams<T>, meta: Meta) -> Result<Self> {
        require_ds1(gp)?;
        let n = blocks.len();
        if n == 0 {
            return Err(Error::InvalidParameter("need at least one eigenfunction matrix".into()));
        }
        let dim = 2 * n;
        // columns: (block k, column c) -> index 2k + c
        let cols: Vec<[ExpPoly<T>; 2]> = blocks
            .iter()
            .flat_map(|b| (0..2).map(move |c| [b.entries[0][c].clone(), b.entries[1][c].clone()]))
            .collect();
        let shifts: Vec<[C<T>; 3]> = cols
            .iter()
            .map(|c| column_phase(&c[0], &c[1]).map(|v| -v))
            .collect();
        // ∂^k of every column, rescaled afterwards
        let mut ders: Vec<Vec<[ExpPoly<T>; 2]>> = Vec::with_capacity(n + 2);
        ders.push(cols.clone());
        for k in 1..=n + 1 {
            let prev = &ders[k - 1];
            ders.push(
                prev.iter()
                    .map(|c| [c[0].derivative(Var::X, 1), c[1].derivative(Var::X, 1)])
                    .collect(),
            );
        }
        let scaled = |k: usize, row: usize, col: usize| ders[k][col][row].shift_phase(shifts[col]);
        let mut sigma = Vec::with_capacity(dim * dim);
        for br in 0..n {
            let k = n - 1 - br;
            for row in 0..2 {
                for col in 0..dim {
                    sigma.push(scaled(k, row, col));
                }
            }
        }
        let mut d = Vec::with_capacity(2 * dim);
        for row in 0..2 {
            for col in 0..dim {
                d.push(scaled(n, row, col));
            }
        }
        let dx = |v: &Vec<ExpPoly<T>>| v.iter().map(|e| e.derivative(Var::X, 1)).collect::<Vec<_>>();
        let sigma_x = dx(&sigma);
        let sigma_xx = dx(&sigma_x);
        let d_x = dx(&d);
        Ok(Self {
            gp: *gp,
            dim,
            sigma,
            sigma_x,
            sigma_xx,
            d,
            d_x,
            meta,
        })
    }

    pub fn global(&self) -> &GlobalParams<T> {
        &self.gp
    }

    /// Order of the transformation (number of 2-column blocks).
    pub fn order(&self) -> usize {
        self.dim / 2
    }

    fn frame(&self, x: T, y: T, t: T) -> std::result::Result<Frame<T>, C<T>> {
        let n = self.dim;
        let sigma = eval_mat(&self.sigma, n, n, x, y, t);
        let scaled = sigma.row_scaled();
        let lu = scaled.lu();
        if lu.det().norm() < lit(SINGULAR_DET) {
            return Err(sigma.det());
        }
        let inv = sigma.inverse().ok_or_else(|| sigma.det())?;
        let flag = if scaled.cond1() > lit(NEAR_SINGULAR_COND) {
            Flag::NearSingular
        } else {
            Flag::Regular
        };
        let d = eval_mat(&self.d, 2, n, x, y, t);
        let s1 = &d * &inv;
        Ok(Frame {
            sigma,
            inv,
            s1,
            flag,
        })
    }

    fn ln_det_xx(&self, f: &Frame<T>, x: T, y: T, t: T) -> C<T> {
        let n = self.dim;
        let sx = eval_mat(&self.sigma_x, n, n, x, y, t);
        let sxx = eval_mat(&self.sigma_xx, n, n, x, y, t);
        let a = &f.inv * &sx;
        (&f.inv * &sxx).trace() - (&a * &a).trace()
    }

    /// `v` from the off-diagonal transform: `v + 2α⁻¹(s₁)₂₁`.
    pub fn v_field(&self, x: T, y: T, t: T) -> Option<C<T>> {
        let f = self.frame(x, y, t).ok()?;
        Some(self.gp.v0() + cre(lit::<T>(2.0)) / self.gp.alpha() * f.s1[(1, 0)])
    }

    /// `w` from the trace form `w - 2α⁻²∂_x tr(s₁)` with
    /// `∂_x s₁ = D_xΣ⁻¹ - DΣ⁻¹Σ_xΣ⁻¹`.
    pub fn w_trace_form(&self, x: T, y: T, t: T) -> Option<C<T>> {
        let f = self.frame(x, y, t).ok()?;
        let n = self.dim;
        let dxm = eval_mat(&self.d_x, 2, n, x, y, t);
        let sx = eval_mat(&self.sigma_x, n, n, x, y, t);
        let ds1 = &(&dxm * &f.inv) - &(&(&f.s1 * &sx) * &f.inv);
        let tr = ds1[(0, 0)] + ds1[(1, 1)];
        let a2 = self.gp.alpha() * self.gp.alpha();
        Some(self.gp.w0() - cre(lit::<T>(2.0)) / a2 * tr)
    }
}

impl<T: Real> Solution<T> for Ds1Solution<T> {
    fn sample(&self, x: T, y: T, t: T) -> Sample<T> {
        match self.frame(x, y, t) {
            Err(det) => Sample::singular(det, true),
            Ok(f) => {
                let two = cre(lit::<T>(2.0));
                let alpha = self.gp.alpha();
                let u = self.gp.u0() + two / alpha * f.s1[(0, 1)];
                let w = self.gp.w0() - two / (alpha * alpha) * self.ln_det_xx(&f, x, y, t);
                Sample {
                    u,
                    w: Some(w),
                    denominator: f.sigma.det(),
                    flag: f.flag,
                }
            }
        }
    }

    fn meta(&self) -> &Meta {
        &self.meta
    }

    fn denominator(&self, x: T, y: T, t: T) -> C<T> {
        eval_mat(&self.sigma, self.dim, self.dim, x, y, t).det()
    }
}

/// N-fold solution from explicit eigenfunction matrices.
pub fn ds1_solution<T: Real>(eigens: &[EigenMatrix<T>], gp: &GlobalParams<T>) -> Result<Ds1Solution<T>> {
    Ds1Solution::build(eigens, gp, Meta::new("ds1 N-fold").param("N", eigens.len()))
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

/// N-fold solution from spectral parameters.
pub fn ds1_from_params<T: Real>(specs: &[EigenSpec<T>], gp: &GlobalParams<T>) -> Result<Ds1Solution<T>> {
    let blocks = specs
        .iter()
        .map(|s| {
            let (xi, eta) = if s.superposed {
                make_superposed(&s.sp, gp)?
            } else {
                make_eigenfunction(&s.sp, gp)?
            };
            Ok(EigenMatrix::new(&xi, &eta, gp))
        })
        .collect::<Result<Vec<_>>>()?;
    Ds1Solution::build(&blocks, gp, spec_meta("ds1 N-fold", specs, gp))
}

/// Generalized transformation: eigenfunction `i` contributes the Taylor coefficients
/// `Ψ_i, Ψ_i^{[1]}, …, Ψ_i^{[m_i]}` in the spectral angle.
pub fn ds1_highorder<T: Real>(
    specs: &[EigenSpec<T>],
    multiplicities: &[usize],
    gp: &GlobalParams<T>,
) -> Result<Ds1Solution<T>> {
    if specs.len() != multiplicities.len() {
        return Err(Error::InvalidParameter("one multiplicity per eigenfunction".into()));
    }
    let mut blocks = Vec::new();
    for (s, &m) in specs.iter().zip(multiplicities) {
        let (xi, eta) = spec_jets(s, gp, m)?;
        for k in 0..=m {
            blocks.push(EigenMatrix::new(&xi[k], &eta[k], gp));
        }
    }
    let mut meta = spec_meta("ds1 high-order", specs, gp);
    for (k, m) in multiplicities.iter().enumerate() {
        meta = meta.param(&format!("m{}", k + 1), m);
    }
    Ds1Solution::build(&blocks, gp, meta)
}
