//! Finite-difference check that sampled fields satisfy the nonlocal system
//!
//! ```text
//! i u_t + (α²/2) u_xx + ½ u_yy + (uv - w) u = 0,
//! w_xx - α² w_yy - 2 (uv)_xx = 0,      v(x, y, t) = ε ū(-x, y, t).
//! ```
//!
//! Only sampled values are used: the verifier is independent of how a solution
//! was constructed. All derivatives are second-order central differences on
//! three-point stencils. When a solution carries no `w`, it is reconstructed from
//! the first equation and only the second is checked.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{cre, im_unit, lit, C, Real};
use crate::solution::{Flag, Sample, Solution};
use crate::spectra::GlobalParams;

/// Samples with `|u|` above this are treated like poles.
pub const BLOWUP: f64 = 1e6;
/// Residuals below this count as the rounding floor.
pub const FLOOR: f64 = 1e-9;
/// Where `w` is reconstructed, nodes with `|u|` below this are masked: the
/// reconstruction divides by `u`.
pub const RECON_MIN_U: f64 = 0.1;

/// Rectangular grid with `x` symmetric about zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec<T: Real> {
    pub x_range: (T, T),
    pub y_range: (T, T),
    pub h: T,
}

impl<T: Real> GridSpec<T> {
    pub fn new(x_range: (T, T), y_range: (T, T), h: T) -> Self {
        Self { x_range, y_range, h }
    }

    /// `[-a, a] × [-a, a]` with spacing `h`.
    pub fn square(a: T, h: T) -> Self {
        Self::new((-a, a), (-a, a), h)
    }

    pub fn with_h(self, h: T) -> Self {
        Self { h, ..self }
    }

    fn validate(&self) -> Result<()> {
        let (x0, x1) = self.x_range;
        let (y0, y1) = self.y_range;
        if !(self.h > T::zero()) || !(x1 > x0) || !(y1 > y0) {
            return Err(Error::InvalidParameter("grid needs h > 0 and nonempty ranges".into()));
        }
        let scale = T::one().max(x0.abs()).max(x1.abs());
        if (x0 + x1).abs() > lit::<T>(1e-12) * scale {
            return Err(Error::GridNotSymmetric);
        }
        Ok(())
    }

    /// Node coordinates; `x` nodes are exactly antisymmetric.
    pub fn nodes(&self) -> Result<(Vec<T>, Vec<T>)> {
        self.validate()?;
        let count = |w: T| (w / self.h).round().to_usize().unwrap_or(0) + 1;
        let (x0, x1) = self.x_range;
        let (y0, y1) = self.y_range;
        let nx = count(x1 - x0);
        let ny = count(y1 - y0);
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidParameter("grid needs at least 3 nodes per axis".into()));
        }
        let hx = (x1 - x0) / lit(nx as f64 - 1.0);
        let hy = (y1 - y0) / lit(ny as f64 - 1.0);
        let half = lit::<T>(0.5);
        let xs = (0..nx)
            .map(|i| lit::<T>(2.0 * i as f64 - (nx as f64 - 1.0)) * hx * half)
            .collect();
        let ys = (0..ny).map(|j| y0 + lit::<T>(j as f64) * hy).collect();
        Ok((xs, ys))
    }
}

/// Samples a solution on all grid nodes at time `t`, row-major in `y` then `x`
/// (index `j * nx + i`), in parallel.
pub fn sample_grid<T: Real, S: Solution<T> + ?Sized>(sol: &S, xs: &[T], ys: &[T], t: T) -> Vec<Sample<T>> {
    let nx = xs.len();
    (0..xs.len() * ys.len())
        .into_par_iter()
        .map(|k| sol.sample(xs[k % nx], ys[k / nx], t))
        .collect()
}

/// Max and mean modulus of a residual over unmasked points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norms<T: Real> {
    pub max: T,
    pub mean: T,
}

/// Outcome of one residual evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport<T: Real> {
    /// `None` when `w` was reconstructed from the first equation.
    pub eq1: Option<Norms<T>>,
    pub eq2: Norms<T>,
    pub masked: usize,
    pub evaluated: usize,
    pub h: T,
    pub w_reconstructed: bool,
}

impl<T: Real> ResidualReport<T> {
    pub fn masked_fraction(&self) -> T {
        let total = self.masked + self.evaluated;
        if total == 0 {
            T::zero()
        } else {
            lit::<T>(self.masked as f64 / total as f64)
        }
    }
}

fn accumulate<T: Real>(vals: impl Iterator<Item = Option<T>>) -> (Norms<T>, usize, usize) {
    let (mut max, mut sum, mut n, mut masked) = (T::zero(), T::zero(), 0usize, 0usize);
    for v in vals {
        match v {
            Some(r) => {
                max = max.max(r);
                sum = sum + r;
                n += 1;
            }
            None => masked += 1,
        }
    }
    let mean = if n > 0 { sum / lit(n as f64) } else { T::zero() };
    (Norms { max, mean }, n, masked)
}

/// Residuals of both equations at time `t` with spacing `grid.h` (also used in `t`).
pub fn pde_residual<T: Real, S: Solution<T> + ?Sized>(
    sol: &S,
    gp: &GlobalParams<T>,
    grid: &GridSpec<T>,
    t: T,
) -> Result<ResidualReport<T>> {
    let (xs, ys) = grid.nodes()?;
    let (nx, ny) = (xs.len(), ys.len());
    let h = grid.h;
    let hx = xs[1] - xs[0];
    let hy = ys[1] - ys[0];
    let now = sample_grid(sol, &xs, &ys, t);
    let before = sample_grid(sol, &xs, &ys, t - h);
    let after = sample_grid(sol, &xs, &ys, t + h);
    let idx = |i: usize, j: usize| j * nx + i;
    let blow = lit::<T>(BLOWUP);
    let bad_sample = |s: &Sample<T>| s.flag != Flag::Regular || !(s.u.norm() <= blow);
    let bad_here: Vec<bool> = (0..nx * ny)
        .map(|k| bad_sample(&now[k]) || bad_sample(&before[k]) || bad_sample(&after[k]))
        .collect();
    // a node is unusable if it or its mirror (needed for v) is bad
    let bad: Vec<bool> = (0..nx * ny)
        .map(|k| {
            let (i, j) = (k % nx, k / nx);
            bad_here[k] || bad_here[idx(nx - 1 - i, j)]
        })
        .collect();
    let eps = cre(gp.epsilon);
    let a2 = gp.alpha_sq;
    let i_unit = im_unit::<T>();
    let u = |k: usize| now[k].u;
    let v = |k: usize| {
        let (i, j) = (k % nx, k / nx);
        eps * now[idx(nx - 1 - i, j)].u.conj()
    };
    let (hx2, hy2) = (cre(hx * hx), cre(hy * hy));
    let two = cre(lit::<T>(2.0));
    let half = cre(lit::<T>(0.5));
    let d2x = |f: &dyn Fn(usize) -> C<T>, i: usize, j: usize| {
        (f(idx(i + 1, j)) - two * f(idx(i, j)) + f(idx(i - 1, j))) / hx2
    };
    let d2y = |f: &dyn Fn(usize) -> C<T>, i: usize, j: usize| {
        (f(idx(i, j + 1)) - two * f(idx(i, j)) + f(idx(i, j - 1))) / hy2
    };
    let cross_ok = |i: usize, j: usize, r: usize| {
        (i >= r && i + r < nx && j >= r && j + r < ny)
            && (0..=2 * r).all(|d| !bad[idx(i + d - r, j)] && !bad[idx(i, j + d - r)])
    };
    // linear part of the first equation without w
    let lin = |i: usize, j: usize| {
        let k = idx(i, j);
        let ut = (after[k].u - before[k].u) / cre(two.re * h);
        i_unit * ut + cre(a2) * half * d2x(&u, i, j) + half * d2y(&u, i, j) + u(k) * v(k) * u(k)
    };
    let uv = |k: usize| u(k) * v(k);
    let interior = |r: usize| (r..ny - r).flat_map(move |j| (r..nx - r).map(move |i| (i, j)));

    if sol.has_w() && now.iter().all(|s| s.w.is_some()) {
        let w = |k: usize| now[k].w.unwrap();
        let (eq1, n1, m1) = accumulate(interior(1).map(|(i, j)| {
            cross_ok(i, j, 1).then(|| (lin(i, j) - w(idx(i, j)) * u(idx(i, j))).norm())
        }));
        let (eq2, _, _) = accumulate(interior(1).map(|(i, j)| {
            cross_ok(i, j, 1).then(|| (d2x(&w, i, j) - cre(a2) * d2y(&w, i, j) - two * d2x(&uv, i, j)).norm())
        }));
        if n1 == 0 {
            return Err(Error::AllMasked);
        }
        return Ok(ResidualReport { eq1: Some(eq1), eq2, masked: m1, evaluated: n1, h, w_reconstructed: false });
    }

    // w = (linear part)/u + ... from the first equation, on the interior
    let w_rec: Vec<C<T>> = (0..nx * ny)
        .map(|k| {
            let (i, j) = (k % nx, k / nx);
            if cross_ok(i, j, 1) && u(k).norm() >= lit(RECON_MIN_U) {
                lin(i, j) / u(k)
            } else {
                C::new(T::nan(), T::nan())
            }
        })
        .collect();
    let w = |k: usize| w_rec[k];
    let (eq2, n2, m2) = accumulate(interior(2).map(|(i, j)| {
        let ok = cross_ok(i, j, 2) && [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1), (i, j)]
            .iter()
            .all(|&(a, b)| w(idx(a, b)).re.is_finite());
        ok.then(|| (d2x(&w, i, j) - cre(a2) * d2y(&w, i, j) - two * d2x(&uv, i, j)).norm())
    }));
    if n2 == 0 {
        return Err(Error::AllMasked);
    }
    Ok(ResidualReport { eq1: None, eq2, masked: m2, evaluated: n2, h, w_reconstructed: true })
}

/// Observed convergence order of one equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order<T: Real> {
    /// `log₂(r(h)/r(h/2))`.
    Value(T),
    /// Residual at the rounding floor on the coarse grid.
    Floor,
}

impl<T: Real> Order<T> {
    pub fn within(&self, lo: T, hi: T) -> bool {
        match *self {
            Order::Floor => true,
            Order::Value(v) => v >= lo && v <= hi,
        }
    }

    pub fn value(&self) -> Option<T> {
        match *self {
            Order::Floor => None,
            Order::Value(v) => Some(v),
        }
    }
}

/// Residuals at `h` and `h/2` with the derived orders.
#[derive(Clone, Debug, PartialEq)]
pub struct Convergence<T: Real> {
    pub coarse: ResidualReport<T>,
    pub fine: ResidualReport<T>,
    pub eq1: Option<Order<T>>,
    pub eq2: Order<T>,
}

impl<T: Real> Convergence<T> {
    /// True when every checked equation converges with order in `[lo, hi]` or is at
    /// the floor.
    pub fn passes(&self, lo: T, hi: T) -> bool {
        self.eq1.map_or(true, |o| o.within(lo, hi)) && self.eq2.within(lo, hi)
    }

    /// The order furthest from 2, or `None` when all are at the floor.
    pub fn worst(&self) -> Option<T> {
        let two = lit::<T>(2.0);
        [self.eq1.and_then(|o| o.value()), self.eq2.value()]
            .into_iter()
            .flatten()
            .fold(None, |acc: Option<T>, v| match acc {
                Some(a) if (a - two).abs() >= (v - two).abs() => Some(a),
                _ => Some(v),
            })
    }
}

fn order_of<T: Real>(coarse: T, fine: T) -> Order<T> {
    if coarse < lit(FLOOR) {
        Order::Floor
    } else {
        Order::Value((coarse / fine).log2())
    }
}

/// Convergence order between `grid.h` and `grid.h / 2`.
pub fn convergence_order<T: Real, S: Solution<T> + ?Sized>(
    sol: &S,
    gp: &GlobalParams<T>,
    grid: &GridSpec<T>,
    t: T,
) -> Result<Convergence<T>> {
    let coarse = pde_residual(sol, gp, grid, t)?;
    let fine = pde_residual(sol, gp, &grid.with_h(grid.h / lit(2.0)), t)?;
    let eq1 = match (coarse.eq1, fine.eq1) {
        (Some(a), Some(b)) => Some(order_of(a.max, b.max)),
        _ => None,
    };
    let eq2 = order_of(coarse.eq2.max, fine.eq2.max);
    Ok(Convergence { coarse, fine, eq1, eq2 })
}
