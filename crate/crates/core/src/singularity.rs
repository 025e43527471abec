//! Blow-up diagnostics: analytic critical times, singular intervals and loci,
//! ridge lines of the travelling families, and numeric searches for zeros of a
//! solution's denominator.

use rayon::prelude::*;

use crate::catalog::{ds1_ridge_trajectories, ds2_ridge_lines, FamilyId, Line, Params};
use crate::error::{Error, Result};
use crate::scalar::{lit, C, Real};
use crate::solution::Solution;

/// Tolerance for branch conditions such as `sin φ = 0`.
const BRANCH_TOL: f64 = 1e-12;

/// How the singular set is spread in time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Blow-up at one instant.
    PointTime,
    /// Blow-up throughout a time interval.
    Interval,
    /// No blow-up.
    None,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::PointTime => "point-time",
            Kind::Interval => "interval",
            Kind::None => "none",
        }
    }
}

/// Classification of a real conic by its discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConicKind {
    Ellipse,
    Parabola,
    Hyperbola,
}

impl ConicKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConicKind::Ellipse => "ellipse",
            ConicKind::Parabola => "parabola",
            ConicKind::Hyperbola => "hyperbola",
        }
    }
}

/// `a x² + b xy + c y² + d x + e y + f = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Conic<T: Real> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub e: T,
    pub f: T,
}

impl<T: Real> Conic<T> {
    pub fn eval(&self, x: T, y: T) -> T {
        self.a * x * x + self.b * x * y + self.c * y * y + self.d * x + self.e * y + self.f
    }

    /// `b² - 4ac`.
    pub fn discriminant(&self) -> T {
        self.b * self.b - lit::<T>(4.0) * self.a * self.c
    }

    pub fn kind(&self) -> ConicKind {
        let disc = self.discriminant();
        let scale = (self.b * self.b).max((self.a * self.c).abs());
        if disc.abs() <= lit::<T>(BRANCH_TOL) * scale {
            ConicKind::Parabola
        } else if disc > T::zero() {
            ConicKind::Hyperbola
        } else {
            ConicKind::Ellipse
        }
    }

    /// Real `x` on the conic at a given `y`.
    pub fn x_at(&self, y: T) -> Vec<T> {
        quadratic_roots(self.a, self.b * y + self.d, self.c * y * y + self.e * y + self.f)
    }

    /// Geometric distance proxy `|Q| / |∇Q|` of a point from the curve.
    pub fn distance(&self, x: T, y: T) -> T {
        let two = lit::<T>(2.0);
        let gx = two * self.a * x + self.b * y + self.d;
        let gy = self.b * x + two * self.c * y + self.e;
        let g = (gx * gx + gy * gy).sqrt();
        let q = self.eval(x, y).abs();
        if g > T::zero() {
            q / g
        } else {
            q
        }
    }

    pub fn coefficients(&self) -> [T; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }
}

/// Real roots of `a z² + b z + c`, ascending; linear when `a = 0`.
pub fn quadratic_roots<T: Real>(a: T, b: T, c: T) -> Vec<T> {
    if a == T::zero() {
        return if b == T::zero() { vec![] } else { vec![-c / b] };
    }
    let disc = b * b - lit::<T>(4.0) * a * c;
    if disc < T::zero() {
        return vec![];
    }
    let sq = disc.sqrt();
    // cancellation-free pair
    let q = -(b + b.signum() * sq) / lit(2.0);
    let mut r = if q == T::zero() { vec![T::zero(), T::zero()] } else { vec![q / a, c / q] };
    r.sort_by(|x, y| x.partial_cmp(y).unwrap());
    r
}

/// Outcome of an analytic singularity analysis.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularityReport<T: Real> {
    pub kind: Kind,
    pub t_c: Option<T>,
    pub interval: Option<(T, T)>,
    /// Spatial locus at the critical time.
    pub locus: Option<Conic<T>>,
    pub notes: Vec<String>,
}

impl<T: Real> SingularityReport<T> {
    fn none(note: impl Into<String>) -> Self {
        Self { kind: Kind::None, t_c: None, interval: None, locus: None, notes: vec![note.into()] }
    }
}

fn near_multiple_of_pi<T: Real>(phi: T) -> Option<i64> {
    let n = (phi / T::PI()).round();
    ((phi - n * T::PI()).abs() <= lit(1e-9)).then(|| n.to_i64().unwrap_or(0))
}

fn require(params: &Params<impl Real>, id: FamilyId) -> Result<()> {
    if params.family() != id {
        return Err(Error::WrongBranch(format!("expected {id}, got {}", params.family())));
    }
    Ok(())
}

/// Critical time and hyperbola of the first-order DS-I rogue wave on the real
/// branch `φ1 = nπ`; for `ε = -1` also the interval of extra blow-up on `x = 0`.
pub fn ds1_critical_time<T: Real>(params: &Params<T>) -> Result<SingularityReport<T>> {
    require(params, FamilyId::Ds1Fundamental)?;
    let (r, phi, e, f, eps) = (params.get("r"), params.get("phi"), params.get("e"), params.get("f"), params.get("epsilon"));
    let n = near_multiple_of_pi(phi).ok_or_else(|| Error::WrongBranch("needs phi1 = k*pi".into()))?;
    let (one, two) = (T::one(), lit::<T>(2.0));
    let r2 = r * r;
    if (r2 - one).abs() <= lit(BRANCH_TOL) {
        return Err(Error::Degenerate("r1^2 = 1 has no hyperbola".into()));
    }
    let r4 = r2 * r2;
    let t_c = -two * e * r2 / (one + r4);
    let p = (r - eps / r) / two;
    let q = (r + eps / r) / two;
    let s = if n % 2 == 0 { -one } else { one };
    let kappa = p / (two * q) + f;
    let shift = eps * r2 / ((eps + r2) * (eps + r2));
    let locus = Conic {
        a: -p * p,
        b: T::zero(),
        c: q * q,
        d: T::zero(),
        e: two * s * q * kappa,
        f: kappa * kappa + shift,
    };
    let mut notes = vec![format!("locus is a {}", locus.kind().as_str())];
    if eps > T::zero() {
        return Ok(SingularityReport { kind: Kind::PointTime, t_c: Some(t_c), interval: None, locus: Some(locus), notes });
    }
    let edge = r.abs() / (r2 - one).abs();
    let scale = two / (r2 - one / r2);
    let (a, b) = ((-edge - e) * scale, (edge - e) * scale);
    notes.push("extra blow-up on x = 0 for t in the interval, evaluated as printed".into());
    let mid = two / (r2 + one / r2);
    notes.push(format!(
        "the y-quadratic vanishes exactly on [{}, {}] (factor 2/(r1^2 + r1^-2))",
        (-edge - e) * mid,
        (edge - e) * mid
    ));
    Ok(SingularityReport {
        kind: Kind::Interval,
        t_c: Some(t_c),
        interval: Some((a.min(b), a.max(b))),
        locus: Some(locus),
        notes,
    })
}

/// Points `(0, y)` where the `ε = -1` rogue wave blows up at time `t`.
pub fn ds1_axis_points<T: Real>(params: &Params<T>, t: T) -> Result<Vec<T>> {
    require(params, FamilyId::Ds1Fundamental)?;
    let (r, phi, e, f) = (params.get("r"), params.get("phi"), params.get("e"), params.get("f"));
    let n = near_multiple_of_pi(phi).ok_or_else(|| Error::WrongBranch("needs phi1 = k*pi".into()))?;
    let (one, two) = (T::one(), lit::<T>(2.0));
    let r2 = r * r;
    let eps = params.get("epsilon");
    let p = (r - eps / r) / two;
    let q = (r + eps / r) / two;
    let s = if n % 2 == 0 { -one } else { one };
    let b = (r2 + one / r2) / two * t + e;
    let rhs = -eps * r2 / ((eps + r2) * (eps + r2)) - b * b;
    if rhs < T::zero() {
        return Ok(vec![]);
    }
    let kappa = p / (two * q) + f;
    let mut ys: Vec<T> = [rhs.sqrt(), -rhs.sqrt()].iter().map(|&z| (z - kappa) / (s * q)).collect();
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(ys)
}

/// Singular time interval of the DS-I two-rogue wave on `y = 0`.
pub fn ds1_two_rogue_interval<T: Real>(r: T) -> Result<(T, T)> {
    let one = T::one();
    if r == T::zero() || !r.is_finite() {
        return Err(Error::InvalidParameter("r1 must be finite and nonzero".into()));
    }
    let r2 = r * r;
    if (r2 - one).abs() <= lit(BRANCH_TOL) {
        return Err(Error::Degenerate("r1^2 = 1 makes the interval unbounded".into()));
    }
    let r4 = r2 * r2;
    let m = r2 - one;
    let num = r.abs().powi(3) * (lit::<T>(3.0) * m * m + lit::<T>(4.0) * r2).sqrt();
    let den = m.abs() * (r4 + one) * (r4 - r2 + one).sqrt();
    let t = num / den;
    Ok((-t, t))
}

/// Critical time and locus of the DS-II fundamental rogue wave with `ε = 1`,
/// `r1 = 1`.
pub fn ds2_critical_time<T: Real>(params: &Params<T>) -> Result<SingularityReport<T>> {
    require(params, FamilyId::Ds2Fundamental)?;
    let (r, phi, e, f, eps) = (params.get("r"), params.get("phi"), params.get("e"), params.get("f"), params.get("epsilon"));
    let one = T::one();
    if eps != one || (r - one).abs() > lit(BRANCH_TOL) {
        return Err(Error::WrongBranch("needs epsilon = 1 and r1 = 1".into()));
    }
    let (c, s) = (phi.cos(), phi.sin());
    if c.abs() <= lit(BRANCH_TOL) {
        return Ok(SingularityReport::none("cos(phi1) = 0 gives u = 1"));
    }
    let c2 = (lit::<T>(2.0) * phi).cos();
    if c2.abs() <= lit(BRANCH_TOL) {
        return Err(Error::Degenerate("cos(2 phi1) = 0".into()));
    }
    let two = lit::<T>(2.0);
    let t_c = (two * e * c + s) / (-two * c2 * c);
    let s2 = (two * phi).sin();
    let k = c * (one + two * f);
    let locus = Conic {
        a: -s2 * s2,
        b: T::zero(),
        c: lit::<T>(4.0) * c * c * c * c,
        d: T::zero(),
        e: lit::<T>(4.0) * c * c * k,
        f: k * k + one,
    };
    Ok(SingularityReport {
        kind: Kind::PointTime,
        t_c: Some(t_c),
        interval: None,
        locus: Some(locus),
        notes: vec![
            format!("locus is a {} by its discriminant", locus.kind().as_str()),
            "no blow-up on x = 0: the real part of the denominator is positive there".into(),
        ],
    })
}

/// The quadratic whose roots bound the singular window of the DS-II two-rational
/// solution with `φ2 = π/4`.
pub fn two_rational_quadratic<T: Real>(c: T) -> T {
    let s2 = T::SQRT_2();
    let l = |v: f64| lit::<T>(v);
    l(16.0) * s2 * c * c - l(20.0) * c * c - l(64.0) * s2 * c + l(88.0) * c + l(52.0) * s2 - l(73.0)
}

/// Roots of [`two_rational_quadratic`], ascending.
pub fn ds2_two_rational_interval<T: Real>() -> (T, T) {
    let s2 = T::SQRT_2();
    let l = |v: f64| lit::<T>(v);
    let r = quadratic_roots(l(16.0) * s2 - l(20.0), l(88.0) - l(64.0) * s2, l(52.0) * s2 - l(73.0));
    (r[0], r[1])
}

/// Ridge lines of a travelling family with their acute crossing angle.
#[derive(Clone, Debug, PartialEq)]
pub struct Ridges<T: Real> {
    pub lines: [Line<T>; 2],
    /// Acute angle between the lines in the `(x, y)` plane.
    pub angle: T,
}

/// The two ridge lines of `ds1_travelling` or `ds2_travelling`.
pub fn ridge_lines<T: Real>(params: &Params<T>) -> Result<Ridges<T>> {
    let g = |k: &str| params.get(k);
    let lines = match params.family() {
        FamilyId::Ds1Travelling => {
            let k = ((g("phi") / T::PI() + lit(0.5)).round()).to_i64().unwrap_or(0);
            if g("phi").cos().abs() > lit(1e-9) {
                return Err(Error::WrongBranch("needs phi1 = (2k-1)pi/2".into()));
            }
            ds1_ridge_trajectories(g("r"), k, g("e"))
        }
        FamilyId::Ds2Travelling => {
            if (g("f") + lit(0.5)).abs() <= lit(BRANCH_TOL) {
                return Err(Error::WrongBranch("needs f1 != -1/2".into()));
            }
            ds2_ridge_lines(g("phi"), g("e"))
        }
        other => return Err(Error::WrongBranch(format!("{other} is not a travelling family"))),
    };
    let [l1, l2] = lines;
    let dot = l1[0] * l2[0] + l1[1] * l2[1];
    let n = ((l1[0] * l1[0] + l1[1] * l1[1]) * (l2[0] * l2[0] + l2[1] * l2[1])).sqrt();
    let angle = (dot.abs() / n).min(T::one()).acos();
    Ok(Ridges { lines, angle })
}

/// Dispatches to the analytic routine of a family. `r1^2 = 1` on the DS-I
/// fundamental family yields a report of kind none describing the reduction.
pub fn analyze<T: Real>(params: &Params<T>) -> Result<SingularityReport<T>> {
    let g = |k: &str| params.get(k);
    match params.family() {
        FamilyId::Ds1Fundamental => {
            if (g("r") * g("r") - T::one()).abs() <= lit(BRANCH_TOL) {
                return Ok(if g("epsilon") < T::zero() {
                    SingularityReport::none("r1 = 1, epsilon = -1: trivial case u = 1")
                } else {
                    SingularityReport::none("r1 = 1, epsilon = 1: x-independent line rogue wave, no blow-up")
                });
            }
            ds1_critical_time(params)
        }
        FamilyId::Ds1TwoRogue => {
            let (a, b) = ds1_two_rogue_interval(g("r"))?;
            Ok(SingularityReport {
                kind: Kind::Interval,
                t_c: None,
                interval: Some((a, b)),
                locus: None,
                notes: vec!["interval of blow-up on y = 0".into()],
            })
        }
        FamilyId::Ds2Fundamental => ds2_critical_time(params),
        FamilyId::Ds2TwoRational => {
            if (g("phi2") - T::FRAC_PI_4()).abs() > lit(1e-12) {
                return Err(Error::WrongBranch("the singular window is known for phi2 = pi/4 only".into()));
            }
            Ok(SingularityReport {
                kind: Kind::Interval,
                t_c: None,
                interval: Some(ds2_two_rational_interval()),
                locus: None,
                notes: vec!["endpoints are the real roots of the window quadratic".into()],
            })
        }
        FamilyId::Ds1Peregrine | FamilyId::Ds2Line => Ok(SingularityReport::none("line rogue wave, positive denominator")),
        FamilyId::Ds1Travelling | FamilyId::Ds2Travelling => {
            let rl = ridge_lines(params)?;
            let mut rep = SingularityReport::none("nonsingular travelling wave");
            for (k, l) in rl.lines.iter().enumerate() {
                rep.notes.push(format!("ridge l{}: {} x + {} y + {} t + {} = 0", k + 1, l[0], l[1], l[2], l[3]));
            }
            rep.notes.push(format!("ridge angle {}", rl.angle));
            Ok(rep)
        }
        other => Err(Error::WrongBranch(format!("no analytic singularity analysis for {other}"))),
    }
}

/// Rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchBox<T: Real> {
    pub x: (T, T),
    pub y: (T, T),
}

impl<T: Real> SearchBox<T> {
    pub fn new(x: (T, T), y: (T, T)) -> Self {
        Self { x, y }
    }

    pub fn square(a: T) -> Self {
        Self::new((-a, a), (-a, a))
    }

    fn size(&self) -> T {
        (self.x.1 - self.x.0).max(self.y.1 - self.y.0)
    }

    fn contains(&self, p: (T, T), margin: T) -> bool {
        p.0 >= self.x.0 - margin && p.0 <= self.x.1 + margin && p.1 >= self.y.0 - margin && p.1 <= self.y.1 + margin
    }

    fn node(&self, n: usize, i: usize, j: usize) -> (T, T) {
        let fi = lit::<T>(i as f64 / (n - 1) as f64);
        let fj = lit::<T>(j as f64 / (n - 1) as f64);
        (self.x.0 + (self.x.1 - self.x.0) * fi, self.y.0 + (self.y.1 - self.y.0) * fj)
    }
}

/// Coarse grid resolution of the blow-up search.
pub const SEARCH_GRID: usize = 200;
/// Acceptance threshold on `|denominator|` for a refined zero.
pub const ZERO_TOL: f64 = 1e-8;

fn scan<T: Real, S: Solution<T> + ?Sized>(sol: &S, t: T, bx: &SearchBox<T>, n: usize) -> Vec<C<T>> {
    (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (x, y) = bx.node(n, k % n, k / n);
            sol.denominator(x, y, t)
        })
        .collect()
}

fn bisect<T: Real>(f: impl Fn(T) -> T, mut a: T, mut b: T, tol: T) -> T {
    let mut fa = f(a);
    while (b - a).abs() > tol {
        let m = (a + b) / lit(2.0);
        let fm = f(m);
        if fm == T::zero() {
            return m;
        }
        if (fm > T::zero()) == (fa > T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    (a + b) / lit(2.0)
}

/// Newton iteration for `D(x, y) = 0` viewed as a map of the plane.
fn newton2<T: Real>(d: &impl Fn(T, T) -> C<T>, mut p: (T, T), step_scale: T) -> Option<(T, T)> {
    let two = lit::<T>(2.0);
    for _ in 0..60 {
        let v = d(p.0, p.1);
        if v.norm() <= lit::<T>(1e-15) {
            return Some(p);
        }
        let hx = lit::<T>(1e-7) * (T::one() + p.0.abs());
        let hy = lit::<T>(1e-7) * (T::one() + p.1.abs());
        let dx = (d(p.0 + hx, p.1) - d(p.0 - hx, p.1)) / C::new(two * hx, T::zero());
        let dy = (d(p.0, p.1 + hy) - d(p.0, p.1 - hy)) / C::new(two * hy, T::zero());
        let det = dx.re * dy.im - dy.re * dx.im;
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        let sx = (dy.im * v.re - dy.re * v.im) / det;
        let sy = (dx.re * v.im - dx.im * v.re) / det;
        p = (p.0 - sx, p.1 - sy);
        if !(p.0.is_finite() && p.1.is_finite()) {
            return None;
        }
        if (sx.abs() + sy.abs()) <= lit::<T>(1e-14) * step_scale {
            break;
        }
    }
    Some(p)
}

fn dedup<T: Real>(mut pts: Vec<(T, T)>, tol: T) -> Vec<(T, T)> {
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.partial_cmp(&b.1).unwrap()));
    let mut out: Vec<(T, T)> = Vec::new();
    for p in pts {
        if !out.iter().any(|q| (q.0 - p.0).abs() <= tol && (q.1 - p.1).abs() <= tol) {
            out.push(p);
        }
    }
    out
}

/// Zeros of the denominator at time `t` inside the box, on a
/// [`SEARCH_GRID`]-square scan.
pub fn locate_blowup<T: Real, S: Solution<T> + ?Sized>(sol: &S, t: T, bx: &SearchBox<T>) -> Vec<(T, T)> {
    locate_blowup_with(sol, t, bx, SEARCH_GRID)
}

/// [`locate_blowup`] with an explicit scan resolution `n × n`.
///
/// The denominator is first rotated by the phase of its largest sample. When its
/// imaginary part then vanishes on the whole grid the zero set is a curve and
/// points on it are found by bisecting the real part along grid edges.
/// Otherwise zeros are isolated: every cell where both parts change sign seeds a
/// Newton iteration in the plane.
pub fn locate_blowup_with<T: Real, S: Solution<T> + ?Sized>(sol: &S, t: T, bx: &SearchBox<T>, n: usize) -> Vec<(T, T)> {
    let n = n.max(2);
    let raw = scan(sol, t, bx, n);
    let peak = raw.iter().copied().fold(C::new(T::zero(), T::zero()), |m, v| if v.norm() > m.norm() { v } else { m });
    if peak.norm() == T::zero() || !peak.norm().is_finite() {
        return vec![];
    }
    let rot = (peak / C::new(peak.norm(), T::zero())).conj();
    let vals: Vec<C<T>> = raw.iter().map(|v| v * rot).collect();
    let d = |x: T, y: T| sol.denominator(x, y, t) * rot;
    let at = |i: usize, j: usize| vals[j * n + i];
    let size = bx.size();
    let tol = lit::<T>(ZERO_TOL);
    let max_im = vals.iter().fold(T::zero(), |m, v| m.max(v.im.abs()));
    let mut found = Vec::new();
    if max_im <= lit::<T>(1e-10) * peak.norm() {
        let btol = lit::<T>(1e-10) * size;
        for j in 0..n {
            for i in 0..n {
                let (x, y) = bx.node(n, i, j);
                let here = at(i, j).re;
                if i + 1 < n && here * at(i + 1, j).re < T::zero() {
                    let x1 = bx.node(n, i + 1, j).0;
                    let xr = bisect(|s| d(s, y).re, x, x1, btol);
                    found.push((xr, y));
                }
                if j + 1 < n && here * at(i, j + 1).re < T::zero() {
                    let y1 = bx.node(n, i, j + 1).1;
                    let yr = bisect(|s| d(x, s).re, y, y1, btol);
                    found.push((x, yr));
                }
            }
        }
        found.retain(|p| d(p.0, p.1).norm() <= tol);
        return dedup(found, lit::<T>(1e-9) * size);
    }
    let changes = |f: &dyn Fn(C<T>) -> T, c: [C<T>; 4]| {
        let v: Vec<T> = c.iter().map(|z| f(*z)).collect();
        let pos = v.iter().any(|&a| a >= T::zero());
        let neg = v.iter().any(|&a| a <= T::zero());
        pos && neg
    };
    let cell = size / lit((n - 1) as f64);
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let c = [at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)];
            if !(changes(&|z| z.re, c) && changes(&|z| z.im, c)) {
                continue;
            }
            let (x0, y0) = bx.node(n, i, j);
            let start = (x0 + cell / lit(2.0), y0 + cell / lit(2.0));
            if let Some(p) = newton2(&d, start, size) {
                if bx.contains(p, cell) && d(p.0, p.1).norm() <= tol {
                    found.push(p);
                }
            }
        }
    }
    dedup(found, lit::<T>(1e-6) * size)
}

/// 2D Nelder–Mead minimisation, returning the best vertex and its value.
fn nelder_mead<T: Real>(f: impl Fn(T, T) -> T, start: (T, T), step: T, tol: T) -> ((T, T), T) {
    let l = |v: f64| lit::<T>(v);
    let mut s = [start, (start.0 + step, start.1), (start.0, start.1 + step)];
    let mut v = s.map(|p| f(p.0, p.1));
    for _ in 0..2000 {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap_or(std::cmp::Ordering::Equal));
        s = idx.map(|k| s[k]);
        v = idx.map(|k| v[k]);
        let spread = (s[1].0 - s[0].0).abs().max((s[1].1 - s[0].1).abs()).max((s[2].0 - s[0].0).abs()).max((s[2].1 - s[0].1).abs());
        if spread <= tol {
            break;
        }
        let c = ((s[0].0 + s[1].0) / l(2.0), (s[0].1 + s[1].1) / l(2.0));
        let along = |k: T| (c.0 + k * (s[2].0 - c.0), c.1 + k * (s[2].1 - c.1));
        let r = along(l(-1.0));
        let fr = f(r.0, r.1);
        if fr < v[0] {
            let e = along(l(-2.0));
            let fe = f(e.0, e.1);
            if fe < fr {
                s[2] = e;
                v[2] = fe;
            } else {
                s[2] = r;
                v[2] = fr;
            }
        } else if fr < v[1] {
            s[2] = r;
            v[2] = fr;
        } else {
            let k = if fr < v[2] { l(-0.5) } else { l(0.5) };
            let cpt = along(k);
            let fc = f(cpt.0, cpt.1);
            if fc < v[2].min(fr) {
                s[2] = cpt;
                v[2] = fc;
            } else {
                for m in 1..3 {
                    s[m] = ((s[0].0 + s[m].0) / l(2.0), (s[0].1 + s[m].1) / l(2.0));
                    v[m] = f(s[m].0, s[m].1);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap_or(std::cmp::Ordering::Equal)).unwrap();
    (s[best], v[best])
}

/// Minimum of `|denominator|` over the box at time `t` and where it is attained:
/// an `n × n` scan refined from the best few cells.
pub fn min_denominator<T: Real, S: Solution<T> + ?Sized>(sol: &S, t: T, bx: &SearchBox<T>, n: usize) -> (T, (T, T)) {
    let n = n.max(2);
    let vals = scan(sol, t, bx, n);
    let mut order: Vec<usize> = (0..n * n).collect();
    order.sort_by(|&a, &b| vals[a].norm().partial_cmp(&vals[b].norm()).unwrap_or(std::cmp::Ordering::Equal));
    let cell = bx.size() / lit((n - 1) as f64);
    let f = |x: T, y: T| sol.denominator(x, y, t).norm();
    let mut best = (vals[order[0]].norm(), bx.node(n, order[0] % n, order[0] / n));
    for &k in order.iter().take(4) {
        let (p, v) = nelder_mead(f, bx.node(n, k % n, k / n), cell, lit::<T>(1e-12) * bx.size());
        if v < best.0 && bx.contains(p, cell) {
            best = (v, p);
        }
    }
    best
}

/// Time in `[t0, t1]` minimising `min_(x,y) |denominator|`, with that minimum.
/// A uniform scan of `steps` times brackets the minimiser and golden-section
/// search refines it.
pub fn critical_time_search<T: Real, S: Solution<T> + ?Sized>(
    sol: &S,
    t_range: (T, T),
    bx: &SearchBox<T>,
    steps: usize,
    n: usize,
) -> (T, T) {
    let g = |t: T| min_denominator(sol, t, bx, n).0;
    let steps = steps.max(3);
    let dt = (t_range.1 - t_range.0) / lit((steps - 1) as f64);
    let ts: Vec<T> = (0..steps).map(|k| t_range.0 + dt * lit(k as f64)).collect();
    let gs: Vec<T> = ts.iter().map(|&t| g(t)).collect();
    let k = (0..steps).min_by(|&a, &b| gs[a].partial_cmp(&gs[b]).unwrap_or(std::cmp::Ordering::Equal)).unwrap();
    let (mut a, mut b) = (ts[k.saturating_sub(1)], ts[(k + 1).min(steps - 1)]);
    let ratio = (lit::<T>(5.0).sqrt() - T::one()) / lit(2.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while (b - a).abs() > lit::<T>(1e-10) * (T::one() + a.abs()) {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = g(d);
        }
    }
    let t = (a + b) / lit(2.0);
    (t, g(t))
}

/// Whether the denominator has a zero in the box at time `t`: the refined
/// minimum of `|denominator|` is at most [`ZERO_TOL`]. Unlike sign-change
/// detection this also sees pairs of zeros closer than a scan cell.
pub fn has_blowup<T: Real, S: Solution<T> + ?Sized>(sol: &S, t: T, bx: &SearchBox<T>, n: usize) -> bool {
    min_denominator(sol, t, bx, n).0 <= lit(ZERO_TOL)
}

/// The first window of times in `t_range` during which the denominator has zeros
/// in the box: a uniform scan of `steps` times finds the first stretch with
/// zeros and bisection sharpens both edges to `tol`.
pub fn blowup_window<T: Real, S: Solution<T> + ?Sized>(
    sol: &S,
    t_range: (T, T),
    bx: &SearchBox<T>,
    steps: usize,
    n: usize,
    tol: T,
) -> Option<(T, T)> {
    let steps = steps.max(2);
    let dt = (t_range.1 - t_range.0) / lit((steps - 1) as f64);
    let ts: Vec<T> = (0..steps).map(|k| t_range.0 + dt * lit(k as f64)).collect();
    let hit: Vec<bool> = ts.iter().map(|&t| has_blowup(sol, t, bx, n)).collect();
    let first = hit.iter().position(|&h| h)?;
    let last = first + hit[first..].iter().take_while(|&&h| h).count() - 1;
    let edge = |mut inside: T, mut outside: T| {
        while (inside - outside).abs() > tol {
            let m = (inside + outside) / lit(2.0);
            if has_blowup(sol, m, bx, n) {
                inside = m;
            } else {
                outside = m;
            }
        }
        (inside + outside) / lit(2.0)
    };
    let lo = if first == 0 { ts[0] } else { edge(ts[first], ts[first - 1]) };
    let hi = if last + 1 == steps { ts[steps - 1] } else { edge(ts[last], ts[last + 1]) };
    Some((lo, hi))
}
