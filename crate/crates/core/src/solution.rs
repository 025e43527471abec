//! Evaluable solution fields shared by the Darboux engines and the catalog.

use std::fmt;

use crate::scalar::{cre, C, Real};
use crate::spectra::GlobalParams;

/// Per-sample singularity tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flag {
    Regular = 0,
    NearSingular = 1,
    Singular = 2,
}

impl Flag {
    pub fn code(self) -> u8 {
        self as u8
    }
}

/// Field values at one spacetime point. Singular samples carry NaN fields.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample<T: Real> {
    pub u: C<T>,
    pub w: Option<C<T>>,
    /// Denominator whose zeros are the poles of the solution.
    pub denominator: C<T>,
    pub flag: Flag,
}

impl<T: Real> Sample<T> {
    pub fn singular(denominator: C<T>, with_w: bool) -> Self {
        let nan = C::new(T::nan(), T::nan());
        Self {
            u: nan,
            w: with_w.then_some(nan),
            denominator,
            flag: Flag::Singular,
        }
    }
}

/// Provenance of a solution.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Meta {
    pub label: String,
    pub params: Vec<(String, String)>,
    pub notes: Vec<String>,
}

impl Meta {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            ..Self::default()
        }
    }

    pub fn param(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// A pair of complex fields `(u, w)` over `(x, y, t)`.
///
/// Evaluation is pure and deterministic, so grids may be sampled in parallel.
pub trait Solution<T: Real>: Send + Sync {
    fn sample(&self, x: T, y: T, t: T) -> Sample<T>;
    fn meta(&self) -> &Meta;
    /// Whether `w` is available.
    fn has_w(&self) -> bool {
        true
    }
    /// The denominator alone, for blow-up searches; may skip the field algebra.
    fn denominator(&self, x: T, y: T, t: T) -> C<T> {
        self.sample(x, y, t).denominator
    }
}

impl<T: Real, S: Solution<T> + ?Sized> Solution<T> for Box<S> {
    fn sample(&self, x: T, y: T, t: T) -> Sample<T> {
        (**self).sample(x, y, t)
    }
    fn meta(&self) -> &Meta {
        (**self).meta()
    }
    fn has_w(&self) -> bool {
        (**self).has_w()
    }
    fn denominator(&self, x: T, y: T, t: T) -> C<T> {
        (**self).denominator(x, y, t)
    }
}

/// The seed `u ≡ ρ`, `w ≡ ερ²`.
#[derive(Clone, Debug)]
pub struct ConstantSeed<T: Real> {
    gp: GlobalParams<T>,
    meta: Meta,
}

impl<T: Real> ConstantSeed<T> {
    pub fn new(gp: GlobalParams<T>) -> Self {
        Self {
            meta: Meta::new("seed").param("epsilon", gp.epsilon).param("rho", gp.rho),
            gp,
        }
    }
}

impl<T: Real> Solution<T> for ConstantSeed<T> {
    fn sample(&self, _x: T, _y: T, _t: T) -> Sample<T> {
        Sample {
            u: self.gp.u0(),
            w: Some(self.gp.w0()),
            denominator: cre(T::one()),
            flag: Flag::Regular,
        }
    }
    fn meta(&self) -> &Meta {
        &self.meta
    }
}

/// Adds `amplitude · x` to `u`; a negative control for the verifier.
pub struct Corrupted<T: Real, S> {
    inner: S,
    amplitude: T,
    meta: Meta,
}

impl<T: Real, S: Solution<T>> Corrupted<T, S> {
    pub fn new(inner: S, amplitude: T) -> Self {
        let meta = inner.meta().clone().note(format!("corrupted: u + {amplitude}·x"));
        Self {
            inner,
            amplitude,
            meta,
        }
    }
}

impl<T: Real, S: Solution<T>> Solution<T> for Corrupted<T, S> {
    fn sample(&self, x: T, y: T, t: T) -> Sample<T> {
        let mut s = self.inner.sample(x, y, t);
        s.u = s.u + cre(self.amplitude * x);
        s
    }
    fn meta(&self) -> &Meta {
        &self.meta
    }
    fn has_w(&self) -> bool {
        self.inner.has_w()
    }
    fn denominator(&self, x: T, y: T, t: T) -> C<T> {
        self.inner.denominator(x, y, t)
    }
}

/// Symmetry map `u(x, y, t) -> c · u(x, ±y, t)`, `w(x, y, t) -> w(x, ±y, t)` with
/// `|c| = 1`; it preserves the solution set.
pub struct Gauge<T: Real, S> {
    inner: S,
    factor: C<T>,
    flip_y: bool,
    meta: Meta,
}

impl<T: Real, S: Solution<T>> Gauge<T, S> {
    pub fn new(inner: S, factor: C<T>, flip_y: bool) -> Self {
        let meta = inner
            .meta()
            .clone()
            .note(format!("gauge: u -> ({factor})·u{}", if flip_y { ", y -> -y" } else { "" }));
        Self {
            inner,
            factor,
            flip_y,
            meta,
        }
    }
}

impl<T: Real, S: Solution<T>> Solution<T> for Gauge<T, S> {
    fn sample(&self, x: T, y: T, t: T) -> Sample<T> {
        let yy = if self.flip_y { -y } else { y };
        let mut s = self.inner.sample(x, yy, t);
        s.u = s.u * self.factor;
        s
    }
    fn meta(&self) -> &Meta {
        &self.meta
    }
    fn has_w(&self) -> bool {
        self.inner.has_w()
    }
    fn denominator(&self, x: T, y: T, t: T) -> C<T> {
        self.inner.denominator(x, if self.flip_y { -y } else { y }, t)
    }
}
