//! Exact rational and rogue-wave solutions of the partially PT-symmetric nonlocal
//! Davey–Stewartson equations
//!
//! ```text
//! i u_t + ½(α² u_xx + u_yy) + (uv - w) u = 0,
//! w_xx - α² w_yy = 2 (uv)_xx,   v(x, y, t) = ε ū(-x, y, t),
//! ```
//!
//! built by Darboux transformations on the constant background, together with
//! the closed-form families they generate, a finite-difference verifier and
//! blow-up diagnostics.
//!
//! Everything is generic over the real scalar ([`Real`], implemented for `f32`
//! and `f64`); the `*64` aliases fix `f64`.

pub mod catalog;
pub mod dt1;
pub mod dt2;
pub mod error;
pub mod exppoly;
pub mod jet;
pub mod linalg;
pub mod quasidet;
pub mod scalar;
pub mod singularity;
pub mod solution;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
pub use exppoly::{ExpPoly, Term, Var};
pub use scalar::{Real, C};
pub use solution::{Flag, Meta, Sample, Solution};
pub use spectra::{EigenMatrix, GlobalParams, Normalization, SpectralParams};

pub type Complex64 = C<f64>;
pub type ExpPoly64 = ExpPoly<f64>;
pub type CMat64 = linalg::CMat<f64>;
pub type SpectralParams64 = SpectralParams<f64>;
pub type GlobalParams64 = GlobalParams<f64>;
pub type EigenMatrix64 = EigenMatrix<f64>;
pub type Sample64 = Sample<f64>;
pub type Ds1Solution64 = dt1::Ds1Solution<f64>;
pub type Ds2Solution64 = dt2::Ds2Solution<f64>;
