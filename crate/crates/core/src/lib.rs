//! Exact and floating-point machinery for three prehomogeneous vector spaces:
//! alternating trivectors in six and seven dimensions and bivectors in even
//! dimension.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches files,
//! processes or threads lives in the companion `prehom` crate.
//!
//! Module map:
//!
//! * [`scalar`]: rationals, quadratic extensions `ℚ(√d)`, `f64`, one [`Scalar`] trait.
//! * [`linalg`]: dense matrices with exact or tolerance-driven elimination.
//! * [`multilinear`]: alternating forms, wedge, `D₃`, group and Lie-algebra actions.
//! * [`invariants`]: `S_x`, `Δ`, `Q_x` and the Pfaffian.
//! * [`representatives`]: orbit representatives and the explicit group elements.
//! * [`lie`]: stabilizer Lie algebras, fixed spaces, subalgebra checks.
//! * [`octonion`]: Cayley–Dickson doubling, the trilinear form `C`, and `𝕆_x`.
//! * [`orbit`]: real orbit classification, the field `k(x)`, eigenspaces, irrationality.
//! * [`perturb`]: constructive approximation of partial targets by semistable points.
//! * [`search`]: beam search over `SL(n, ℤ)` words approximating a target.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod invariants;
pub mod lie;
pub mod linalg;
pub mod multilinear;
pub mod octonion;
pub mod orbit;
pub mod perturb;
pub mod representatives;
pub mod scalar;
pub mod search;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use multilinear::{AlternatingForm, FormShape, MixedTensor};
pub use scalar::{QuadExt, Rational, Real64, Scalar};
