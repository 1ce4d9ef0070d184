//! Numerics for the degenerate wave equation `w_tt = (x^α w_x)_x` on `(0, 1)`
//! with the boundary feedback `(x^α w_x)(0, t) = w_t(0, t)` and `w(1, t) = 0`,
//! for `α ∈ [1, 2)`.
//!
//! The crate is `no_std` and only needs an allocator. It provides
//!
//! * [`specfun`]: Gamma, real-order `J_ν` with zeros, complex-argument `I_ν`, `K_ν`;
//! * [`spectrum`]: the closed-form Bessel spectrum of the undamped operator;
//! * [`discretize`]: graded-mesh P1 finite elements and the damped generator;
//! * [`semigroup`]: implicit-midpoint time stepping, energy traces, decay fits;
//! * [`resolvent`]: resolvent solves and energy-norm resolvent estimates on `iℝ`;
//! * [`transfer`]: the Laplace-domain boundary problem and its transfer function.
//!
//! File formats, plotting and the command line live in the `degwave` crate.

#![no_std]
#![deny(unsafe_code)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod fit;
pub mod linalg;
pub mod quadrature;

pub mod discretize;
pub mod resolvent;
pub mod semigroup;
pub mod specfun;
pub mod spectrum;
pub mod transfer;

pub use error::{Error, Result};
pub use specfun::ComplexValue;
pub use spectrum::DegeneracyParams;
