//! Special functions: Gamma, Bessel `J_ν` of real argument with its zeros, and
//! the modified Bessel functions `I_ν`, `K_ν` of complex argument.
//!
//! Everything here is a pure function of its inputs.

mod bessel_j;
mod complex;
mod gamma;
mod modified;

pub use bessel_j::{bessel_j, bessel_j_deriv, bessel_j_zero, bessel_j_zeros};
pub use complex::{principal_arg, principal_log, principal_pow, ComplexValue};
pub use gamma::{gamma, ln_gamma, recip_gamma};
pub(crate) use modified::k_over_i;
pub use modified::{mod_bessel_i, mod_bessel_i_scaled, mod_bessel_k, mod_bessel_k_scaled};

use crate::{Error, Result};

/// Distance below which a real order is treated as an integer.
pub const INTEGER_ORDER_TOL: f64 = 1e-12;

/// A nonnegative real Bessel order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder {
    nu: f64,
}

impl BesselOrder {
    /// Orders within [`INTEGER_ORDER_TOL`] of an integer are snapped onto it.
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return Err(Error::Domain("Bessel order must be finite and nonnegative"));
        }
        let rounded = libm_round(nu);
        let nu = if (nu - rounded).abs() <= INTEGER_ORDER_TOL {
            rounded
        } else {
            nu
        };
        Ok(BesselOrder { nu })
    }

    pub fn value(self) -> f64 {
        self.nu
    }

    /// True when the order is a positive integer (`ν ∈ ℕ*`).
    pub fn is_positive_integer(self) -> bool {
        self.nu >= 1.0 && self.nu == libm_round(self.nu)
    }

    pub fn is_integer(self) -> bool {
        self.nu == libm_round(self.nu)
    }
}

#[inline]
pub(crate) fn libm_round(x: f64) -> f64 {
    num_traits::Float::round(x)
}
