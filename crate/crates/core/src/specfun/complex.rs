use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // float math is inherent in core on recent toolchains
use num_traits::Float;

use crate::{Error, Result};

/// Complex numbers; all multivalued operations use the principal branch.
pub type ComplexValue = Complex64;

/// Principal argument in `(−π, π]`.
///
/// A negative zero imaginary part is treated as `+0`, so the cut is approached
/// from above and `arg(−1) = π`.
pub fn principal_arg(z: ComplexValue) -> f64 {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    let a = im.atan2(z.re);
    if a == -PI {
        PI
    } else {
        a
    }
}

/// `Log z = ln|z| + i arg z`.
pub fn principal_log(z: ComplexValue) -> Result<ComplexValue> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain("logarithm of a non-finite complex number"));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Domain("logarithm of zero"));
    }
    Ok(ComplexValue::new(z.re.hypot(z.im).ln(), principal_arg(z)))
}

/// `z^p = e^{p Log z}` on the principal branch.
pub fn principal_pow(z: ComplexValue, p: f64) -> Result<ComplexValue> {
    if !p.is_finite() {
        return Err(Error::Domain("non-finite exponent"));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return if p > 0.0 {
            Ok(ComplexValue::new(0.0, 0.0))
        } else {
            Err(Error::Domain("zero raised to a nonpositive power"))
        };
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain("power of a non-finite complex number"));
    }
    if p == 0.0 {
        return Ok(ComplexValue::new(1.0, 0.0));
    }
    let modulus = z.re.hypot(z.im).powf(p);
    let angle = p * principal_arg(z);
    Ok(ComplexValue::from_polar(modulus, angle))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    #[test]
    fn arg_range() {
        assert_eq!(principal_arg(c(-1.0, 0.0)), PI);
        assert_eq!(principal_arg(c(-1.0, -0.0)), PI);
        assert!(principal_arg(c(-1.0, -1e-3)) < 0.0);
        assert_eq!(principal_arg(c(0.0, 1.0)), PI / 2.0);
    }

    #[test]
    fn pow_examples() {
        for p in [-3.5, -1.0, 0.0, 0.3, 2.0, 7.25] {
            let w = principal_pow(c(1.0, 0.0), p).unwrap();
            assert!((w - c(1.0, 0.0)).norm() < 1e-15);
        }
        let w = principal_pow(c(0.0, 1.0), 2.0).unwrap();
        assert!((w - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(principal_pow(c(0.0, 0.0), 0.0).is_err());
        assert!(principal_pow(c(0.0, 0.0), -1.0).is_err());
        assert_eq!(principal_pow(c(0.0, 0.0), 1.5).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn pow_factors_scalar_base() {
        // ((ν+1)λ)^{ν+1} = (ν+1)^{ν+1} e^{(ν+1) Log λ} for Re λ > 0.
        let nu: f64 = 0.25;
        let lambda = c(0.7, 3.1);
        let lhs = principal_pow(lambda * (nu + 1.0), nu + 1.0).unwrap();
        let omega = (nu + 1.0).powf(nu + 1.0);
        let rhs = (principal_log(lambda).unwrap() * (nu + 1.0)).exp() * omega;
        assert!((lhs - rhs).norm() < 1e-13 * lhs.norm());
    }
}
