use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // float math is inherent in core on recent toolchains
use num_traits::Float;

use super::gamma::{ln_gamma, recip_gamma};
use crate::{Error, Result};

const SERIES_CAP: usize = 200;
const ASYMPTOTIC_CAP: usize = 60;
const NEWTON_CAP: usize = 100;

/// Argument beyond which the Hankel asymptotic expansion replaces the series.
fn crossover(nu: f64) -> f64 {
    12.0f64.max(2.0 * nu.abs())
}

/// `J_ν(x)` for `ν ≥ 0`, `x ≥ 0`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if !(nu.is_finite() && nu >= 0.0) {
        return Err(Error::Domain("bessel_j order must be finite and nonnegative"));
    }
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::Domain("bessel_j argument must be finite and nonnegative"));
    }
    Ok(j_real_order(nu, x))
}

/// `J_ν(x)` for any real order and `x ≥ 0`. Negative non-integer orders are
/// infinite at the origin.
pub(crate) fn j_real_order(nu: f64, x: f64) -> f64 {
    if nu < 0.0 && nu == nu.floor() {
        let n = -nu;
        let sign = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return sign * j_real_order(n, x);
    }
    if x == 0.0 {
        return if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY * recip_gamma(nu + 1.0).signum()
        };
    }
    if x > crossover(nu) {
        j_asymptotic(nu, x)
    } else {
        j_series(nu, x)
    }
}

fn j_series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let lead = if nu + 1.0 > 0.0 {
        // ln_gamma cannot fail for a positive argument
        (nu * half.ln() - ln_gamma(nu + 1.0).unwrap_or(f64::NAN)).exp()
    } else {
        half.powf(nu) * recip_gamma(nu + 1.0)
    };
    let w = half * half;
    let mut term = lead;
    let mut sum = lead;
    for m in 0..SERIES_CAP {
        let k = (m + 1) as f64;
        let denom = k * (k + nu);
        term *= -w / denom;
        sum += term;
        if denom > w && term.abs() < 1e-16 * sum.abs() {
            break;
        }
    }
    sum
}

/// Hankel expansion `J_ν(x) ~ √(2/πx) (P cos χ − Q sin χ)`, `χ = x − (ν/2 + 1/4)π`.
fn j_asymptotic(nu: f64, x: f64) -> f64 {
    let (p, q) = hankel_pq(nu, x);
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    for k in 1..=ASYMPTOTIC_CAP {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if k as f64 > nu.abs() + 1.0 && next.abs() > term.abs() {
            break;
        }
        term = next;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

/// `J′_ν(x) = (J_{ν−1}(x) − J_{ν+1}(x)) / 2`, or `−J_1(x)` for `ν = 0`.
pub fn bessel_j_deriv(nu: f64, x: f64) -> Result<f64> {
    if !(nu.is_finite() && nu >= 0.0) {
        return Err(Error::Domain("bessel_j_deriv order must be finite and nonnegative"));
    }
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::Domain("bessel_j_deriv argument must be finite and nonnegative"));
    }
    Ok(j_deriv_unchecked(nu, x))
}

fn j_deriv_unchecked(nu: f64, x: f64) -> f64 {
    if nu == 0.0 {
        return -j_real_order(1.0, x);
    }
    if x == 0.0 {
        return if nu == 1.0 {
            0.5
        } else if nu > 1.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    0.5 * (j_real_order(nu - 1.0, x) - j_real_order(nu + 1.0, x))
}

/// McMahon's large-zero expansion.
fn mcmahon(nu: f64, n: usize) -> f64 {
    let beta = (n as f64 + 0.5 * nu - 0.25) * PI;
    let mu = 4.0 * nu * nu;
    let e = 8.0 * beta;
    beta - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e * e * e)
}

fn newton_zero(nu: f64, seed: f64) -> Option<f64> {
    let mut x = seed;
    for _ in 0..NEWTON_CAP {
        let f = j_real_order(nu, x);
        let df = j_deriv_unchecked(nu, x);
        if df == 0.0 || !df.is_finite() {
            return None;
        }
        let step = f / df;
        x -= step;
        if !(x > 0.0) {
            return None;
        }
        if step.abs() <= 1e-14 * x {
            return Some(x);
        }
    }
    None
}

/// Refines a sign change of `J_ν` on `[lo, hi]` by bisection and a Newton polish.
fn bracketed_zero(nu: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut flo = j_real_order(nu, lo);
    for _ in 0..NEWTON_CAP {
        let mid = 0.5 * (lo + hi);
        let fm = j_real_order(nu, mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-9 * hi {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    match newton_zero(nu, mid) {
        Some(z) if z >= lo - 1e-9 && z <= hi + 1e-9 => Ok(z),
        _ if hi - lo <= 1e-9 * hi => Ok(mid),
        _ => Err(Error::Convergence {
            what: "Bessel zero bisection",
            iterations: NEWTON_CAP,
        }),
    }
}

/// The first `count` positive zeros of `J_ν`, found by a sign-change sweep.
///
/// Consecutive zeros are more than two apart, so a unit step never brackets two.
pub fn bessel_j_zeros(nu: f64, count: usize) -> Result<Vec<f64>> {
    if !(nu.is_finite() && nu >= 0.0) {
        return Err(Error::Domain("bessel_j_zeros order must be finite and nonnegative"));
    }
    let mut zeros = Vec::with_capacity(count);
    // J_ν > 0 on (0, j_{ν,1}) and j_{ν,1} > ν.
    let mut a = nu.max(1e-3);
    let mut fa = j_real_order(nu, a);
    let step = 1.0;
    let limit = mcmahon(nu, count.max(1)) + 10.0 + 2.0 * nu;
    while zeros.len() < count {
        let b = a + step;
        if b > limit + 10.0 * (count as f64) {
            return Err(Error::Convergence {
                what: "Bessel zero sweep",
                iterations: zeros.len(),
            });
        }
        let fb = j_real_order(nu, b);
        if fb == 0.0 {
            zeros.push(b);
            a = b + 1e-9;
            fa = j_real_order(nu, a);
            continue;
        }
        if (fa < 0.0) != (fb < 0.0) {
            zeros.push(bracketed_zero(nu, a, b)?);
        }
        a = b;
        fa = fb;
    }
    Ok(zeros)
}

/// `j_{ν,n}`, the `n`-th positive zero of `J_ν` (`n ≥ 1`).
///
/// Newton from the McMahon estimate; when the iterate does not settle within a
/// quarter period of the estimate the zero is located by a sign-change sweep.
pub fn bessel_j_zero(nu: f64, n: usize) -> Result<f64> {
    if !(nu.is_finite() && nu >= 0.0) {
        return Err(Error::Domain("bessel_j_zero order must be finite and nonnegative"));
    }
    if n == 0 {
        return Err(Error::InvalidInput("zero index starts at 1"));
    }
    // McMahon is only trustworthy once n dominates ν; below that the seed can
    // sit closer to a neighbouring zero than to the wanted one.
    if (n as f64) <= 2.0 * nu + 2.0 {
        let zeros = bessel_j_zeros(nu, n)?;
        return Ok(zeros[n - 1]);
    }
    let seed = mcmahon(nu, n);
    if let Some(z) = newton_zero(nu, seed) {
        if (z - seed).abs() < 0.25 * PI {
            return Ok(z);
        }
    }
    let zeros = bessel_j_zeros(nu, n)?;
    Ok(zeros[n - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j_deriv(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j_deriv(1.0, 0.0).unwrap(), 0.5);
        assert!(bessel_j(-1.0, 1.0).is_err());
        assert!(bessel_j(0.0, -1.0).is_err());
    }

    #[test]
    fn half_integer_closed_forms() {
        // J_{1/2}(x) = √(2/πx) sin x, J_{−1/2}(x) = √(2/πx) cos x.
        for &x in &[0.3, 2.0, 7.5, 11.9, 12.1, 30.0, 140.0] {
            let s = (2.0 / (PI * x)).sqrt();
            assert!((j_real_order(0.5, x) - s * x.sin()).abs() < 1e-12, "x = {x}");
            assert!((j_real_order(-0.5, x) - s * x.cos()).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn negative_integer_order_reflection() {
        for &x in &[0.5, 3.0, 20.0] {
            assert!((j_real_order(-1.0, x) + j_real_order(1.0, x)).abs() < 1e-15);
            assert!((j_real_order(-2.0, x) - j_real_order(2.0, x)).abs() < 1e-15);
        }
    }

    #[test]
    fn known_zeros() {
        assert!((bessel_j_zero(0.0, 1).unwrap() - 2.404_825_557_695_773).abs() < 1e-12);
        assert!((bessel_j_zero(1.0, 1).unwrap() - 3.831_705_970_207_512).abs() < 1e-12);
        assert!(bessel_j_zero(1.0, 0).is_err());
    }

    #[test]
    fn sweep_and_newton_agree() {
        for &nu in &[0.0, 0.25, 1.0, 1.5, 4.0, 9.0] {
            let swept = bessel_j_zeros(nu, 40).unwrap();
            for (i, z) in swept.iter().enumerate() {
                let direct = bessel_j_zero(nu, i + 1).unwrap();
                assert!((direct - z).abs() < 1e-10, "nu={nu} n={}", i + 1);
            }
            assert!(swept.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
