//! Modified Bessel functions of real order and complex argument.
//!
//! `I_ν`: power series for `|z| ≤ 2`; for `2 < |z| ≤ 20` with `ν ≥ 0` and
//! `Re z ≥ 0` the Wronskian `I_ν K_{ν+1} + I_{ν+1} K_ν = 1/z` with the ratio
//! `I_{ν+1}/I_ν` from its continued fraction, since the series cancels badly
//! near the imaginary axis; large-argument expansion (both exponentials)
//! beyond `|z| = 20`. Other arguments in `|z| ≤ 20` use the series.
//!
//! `K_ν`: for `|z| ≤ 2` the connection formula
//! `K_ν = (π/2)(I_{−ν} − I_ν)/sin(νπ)`, with orders within `2.5e-4` of an
//! integer obtained from a symmetric four-point stencil in `ν` (the Richardson
//! limit at the integer itself); for `2 < |z| ≤ 20` Steed's continued fraction
//! for `K_μ, K_{μ+1}`, `|μ| ≤ 1/2`, followed by forward recurrence; beyond that
//! the large-argument expansion.

use core::f64::consts::PI;

#[allow(unused_imports)] // float math is inherent in core on recent toolchains
use num_traits::Float;

use super::complex::{principal_pow, ComplexValue};
use super::gamma::{recip_gamma, sin_pi};
use crate::{Error, Result};

type C = ComplexValue;

const LARGE_ARGUMENT: f64 = 20.0;
const K_SMALL_ARGUMENT: f64 = 2.0;
const NEAR_INTEGER: f64 = 2.5e-4;
const STENCIL_STEP: f64 = 5e-4;
const EXP_LIMIT: f64 = 700.0;
const SERIES_CAP: usize = 200;
const ASYMPTOTIC_CAP: usize = 60;
const STEED_CAP: usize = 100_000;

fn finite(z: C) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

fn is_zero(z: C) -> bool {
    z.re == 0.0 && z.im == 0.0
}

/// `I_ν(z)` on the principal branch.
///
/// Fails with a range error once `|Re z| > 700`; use [`mod_bessel_i_scaled`]
/// there.
pub fn mod_bessel_i(nu: f64, z: C) -> Result<C> {
    check_i_args(nu, z)?;
    if let Some(v) = i_at_origin(nu, z)? {
        return Ok(v);
    }
    if z.norm() <= LARGE_ARGUMENT {
        return Ok(if use_wronskian(nu, z) {
            i_wronskian_scaled(nu, z) * z.re.exp()
        } else {
            i_series(nu, z)
        });
    }
    if z.re.abs() > EXP_LIMIT {
        return Err(Error::Range("I_nu overflows; use the scaled variant"));
    }
    Ok(i_asymptotic_scaled(nu, z) * z.re.abs().exp())
}

/// `e^{−|Re z|} I_ν(z)`.
pub fn mod_bessel_i_scaled(nu: f64, z: C) -> Result<C> {
    check_i_args(nu, z)?;
    if let Some(v) = i_at_origin(nu, z)? {
        return Ok(v);
    }
    Ok(i_scaled_unchecked(nu, z))
}

pub(crate) fn i_scaled_unchecked(nu: f64, z: C) -> C {
    if z.norm() <= LARGE_ARGUMENT {
        if use_wronskian(nu, z) {
            i_wronskian_scaled(nu, z)
        } else {
            i_series(nu, z) * (-z.re.abs()).exp()
        }
    } else {
        i_asymptotic_scaled(nu, z)
    }
}

fn check_i_args(nu: f64, z: C) -> Result<()> {
    if !nu.is_finite() {
        return Err(Error::Domain("I_nu order must be finite"));
    }
    if !finite(z) {
        return Err(Error::Domain("I_nu argument must be finite"));
    }
    Ok(())
}

fn i_at_origin(nu: f64, z: C) -> Result<Option<C>> {
    if !is_zero(z) {
        return Ok(None);
    }
    if nu == 0.0 {
        Ok(Some(C::new(1.0, 0.0)))
    } else if nu > 0.0 || nu == nu.floor() {
        Ok(Some(C::new(0.0, 0.0)))
    } else {
        Err(Error::Singular("I_nu with negative non-integer order is infinite at 0"))
    }
}

fn i_series(nu: f64, z: C) -> C {
    if nu < 0.0 && nu == nu.floor() {
        return i_series(-nu, z);
    }
    let half = z * 0.5;
    // z ≠ 0 here, so the principal power is defined.
    let lead = principal_pow(half, nu).unwrap_or(C::new(f64::NAN, f64::NAN)) * recip_gamma(nu + 1.0);
    let w = half * half;
    let wn = w.norm();
    let mut term = lead;
    let mut sum = lead;
    for m in 0..SERIES_CAP {
        let k = (m + 1) as f64;
        let denom = k * (k + nu);
        term = term * w / denom;
        sum += term;
        if denom.abs() > wn && term.norm() < 1e-16 * sum.norm() {
            break;
        }
    }
    sum
}

fn use_wronskian(nu: f64, z: C) -> bool {
    nu >= 0.0 && z.re >= 0.0 && z.norm() > K_SMALL_ARGUMENT
}

/// `I_{ν+1}(z)/I_ν(z)` by modified Lentz on `1/(2(ν+1)/z + 1/(2(ν+2)/z + …))`.
fn i_ratio_cf1(nu: f64, z: C) -> C {
    let tiny = C::new(1e-150, 0.0);
    let inv = z.inv();
    let mut f = tiny;
    let mut c = f;
    let mut d = C::new(0.0, 0.0);
    for k in 1..=STEED_CAP {
        let b = inv * (2.0 * (nu + k as f64));
        d = b + d;
        if is_zero(d) {
            d = tiny;
        }
        c = b + c.inv();
        if is_zero(c) {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    f
}

/// `e^{−Re z} I_ν(z)` from the Wronskian, `Re z ≥ 0`.
fn i_wronskian_scaled(nu: f64, z: C) -> C {
    let (k0, k1) = k_steed_pair_scaled(nu, z);
    let r = i_ratio_cf1(nu, z);
    C::from_polar(1.0, z.im) / (z * (k1 + r * k0))
}

/// `Σ_k s^k a_k(ν)/z^k` with `a_k(ν) = Π_{j≤k}(4ν² − (2j−1)²)/(k! 8^k)`.
fn hankel_sum(nu: f64, z: C, alternating: bool) -> C {
    let mu = 4.0 * nu * nu;
    let inv = z.inv();
    let mut term = C::new(1.0, 0.0);
    let mut sum = term;
    let mut prev = 1.0f64;
    for k in 1..=ASYMPTOTIC_CAP {
        let odd = (2 * k - 1) as f64;
        let mut next = term * inv * ((mu - odd * odd) / (k as f64 * 8.0));
        if alternating {
            next = -next;
        }
        let size = next.norm();
        if k as f64 > nu + 1.0 && size > prev {
            break;
        }
        term = next;
        sum += term;
        prev = size;
        if size < 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// `e^{−|Re z|} I_ν(z)` from the large-argument expansion
/// `I_ν(z) ~ e^z/√(2πz) Σ(−1)^k a_k/z^k + i e^{iνπ} e^{−z}/√(2πz) Σ a_k/z^k`
/// (`Im z ≥ 0`; the lower half-plane follows from conjugate symmetry).
fn i_asymptotic_scaled(nu: f64, z: C) -> C {
    if z.im < 0.0 {
        return i_asymptotic_scaled(nu, z.conj()).conj();
    }
    let root = (z * (2.0 * PI)).sqrt();
    let scale = -z.re.abs();
    let dominant = (z + scale).exp() * hankel_sum(nu, z, true) / root;
    if z.im == 0.0 && z.re > 0.0 {
        return dominant;
    }
    let phase = C::new(0.0, 1.0) * C::from_polar(1.0, nu * PI);
    let recessive = phase * (-z + scale).exp() * hankel_sum(nu, z, false) / root;
    dominant + recessive
}

/// `K_ν(z)` for `ν ≥ 0`, `z ≠ 0`, `|arg z| < π`.
pub fn mod_bessel_k(nu: f64, z: C) -> Result<C> {
    check_k_args(nu, z)?;
    if z.norm() <= K_SMALL_ARGUMENT {
        return Ok(k_connection(nu, z));
    }
    if -z.re > EXP_LIMIT {
        return Err(Error::Range("K_nu overflows; use the scaled variant"));
    }
    Ok(k_scaled_unchecked(nu, z) * (-z).exp())
}

/// `e^{z} K_ν(z)`.
pub fn mod_bessel_k_scaled(nu: f64, z: C) -> Result<C> {
    check_k_args(nu, z)?;
    Ok(k_scaled_unchecked(nu, z))
}

fn check_k_args(nu: f64, z: C) -> Result<()> {
    if !(nu.is_finite() && nu >= 0.0) {
        return Err(Error::Domain("K_nu order must be finite and nonnegative"));
    }
    if !finite(z) {
        return Err(Error::Domain("K_nu argument must be finite"));
    }
    if is_zero(z) {
        return Err(Error::Singular("K_nu diverges at the origin"));
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(Error::Domain("K_nu argument on the branch cut"));
    }
    Ok(())
}

pub(crate) fn k_scaled_unchecked(nu: f64, z: C) -> C {
    let r = z.norm();
    if r > LARGE_ARGUMENT {
        (C::new(PI, 0.0) / (z * 2.0)).sqrt() * hankel_sum(nu, z, false)
    } else if r > K_SMALL_ARGUMENT {
        k_steed_scaled(nu, z)
    } else {
        k_connection(nu, z) * z.exp()
    }
}

fn k_connection_direct(nu: f64, z: C) -> C {
    (i_series(-nu, z) - i_series(nu, z)) * (0.5 * PI / sin_pi(nu))
}

fn k_connection(nu: f64, z: C) -> C {
    let n = nu.round();
    let d = nu - n;
    if d.abs() >= NEAR_INTEGER {
        return k_connection_direct(nu, z);
    }
    // Cubic through ν = n ± ε, n ± 2ε; at d = 0 this is the Richardson limit
    // (4·avg_ε − avg_2ε)/3 of the symmetric averages.
    let t = d / STENCIL_STEP;
    let nodes = [-2.0, -1.0, 1.0, 2.0];
    let mut acc = C::new(0.0, 0.0);
    for (i, &s) in nodes.iter().enumerate() {
        let mut basis = 1.0;
        for (j, &r) in nodes.iter().enumerate() {
            if i != j {
                basis *= (t - r) / (s - r);
            }
        }
        acc += k_connection_direct(n + s * STENCIL_STEP, z) * basis;
    }
    acc
}

fn k_steed_scaled(nu: f64, z: C) -> C {
    k_steed_pair_scaled(nu, z).0
}

/// Steed's continued fraction (CF2) for `K_μ`, `K_{μ+1}`, then forward
/// recurrence up to `ν`. Returns `e^{z}` times `(K_ν(z), K_{ν+1}(z))`.
fn k_steed_pair_scaled(nu: f64, z: C) -> (C, C) {
    let nl = (nu + 0.5).floor();
    let xmu = nu - nl;
    let xmu2 = xmu * xmu;
    let one = C::new(1.0, 0.0);

    let mut b = (one + z) * 2.0;
    let mut d = b.inv();
    let mut h = d;
    let mut delh = d;
    let mut q1 = C::new(0.0, 0.0);
    let mut q2 = one;
    let a1 = 0.25 - xmu2;
    let mut q = C::new(a1, 0.0);
    let mut c = C::new(a1, 0.0);
    let mut a = -a1;
    let mut s = one + q * delh;
    for i in 2..=STEED_CAP {
        a -= 2.0 * (i - 1) as f64;
        c = -c * a / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = (b + d * a).inv();
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.norm() < 1e-17 * s.norm() {
            break;
        }
    }
    h *= a1;
    let mut kmu = (C::new(PI, 0.0) / (z * 2.0)).sqrt() / s;
    let mut k1 = kmu * (z + xmu + 0.5 - h) / z;
    let two_over_z = C::new(2.0, 0.0) / z;
    let mut i = 1.0;
    while i <= nl {
        let next = two_over_z * (xmu + i) * k1 + kmu;
        kmu = k1;
        k1 = next;
        i += 1.0;
    }
    (kmu, k1)
}

/// `K_ν(z)/I_ν(z)` without intermediate overflow.
pub(crate) fn k_over_i(nu: f64, z: C) -> Result<C> {
    check_k_args(nu, z)?;
    let i_s = i_scaled_unchecked(nu, z);
    if is_zero(i_s) {
        return Err(Error::Singular("I_nu vanishes"));
    }
    let k_s = k_scaled_unchecked(nu, z);
    Ok(k_s / i_s * (-z - z.re.abs()).exp())
}
