//! Frequency-domain side of the boundary control problem
//!
//! ```text
//! w_tt = (x^α w_x)_x,   (x^α w_x)(0,t) = θ(t),   w(1,t) = 0,
//! ```
//!
//! whose Laplace transform satisfies `x² ŵ_xx + αx ŵ_x − λ² x^{2−α} ŵ = 0`
//! with solutions `x^{(1−α)/2} Z_ν(z)`, `z = 2λ/(2−α) · x^κ`.
//!
//! The boundary value `ŵ(0,λ)` involves `x^{(1−α)/2} K_ν(z)` as `x → 0`,
//! which behaves like `x^{1−α}` and so has no finite limit once `α > 1`.
//! The constant `c_ν` is therefore handled as a cutoff-dependent quantity
//! `c_ν(x*)` and every sample reports how the probe behaves as `x*` shrinks.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // float math is inherent in core on recent toolchains
use num_traits::Float;

use crate::fit::{loglog_fit, LineFit};
use crate::specfun::{gamma, k_over_i, mod_bessel_i, mod_bessel_k, principal_arg, principal_pow, ComplexValue};
use crate::spectrum::DegeneracyParams;
use crate::{Error, Result};

type C = ComplexValue;

/// Default cutoff `x*` at which `c_ν` is evaluated.
pub const DEFAULT_CUTOFF: f64 = 1e-6;

/// Relative change of the last probe step below which the probe counts as
/// converged.
pub const PROBE_CONVERGED_TOL: f64 = 1e-4;

/// Bound on `|z|` inside which the small-argument law for `K_ν` is used to
/// select fitting points.
pub const SMALL_ARGUMENT: f64 = 0.1;

/// Which printed solution branch governs `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `ν ∈ ℕ*`, solved with `{I_ν, K_ν}`.
    IntegerNu,
    NonintegerNu,
}

impl Regime {
    pub fn of(params: &DegeneracyParams) -> Self {
        if params.nu_is_positive_integer() {
            Regime::IntegerNu
        } else {
            Regime::NonintegerNu
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::IntegerNu => "integer-nu",
            Regime::NonintegerNu => "noninteger-nu",
        }
    }
}

/// Argument of the Bessel ratio inside `H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselArg {
    /// `(ν+1)λ`, as printed in the closed form of `H`.
    Treee,
    /// `2λ/(2−α) = 2(ν+1)λ`, the value of `z` at `x = 1`.
    Besfu,
}

impl BesselArg {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "treee" => Some(BesselArg::Treee),
            "besfu" => Some(BesselArg::Besfu),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BesselArg::Treee => "treee",
            BesselArg::Besfu => "besfu",
        }
    }

    fn scale(self, params: &DegeneracyParams) -> f64 {
        let m = params.nu() + 1.0;
        match self {
            BesselArg::Treee => m,
            BesselArg::Besfu => 2.0 * m,
        }
    }
}

/// Variants of the closed form for `H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransferOptions {
    pub bessel_arg: BesselArg,
    /// Keep the `1/λ` in front. Dropping it gives the second printed form.
    pub lambda_prefactor: bool,
}

impl TransferOptions {
    /// The formula exactly as printed.
    pub const VERBATIM: Self = Self {
        bessel_arg: BesselArg::Treee,
        lambda_prefactor: true,
    };
}

impl Default for TransferOptions {
    fn default() -> Self {
        Self {
            bessel_arg: BesselArg::Besfu,
            lambda_prefactor: true,
        }
    }
}

/// Second solution paired with `I_ν`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecondKind {
    K,
    /// `I_{−ν}`; independent of `I_ν` only for non-integer `ν`.
    IMinus,
}

/// `ŵ = x^{(1−α)/2} [a I_ν(z) + b Z(z)]` with `Z` given by `second`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub a: C,
    pub b: C,
    pub second: SecondKind,
}

/// How `(A₂, B₂)` are obtained on the non-integer branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientRule {
    /// The displayed pair, which does not enforce `ŵ(1,λ) = 0`.
    Verbatim,
    /// Solved from the two boundary conditions.
    Consistent,
}

/// `z = 2λ/(2−α) · x^κ`.
pub fn laplace_argument(x: f64, lambda: C, params: &DegeneracyParams) -> C {
    lambda * (2.0 / (2.0 - params.alpha()) * x.powf(params.kappa()))
}

fn second_solution(kind: SecondKind, nu: f64, z: C) -> Result<C> {
    match kind {
        SecondKind::K => mod_bessel_k(nu, z),
        SecondKind::IMinus => mod_bessel_i(-nu, z),
    }
}

pub fn laplace_solution(x: f64, lambda: C, params: &DegeneracyParams, coeffs: &Coefficients) -> Result<C> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::Domain("laplace_solution needs x in (0, 1]"));
    }
    let nu = params.nu();
    let z = laplace_argument(x, lambda, params);
    let mut sum = C::new(0.0, 0.0);
    if coeffs.a != C::new(0.0, 0.0) {
        sum += coeffs.a * mod_bessel_i(nu, z)?;
    }
    if coeffs.b != C::new(0.0, 0.0) {
        sum += coeffs.b * second_solution(coeffs.second, nu, z)?;
    }
    Ok(sum * x.powf(params.weight_exponent()))
}

fn check_lambda(lambda: C) -> Result<()> {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(Error::Domain("lambda must be finite"));
    }
    if lambda.re == 0.0 && lambda.im == 0.0 {
        return Err(Error::Domain("lambda must be nonzero"));
    }
    Ok(())
}

fn check_half_plane(lambda: C) -> Result<()> {
    check_lambda(lambda)?;
    if !(lambda.re > 0.0) {
        return Err(Error::Domain("lambda must satisfy Re lambda > 0"));
    }
    Ok(())
}

/// `c₂ = −(λ/2) Γ(1/(2−α)) ((2−α)/λ)^{1/(2−α)}`.
///
/// It is also the limit of the flux `x^α ∂_x` of `x^{(1−α)/2} K_ν(z)` at the
/// origin, which is why it plays the role of `c₁` in the boundary system.
pub fn c2(lambda: C, params: &DegeneracyParams) -> Result<C> {
    check_half_plane(lambda)?;
    let p = 1.0 / (2.0 - params.alpha());
    let g = gamma(p)?;
    let w = principal_pow(C::new(2.0 - params.alpha(), 0.0) / lambda, p)?;
    Ok(-lambda * 0.5 * g * w)
}

/// `(A₁, B₁) = (−(K_ν/I_ν)(z₁) θ̂/c₂, θ̂/c₂)` with `z₁ = 2λ/(2−α)`, so that
/// `ŵ(1,λ) = 0` and the flux at the origin equals `θ̂`.
pub fn coefficients_a1_b1(lambda: C, params: &DegeneracyParams, theta: C) -> Result<Coefficients> {
    let c = c2(lambda, params)?;
    let z1 = laplace_argument(1.0, lambda, params);
    let ratio = k_over_i(params.nu(), z1)?;
    let b = theta / c;
    Ok(Coefficients {
        a: -ratio * b,
        b,
        second: SecondKind::K,
    })
}

/// `(A₂, B₂)` for non-integer `ν`.
///
/// The verbatim pair is `A₂ = (λ/(2−α))^ν θ̂/(α−1)`, `B₂ = (λ/(2−α))^ν θ̂/(1−α)`.
/// The consistent pair uses the flux limit `(1−α)((ν+1)λ)^{−ν}/Γ(1−ν)` of the
/// `I_{−ν}` term and then cancels `ŵ(1,λ)`.
pub fn coefficients_a2_b2(
    lambda: C,
    params: &DegeneracyParams,
    theta: C,
    rule: CoefficientRule,
) -> Result<Coefficients> {
    check_half_plane(lambda)?;
    let nu = params.nu();
    if params.order().is_integer() {
        return Err(Error::InvalidInput("the I_{-nu} branch needs non-integer nu"));
    }
    let alpha = params.alpha();
    let scaled = principal_pow(lambda / (2.0 - alpha), nu)?;
    match rule {
        CoefficientRule::Verbatim => Ok(Coefficients {
            a: scaled * theta / (alpha - 1.0),
            b: scaled * theta / (1.0 - alpha),
            second: SecondKind::IMinus,
        }),
        CoefficientRule::Consistent => {
            let b = scaled * theta * gamma(1.0 - nu)? / (1.0 - alpha);
            let z1 = laplace_argument(1.0, lambda, params);
            let i_plus = mod_bessel_i(nu, z1)?;
            if i_plus.re == 0.0 && i_plus.im == 0.0 {
                return Err(Error::Singular("I_nu vanishes at x = 1"));
            }
            let i_minus = mod_bessel_i(-nu, z1)?;
            Ok(Coefficients {
                a: -b * i_minus / i_plus,
                b,
                second: SecondKind::IMinus,
            })
        }
    }
}

/// Coefficients for the branch that matches `params`. Integer `ν`, including
/// `ν = 0` where `I_{−ν}` coincides with `I_ν`, uses `(A₁, B₁)`.
pub fn boundary_coefficients(
    lambda: C,
    params: &DegeneracyParams,
    theta: C,
    rule: CoefficientRule,
) -> Result<Coefficients> {
    if params.order().is_integer() {
        coefficients_a1_b1(lambda, params, theta)
    } else {
        coefficients_a2_b2(lambda, params, theta, rule)
    }
}

/// `x^{(1−α)/2} K_ν(2λ/(2−α) x^κ)`, the quantity whose `x → 0` limit defines
/// `c_ν`.
pub fn probe_value(x: f64, lambda: C, params: &DegeneracyParams) -> Result<C> {
    check_lambda(lambda)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain("probe point must be positive"));
    }
    let z = laplace_argument(x, lambda, params);
    let k = mod_bessel_k(params.nu(), z)?;
    let w = x.powf(params.weight_exponent());
    let v = k * w;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Range("c_nu probe overflowed"));
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeVerdict {
    Converged,
    Diverging,
    Oscillating,
}

impl ProbeVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ProbeVerdict::Converged => "converged",
            ProbeVerdict::Diverging => "diverging",
            ProbeVerdict::Oscillating => "oscillating",
        }
    }
}

/// Classify magnitudes taken along a decreasing sequence of `x`.
///
/// Converged when the last relative change is below
/// [`PROBE_CONVERGED_TOL`]; diverging when the magnitudes increase at every
/// step; oscillating otherwise.
pub fn classify_probe(magnitudes: &[f64]) -> ProbeVerdict {
    if magnitudes.len() < 2 {
        return ProbeVerdict::Oscillating;
    }
    let n = magnitudes.len();
    let last = (magnitudes[n - 1] - magnitudes[n - 2]).abs() / magnitudes[n - 2].abs().max(f64::MIN_POSITIVE);
    if last <= PROBE_CONVERGED_TOL {
        ProbeVerdict::Converged
    } else if magnitudes.windows(2).all(|w| w[1] > w[0]) {
        ProbeVerdict::Diverging
    } else {
        ProbeVerdict::Oscillating
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSequence {
    pub xs: Vec<f64>,
    pub values: Vec<C>,
    pub verdict: ProbeVerdict,
}

impl ProbeSequence {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Value at the smallest `x`.
    pub fn last(&self) -> C {
        *self.values.last().expect("probe sequences are nonempty")
    }
}

pub fn c_nu_probe(lambda: C, params: &DegeneracyParams, xs: &[f64]) -> Result<ProbeSequence> {
    if xs.is_empty() {
        return Err(Error::InvalidInput("probe needs at least one point"));
    }
    if xs.iter().any(|&x| !(x > 0.0 && x <= 0.1)) {
        return Err(Error::InvalidInput("probe points must lie in (0, 0.1]"));
    }
    if xs.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidInput("probe points must be strictly decreasing"));
    }
    let values = xs
        .iter()
        .map(|&x| probe_value(x, lambda, params))
        .collect::<Result<Vec<_>>>()?;
    let mags: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    Ok(ProbeSequence {
        xs: xs.to_vec(),
        values,
        verdict: classify_probe(&mags),
    })
}

/// Decades from `min(0.1, cutoff·10⁴)` down to `cutoff`.
pub fn probe_points(cutoff: f64) -> Vec<f64> {
    let mut xs = Vec::new();
    for k in (0..=4).rev() {
        let x = cutoff * 10f64.powi(k);
        if x <= 0.1 {
            xs.push(x);
        }
    }
    if xs.is_empty() {
        xs.push(cutoff.min(0.1));
    }
    xs
}

/// Log–log slope of `|probe|` against `x`.
pub fn probe_slope(sequence: &ProbeSequence) -> Result<LineFit> {
    loglog_fit(&sequence.xs, &sequence.magnitudes())
}

/// The points of `xs` where `|z| ≤ SMALL_ARGUMENT`, where the leading term
/// `(Γ(ν)/2)(2/z)^ν` of `K_ν` dominates and `|probe| ∝ x^{1−α}`.
pub fn small_argument_points(lambda: C, params: &DegeneracyParams, xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .copied()
        .filter(|&x| laplace_argument(x, lambda, params).norm() <= SMALL_ARGUMENT)
        .collect()
}

/// Front factor `2((ν+1)λ)^{ν+1}/(λΓ(ν+1))`, or without the `1/λ`.
pub fn transfer_prefactor(lambda: C, params: &DegeneracyParams, options: TransferOptions) -> Result<C> {
    check_lambda(lambda)?;
    let nu = params.nu();
    let m = nu + 1.0;
    let mut p = principal_pow(lambda * m, m)? * (2.0 / gamma(m)?);
    if options.lambda_prefactor {
        p /= lambda;
    }
    Ok(p)
}

/// The closed form of `H` exactly as printed.
pub fn transfer_h(lambda: C, params: &DegeneracyParams, c_nu: C) -> Result<C> {
    transfer_h_with(lambda, params, c_nu, TransferOptions::VERBATIM)
}

/// `H(λ) = P(λ) (((ν+1)λ)^ν K_ν(s)/I_ν(s) − c_ν)` with the prefactor `P` and
/// the argument `s` selected by `options`.
pub fn transfer_h_with(lambda: C, params: &DegeneracyParams, c_nu: C, options: TransferOptions) -> Result<C> {
    check_lambda(lambda)?;
    if lambda.re < 0.0 {
        return Err(Error::Domain("transfer function needs Re lambda >= 0"));
    }
    let nu = params.nu();
    let m = nu + 1.0;
    let pre = transfer_prefactor(lambda, params, options)?;
    let s = lambda * options.bessel_arg.scale(params);
    let ratio = k_over_i(nu, s)?;
    let inner = principal_pow(lambda * m, nu)? * ratio - c_nu;
    Ok(pre * inner)
}

/// One point of a transfer scan.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferSample {
    pub lambda: C,
    pub h: C,
    /// `c_ν(x*)` at the scan cutoff.
    pub c_nu_estimate: C,
    pub regime: Regime,
    pub verdict: ProbeVerdict,
    /// `Re λ ≤ 0`: the probe is defined but `λ` is outside the Laplace
    /// half-plane.
    pub outside_half_plane: bool,
}

impl TransferSample {
    pub fn abs_lambda(&self) -> f64 {
        self.lambda.norm()
    }

    pub fn arg_lambda(&self) -> f64 {
        principal_arg(self.lambda)
    }
}

/// Probe down to `cutoff` and evaluate `H` with `c_ν = c_ν(cutoff)`.
pub fn transfer_sample(
    lambda: C,
    params: &DegeneracyParams,
    cutoff: f64,
    options: TransferOptions,
) -> Result<TransferSample> {
    let probe = c_nu_probe(lambda, params, &probe_points(cutoff))?;
    let c_nu = probe.last();
    let h = transfer_h_with(lambda, params, c_nu, options)?;
    Ok(TransferSample {
        lambda,
        h,
        c_nu_estimate: c_nu,
        regime: Regime::of(params),
        verdict: probe.verdict,
        outside_half_plane: !(lambda.re > 0.0),
    })
}

/// `count` points `γ + iκ` with `κ` uniform on `range`.
pub fn vertical_lambdas(gamma: f64, range: (f64, f64), count: usize) -> Result<Vec<C>> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain("vertical scan needs gamma > 0"));
    }
    if !(range.0.is_finite() && range.1 > range.0) || count < 2 {
        return Err(Error::InvalidInput(
            "vertical scan needs an increasing range and two points",
        ));
    }
    let step = (range.1 - range.0) / (count - 1) as f64;
    Ok((0..count).map(|i| C::new(gamma, range.0 + step * i as f64)).collect())
}

/// `count` points `r e^{iθ}` with `r` geometric on `range`.
pub fn ray_lambdas(theta: f64, range: (f64, f64), count: usize) -> Result<Vec<C>> {
    if !(theta > -PI / 2.0 && theta <= PI / 2.0) {
        return Err(Error::Domain("ray angle must lie in (-pi/2, pi/2]"));
    }
    if !(range.0 > 0.0 && range.1 > range.0 && range.1.is_finite()) || count < 2 {
        return Err(Error::InvalidInput("ray scan needs 0 < r_min < r_max and two points"));
    }
    let ratio = (range.1 / range.0).ln() / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            let r = if i == count - 1 {
                range.1
            } else {
                range.0 * (ratio * i as f64).exp()
            };
            // cos(π/2) is not exactly zero
            if theta == PI / 2.0 {
                C::new(0.0, r)
            } else {
                C::from_polar(r, theta)
            }
        })
        .collect())
}

/// Boundedness diagnostic of `|H|` along a vertical line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundednessFit {
    /// Slope of `log max_{κ′≤κ}|H|` against `log κ` over `κ ≥ 1`.
    pub slope: f64,
    pub max_abs_h: f64,
    pub points: usize,
}

/// Largest slope still read as bounded.
pub const BOUNDED_SLOPE: f64 = 0.1;

impl BoundednessFit {
    pub fn bounded(&self) -> bool {
        self.slope <= BOUNDED_SLOPE
    }
}

pub fn boundedness_fit(samples: &[TransferSample]) -> Result<BoundednessFit> {
    let mut running = 0.0f64;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in samples {
        let a = s.h.norm();
        if !a.is_finite() {
            return Err(Error::Range("non-finite transfer value"));
        }
        running = running.max(a);
        let k = s.lambda.im.abs();
        if k >= 1.0 {
            xs.push(k);
            ys.push(running);
        }
    }
    let fit = loglog_fit(&xs, &ys)?;
    Ok(BoundednessFit {
        slope: fit.slope,
        max_abs_h: running,
        points: xs.len(),
    })
}

/// `|ŵ(x*,λ)|` for unit input as the cutoff shrinks.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffFamily {
    pub lambda: C,
    pub cutoffs: Vec<f64>,
    pub values: Vec<f64>,
}

impl CutoffFamily {
    /// `values[k+1]/values[k]`.
    pub fn ratios(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] / w[0]).collect()
    }

    pub fn increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] > w[0])
    }

    /// Growth per decade of `x*` implied by the end points.
    pub fn growth_per_decade(&self) -> f64 {
        let n = self.values.len();
        let decades = (self.cutoffs[0] / self.cutoffs[n - 1]).log10();
        (self.values[n - 1] / self.values[0]).powf(1.0 / decades)
    }
}

/// Reconstruct `ŵ(x*,λ)` with `θ̂ = 1` at each cutoff using the branch
/// coefficients for `params`.
pub fn cutoff_family(
    lambda: C,
    params: &DegeneracyParams,
    cutoffs: &[f64],
    rule: CoefficientRule,
) -> Result<CutoffFamily> {
    if cutoffs.len() < 2
        || cutoffs.windows(2).any(|w| !(w[1] < w[0]))
        || cutoffs.iter().any(|&x| !(x > 0.0 && x <= 1.0))
    {
        return Err(Error::InvalidInput("cutoffs must be a decreasing sequence in (0, 1]"));
    }
    let coeffs = boundary_coefficients(lambda, params, C::new(1.0, 0.0), rule)?;
    let values = cutoffs
        .iter()
        .map(|&x| laplace_solution(x, lambda, params, &coeffs).map(|v| v.norm()))
        .collect::<Result<Vec<_>>>()?;
    Ok(CutoffFamily {
        lambda,
        cutoffs: cutoffs.to_vec(),
        values,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerticalScan {
    pub gamma: f64,
    pub samples: Vec<TransferSample>,
    pub fit: BoundednessFit,
}

/// Sample `H` on `Re λ = γ`.
pub fn scan_vertical(
    gamma: f64,
    kappa_range: (f64, f64),
    count: usize,
    params: &DegeneracyParams,
    cutoff: f64,
    options: TransferOptions,
) -> Result<VerticalScan> {
    let samples = vertical_lambdas(gamma, kappa_range, count)?
        .into_iter()
        .map(|l| transfer_sample(l, params, cutoff, options))
        .collect::<Result<Vec<_>>>()?;
    let fit = boundedness_fit(&samples)?;
    Ok(VerticalScan { gamma, samples, fit })
}

/// Probe and `H` along the ray `arg λ = θ`.
pub fn scan_ray(
    theta: f64,
    abs_range: (f64, f64),
    count: usize,
    params: &DegeneracyParams,
    cutoff: f64,
    options: TransferOptions,
) -> Result<Vec<TransferSample>> {
    ray_lambdas(theta, abs_range, count)?
        .into_iter()
        .map(|l| transfer_sample(l, params, cutoff, options))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn params(alpha: f64) -> DegeneracyParams {
        DegeneracyParams::new(alpha).unwrap()
    }

    #[test]
    fn c2_values() {
        let p = params(1.5);
        assert!((c2(c(1.0, 0.0), &p).unwrap() - c(-0.125, 0.0)).norm() < 1e-15);
        // −(4/2)·Γ(2)·(1/2/4)²
        assert!((c2(c(4.0, 0.0), &p).unwrap() - c(-2.0 / 64.0, 0.0)).norm() < 1e-15);
        assert!(c2(c(0.0, 0.0), &p).is_err());
    }

    #[test]
    fn c2_is_homogeneous() {
        for alpha in [1.0, 1.2, 1.5, 1.8] {
            let p = params(alpha);
            let l = c(0.7, 1.3);
            let t = 3.5;
            let deg = 1.0 - 1.0 / (2.0 - alpha);
            let lhs = c2(l * t, &p).unwrap();
            let rhs = c2(l, &p).unwrap() * t.powf(deg);
            assert!((lhs - rhs).norm() < 1e-13 * rhs.norm(), "alpha={alpha}");
        }
    }

    #[test]
    fn a1_b1_vanish_at_one() {
        let p = params(1.5);
        for l in [c(0.5, 0.0), c(1.0, 3.0), c(4.0, -2.0), c(2.5, 10.0)] {
            let co = coefficients_a1_b1(l, &p, c(1.0, 0.5)).unwrap();
            let z1 = laplace_argument(1.0, l, &p);
            let res = co.a * mod_bessel_i(1.0, z1).unwrap() + co.b * mod_bessel_k(1.0, z1).unwrap();
            let scale = (co.b * mod_bessel_k(1.0, z1).unwrap()).norm();
            assert!(res.norm() <= 1e-12 * scale.max(1e-300), "l={l}");
        }
        let zero = coefficients_a1_b1(c(1.0, 1.0), &p, c(0.0, 0.0)).unwrap();
        assert_eq!((zero.a, zero.b), (c(0.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn a2_b2_rules() {
        let p = params(1.2);
        let l = c(1.0, 2.0);
        let v = coefficients_a2_b2(l, &p, c(1.0, 0.0), CoefficientRule::Verbatim).unwrap();
        assert!((v.a + v.b).norm() < 1e-15 * v.a.norm());
        let k = coefficients_a2_b2(l, &p, c(1.0, 0.0), CoefficientRule::Consistent).unwrap();
        let at_one = laplace_solution(1.0, l, &p, &k).unwrap();
        assert!(at_one.norm() < 1e-12 * k.b.norm());
        assert!(coefficients_a2_b2(l, &params(1.5), c(1.0, 0.0), CoefficientRule::Verbatim).is_err());
    }

    #[test]
    fn affine_in_c_nu() {
        let p = params(1.5);
        let l = c(1.0, 7.0);
        let base = c(0.3, -0.2);
        let delta = c(-1.5, 2.25);
        let h0 = transfer_h(l, &p, base).unwrap();
        let h1 = transfer_h(l, &p, base + delta).unwrap();
        let pre = transfer_prefactor(l, &p, TransferOptions::VERBATIM).unwrap();
        assert!(((h1 - h0) + pre * delta).norm() <= 1e-13 * (pre * delta).norm());
    }

    #[test]
    fn conjugate_symmetry() {
        for alpha in [1.2, 1.5, 1.8] {
            let p = params(alpha);
            for options in [TransferOptions::VERBATIM, TransferOptions::default()] {
                let l = c(1.0, 3.7);
                let a = transfer_h_with(l, &p, c(2.0, 0.0), options).unwrap();
                let b = transfer_h_with(l.conj(), &p, c(2.0, 0.0), options).unwrap();
                assert!((a.conj() - b).norm() < 1e-12 * a.norm());
            }
        }
    }

    #[test]
    fn verdicts() {
        assert_eq!(classify_probe(&[1.0, 2.0, 4.0]), ProbeVerdict::Diverging);
        assert_eq!(classify_probe(&[1.0, 1.5, 1.50001]), ProbeVerdict::Converged);
        assert_eq!(classify_probe(&[1.0, 2.0, 1.5]), ProbeVerdict::Oscillating);
    }

    #[test]
    fn probe_follows_power_law() {
        let xs: Vec<f64> = (10..30).map(|k| 10f64.powi(-k)).collect();
        let l = C::from_polar(1.0, PI / 4.0);
        for alpha in [1.5, 1.8] {
            let p = params(alpha);
            let pts = small_argument_points(l, &p, &xs);
            let seq = c_nu_probe(l, &p, &pts).unwrap();
            assert_eq!(seq.verdict, ProbeVerdict::Diverging);
            let fit = probe_slope(&seq).unwrap();
            assert!(
                (fit.slope - (1.0 - alpha)).abs() < 0.01,
                "alpha={alpha} slope={}",
                fit.slope
            );
        }
    }

    #[test]
    fn probe_inputs_checked() {
        let p = params(1.5);
        assert!(c_nu_probe(c(1.0, 0.0), &p, &[]).is_err());
        assert!(c_nu_probe(c(1.0, 0.0), &p, &[0.5]).is_err());
        assert!(c_nu_probe(c(1.0, 0.0), &p, &[1e-3, 1e-2]).is_err());
    }

    #[test]
    fn probe_points_are_decades() {
        assert_eq!(probe_points(1e-6).len(), 5);
        let short = probe_points(1e-2);
        assert_eq!(short.len(), 2);
        assert_eq!(short[1], 1e-2);
        assert!(probe_points(1e-6).windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn ray_endpoints() {
        let r = ray_lambdas(PI / 2.0, (0.5, 50.0), 11).unwrap();
        assert_eq!(r[0], c(0.0, 0.5));
        assert_eq!(r[10], c(0.0, 50.0));
        assert!(ray_lambdas(PI, (0.5, 50.0), 11).is_err());
    }

    #[test]
    fn vertical_samples_regime() {
        let scan = scan_vertical(1.0, (0.0, 10.0), 11, &params(1.5), 1e-6, TransferOptions::default()).unwrap();
        assert!(scan
            .samples
            .iter()
            .all(|s| s.regime == Regime::IntegerNu && !s.outside_half_plane));
        assert_eq!(scan.fit.points, 10);
        let scan = scan_vertical(1.0, (0.0, 10.0), 11, &params(1.2), 1e-6, TransferOptions::default()).unwrap();
        assert!(scan.samples.iter().all(|s| s.regime == Regime::NonintegerNu));
    }
}
