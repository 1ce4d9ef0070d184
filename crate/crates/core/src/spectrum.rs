//! Closed-form spectrum of the undamped operator `A u = −(x^α u′)′` with
//! `u(1) = 0` and the weighted Neumann condition `(x^α u′)(0) = 0`.
//!
//! With `ν = (α−1)/(2−α)` and `κ = (2−α)/2` the eigenpairs are
//!
//! ```text
//! β_n = κ j_{ν,n},   u_n(x) = c_n x^{(1−α)/2} J_ν(j_{ν,n} x^κ),   c_n = √(2κ)/|J′_ν(j_{ν,n})|
//! ```
//!
//! and `A u_n = β_n² u_n`. Everything in this module works in the variable
//! `y = x^κ`, in which `x^{(1−α)/2} = y^{−ν}` and both `∫u²dx` and `∫x^α u′²dx`
//! reduce to integrals of `y·J²` that are smooth except for a power of `y`
//! at the origin.

use alloc::vec::Vec;

#[allow(unused_imports)] // float math is inherent in core on recent toolchains
use num_traits::Float;

use crate::quadrature::GaussLegendre;
use crate::specfun::{bessel_j, bessel_j_deriv, bessel_j_zero, bessel_j_zeros, recip_gamma, BesselOrder};
use crate::{Error, Result};

/// `α` together with the derived exponents `ν` and `κ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyParams {
    alpha: f64,
    nu: f64,
    kappa: f64,
}

impl DegeneracyParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && (1.0..2.0).contains(&alpha)) {
            return Err(Error::Domain("alpha must lie in [1, 2)"));
        }
        let nu = BesselOrder::new((alpha - 1.0) / (2.0 - alpha))?.value();
        Ok(Self {
            alpha,
            nu,
            kappa: (2.0 - alpha) / 2.0,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn order(&self) -> BesselOrder {
        BesselOrder::new(self.nu).expect("ν is validated at construction")
    }

    /// `ν ∈ ℕ*`.
    pub fn nu_is_positive_integer(&self) -> bool {
        self.order().is_positive_integer()
    }

    /// `α ≥ 3/2`, equivalently `ν ≥ 1`. This is not the same as
    /// [`Self::nu_is_positive_integer`]: `α = 1.6` gives `ν = 3/2`.
    pub fn in_upper_range(&self) -> bool {
        self.alpha >= 1.5
    }

    /// Exponent `(1−α)/2` of the weight in front of the Bessel factor.
    pub fn weight_exponent(&self) -> f64 {
        0.5 * (1.0 - self.alpha)
    }

    /// Mesh grading `1/κ` that makes a mesh uniform in `y = x^κ`.
    pub fn natural_grading(&self) -> f64 {
        1.0 / self.kappa
    }
}

pub fn degeneracy_params(alpha: f64) -> Result<DegeneracyParams> {
    DegeneracyParams::new(alpha)
}

/// `β_n = κ j_{ν,n}`.
pub fn eigen_frequency(params: &DegeneracyParams, n: usize) -> Result<f64> {
    Ok(params.kappa * bessel_j_zero(params.nu, n)?)
}

/// One eigenpair, with everything needed to evaluate `u_n` cheaply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub n: usize,
    /// `j_{ν,n}`.
    pub zero: f64,
    /// `β_n = κ j_{ν,n}`.
    pub beta: f64,
    /// `μ_n = β_n²`.
    pub mu: f64,
    /// `c_n = √(2κ)/|J′_ν(j_{ν,n})|`.
    pub normalization: f64,
    params: DegeneracyParams,
}

impl EigenPair {
    pub fn new(params: &DegeneracyParams, n: usize) -> Result<Self> {
        Self::from_zero(params, n, bessel_j_zero(params.nu, n)?)
    }

    fn from_zero(params: &DegeneracyParams, n: usize, zero: f64) -> Result<Self> {
        let jp = bessel_j_deriv(params.nu, zero)?;
        if jp == 0.0 {
            return Err(Error::Singular("J′ vanishes at a zero of J"));
        }
        let beta = params.kappa * zero;
        Ok(Self {
            n,
            zero,
            beta,
            mu: beta * beta,
            normalization: (2.0 * params.kappa).sqrt() / jp.abs(),
            params: *params,
        })
    }

    pub fn params(&self) -> &DegeneracyParams {
        &self.params
    }

    /// `u_n(x)` on `[0, 1]`. At `x = 0` the finite limit
    /// `c_n (j/2)^ν / Γ(ν+1)` is returned: the singular weight and the
    /// vanishing Bessel factor cancel exactly.
    pub fn eval(&self, x: f64) -> Result<f64> {
        check_unit(x)?;
        let y = x.powf(self.params.kappa);
        Ok(self.normalization * self.reduced(y))
    }

    /// `y^{−ν} J_ν(j y)`, continued to `y = 0`.
    fn reduced(&self, y: f64) -> f64 {
        let nu = self.params.nu;
        let arg = self.zero * y;
        if arg < 1e-6 {
            // two-term series; the next term is below 1e-24 relative
            let lead = (0.5 * self.zero).powf(nu) * recip_gamma(nu + 1.0);
            return lead * (1.0 - 0.25 * arg * arg / (nu + 1.0));
        }
        bessel_j(nu, arg).expect("nonnegative order and argument") * y.powf(-nu)
    }

    /// `u_n′(x)` for `x ∈ (0, 1]`, from `d/dy[y^{−ν}J_ν(jy)] = −j y^{−ν} J_{ν+1}(jy)`.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        check_unit(x)?;
        if x == 0.0 {
            return Err(Error::Domain("u′ is evaluated on (0, 1] only"));
        }
        let k = self.params.kappa;
        let y = x.powf(k);
        let nu = self.params.nu;
        let du_dy =
            -self.normalization * self.zero * y.powf(-nu) * bessel_j(nu + 1.0, self.zero * y).expect("valid arguments");
        Ok(du_dy * k * x.powf(k - 1.0))
    }

    /// The weighted flux `x^α u_n′(x) = −c_n j κ √x J_{ν+1}(j x^κ)`, which
    /// tends to 0 like `x` at the origin.
    pub fn flux(&self, x: f64) -> Result<f64> {
        check_unit(x)?;
        let k = self.params.kappa;
        let nu = self.params.nu;
        let j = bessel_j(nu + 1.0, self.zero * x.powf(k)).expect("valid arguments");
        Ok(-self.normalization * self.zero * k * x.sqrt() * j)
    }

    /// `(∫u², ∫x^α u′²)` by composite Gauss–Legendre in `y = x^κ`.
    pub fn weighted_integrals(&self) -> Result<(f64, f64)> {
        let coarse = self.integrals_with(panels_for(self.zero))?;
        let fine = self.integrals_with(2 * panels_for(self.zero))?;
        let agree = |a: f64, b: f64| (a - b).abs() <= 1e-10 * b.abs().max(1e-300);
        if !agree(coarse.0, fine.0) || !agree(coarse.1, fine.1) {
            return Err(Error::Convergence {
                what: "eigenfunction quadrature",
                iterations: 2,
            });
        }
        Ok(fine)
    }

    fn integrals_with(&self, panels: usize) -> Result<(f64, f64)> {
        let nu = self.params.nu;
        let k = self.params.kappa;
        let c2 = self.normalization * self.normalization;
        let j = self.zero;
        let rule = GaussLegendre::new(10);
        // ∫u² dx = (c²/κ) ∫ y J_ν(jy)² dy
        let mass = rule.composite_graded(1.0, panels, ORIGIN_LEVELS, |y| {
            let b = bessel_j(nu, j * y).expect("valid arguments");
            y * b * b
        });
        // ∫x^α u′² dx = κ c² j² ∫ y J_{ν+1}(jy)² dy
        let stiff = rule.composite_graded(1.0, panels, ORIGIN_LEVELS, |y| {
            let b = bessel_j(nu + 1.0, j * y).expect("valid arguments");
            y * b * b
        });
        let out = (c2 / k * mass, k * c2 * j * j * stiff);
        if !(out.0.is_finite() && out.1.is_finite()) {
            return Err(Error::Convergence {
                what: "eigenfunction quadrature",
                iterations: 1,
            });
        }
        Ok(out)
    }
}

/// Geometric panels toward `y = 0`, where the integrands behave like
/// `y^{2ν+1}` and are not smooth for fractional `ν`.
const ORIGIN_LEVELS: usize = 40;

fn panels_for(zero: f64) -> usize {
    8 + (2.0 * zero / core::f64::consts::PI) as usize
}

fn check_unit(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain("eigenfunctions live on [0, 1]"));
    }
    Ok(())
}

/// The first `count` eigenpairs.
pub fn eigen_pairs(params: &DegeneracyParams, count: usize) -> Result<Vec<EigenPair>> {
    bessel_j_zeros(params.nu, count)?
        .into_iter()
        .enumerate()
        .map(|(i, z)| EigenPair::from_zero(params, i + 1, z))
        .collect()
}

/// `u_n(x)`; `x = 0` gives the finite limit.
pub fn eigenfunction_eval(params: &DegeneracyParams, n: usize, x: f64) -> Result<f64> {
    EigenPair::new(params, n)?.eval(x)
}

/// `‖(u_n, iβ_n u_n)‖² = ∫x^α u_n′² + β_n²∫u_n²` in the energy space.
///
/// For the normalized eigenfunction both terms equal `β_n²`, so the value is
/// `2β_n²` up to quadrature error.
pub fn mode_norm_growth(params: &DegeneracyParams, n: usize) -> Result<f64> {
    let pair = EigenPair::new(params, n)?;
    let (mass, stiff) = pair.weighted_integrals()?;
    Ok(stiff + pair.mu * mass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_examples() {
        let p = degeneracy_params(1.0).unwrap();
        assert_eq!((p.nu(), p.kappa()), (0.0, 0.5));
        let p = degeneracy_params(1.5).unwrap();
        assert_eq!((p.nu(), p.kappa()), (1.0, 0.25));
        assert!(p.nu_is_positive_integer() && p.in_upper_range());
        let p = degeneracy_params(1.2).unwrap();
        assert!((p.nu() - 0.25).abs() < 1e-15 && (p.kappa() - 0.4).abs() < 1e-15);
        let p = degeneracy_params(1.6).unwrap();
        assert!(p.in_upper_range() && !p.nu_is_positive_integer());
        assert!(degeneracy_params(2.0).is_err());
        assert!(degeneracy_params(0.99).is_err());
        assert!(degeneracy_params(f64::NAN).is_err());
    }

    #[test]
    fn dirichlet_and_origin() {
        for alpha in [1.0, 1.2, 1.5, 1.8] {
            let p = degeneracy_params(alpha).unwrap();
            for pair in eigen_pairs(&p, 6).unwrap() {
                assert!(pair.eval(1.0).unwrap().abs() < 1e-9);
                let at0 = pair.eval(0.0).unwrap();
                // a point with j·x^κ = 1e-4, deep in the series regime
                let x = (1e-4 / pair.zero).powf(1.0 / p.kappa());
                let near = pair.eval(x).unwrap();
                assert!((at0 - near).abs() < 1e-7 * at0.abs(), "α={alpha} {at0} {near}");
            }
        }
    }

    #[test]
    fn normalized_and_norm_identity() {
        for alpha in [1.0, 1.3, 1.5] {
            let p = degeneracy_params(alpha).unwrap();
            for pair in eigen_pairs(&p, 8).unwrap() {
                let (m, s) = pair.weighted_integrals().unwrap();
                assert!((m - 1.0).abs() < 1e-10, "α={alpha} n={} m={m}", pair.n);
                assert!((s - pair.mu).abs() < 1e-9 * pair.mu);
            }
        }
    }

    #[test]
    fn flux_matches_derivative() {
        let p = degeneracy_params(1.4).unwrap();
        let pair = EigenPair::new(&p, 3).unwrap();
        for x in [1e-3, 0.1, 0.5, 0.9] {
            let f = pair.flux(x).unwrap();
            let d = pair.derivative(x).unwrap() * x.powf(1.4);
            assert!((f - d).abs() < 1e-12 * (1.0 + f.abs()));
        }
    }
}
