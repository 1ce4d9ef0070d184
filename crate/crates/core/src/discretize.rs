//! Piecewise-linear finite elements on a graded mesh.
//!
//! The weak form `∫x^α u′w′ + λ²∫uw` is discretized with hat functions on
//! nodes `x_i = (i/N)^g`. Node `N` (`x = 1`) carries the Dirichlet condition
//! and is eliminated; node 0 stays free, so the natural condition there is the
//! weighted Neumann one. The boundary feedback enters as the rank-one damping
//! `D = γ e₀e₀ᵀ` on the velocity at node 0:
//!
//! ```text
//! u̇ = v,    M v̇ = −K u − D v,    E = ½(uᵀKu + vᵀMv),    Ė = −γ v₀².
//! ```

use alloc::vec::Vec;
use core::ops::Range;

use num_complex::Complex64;
#[allow(unused_imports)] // float math is inherent in core on recent toolchains
use num_traits::Float;
use num_traits::Zero;

use crate::linalg::{cdot, cnorm, ComplexTridiag, Ldlt, SymTridiag};
use crate::spectrum::DegeneracyParams;
use crate::{Error, Result};

type C = Complex64;

/// Smallest cell count accepted by [`build_mesh`].
pub const MIN_CELLS: usize = 16;

/// Nodes `0 ≤ x_0 < … < x_N = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    nodes: Vec<f64>,
    grading: f64,
}

impl Mesh {
    /// `x_i = (i/N)^g` for `i = 0..=N`. No lower bound on `N` beyond 1.
    pub fn graded(cells: usize, grading: f64) -> Result<Self> {
        if cells == 0 {
            return Err(Error::InvalidInput("mesh needs at least one cell"));
        }
        if !(grading.is_finite() && grading >= 1.0) {
            return Err(Error::InvalidInput("grading exponent must be finite and at least 1"));
        }
        let nf = cells as f64;
        let mut nodes: Vec<f64> = (0..=cells).map(|i| (i as f64 / nf).powf(grading)).collect();
        nodes[cells] = 1.0;
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("grading too strong for this cell count"));
        }
        Ok(Self { nodes, grading })
    }

    /// An arbitrary node set; must start at `x_0 ≥ 0`, increase strictly and
    /// end at 1.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidInput("mesh needs at least two nodes"));
        }
        if !(nodes[0] >= 0.0) || nodes[nodes.len() - 1] != 1.0 {
            return Err(Error::InvalidInput("mesh must start at x ≥ 0 and end at 1"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("mesh nodes must increase strictly"));
        }
        Ok(Self {
            nodes,
            grading: f64::NAN,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Nodes that carry unknowns (all but `x = 1`).
    pub fn free_nodes(&self) -> &[f64] {
        &self.nodes[..self.nodes.len() - 1]
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Grading exponent, `NaN` for meshes built from explicit nodes.
    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn cell_sizes(&self) -> Vec<f64> {
        self.nodes.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Graded mesh with `N ≥ 16` cells; the default grading is `1/κ`, which makes
/// the mesh uniform in `y = x^κ`.
pub fn build_mesh(params: &DegeneracyParams, cells: usize, grading: Option<f64>) -> Result<Mesh> {
    if cells < MIN_CELLS {
        return Err(Error::InvalidInput("grid needs at least 16 cells"));
    }
    Mesh::graded(cells, grading.unwrap_or_else(|| params.natural_grading()))
}

/// `∫_a^b x^α dx`, without cancellation when `a ≈ b`.
fn power_integral(a: f64, b: f64, alpha: f64) -> f64 {
    let p = alpha + 1.0;
    if a == 0.0 {
        return b.powf(p) / p;
    }
    a.powf(p) * (p * ((b - a) / a).ln_1p()).exp_m1() / p
}

/// Stiffness and mass on all nodes, before the Dirichlet row is removed.
pub fn assemble_full(mesh: &Mesh, alpha: f64) -> (SymTridiag, SymTridiag) {
    let n = mesh.nodes.len();
    let mut k = SymTridiag::zeros(n);
    let mut m = SymTridiag::zeros(n);
    for (i, w) in mesh.nodes.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let h = b - a;
        let kc = power_integral(a, b, alpha) / (h * h);
        k.diag[i] += kc;
        k.diag[i + 1] += kc;
        k.off[i] -= kc;
        m.diag[i] += h / 3.0;
        m.diag[i + 1] += h / 3.0;
        m.off[i] += h / 6.0;
    }
    (k, m)
}

/// Assembled pencil on the free nodes plus the feedback gain.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrices {
    pub stiffness: SymTridiag,
    pub mass: SymTridiag,
    /// Gain `γ` of the trace load `D = γ e₀e₀ᵀ`; 1 for the physical feedback.
    pub damping: f64,
    pub alpha: f64,
}

impl OperatorMatrices {
    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    /// Same matrices with a different feedback gain (0 gives the conservative system).
    pub fn with_damping(&self, gain: f64) -> Self {
        Self {
            damping: gain,
            ..self.clone()
        }
    }
}

/// P1 assembly with exact cell integrals of `x^α`; the node at `x = 1` is eliminated.
pub fn assemble(mesh: &Mesh, params: &DegeneracyParams) -> OperatorMatrices {
    let (k, m) = assemble_full(mesh, params.alpha());
    let n = k.len() - 1;
    let cut = |a: SymTridiag| SymTridiag {
        diag: a.diag[..n].to_vec(),
        off: a.off[..n - 1].to_vec(),
    };
    OperatorMatrices {
        stiffness: cut(k),
        mass: cut(m),
        damping: 1.0,
        alpha: params.alpha(),
    }
}

/// The first-order damped system on `Z = (u, v)`.
#[derive(Debug, Clone)]
pub struct DampedGenerator<'a> {
    mats: &'a OperatorMatrices,
    mass_factor: Ldlt,
}

pub fn discrete_generator(mats: &OperatorMatrices) -> Result<DampedGenerator<'_>> {
    Ok(DampedGenerator {
        mats,
        mass_factor: mats.mass.ldlt()?,
    })
}

impl DampedGenerator<'_> {
    pub fn matrices(&self) -> &OperatorMatrices {
        self.mats
    }

    /// `𝒜_h (u, v) = (v, −M⁻¹(K u + D v))`.
    pub fn apply(&self, u: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut rhs = self.mats.stiffness.apply(u);
        rhs[0] += self.mats.damping * v[0];
        rhs.iter_mut().for_each(|r| *r = -*r);
        self.mass_factor.solve_in_place(&mut rhs);
        (v.to_vec(), rhs)
    }

    /// Complex version of [`Self::apply`].
    pub fn apply_complex(&self, u: &[C], v: &[C]) -> (Vec<C>, Vec<C>) {
        let mut rhs = self.mats.stiffness.apply_complex(u);
        rhs[0] += v[0] * self.mats.damping;
        let mut re: Vec<f64> = rhs.iter().map(|z| -z.re).collect();
        let mut im: Vec<f64> = rhs.iter().map(|z| -z.im).collect();
        self.mass_factor.solve_in_place(&mut re);
        self.mass_factor.solve_in_place(&mut im);
        let w = re.into_iter().zip(im).map(|(a, b)| C::new(a, b)).collect();
        (v.to_vec(), w)
    }

    /// `½(uᵀKu + vᵀMv)`.
    pub fn energy(&self, u: &[f64], v: &[f64]) -> f64 {
        0.5 * (self.mats.stiffness.quadratic_form(u) + self.mats.mass.quadratic_form(v))
    }

    /// Energy inner product `⟨Z₁, Z₂⟩ = u₂*K u₁ + v₂*M v₁`, linear in the first slot.
    pub fn energy_inner(&self, z1: (&[C], &[C]), z2: (&[C], &[C])) -> C {
        let ku = self.mats.stiffness.apply_complex(z1.0);
        let mv = self.mats.mass.apply_complex(z1.1);
        cdot(z2.0, &ku) + cdot(z2.1, &mv)
    }
}

/// A generalized eigenpair `K x = μ M x` with `xᵀMx = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedEigen {
    pub value: f64,
    pub vector: Vec<f64>,
    /// `‖Kx − μMx‖ / (μ‖Mx‖)`.
    pub residual: f64,
}

/// Eigenvalues with indices in `range` (0-based, ascending) of the pencil
/// `(K, M)`, located by Sturm bisection to full precision.
pub fn pencil_eigenvalues(mats: &OperatorMatrices, range: Range<usize>) -> Result<Vec<f64>> {
    let n = mats.dim();
    if range.end > n {
        return Err(Error::InvalidInput("more eigenvalues requested than unknowns"));
    }
    let k = &mats.stiffness;
    let m = &mats.mass;
    let mut upper = 1.0;
    while k.sturm_count(m, upper) < range.end {
        upper *= 2.0;
        if !upper.is_finite() {
            return Err(Error::Convergence {
                what: "spectral upper bound",
                iterations: 1100,
            });
        }
    }
    let mut out = Vec::with_capacity(range.len());
    let mut lo_prev = 0.0;
    for idx in range {
        // smallest σ with count(σ) > idx
        let mut lo = lo_prev;
        let mut hi = upper;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if k.sturm_count(m, mid) > idx {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(0.5 * (lo + hi));
        lo_prev = lo;
    }
    Ok(out)
}

/// The `count` smallest eigenpairs of `(K, M)`: Sturm bisection isolates each
/// eigenvalue, then shifted inverse iteration with `M`-orthogonal deflation
/// against the pairs already found produces the vector.
pub fn generalized_eigs(mats: &OperatorMatrices, count: usize) -> Result<Vec<GeneralizedEigen>> {
    if count == 0 || count > mats.dim() / 4 {
        return Err(Error::InvalidInput("eigenvalue count must be between 1 and N/4"));
    }
    let values = pencil_eigenvalues(mats, 0..count)?;
    let mut found: Vec<GeneralizedEigen> = Vec::with_capacity(count);
    for (i, &mu) in values.iter().enumerate() {
        let pair = inverse_iteration(mats, mu, &found).map_err(|_| Error::Convergence {
            what: "generalized eigenvector",
            iterations: i + 1,
        })?;
        found.push(pair);
    }
    Ok(found)
}

fn inverse_iteration(mats: &OperatorMatrices, mu: f64, found: &[GeneralizedEigen]) -> Result<GeneralizedEigen> {
    let k = &mats.stiffness;
    let m = &mats.mass;
    let n = mats.dim();
    // shift slightly off the eigenvalue so the factorization has no zero pivot
    let shift = mu * (1.0 - 1e-10) - 1e-300;
    let factor = k.axpy(-shift, m).ldlt()?;
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    let mut value = mu;
    let mut residual = f64::INFINITY;
    for _ in 0..8 {
        let mut b = m.apply(&x);
        factor.solve_in_place(&mut b);
        x = b;
        for prev in found {
            let c = crate::linalg::dot(&m.apply(&prev.vector), &x);
            x.iter_mut().zip(&prev.vector).for_each(|(xi, pi)| *xi -= c * pi);
        }
        let mx = m.apply(&x);
        let norm = crate::linalg::dot(&x, &mx).sqrt();
        x.iter_mut().for_each(|xi| *xi /= norm);
        value = k.quadratic_form(&x);
        let kx = k.apply(&x);
        let r: f64 = kx
            .iter()
            .zip(&mx)
            .map(|(a, b)| {
                let d = a - value * b / norm;
                d * d
            })
            .sum::<f64>()
            .sqrt();
        let scale = value * mx.iter().map(|b| (b / norm) * (b / norm)).sum::<f64>().sqrt();
        residual = r / scale;
        if residual < 1e-10 {
            break;
        }
    }
    if !(residual < 1e-8) {
        return Err(Error::Convergence {
            what: "inverse iteration",
            iterations: 8,
        });
    }
    Ok(GeneralizedEigen {
        value,
        vector: x,
        residual,
    })
}

/// An eigenvalue `s` of the damped generator, i.e. `(s²M + sD + K)φ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DampedEigen {
    pub value: C,
    /// Displacement part `φ`; the velocity part is `sφ`.
    pub vector: Vec<C>,
    /// `‖(s²M + sD + K)φ‖ / ‖(|s|²M + K)φ‖`.
    pub residual: f64,
    pub iterations: usize,
}

/// Rayleigh-quotient iteration on the quadratic pencil from `guess`.
///
/// Each step solves `Q(σ)x = Q′(σ)φ` and updates `σ` by the root, nearest the
/// current shift, of `m s² + d s + k = 0` with `m = φ*Mφ`, `d = γ|φ₀|²`,
/// `k = φ*Kφ`. Because `m, d, k` are real and nonnegative, the real part
/// `−d/(2m)` is computed without cancellation even when it is many orders of
/// magnitude below `|s|`; a dense eigensolver cannot resolve it there.
pub fn refine_damped_eigenvalue(mats: &OperatorMatrices, guess: C) -> Result<DampedEigen> {
    rayleigh_qep(mats, mats.damping, guess, None)
}

fn rayleigh_qep(mats: &OperatorMatrices, gain: f64, guess: C, start: Option<&[C]>) -> Result<DampedEigen> {
    const CAP: usize = 60;
    let n = mats.dim();
    let k = &mats.stiffness;
    let m = &mats.mass;
    let g = C::new(gain, 0.0);
    let mut sigma = guess;
    let mut phi: Vec<C> = match start {
        Some(v) => v.to_vec(),
        None => (0..n).map(|i| C::new(1.0, 0.01 * (i % 5) as f64)).collect(),
    };
    let mut residual = f64::INFINITY;
    let mut prev_re = f64::NAN;
    for it in 1..=CAP {
        let pencil = |s: C| ComplexTridiag::combine(C::new(1.0, 0.0), k, s * s, m, s * g);
        let lu = match pencil(sigma).factor() {
            Ok(lu) => lu,
            // σ is an eigenvalue to working precision
            Err(_) => pencil(sigma * (1.0 + 1e-13)).factor()?,
        };
        let mut rhs: Vec<C> = m.apply_complex(&phi).into_iter().map(|z| z * (sigma * 2.0)).collect();
        rhs[0] += g * phi[0];
        let mut x = lu.solve(&rhs);
        let norm = cnorm(&x);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Convergence {
                what: "damped eigenvalue",
                iterations: it,
            });
        }
        x.iter_mut().for_each(|z| *z /= norm);
        phi = x;
        let mm = m.hermitian_form(&phi);
        let kk = k.hermitian_form(&phi);
        let dd = gain * phi[0].norm_sqr();
        let next = quadratic_root_near(mm, dd, kk, sigma);
        let change = (next - sigma).norm();
        sigma = next;
        residual = qep_residual(mats, gain, sigma, &phi);
        // the real part can be ten orders below |σ|, so it gets its own test
        let settled = change <= 1e-13 * sigma.norm() && (next_re_change(prev_re, sigma.re) <= 1e-8 * sigma.re.abs());
        prev_re = sigma.re;
        if settled && residual < 1e-11 {
            return Ok(DampedEigen {
                value: sigma,
                vector: phi,
                residual,
                iterations: it,
            });
        }
    }
    if residual < 1e-8 {
        return Ok(DampedEigen {
            value: sigma,
            vector: phi,
            residual,
            iterations: CAP,
        });
    }
    Err(Error::Convergence {
        what: "damped eigenvalue",
        iterations: CAP,
    })
}

/// Follows one eigenvalue from the conservative pencil (`γ = 0`, where it is
/// `i√μ` exactly) to the target gain. Seeding directly at `i√μ` is not safe:
/// at `α = 1` on coarse meshes the feedback moves eigenvalues by about half a
/// spacing, and the iteration then lands on a neighbour.
fn track_from_undamped(mats: &OperatorMatrices, mu: f64, spacing: f64) -> Result<DampedEigen> {
    let target = mats.damping;
    let mut current = rayleigh_qep(mats, 0.0, C::new(0.0, mu.sqrt()), None)?;
    if target == 0.0 {
        return Ok(current);
    }
    let mut gamma = 0.0;
    // Modes concentrated at node 0 react to the gain extremely fast; the
    // first step keeps the linear predictor inside a small fraction of the
    // spacing and later steps grow geometrically.
    let rate = gain_derivative(mats, 0.0, &current).norm();
    let mut h = if rate > 0.0 {
        (target / 8.0).min(0.01 * spacing / rate)
    } else {
        target / 8.0
    };
    let mut steps = 0;
    while gamma < target {
        steps += 1;
        if h < target * 1e-15 || steps > 10_000 {
            return Err(Error::Convergence {
                what: "damped eigenvalue continuation",
                iterations: steps,
            });
        }
        let next_gamma = if gamma + h >= target { target } else { gamma + h };
        let predicted = current.value + (next_gamma - gamma) * gain_derivative(mats, gamma, &current);
        match rayleigh_qep(mats, next_gamma, predicted, Some(&current.vector)) {
            Ok(e) if (e.value - predicted).norm() < 0.05 * spacing => {
                gamma = next_gamma;
                current = e;
                h *= 1.5;
            }
            _ => h *= 0.5,
        }
    }
    Ok(current)
}

/// `ds/dγ` for a simple eigenvalue. The pencil is complex symmetric, so the
/// left eigenvector is the unconjugated right one.
fn gain_derivative(mats: &OperatorMatrices, gain: f64, e: &DampedEigen) -> C {
    let s = e.value;
    let phi = &e.vector;
    let mphi = mats.mass.apply_complex(phi);
    let denom: C = phi.iter().zip(&mphi).map(|(a, b)| a * b).sum::<C>() * (s * 2.0) + phi[0] * phi[0] * gain;
    if denom.norm() == 0.0 {
        return C::zero();
    }
    -(s * phi[0] * phi[0]) / denom
}

fn next_re_change(prev: f64, now: f64) -> f64 {
    if prev.is_nan() {
        f64::INFINITY
    } else {
        (now - prev).abs()
    }
}

fn quadratic_root_near(m: f64, d: f64, k: f64, near: C) -> C {
    let re = -d / (2.0 * m);
    let disc = d * d - 4.0 * m * k;
    if disc < 0.0 {
        let im = (-disc).sqrt() / (2.0 * m);
        let im = if near.im >= 0.0 { im } else { -im };
        C::new(re, im)
    } else {
        // overdamped: two real roots, both ≤ 0
        let sq = disc.sqrt();
        let r1 = -(d + sq) / (2.0 * m);
        let r2 = if r1 != 0.0 { k / (m * r1) } else { 0.0 };
        let (a, b) = (C::new(r1, 0.0), C::new(r2, 0.0));
        if (a - near).norm() <= (b - near).norm() {
            a
        } else {
            b
        }
    }
}

fn qep_residual(mats: &OperatorMatrices, gain: f64, s: C, phi: &[C]) -> f64 {
    let kphi = mats.stiffness.apply_complex(phi);
    let mphi = mats.mass.apply_complex(phi);
    let mut r: Vec<C> = kphi.iter().zip(&mphi).map(|(a, b)| a + b * s * s).collect();
    r[0] += phi[0] * s * gain;
    let scale: Vec<C> = kphi.iter().zip(&mphi).map(|(a, b)| a + b * s.norm_sqr()).collect();
    cnorm(&r) / cnorm(&scale)
}

/// Damped eigenvalues continued from `i√μ` for the undamped pencil
/// eigenvalues with indices in `range`.
///
/// Complex values lie in the upper half plane and their conjugates are
/// eigenvalues too. A mode whose pair has turned real (overdamped; this
/// happens for the highest, mesh-scale modes) contributes only the root the
/// continuation reached. Every eigenvalue obeys its own Rayleigh equation
/// `m s² + d s + k = 0` with `m, k > 0` and `d ≥ 0`, so `Re s ≤ 0` always,
/// with equality exactly when the mode has no trace at node 0.
#[derive(Debug, Clone)]
pub struct DampedSpectrum {
    pub eigen: Vec<DampedEigen>,
    /// Set when two seeds converged to the same eigenvalue.
    pub duplicates: bool,
}

impl DampedSpectrum {
    /// Largest real part, i.e. the distance of the spectrum from `iℝ` with sign.
    pub fn max_real_part(&self) -> f64 {
        self.eigen.iter().map(|e| e.value.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn damped_spectrum(mats: &OperatorMatrices, range: Range<usize>) -> Result<DampedSpectrum> {
    let n = mats.dim();
    if range.is_empty() || range.end > n {
        return Err(Error::InvalidInput("damped spectrum index range out of bounds"));
    }
    // one extra neighbour on each side for the local spacing
    let lo = range.start.saturating_sub(1);
    let hi = (range.end + 1).min(n);
    let freqs: Vec<f64> = pencil_eigenvalues(mats, lo..hi)?.into_iter().map(f64::sqrt).collect();
    let mut eigen = Vec::with_capacity(range.len());
    for idx in range {
        let i = idx - lo;
        let mut spacing = f64::INFINITY;
        if i > 0 {
            spacing = spacing.min(freqs[i] - freqs[i - 1]);
        }
        if i + 1 < freqs.len() {
            spacing = spacing.min(freqs[i + 1] - freqs[i]);
        }
        if !spacing.is_finite() {
            spacing = freqs[i].max(1.0);
        }
        eigen.push(track_from_undamped(mats, freqs[i] * freqs[i], spacing)?);
    }
    let mut pts: Vec<C> = eigen.iter().map(|e| e.value).collect();
    pts.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap_or(core::cmp::Ordering::Equal));
    let duplicates = pts
        .windows(2)
        .any(|w| (w[1] - w[0]).norm() <= 1e-9 * w[1].norm().max(1.0));
    Ok(DampedSpectrum { eigen, duplicates })
}

impl SymTridiag {
    /// Coordinate-format triplets `(row, col, value)`, row-major.
    pub fn coo_entries(&self) -> Vec<(usize, usize, f64)> {
        let n = self.len();
        let mut out = Vec::with_capacity(3 * n);
        for i in 0..n {
            if i > 0 {
                out.push((i, i - 1, self.off[i - 1]));
            }
            out.push((i, i, self.diag[i]));
            if i + 1 < n {
                out.push((i, i + 1, self.off[i]));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{degeneracy_params, eigen_pairs};
    use alloc::vec;

    #[test]
    fn mesh_examples() {
        let m = Mesh::graded(4, 2.0).unwrap();
        assert_eq!(m.nodes(), &[0.0, 1.0 / 16.0, 0.25, 9.0 / 16.0, 1.0]);
        let p = degeneracy_params(1.0).unwrap();
        let m = build_mesh(&p, 16, Some(1.0)).unwrap();
        assert!(m.cell_sizes().iter().all(|h| (h - 1.0 / 16.0).abs() < 1e-15));
        assert!(build_mesh(&p, 15, None).is_err());
        assert!(Mesh::from_nodes(vec![0.0, 0.5, 0.5, 1.0]).is_err());
    }

    #[test]
    fn power_integral_is_accurate() {
        for (a, b) in [(0.0, 0.3), (0.5, 0.5 + 1e-9), (0.99, 1.0)] {
            let alpha: f64 = 1.37;
            let direct = (b.powf(alpha + 1.0) - a.powf(alpha + 1.0)) / (alpha + 1.0);
            let got = power_integral(a, b, alpha);
            assert!((got - direct).abs() <= 1e-6 * direct.abs(), "{a} {b}");
        }
        // midpoint estimate is second order accurate on a tiny cell
        let (a, b) = (0.5f64, 0.5 + 1e-9);
        let mid = (b - a) * (0.5 * (a + b)).powf(1.37);
        assert!((power_integral(a, b, 1.37) - mid).abs() < 1e-15 * mid);
    }

    #[test]
    fn constants_in_kernel_before_elimination() {
        let p = degeneracy_params(1.3).unwrap();
        let mesh = build_mesh(&p, 40, None).unwrap();
        let (k, _) = assemble_full(&mesh, 1.3);
        let ones = vec![1.0; k.len()];
        assert!(k.apply(&ones).iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn lowest_eigenvalues_converge() {
        let p = degeneracy_params(1.0).unwrap();
        let exact: Vec<f64> = eigen_pairs(&p, 3).unwrap().iter().map(|e| e.mu).collect();
        let mut prev = [f64::INFINITY; 3];
        for n in [64, 128, 256, 512] {
            let mats = assemble(&build_mesh(&p, n, None).unwrap(), &p);
            let eigs = generalized_eigs(&mats, 3).unwrap();
            for i in 0..3 {
                let err = (eigs[i].value - exact[i]).abs() / exact[i];
                assert!(err < prev[i], "N={n} i={i}");
                prev[i] = err;
            }
        }
    }

    #[test]
    fn dissipation_identity_for_random_states() {
        let p = degeneracy_params(1.5).unwrap();
        let mats = assemble(&build_mesh(&p, 60, None).unwrap(), &p);
        let gen = discrete_generator(&mats).unwrap();
        let n = mats.dim();
        let mut seed = 11u64;
        let mut rnd = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..20 {
            let u: Vec<C> = (0..n).map(|_| C::new(rnd(), rnd())).collect();
            let v: Vec<C> = (0..n).map(|_| C::new(rnd(), rnd())).collect();
            let (au, av) = gen.apply_complex(&u, &v);
            let re = gen.energy_inner((&au, &av), (&u, &v)).re;
            assert!((re + v[0].norm_sqr()).abs() < 1e-9 * (1.0 + v[0].norm_sqr()));
        }
    }

    #[test]
    fn refined_damped_eigenvalues_solve_the_pencil() {
        let p = degeneracy_params(1.0).unwrap();
        let mats = assemble(&build_mesh(&p, 100, None).unwrap(), &p);
        let spec = damped_spectrum(&mats, 0..10).unwrap();
        assert!(!spec.duplicates);
        for e in &spec.eigen {
            assert!(e.residual < 1e-10);
            assert!(e.value.re < 0.0);
        }
    }
}
