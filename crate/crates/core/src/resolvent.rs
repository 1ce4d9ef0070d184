//! Resolvent of the damped generator on the imaginary axis.
//!
//! For `U = (u, v)` and `F = (f, g)` the equation `(iλ − 𝒜_h)U = F` reduces to
//!
//! ```text
//! (K − λ²M + iλD) u = M g + iλ M f + D f,    v = iλ u − f.
//! ```
//!
//! Norms are taken in the energy space, `‖(u, v)‖² = u*Ku + v*Mv`. The adjoint
//! with respect to that inner product needs `(λ²M − K + iλD) u = M h₂ + iλ M h₁ − D h₁`,
//! `v = h₁ + iλ u`, and its matrix is `−conj(K − λ²M + iλD)`, so one
//! factorization serves both directions.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // float math is inherent in core on recent toolchains
use num_traits::Float;
use num_traits::Zero;

use crate::discretize::{DampedEigen, OperatorMatrices};
use crate::fit::loglog_fit;
use crate::linalg::{cdot, ComplexTridiag, Ldlt, SymTridiag, TridiagLu};
use crate::{Error, Result};

type C = Complex64;

/// Solves whose 1-norm condition estimate exceeds this are flagged.
pub const CONDITION_CUTOFF: f64 = 1e14;

/// Relative change between Lanczos steps at which the norm estimate stops.
pub const NORM_TOL: f64 = 1e-10;

/// Quality of a resolvent evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScanFlag {
    Clean,
    /// The reduced system's condition estimate exceeded [`CONDITION_CUTOFF`].
    IllConditioned,
    /// The norm iteration did not settle; the value is a lower bound.
    NotConverged,
}

impl ScanFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            ScanFlag::Clean => "ok",
            ScanFlag::IllConditioned => "ill-conditioned",
            ScanFlag::NotConverged => "not-converged",
        }
    }

    pub fn is_clean(self) -> bool {
        self == ScanFlag::Clean
    }

    fn worst(self, other: ScanFlag) -> ScanFlag {
        if self == ScanFlag::Clean {
            other
        } else {
            self
        }
    }
}

/// `U = (iλ − 𝒜_h)⁻¹F` with diagnostics.
#[derive(Debug, Clone)]
pub struct ResolventSolution {
    pub u: Vec<C>,
    pub v: Vec<C>,
    /// `‖(iλ − 𝒜_h)U − F‖ / ‖F‖` in the energy norm (absolute when `F = 0`).
    pub residual: f64,
    pub condition: f64,
    pub flag: ScanFlag,
}

/// Factorization of the reduced system at one `λ`.
struct Factored {
    lambda: f64,
    lu: TridiagLu,
    flag: ScanFlag,
    condition: f64,
}

/// Energy-space machinery shared by all resolvent evaluations on one pencil.
#[derive(Debug, Clone)]
pub struct Resolvent<'a> {
    mats: &'a OperatorMatrices,
    mass_factor: Ldlt,
}

impl<'a> Resolvent<'a> {
    pub fn new(mats: &'a OperatorMatrices) -> Result<Self> {
        Ok(Self {
            mats,
            mass_factor: mats.mass.ldlt()?,
        })
    }

    pub fn matrices(&self) -> &OperatorMatrices {
        self.mats
    }

    pub fn dim(&self) -> usize {
        self.mats.dim()
    }

    /// `⟨Z₁, Z₂⟩ = u₂*K u₁ + v₂*M v₁`.
    pub fn inner(&self, z1: (&[C], &[C]), z2: (&[C], &[C])) -> C {
        cdot(z2.0, &self.mats.stiffness.apply_complex(z1.0)) + cdot(z2.1, &self.mats.mass.apply_complex(z1.1))
    }

    pub fn norm(&self, u: &[C], v: &[C]) -> f64 {
        (self.mats.stiffness.hermitian_form(u) + self.mats.mass.hermitian_form(v))
            .max(0.0)
            .sqrt()
    }

    fn factor(&self, lambda: f64) -> Result<Factored> {
        let one = C::new(1.0, 0.0);
        let c = ComplexTridiag::combine(
            one,
            &self.mats.stiffness,
            C::new(-lambda * lambda, 0.0),
            &self.mats.mass,
            C::new(0.0, lambda * self.mats.damping),
        );
        let lu = c.factor()?;
        let condition = c.condition_estimate(&lu)?;
        let flag = if condition.is_finite() && condition <= CONDITION_CUTOFF {
            ScanFlag::Clean
        } else {
            ScanFlag::IllConditioned
        };
        Ok(Factored {
            lambda,
            lu,
            flag,
            condition,
        })
    }

    fn apply_inverse(&self, fac: &Factored, f: &[C], g: &[C]) -> (Vec<C>, Vec<C>) {
        let il = C::new(0.0, fac.lambda);
        let mg = self.mats.mass.apply_complex(g);
        let mf = self.mats.mass.apply_complex(f);
        let mut rhs: Vec<C> = mg.iter().zip(&mf).map(|(a, b)| a + il * b).collect();
        rhs[0] += f[0] * self.mats.damping;
        let u = fac.lu.solve(&rhs);
        let v = u.iter().zip(f).map(|(ui, fi)| il * ui - fi).collect();
        (u, v)
    }

    fn apply_adjoint_inverse(&self, fac: &Factored, h1: &[C], h2: &[C]) -> (Vec<C>, Vec<C>) {
        let il = C::new(0.0, fac.lambda);
        let mh2 = self.mats.mass.apply_complex(h2);
        let mh1 = self.mats.mass.apply_complex(h1);
        let mut rhs: Vec<C> = mh2.iter().zip(&mh1).map(|(a, b)| a + il * b).collect();
        rhs[0] -= h1[0] * self.mats.damping;
        // (λ²M − K + iλD) = −conj(C)
        let flipped: Vec<C> = rhs.iter().map(|z| -z.conj()).collect();
        let u: Vec<C> = fac.lu.solve(&flipped).into_iter().map(|z| z.conj()).collect();
        let v = u.iter().zip(h1).map(|(ui, hi)| hi + il * ui).collect();
        (u, v)
    }

    /// `(iλ − 𝒜_h)U` in energy-space form: returns `(iλu − v, M⁻¹(iλMv + Ku + Dv))`.
    pub fn apply_shifted(&self, lambda: f64, u: &[C], v: &[C]) -> (Vec<C>, Vec<C>) {
        let il = C::new(0.0, lambda);
        let first = u.iter().zip(v).map(|(a, b)| il * a - b).collect();
        let mut second = self.mats.mass.apply_complex(v);
        second.iter_mut().for_each(|z| *z *= il);
        let ku = self.mats.stiffness.apply_complex(u);
        second.iter_mut().zip(&ku).for_each(|(s, k)| *s += k);
        second[0] += v[0] * self.mats.damping;
        (first, self.mass_solve(&second))
    }

    fn mass_solve(&self, b: &[C]) -> Vec<C> {
        let mut re: Vec<f64> = b.iter().map(|z| z.re).collect();
        let mut im: Vec<f64> = b.iter().map(|z| z.im).collect();
        self.mass_factor.solve_in_place(&mut re);
        self.mass_factor.solve_in_place(&mut im);
        re.into_iter().zip(im).map(|(a, b)| C::new(a, b)).collect()
    }

    /// Solves `(iλ − 𝒜_h)U = (f, g)`.
    pub fn solve(&self, lambda: f64, f: &[C], g: &[C]) -> Result<ResolventSolution> {
        check_len(self.dim(), f, g)?;
        let fac = self.factor(lambda)?;
        let (u, v) = self.apply_inverse(&fac, f, g);
        let (r1, r2) = self.apply_shifted(lambda, &u, &v);
        let d1: Vec<C> = r1.iter().zip(f).map(|(a, b)| a - b).collect();
        let d2: Vec<C> = r2.iter().zip(g).map(|(a, b)| a - b).collect();
        let fnorm = self.norm(f, g);
        let rnorm = self.norm(&d1, &d2);
        let residual = if fnorm > 0.0 { rnorm / fnorm } else { rnorm };
        Ok(ResolventSolution {
            u,
            v,
            residual,
            condition: fac.condition,
            flag: fac.flag,
        })
    }

    /// Solves the energy-adjoint problem `(iλ − 𝒜_h)^† U = (h₁, h₂)`.
    pub fn solve_adjoint(&self, lambda: f64, h1: &[C], h2: &[C]) -> Result<(Vec<C>, Vec<C>)> {
        check_len(self.dim(), h1, h2)?;
        let fac = self.factor(lambda)?;
        Ok(self.apply_adjoint_inverse(&fac, h1, h2))
    }

    /// Energy-norm `‖(iλ − 𝒜_h)⁻¹‖`: the square root of the largest
    /// eigenvalue of `R^†R`, found by Lanczos with full reorthogonalization in
    /// the energy inner product. Plain power iteration stalls between peaks,
    /// where the two leading singular values nearly coincide.
    pub fn operator_norm(&self, lambda: f64) -> Result<NormEstimate> {
        const MIN_STEPS: usize = 3;
        let n = self.dim();
        let max_steps = LANCZOS_STEPS.min(2 * n);
        let fac = self.factor(lambda)?;
        let mut q: (Vec<C>, Vec<C>) = (
            (0..n).map(|i| C::new(start_entry(i), start_entry(i + 7 * n))).collect(),
            (0..n)
                .map(|i| C::new(start_entry(i + 3 * n), start_entry(i + 5 * n)))
                .collect(),
        );
        let s = self.norm(&q.0, &q.1);
        scale(&mut q, 1.0 / s);
        let mut basis: Vec<(Vec<C>, Vec<C>)> = Vec::with_capacity(max_steps);
        let mut alphas: Vec<f64> = Vec::with_capacity(max_steps);
        let mut betas: Vec<f64> = Vec::with_capacity(max_steps);
        let mut estimate = 0.0;
        for step in 1..=max_steps {
            let y = self.apply_inverse(&fac, &q.0, &q.1);
            let mut w = self.apply_adjoint_inverse(&fac, &y.0, &y.1);
            if !w.0.iter().chain(&w.1).all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::Singular("resolvent solve overflowed"));
            }
            let a = self.inner((&w.0, &w.1), (&q.0, &q.1)).re;
            basis.push(q.clone());
            alphas.push(a);
            // full reorthogonalization, twice for stability
            for _ in 0..2 {
                for b in &basis {
                    let c = self.inner((&w.0, &w.1), (&b.0, &b.1));
                    for (wi, bi) in w.0.iter_mut().zip(&b.0).chain(w.1.iter_mut().zip(&b.1)) {
                        *wi -= c * bi;
                    }
                }
            }
            let theta = largest_eigenvalue(&alphas, &betas);
            let value = theta.max(0.0).sqrt();
            let change = (value - estimate).abs();
            estimate = value;
            let beta = self.norm(&w.0, &w.1);
            let exhausted = beta <= 1e-14 * theta.abs().max(f64::MIN_POSITIVE);
            if exhausted || (step >= MIN_STEPS && change <= NORM_TOL * value) {
                return Ok(NormEstimate {
                    lambda,
                    value,
                    iterations: step,
                    flag: fac.flag,
                });
            }
            betas.push(beta);
            scale(&mut w, 1.0 / beta);
            q = w;
        }
        Ok(NormEstimate {
            lambda,
            value: estimate,
            iterations: max_steps,
            flag: fac.flag.worst(ScanFlag::NotConverged),
        })
    }
}

/// Largest Krylov dimension for one norm estimate.
const LANCZOS_STEPS: usize = 80;

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `alphas` and off-diagonal `betas`, by Sturm bisection.
fn largest_eigenvalue(alphas: &[f64], betas: &[f64]) -> f64 {
    let k = alphas.len();
    let t = SymTridiag {
        diag: alphas.to_vec(),
        off: betas[..k - 1].to_vec(),
    };
    let mut id = SymTridiag::zeros(k);
    id.diag.iter_mut().for_each(|d| *d = 1.0);
    let radius = |i: usize| {
        let mut r = 0.0;
        if i > 0 {
            r += t.off[i - 1].abs();
        }
        if i + 1 < k {
            r += t.off[i].abs();
        }
        r
    };
    let mut lo = (0..k).map(|i| t.diag[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..k).map(|i| t.diag[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if t.sturm_count(&id, mid) >= k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn check_len(n: usize, a: &[C], b: &[C]) -> Result<()> {
    if a.len() != n || b.len() != n {
        return Err(Error::InvalidInput("state vector does not match the matrices"));
    }
    Ok(())
}

fn scale(x: &mut (Vec<C>, Vec<C>), s: f64) {
    x.0.iter_mut().chain(x.1.iter_mut()).for_each(|z| *z *= s);
}

/// Deterministic, sign-varying start vector entries.
fn start_entry(i: usize) -> f64 {
    let h = (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17);
    (h >> 11) as f64 / (1u64 << 53) as f64 - 0.5
}

/// Operator-norm estimate at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub lambda: f64,
    pub value: f64,
    pub iterations: usize,
    pub flag: ScanFlag,
}

pub fn solve_resolvent(mats: &OperatorMatrices, lambda: f64, f: &[C], g: &[C]) -> Result<ResolventSolution> {
    Resolvent::new(mats)?.solve(lambda, f, g)
}

pub fn resolvent_norm(mats: &OperatorMatrices, lambda: f64) -> Result<NormEstimate> {
    Resolvent::new(mats)?.operator_norm(lambda)
}

/// One sample of a scan along `iℝ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRecord {
    pub lambda: f64,
    pub norm: f64,
    pub flag: ScanFlag,
}

impl ScanRecord {
    pub fn norm_over_lambda(&self) -> f64 {
        self.norm / self.lambda.abs()
    }

    pub fn norm_over_lambda_sq(&self) -> f64 {
        self.norm / (self.lambda * self.lambda)
    }
}

impl From<NormEstimate> for ScanRecord {
    fn from(e: NormEstimate) -> Self {
        Self {
            lambda: e.lambda,
            norm: e.value,
            flag: e.flag,
        }
    }
}

/// Sample points of a scan: a uniform grid of spacing `resolution` on
/// `[lo, hi]`, plus a grid eight times finer within one base step of every
/// predicted peak location. Sorted and deduplicated.
pub fn scan_grid(range: (f64, f64), resolution: f64, predicted: &[f64]) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::InvalidInput("scan range must be finite and increasing"));
    }
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(Error::InvalidInput("scan resolution must be positive"));
    }
    let count = ((hi - lo) / resolution).ceil() as usize;
    let mut pts: Vec<f64> = (0..=count).map(|k| (lo + k as f64 * resolution).min(hi)).collect();
    let fine = resolution / 8.0;
    for &b in predicted.iter().filter(|b| **b >= lo && **b <= hi) {
        for k in -8i32..=8 {
            let x = b + k as f64 * fine;
            if x >= lo && x <= hi {
                pts.push(x);
            }
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    Ok(pts)
}

/// Sequential scan over [`scan_grid`], with every interior local maximum
/// refined by golden-section search between its neighbours.
pub fn scan(mats: &OperatorMatrices, range: (f64, f64), resolution: f64, predicted: &[f64]) -> Result<Vec<ScanRecord>> {
    let res = Resolvent::new(mats)?;
    let pts = scan_grid(range, resolution, predicted)?;
    let mut records = Vec::with_capacity(pts.len());
    for l in pts {
        records.push(ScanRecord::from(res.operator_norm(l)?));
    }
    let mut refined = Vec::new();
    for i in local_maxima(&records) {
        refined.push(golden_max(&res, records[i - 1].lambda, records[i + 1].lambda, 60)?);
    }
    Ok(merge_records(records, refined))
}

/// Indices of interior samples strictly above both neighbours.
pub fn local_maxima(records: &[ScanRecord]) -> Vec<usize> {
    (1..records.len().saturating_sub(1))
        .filter(|&i| records[i].norm > records[i - 1].norm && records[i].norm > records[i + 1].norm)
        .collect()
}

/// Inserts extra records and keeps the list sorted by `λ`.
pub fn merge_records(mut records: Vec<ScanRecord>, extra: Vec<ScanRecord>) -> Vec<ScanRecord> {
    records.extend(extra);
    records.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).expect("finite"));
    records.dedup_by(|a, b| a.lambda == b.lambda);
    records
}

/// Golden-section maximization of the resolvent norm on `[a, b]`.
pub fn golden_max(res: &Resolvent<'_>, a: f64, b: f64, iterations: usize) -> Result<ScanRecord> {
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut a, mut b) = (a, b);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = res.operator_norm(c)?;
    let mut fd = res.operator_norm(d)?;
    for _ in 0..iterations {
        if (b - a) <= 4.0 * f64::EPSILON * b.abs().max(1.0) {
            break;
        }
        if fc.value >= fd.value {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = res.operator_norm(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = res.operator_norm(d)?;
        }
    }
    Ok(ScanRecord::from(if fc.value >= fd.value { fc } else { fd }))
}

/// Resolvent peak attached to a damped eigenvalue `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub eigenvalue: C,
    pub record: ScanRecord,
}

/// Maximizes the norm over `λ` within `20|Re s|` (at least a relative `1e-9`)
/// of `Im s`. Near an isolated eigenvalue `‖R(iλ)‖ ≈ κ/|iλ − s|`, so the peak
/// sits at `λ = Im s` with height about `κ/|Re s|`.
pub fn peak_near_eigenvalue(res: &Resolvent<'_>, eig: &DampedEigen) -> Result<Peak> {
    let s = eig.value;
    let w = (20.0 * s.re.abs()).max(1e-9 * s.im.abs());
    let record = golden_max(res, s.im - w, s.im + w, 80)?;
    let center = ScanRecord::from(res.operator_norm(s.im)?);
    let record = if center.norm > record.norm { center } else { record };
    Ok(Peak { eigenvalue: s, record })
}

/// Log–log slopes of `norm/λ` and `norm/λ²` against `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub slope_over_lambda: f64,
    pub slope_over_lambda_sq: f64,
    pub points: usize,
}

pub fn growth_fit(records: &[ScanRecord]) -> Result<GrowthFit> {
    let pts: Vec<&ScanRecord> = records.iter().filter(|r| r.lambda > 0.0 && r.norm > 0.0).collect();
    let xs: Vec<f64> = pts.iter().map(|r| r.lambda).collect();
    let y1: Vec<f64> = pts.iter().map(|r| r.norm_over_lambda()).collect();
    let y2: Vec<f64> = pts.iter().map(|r| r.norm_over_lambda_sq()).collect();
    Ok(GrowthFit {
        slope_over_lambda: loglog_fit(&xs, &y1)?.slope,
        slope_over_lambda_sq: loglog_fit(&xs, &y2)?.slope,
        points: pts.len(),
    })
}

/// Running maximum `Λ ↦ max_{λ ≤ Λ} norm(λ)/λ²` over a sorted scan.
pub fn running_max_normalized(records: &[ScanRecord]) -> Vec<(f64, f64)> {
    let mut best = 0.0f64;
    records
        .iter()
        .filter(|r| r.lambda > 0.0)
        .map(|r| {
            best = best.max(r.norm_over_lambda_sq());
            (r.lambda, best)
        })
        .collect()
}

/// Minimum over the records of `1/norm`, the distance-to-singularity proxy:
/// `‖(iλ − 𝒜)⁻¹‖ ≥ 1/dist(iλ, σ(𝒜))`.
pub fn min_inverse_norm(records: &[ScanRecord]) -> f64 {
    records.iter().map(|r| 1.0 / r.norm).fold(f64::INFINITY, f64::min)
}

/// `(0, Ψ)` as a state pair, the load used to excite one mode.
pub fn mode_load(psi: &[f64]) -> (Vec<C>, Vec<C>) {
    (
        alloc::vec![C::zero(); psi.len()],
        psi.iter().map(|&p| C::new(p, 0.0)).collect(),
    )
}
