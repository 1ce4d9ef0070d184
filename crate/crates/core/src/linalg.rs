//! Tridiagonal kernels.
//!
//! Every matrix the discretization produces is tridiagonal, so the library
//! never needs a general sparse or dense solver. Real symmetric pencils get
//! an `LDLᵀ` factorization and a Sturm count; complex matrices (resolvent
//! solves, inverse iteration on the quadratic pencil) get an LU with partial
//! pivoting in the style of LAPACK `?gttrf`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // float math is inherent in core on recent toolchains
use num_traits::Float;
use num_traits::Zero;

use crate::{Error, Result};

type C = Complex64;

/// Symmetric real tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i+1`.
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn zeros(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            off: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.len()];
        self.matvec(x, &mut y);
        y
    }

    pub fn apply_complex(&self, x: &[C]) -> Vec<C> {
        let n = self.len();
        let mut y = vec![C::zero(); n];
        for i in 0..n {
            let mut s = x[i] * self.diag[i];
            if i > 0 {
                s += x[i - 1] * self.off[i - 1];
            }
            if i + 1 < n {
                s += x[i + 1] * self.off[i];
            }
            y[i] = s;
        }
        y
    }

    /// `xᵀ A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let n = self.len();
        let mut s = 0.0;
        for i in 0..n {
            s += self.diag[i] * x[i] * x[i];
            if i + 1 < n {
                s += 2.0 * self.off[i] * x[i] * x[i + 1];
            }
        }
        s
    }

    /// `x* A x` for complex `x` (real because `A` is real symmetric).
    pub fn hermitian_form(&self, x: &[C]) -> f64 {
        let n = self.len();
        let mut s = 0.0;
        for i in 0..n {
            s += self.diag[i] * x[i].norm_sqr();
            if i + 1 < n {
                s += 2.0 * self.off[i] * (x[i].conj() * x[i + 1]).re;
            }
        }
        s
    }

    /// `self + c·other`, entrywise.
    pub fn axpy(&self, c: f64, other: &SymTridiag) -> SymTridiag {
        SymTridiag {
            diag: self.diag.iter().zip(&other.diag).map(|(a, b)| a + c * b).collect(),
            off: self.off.iter().zip(&other.off).map(|(a, b)| a + c * b).collect(),
        }
    }

    /// Number of eigenvalues of the pencil `(self, m)` strictly below `sigma`,
    /// from the inertia of `self − σ m` (Sylvester). `m` must be positive
    /// definite.
    pub fn sturm_count(&self, m: &SymTridiag, sigma: f64) -> usize {
        let n = self.len();
        let mut count = 0;
        let mut d_prev = 1.0;
        let mut e_prev = 0.0;
        for i in 0..n {
            let a = self.diag[i] - sigma * m.diag[i];
            let mut d = a - if i > 0 { e_prev * e_prev / d_prev } else { 0.0 };
            if d == 0.0 {
                d = -f64::EPSILON * (a.abs() + 1.0);
            }
            if d < 0.0 {
                count += 1;
            }
            if i + 1 < n {
                e_prev = self.off[i] - sigma * m.off[i];
            }
            d_prev = d;
        }
        count
    }

    /// `LDLᵀ` factorization without pivoting. Fails on a zero pivot.
    pub fn ldlt(&self) -> Result<Ldlt> {
        let n = self.len();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        for i in 0..n {
            let mut di = self.diag[i];
            if i > 0 {
                di -= l[i - 1] * l[i - 1] * d[i - 1];
            }
            if di == 0.0 || !di.is_finite() {
                return Err(Error::Singular("zero pivot in LDLᵀ"));
            }
            d[i] = di;
            if i + 1 < n {
                l[i] = self.off[i] / di;
            }
        }
        Ok(Ldlt { d, l })
    }
}

/// Result of [`SymTridiag::ldlt`].
#[derive(Debug, Clone)]
pub struct Ldlt {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl Ldlt {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 1..n {
            b[i] -= self.l[i - 1] * b[i - 1];
        }
        for (bi, di) in b.iter_mut().zip(&self.d) {
            *bi /= di;
        }
        for i in (0..n.saturating_sub(1)).rev() {
            b[i] -= self.l[i] * b[i + 1];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Count of negative pivots (inertia of the factored matrix).
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&d| d < 0.0).count()
    }
}

/// General complex tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTridiag {
    /// `sub[i]` is entry `(i+1, i)`.
    pub sub: Vec<C>,
    pub diag: Vec<C>,
    /// `sup[i]` is entry `(i, i+1)`.
    pub sup: Vec<C>,
}

impl ComplexTridiag {
    /// `a·K + b·M + c·D` for real symmetric `K`, `M` and `D = e₀e₀ᵀ`.
    pub fn combine(a: C, k: &SymTridiag, b: C, m: &SymTridiag, c: C) -> Self {
        let n = k.len();
        let mut diag: Vec<C> = (0..n).map(|i| a * k.diag[i] + b * m.diag[i]).collect();
        if n > 0 {
            diag[0] += c;
        }
        let off: Vec<C> = (0..n.saturating_sub(1)).map(|i| a * k.off[i] + b * m.off[i]).collect();
        Self {
            sub: off.clone(),
            diag,
            sup: off,
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[C]) -> Vec<C> {
        let n = self.len();
        let mut y = vec![C::zero(); n];
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.sup[i] * x[i + 1];
            }
            y[i] = s;
        }
        y
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            sub: self.sup.iter().map(|z| z.conj()).collect(),
            diag: self.diag.iter().map(|z| z.conj()).collect(),
            sup: self.sub.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|j| {
                let mut s = self.diag[j].norm();
                if j > 0 {
                    s += self.sup[j - 1].norm();
                }
                if j + 1 < n {
                    s += self.sub[j].norm();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// LU factorization with partial pivoting.
    ///
    /// An exactly zero pivot is an error; a tiny pivot is accepted and left
    /// for [`ComplexTridiag::condition_estimate`] to judge.
    pub fn factor(&self) -> Result<TridiagLu> {
        let n = self.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty matrix"));
        }
        let mut d = self.diag.clone();
        let mut du = self.sup.clone();
        let mut dl = self.sub.clone();
        let mut du2 = vec![C::zero(); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].l1_norm() >= dl[i].l1_norm() {
                if d[i].is_zero() {
                    return Err(Error::Singular("zero pivot in tridiagonal LU"));
                }
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let t = du[i];
                du[i] = d[i + 1];
                d[i + 1] = t - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d[n - 1].is_zero() {
            return Err(Error::Singular("zero pivot in tridiagonal LU"));
        }
        if d.iter()
            .chain(&du)
            .chain(&dl)
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Singular("non-finite entry in tridiagonal LU"));
        }
        Ok(TridiagLu {
            dl,
            d,
            du,
            du2,
            swapped,
        })
    }

    /// Estimate of the 1-norm condition number `‖A‖₁‖A⁻¹‖₁` (Hager's method).
    pub fn condition_estimate(&self, lu: &TridiagLu) -> Result<f64> {
        let adj = self.adjoint().factor()?;
        Ok(self.norm1() * inverse_norm1_estimate(lu, &adj))
    }
}

/// Factors from [`ComplexTridiag::factor`].
#[derive(Debug, Clone)]
pub struct TridiagLu {
    dl: Vec<C>,
    d: Vec<C>,
    du: Vec<C>,
    du2: Vec<C>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn solve_in_place(&self, b: &mut [C]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            let t = b[i];
            b[i + 1] -= self.dl[i] * t;
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }

    pub fn solve(&self, b: &[C]) -> Vec<C> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

fn inverse_norm1_estimate(lu: &TridiagLu, adj: &TridiagLu) -> f64 {
    let n = lu.len();
    let mut x = vec![C::new(1.0 / n as f64, 0.0); n];
    let mut est = 0.0;
    for _ in 0..5 {
        let y = lu.solve(&x);
        let norm: f64 = y.iter().map(|z| z.norm()).sum();
        if !norm.is_finite() {
            return f64::INFINITY;
        }
        if norm <= est {
            break;
        }
        est = norm;
        let xi: Vec<C> = y
            .iter()
            .map(|z| if z.norm() > 0.0 { z / z.norm() } else { C::new(1.0, 0.0) })
            .collect();
        let z = adj.solve(&xi);
        let (jmax, zmax) = z
            .iter()
            .enumerate()
            .map(|(j, v)| (j, v.norm()))
            .fold((0, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
        if zmax <= ztx {
            break;
        }
        x = vec![C::zero(); n];
        x[jmax] = C::new(1.0, 0.0);
    }
    // Higham's alternative lower bound guards against adversarial cases.
    let alt: Vec<C> = (0..n)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            C::new(s * (1.0 + i as f64 / (n as f64 - 1.0).max(1.0)), 0.0)
        })
        .collect();
    let ya = lu.solve(&alt);
    let alt_est = 2.0 * ya.iter().map(|z| z.norm()).sum::<f64>() / (3.0 * n as f64);
    est.max(alt_est)
}

/// `Σ conj(a_i) b_i`.
pub fn cdot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn cnorm(a: &[C]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
