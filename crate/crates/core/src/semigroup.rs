//! Time stepping of the damped system, energy bookkeeping and decay fits.
//!
//! The implicit midpoint rule
//!
//! ```text
//! (M + dt²/4 K + dt/2 D) v⁺ = (M − dt²/4 K − dt/2 D) v − dt K u,    u⁺ = u + dt/2 (v + v⁺)
//! ```
//!
//! conserves `E = ½(uᵀKu + vᵀMv)` when `D = 0` and otherwise loses exactly
//! `dt·γ·((v₀ + v₀⁺)/2)²` per step. The trace records two dissipation
//! integrals: the trapezoidal quadrature of the sampled boundary velocity,
//! which approximates `∫|w_t(0,s)|² ds` to `O(dt²)`, and the midpoint sum that
//! the scheme dissipates exactly.

use alloc::vec::Vec;
use core::f64::consts::E as EULER;

#[allow(unused_imports)] // float math is inherent in core on recent toolchains
use num_traits::Float;

use crate::discretize::{Mesh, OperatorMatrices};
use crate::fit::loglog_fit;
use crate::linalg::{Ldlt, SymTridiag};
use crate::spectrum::{DegeneracyParams, EigenPair};
use crate::{Error, Result};

/// Nodal displacement and velocity on the free nodes; `u(1) = 0` is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl WaveState {
    pub fn zero(dim: usize) -> Self {
        Self {
            t: 0.0,
            u: alloc::vec![0.0; dim],
            v: alloc::vec![0.0; dim],
        }
    }

    /// Displacement on every node including the Dirichlet one.
    pub fn displacement_with_boundary(&self) -> Vec<f64> {
        let mut out = self.u.clone();
        out.push(0.0);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_finite())
    }
}

/// Initial profiles. All start at rest (`v = 0`), so they satisfy the
/// feedback condition `(x^α u′)(0) = v(0) = 0` of the generator's domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialKind {
    Zero,
    /// The `n`-th undamped eigenfunction.
    Eigenmode(usize),
    /// `C^∞` bump supported in `(0.2, 0.8)` with peak value 1.
    Bump,
    /// `(1 − x²)²`.
    Polynomial,
}

impl InitialKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Self::Zero),
            "bump" => Ok(Self::Bump),
            "polynomial" => Ok(Self::Polynomial),
            _ => match s.strip_prefix("eigenmode") {
                Some(rest) => {
                    let n = rest.trim_start_matches([':', '(']).trim_end_matches(')');
                    n.parse::<usize>()
                        .ok()
                        .filter(|&n| n >= 1)
                        .map(Self::Eigenmode)
                        .ok_or(Error::InvalidInput("eigenmode index must be a positive integer"))
                }
                None => Err(Error::InvalidInput("unknown initial data kind")),
            },
        }
    }
}

fn bump(x: f64) -> f64 {
    let (a, b) = (0.2, 0.8);
    if x <= a || x >= b {
        return 0.0;
    }
    let s = (x - a) / (b - a);
    EULER.powi(4) * (-1.0 / (s * (1.0 - s))).exp()
}

pub fn initial_data(kind: InitialKind, params: &DegeneracyParams, mesh: &Mesh) -> Result<WaveState> {
    let xs = mesh.free_nodes();
    let u: Vec<f64> = match kind {
        InitialKind::Zero => alloc::vec![0.0; xs.len()],
        InitialKind::Bump => xs.iter().map(|&x| bump(x)).collect(),
        InitialKind::Polynomial => xs.iter().map(|&x| (1.0 - x * x).powi(2)).collect(),
        InitialKind::Eigenmode(n) => {
            let pair = EigenPair::new(params, n)?;
            xs.iter().map(|&x| pair.eval(x)).collect::<Result<_>>()?
        }
    };
    Ok(WaveState {
        t: 0.0,
        v: alloc::vec![0.0; u.len()],
        u,
    })
}

/// Pre-factored implicit midpoint step for a fixed `dt`.
#[derive(Debug, Clone)]
pub struct MidpointStepper<'a> {
    mats: &'a OperatorMatrices,
    dt: f64,
    lhs: Ldlt,
    rhs_op: SymTridiag,
}

impl<'a> MidpointStepper<'a> {
    pub fn new(mats: &'a OperatorMatrices, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidInput("time step must be positive"));
        }
        let q = 0.25 * dt * dt;
        let mut lhs = mats.mass.axpy(q, &mats.stiffness);
        let mut rhs_op = mats.mass.axpy(-q, &mats.stiffness);
        lhs.diag[0] += 0.5 * dt * mats.damping;
        rhs_op.diag[0] -= 0.5 * dt * mats.damping;
        Ok(Self {
            mats,
            dt,
            lhs: lhs.ldlt()?,
            rhs_op,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `state` by one step in place.
    pub fn step(&self, state: &mut WaveState) {
        let dt = self.dt;
        let mut rhs = self.rhs_op.apply(&state.v);
        let ku = self.mats.stiffness.apply(&state.u);
        rhs.iter_mut().zip(&ku).for_each(|(r, k)| *r -= dt * k);
        self.lhs.solve_in_place(&mut rhs);
        for ((u, v), vn) in state.u.iter_mut().zip(&state.v).zip(&rhs) {
            *u += 0.5 * dt * (v + vn);
        }
        state.v = rhs;
        state.t += dt;
    }

    /// Energy the scheme removes in a step from velocity `v0` to `v0_next` at node 0.
    pub fn step_dissipation(&self, v0: f64, v0_next: f64) -> f64 {
        let m = 0.5 * (v0 + v0_next);
        self.dt * self.mats.damping * m * m
    }
}

/// `½(uᵀKu + vᵀMv)`.
pub fn energy(mats: &OperatorMatrices, state: &WaveState) -> f64 {
    0.5 * (mats.stiffness.quadratic_form(&state.u) + mats.mass.quadratic_form(&state.v))
}

/// One step of size `dt` from `state`.
pub fn step(mats: &OperatorMatrices, state: &WaveState, dt: f64) -> Result<WaveState> {
    let stepper = MidpointStepper::new(mats, dt)?;
    let mut next = state.clone();
    stepper.step(&mut next);
    if !next.is_finite() {
        return Err(Error::Singular("time step produced non-finite values"));
    }
    Ok(next)
}

/// Sampled history of a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTrace {
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    /// Trapezoidal `γ∫₀ᵗ v₀(s)² ds` over every step.
    pub cumulative_dissipation: Vec<f64>,
    /// Exact discrete dissipation `Σ dt γ ((v₀ⁿ + v₀ⁿ⁺¹)/2)²`.
    pub midpoint_dissipation: Vec<f64>,
    pub boundary_velocity: Vec<f64>,
    /// Largest single-step energy increase over the whole run (≤ 0 when monotone).
    pub max_step_increase: f64,
    pub final_state: WaveState,
}

impl EnergyTrace {
    pub fn initial_energy(&self) -> f64 {
        self.energies[0]
    }

    /// `E(0) − E(T) − ∫₀ᵀ γ v₀²` with the trapezoidal integral.
    pub fn identity_residual(&self) -> f64 {
        let last = self.energies.len() - 1;
        self.energies[0] - self.energies[last] - self.cumulative_dissipation[last]
    }

    /// Same with the scheme's own midpoint dissipation; zero up to rounding.
    pub fn midpoint_identity_residual(&self) -> f64 {
        let last = self.energies.len() - 1;
        self.energies[0] - self.energies[last] - self.midpoint_dissipation[last]
    }

    /// True when no sample exceeds its predecessor by more than `tol·E(0)`.
    pub fn is_monotone(&self, tol: f64) -> bool {
        let e0 = self.energies[0];
        self.energies.windows(2).all(|w| w[1] <= w[0] + tol * e0)
    }
}

/// Integrates from `state` up to `t + horizon` with step `dt`, recording every
/// `sample_every`-th step (and always the last). `horizon/dt` must be an
/// integer up to rounding.
pub fn simulate(
    mats: &OperatorMatrices,
    state: &WaveState,
    horizon: f64,
    dt: f64,
    sample_every: usize,
) -> Result<EnergyTrace> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::InvalidInput("horizon must be positive"));
    }
    if sample_every == 0 {
        return Err(Error::InvalidInput("sampling cadence must be positive"));
    }
    if state.u.len() != mats.dim() || state.v.len() != mats.dim() {
        return Err(Error::InvalidInput("state does not match the matrices"));
    }
    let steps_f = (horizon / dt).round();
    if !(steps_f >= 1.0) || (steps_f * dt - horizon).abs() > 1e-9 * horizon {
        return Err(Error::InvalidInput("horizon must be a whole number of time steps"));
    }
    let steps = steps_f as usize;
    let stepper = MidpointStepper::new(mats, dt)?;
    let mut s = state.clone();
    let t0 = s.t;
    let e_start = energy(mats, &s);
    let mut trace = EnergyTrace {
        times: alloc::vec![t0],
        energies: alloc::vec![e_start],
        cumulative_dissipation: alloc::vec![0.0],
        midpoint_dissipation: alloc::vec![0.0],
        boundary_velocity: alloc::vec![s.v[0]],
        max_step_increase: f64::NEG_INFINITY,
        final_state: s.clone(),
    };
    let gain = mats.damping;
    let mut trap = 0.0;
    let mut mid = 0.0;
    let mut e_prev = e_start;
    for k in 1..=steps {
        let v0 = s.v[0];
        stepper.step(&mut s);
        let v1 = s.v[0];
        // accumulate the time exactly so long runs do not drift
        s.t = t0 + k as f64 * dt;
        trap += 0.5 * dt * gain * (v0 * v0 + v1 * v1);
        mid += stepper.step_dissipation(v0, v1);
        let e = energy(mats, &s);
        trace.max_step_increase = trace.max_step_increase.max(e - e_prev);
        e_prev = e;
        if !e.is_finite() {
            return Err(Error::Singular("simulation produced non-finite energy"));
        }
        if k % sample_every == 0 || k == steps {
            trace.times.push(s.t);
            trace.energies.push(e);
            trace.cumulative_dissipation.push(trap);
            trace.midpoint_dissipation.push(mid);
            trace.boundary_velocity.push(v1);
        }
    }
    trace.final_state = s;
    Ok(trace)
}

/// Least-squares power law `E ≈ C t^{−p}` on a time window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub p: f64,
    pub window: (f64, f64),
    /// RMS residual of the fit in `ln E`.
    pub residual: f64,
    pub samples: usize,
}

/// Fits `ln E = c − p ln t` on samples with `t ∈ [window.0, window.1]`.
pub fn fit_decay_exponent(trace: &EnergyTrace, window: (f64, f64)) -> Result<DecayFit> {
    if !(window.0 > 0.0 && window.1 > window.0) {
        return Err(Error::InvalidInput("decay window must satisfy 0 < t0 < t1"));
    }
    let (ts, es): (Vec<f64>, Vec<f64>) = trace
        .times
        .iter()
        .zip(&trace.energies)
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .map(|(t, e)| (*t, *e))
        .unzip();
    if ts.len() < 2 {
        return Err(Error::InvalidInput("decay window holds fewer than two samples"));
    }
    if es.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Domain("nonpositive energy in the decay window"));
    }
    let f = loglog_fit(&ts, &es)?;
    Ok(DecayFit {
        p: -f.slope,
        window,
        residual: f.rms,
        samples: ts.len(),
    })
}

/// Minimum number of samples in a default fitting window.
pub const MIN_TAIL_SAMPLES: usize = 30;

/// The last decade `[T/10, T]` of the trace.
pub fn tail_window(trace: &EnergyTrace) -> Result<(f64, f64)> {
    let t_end = *trace.times.last().expect("traces are never empty");
    let window = (0.1 * t_end, t_end);
    let n = trace.times.iter().filter(|t| **t >= window.0).count();
    if n < MIN_TAIL_SAMPLES {
        return Err(Error::InvalidInput("tail window needs at least 30 samples"));
    }
    Ok(window)
}

/// The tail window split at its geometric midpoint, for a stability check of
/// the fitted exponent.
pub fn split_tail_windows(trace: &EnergyTrace) -> Result<[(f64, f64); 2]> {
    let (a, b) = tail_window(trace)?;
    let m = (a * b).sqrt();
    Ok([(a, m), (m, b)])
}
