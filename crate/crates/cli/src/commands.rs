//! The four subcommands. Each writes its files into the output directory and
//! returns the quality flags it raised.

use std::path::PathBuf;

use anyhow::{Context, Result};
use degwave_core::discretize::{assemble, build_mesh, damped_spectrum, pencil_eigenvalues, OperatorMatrices};
use degwave_core::linalg::SymTridiag;
use degwave_core::resolvent::{
    golden_max, growth_fit, local_maxima, merge_records, min_inverse_norm, peak_near_eigenvalue, scan_grid, GrowthFit,
    Peak, Resolvent, ScanRecord,
};
use degwave_core::semigroup::{fit_decay_exponent, initial_data, simulate, split_tail_windows, tail_window};
use degwave_core::spectrum::{degeneracy_params, eigen_frequency, eigen_pairs};
use degwave_core::transfer::{
    boundedness_fit, c_nu_probe, cutoff_family, probe_slope, ray_lambdas, small_argument_points, transfer_h_with,
    transfer_sample, vertical_lambdas, BesselArg, CoefficientRule, Regime, TransferOptions, TransferSample,
};
use degwave_core::{ComplexValue as C, DegeneracyParams};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{fmt_f64, Cell, OutputDir, Table};
use crate::svg::{LogLogPlot, Series};

/// Per-step energy increase tolerated before a run is flagged, relative to `E(0)`.
pub const MONOTONE_TOL: f64 = 1e-12;
/// Dissipation-identity residual tolerated before a run is flagged, relative to `E(0)`.
pub const IDENTITY_TOL: f64 = 1e-6;
/// Target number of rows in `energy.csv`.
pub const ENERGY_ROWS: usize = 5000;
/// Cutoffs of the cutoff-family diagnostic.
pub const FAMILY_CUTOFFS: [f64; 3] = [1e-4, 1e-6, 1e-8];

pub const SPECTRUM_HEADER: [&str; 6] = ["n", "j_nu_n", "beta_n", "mu_n", "discrete_mu_n", "rel_err"];
pub const ENERGY_HEADER: [&str; 4] = ["t", "energy", "cumulative_dissipation", "boundary_velocity"];
pub const SCAN_HEADER: [&str; 5] = ["lambda", "norm", "norm_over_lambda", "norm_over_lambda_sq", "flag"];
pub const TRANSFER_HEADER: [&str; 9] = [
    "re_lambda",
    "im_lambda",
    "abs_lambda",
    "arg_lambda",
    "re_H",
    "im_H",
    "abs_H",
    "abs_c_nu_probe",
    "verdict",
];

/// What a finished command produced.
#[derive(Debug, Default)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub flags: Vec<String>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.flags.is_empty() {
            0
        } else {
            2
        }
    }
}

fn setup(cfg: &RunConfig) -> Result<(DegeneracyParams, OperatorMatrices)> {
    let p = degeneracy_params(cfg.alpha)?;
    let mesh = build_mesh(&p, cfg.grid, None)?;
    let mats = assemble(&mesh, &p);
    Ok((p, mats))
}

fn num_or_null(v: Option<f64>) -> Value {
    v.map(Value::from).unwrap_or(Value::Null)
}

fn coo_text(a: &SymTridiag) -> String {
    let e = a.coo_entries();
    let mut s = format!("# rows cols nnz: {} {} {}\n", a.len(), a.len(), e.len());
    for (i, j, v) in e {
        s.push_str(&format!("{i} {j} {}\n", fmt_f64(v)));
    }
    s
}

/// `spectrum.csv` (continuum against discrete eigenvalues) and
/// `damped_spectrum.csv`; with `export_coo`, the assembled matrices.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Report> {
    let (p, mats) = setup(cfg)?;
    let mut out = OutputDir::create(&cfg.out, cfg.json)?;
    let mut flags = Vec::new();
    let m = cfg.modes.min(mats.dim());
    let discrete = pencil_eigenvalues(&mats, 0..m)?;
    let pairs = eigen_pairs(&p, m)?;
    let mut t = Table::new(&SPECTRUM_HEADER);
    for (pair, d) in pairs.iter().zip(&discrete) {
        t.push(vec![
            pair.n.into(),
            pair.zero.into(),
            pair.beta.into(),
            pair.mu.into(),
            (*d).into(),
            ((d - pair.mu).abs() / pair.mu).into(),
        ]);
    }
    out.write_table("spectrum", &t)?;

    let damped = damped_spectrum(&mats, 0..m)?;
    let mut t = Table::new(&["n", "re_s", "im_s", "residual", "iterations"]);
    for (i, e) in damped.eigen.iter().enumerate() {
        t.push(vec![
            (i + 1).into(),
            e.value.re.into(),
            e.value.im.into(),
            e.residual.into(),
            e.iterations.into(),
        ]);
    }
    out.write_table("damped_spectrum", &t)?;
    if damped.duplicates {
        flags.push("damped-duplicates".into());
    }
    // NaN counts as a violation
    if damped.eigen.iter().any(|e| e.value.re >= 0.0 || e.value.re.is_nan()) {
        flags.push("eigenvalue-on-imaginary-axis".into());
    }

    if cfg.export_coo {
        out.write_bytes("stiffness.coo", coo_text(&mats.stiffness).as_bytes())?;
        out.write_bytes("mass.coo", coo_text(&mats.mass).as_bytes())?;
        let d = format!(
            "# rows cols nnz: {0} {0} 1\n0 0 {1}\n",
            mats.dim(),
            fmt_f64(mats.damping)
        );
        out.write_bytes("damping.coo", d.as_bytes())?;
    }
    Ok(Report {
        files: out.written().to_vec(),
        flags,
    })
}

/// `energy.csv` and `decay_fit.json`.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<Report> {
    let p = degeneracy_params(cfg.alpha)?;
    let mesh = build_mesh(&p, cfg.grid, None)?;
    let mats = assemble(&mesh, &p);
    let state = initial_data(cfg.initial, &p, &mesh)?;
    let steps = (cfg.horizon / cfg.dt).round().max(1.0) as usize;
    let trace = simulate(&mats, &state, cfg.horizon, cfg.dt, (steps / ENERGY_ROWS).max(1))?;
    let mut out = OutputDir::create(&cfg.out, cfg.json)?;
    let mut flags = Vec::new();

    let mut t = Table::new(&ENERGY_HEADER);
    for i in 0..trace.times.len() {
        t.push(vec![
            trace.times[i].into(),
            trace.energies[i].into(),
            trace.cumulative_dissipation[i].into(),
            trace.boundary_velocity[i].into(),
        ]);
    }
    out.write_table("energy", &t)?;

    let e0 = trace.initial_energy();
    let residual = trace.identity_residual();
    let mut doc = json!({
        "p": null,
        "window": null,
        "residual": null,
        "dissipation_identity_residual": residual,
        "midpoint_identity_residual": trace.midpoint_identity_residual(),
        "initial_energy": e0,
        "final_energy": trace.energies.last().copied(),
        "max_step_increase": trace.max_step_increase,
        "window_exponents": null,
    });
    if e0 == 0.0 {
        flags.push("no-decay-data".to_string());
    } else {
        match tail_window(&trace) {
            Ok(window) => {
                let fit = fit_decay_exponent(&trace, window)?;
                let halves = split_tail_windows(&trace)?;
                let ps: Vec<Value> = halves
                    .iter()
                    .map(|w| num_or_null(fit_decay_exponent(&trace, *w).ok().map(|f| f.p)))
                    .collect();
                doc["p"] = fit.p.into();
                doc["window"] = json!([window.0, window.1]);
                doc["residual"] = fit.residual.into();
                doc["window_exponents"] = Value::Array(ps);
            }
            Err(_) => flags.push("decay-window-too-short".to_string()),
        }
        if trace.max_step_increase > MONOTONE_TOL * e0 {
            flags.push("energy-increase".to_string());
        }
        if residual.abs() > IDENTITY_TOL * e0 {
            flags.push("dissipation-identity".to_string());
        }
    }
    doc["flags"] = json!(flags);
    out.write_json("decay_fit.json", &doc)?;
    Ok(Report {
        files: out.written().to_vec(),
        flags,
    })
}

/// Resolvent scan, refined local maxima, peaks at the damped eigenvalues.
pub struct ResolventRun {
    pub records: Vec<ScanRecord>,
    /// `(n, peak)` for every damped eigenvalue with `Im s` in range.
    pub peaks: Vec<(usize, Peak)>,
}

pub fn resolvent_run(
    mats: &OperatorMatrices,
    params: &DegeneracyParams,
    range: (f64, f64),
    resolution: f64,
) -> Result<ResolventRun> {
    let res = Resolvent::new(mats)?;
    let mut m = 0;
    while m < mats.dim() && eigen_frequency(params, m + 1)? <= 1.05 * range.1 + 1.0 {
        m += 1;
    }
    let damped = if m > 0 {
        damped_spectrum(mats, 0..m)?.eigen
    } else {
        Vec::new()
    };
    let in_range = |x: f64| x >= range.0 && x <= range.1;
    let predicted: Vec<f64> = damped.iter().map(|e| e.value.im).filter(|x| in_range(*x)).collect();
    let grid = scan_grid(range, resolution, &predicted)?;
    let records = grid
        .par_iter()
        .map(|&l| res.operator_norm(l).map(ScanRecord::from))
        .collect::<degwave_core::Result<Vec<_>>>()?;
    let refined = local_maxima(&records)
        .par_iter()
        .map(|&i| golden_max(&res, records[i - 1].lambda, records[i + 1].lambda, 60))
        .collect::<degwave_core::Result<Vec<_>>>()?;
    let records = merge_records(records, refined);
    let peaks = damped
        .par_iter()
        .enumerate()
        .filter(|(_, e)| in_range(e.value.im))
        .map(|(i, e)| peak_near_eigenvalue(&res, e).map(|p| (i + 1, p)))
        .collect::<degwave_core::Result<Vec<_>>>()?;
    Ok(ResolventRun { records, peaks })
}

fn growth_json(fit: Option<GrowthFit>) -> Value {
    match fit {
        Some(f) => json!({
            "slope_over_lambda": f.slope_over_lambda,
            "slope_over_lambda_sq": f.slope_over_lambda_sq,
            "points": f.points,
        }),
        None => Value::Null,
    }
}

/// `resolvent_scan.csv`, `resolvent_peaks.csv` and `growth_fit.json`.
pub fn cmd_resolvent(cfg: &RunConfig) -> Result<Report> {
    let (p, mats) = setup(cfg)?;
    let run = resolvent_run(&mats, &p, (cfg.lambda_min, cfg.lambda_max), cfg.resolution)?;
    let mut out = OutputDir::create(&cfg.out, cfg.json)?;
    let mut flags = Vec::new();

    let mut t = Table::new(&SCAN_HEADER);
    for r in &run.records {
        t.push(vec![
            r.lambda.into(),
            r.norm.into(),
            r.norm_over_lambda().into(),
            r.norm_over_lambda_sq().into(),
            r.flag.as_str().into(),
        ]);
    }
    out.write_table("resolvent_scan", &t)?;

    let mut t = Table::new(&[
        "n",
        "re_s",
        "im_s",
        "lambda",
        "norm",
        "norm_over_lambda",
        "norm_over_lambda_sq",
        "flag",
    ]);
    for (n, pk) in &run.peaks {
        let r = pk.record;
        t.push(vec![
            (*n).into(),
            pk.eigenvalue.re.into(),
            pk.eigenvalue.im.into(),
            r.lambda.into(),
            r.norm.into(),
            r.norm_over_lambda().into(),
            r.norm_over_lambda_sq().into(),
            r.flag.as_str().into(),
        ]);
    }
    out.write_table("resolvent_peaks", &t)?;

    let peak_records: Vec<ScanRecord> = run.peaks.iter().map(|(_, pk)| pk.record).collect();
    let doc = json!({
        "lambda_range": [cfg.lambda_min, cfg.lambda_max],
        "scan": growth_json(growth_fit(&run.records).ok()),
        "peaks": growth_json(growth_fit(&peak_records).ok()),
        "min_inverse_norm": min_inverse_norm(&run.records),
    });
    out.write_json("growth_fit.json", &doc)?;

    for flag in ["ill-conditioned", "not-converged"] {
        let k = run
            .records
            .iter()
            .chain(&peak_records)
            .filter(|r| r.flag.as_str() == flag)
            .count();
        if k > 0 {
            flags.push(format!("{flag}:{k}"));
        }
    }
    Ok(Report {
        files: out.written().to_vec(),
        flags,
    })
}

/// One evaluated `λ`, or the error that stopped it.
pub type TransferRow = (C, std::result::Result<TransferSample, String>);

pub fn transfer_rows(lambdas: &[C], params: &DegeneracyParams, cutoff: f64, opts: TransferOptions) -> Vec<TransferRow> {
    lambdas
        .par_iter()
        .map(|&l| (l, transfer_sample(l, params, cutoff, opts).map_err(|e| e.to_string())))
        .collect()
}

fn transfer_table(rows: &[TransferRow]) -> Table {
    let mut t = Table::new(&TRANSFER_HEADER);
    for (l, r) in rows {
        let (h, probe, verdict) = match r {
            Ok(s) => {
                let mut v = s.verdict.as_str().to_string();
                if s.outside_half_plane {
                    v.push_str("+outside-half-plane");
                }
                (s.h, s.c_nu_estimate.norm(), v)
            }
            Err(_) => (C::new(f64::NAN, f64::NAN), f64::NAN, "error".to_string()),
        };
        t.push(vec![
            l.re.into(),
            l.im.into(),
            l.norm().into(),
            l.arg().into(),
            h.re.into(),
            h.im.into(),
            h.norm().into(),
            probe.into(),
            Cell::from(verdict),
        ]);
    }
    t
}

/// File stem for a ray: the angle in degrees, e.g. `ray_theta_30`.
pub fn ray_stem(theta: f64) -> String {
    let d = (theta.to_degrees() * 1e6).round() / 1e6;
    format!("ray_theta_{d}")
}

/// Log–log slope of the probe in `x` at `λ = e^{iθ}`, over the decades
/// `1e-2 … 1e-40` where the Bessel argument is small (for `α` near 2 that
/// takes `x` far below `1e-16`).
pub fn probe_slope_at(params: &DegeneracyParams, theta: f64) -> Result<f64> {
    let l = C::from_polar(1.0, theta);
    let xs: Vec<f64> = (2..=40).map(|k| 10f64.powi(-k)).collect();
    let xs = small_argument_points(l, params, &xs);
    Ok(probe_slope(&c_nu_probe(l, params, &xs)?)?.slope)
}

/// Largest relative gap between `H` with the two Bessel arguments.
fn argument_mismatch(rows: &[TransferRow], params: &DegeneracyParams) -> f64 {
    let other = TransferOptions {
        bessel_arg: BesselArg::Treee,
        lambda_prefactor: true,
    };
    let this = TransferOptions::default();
    rows.iter()
        .filter_map(|(l, r)| r.as_ref().ok().map(|s| (*l, s.c_nu_estimate)))
        .filter_map(|(l, c)| {
            let a = transfer_h_with(l, params, c, this).ok()?;
            let b = transfer_h_with(l, params, c, other).ok()?;
            Some((a - b).norm() / a.norm())
        })
        .fold(0.0, f64::max)
}

fn write_plot(out: &mut OutputDir, name: &str, title: &str, y_label: &str, pts: Vec<(f64, f64)>) -> Result<()> {
    let plot = LogLogPlot {
        title,
        x_label: "|λ|",
        y_label,
        series: vec![Series {
            label: y_label,
            points: pts,
        }],
    };
    out.write_bytes(name, plot.render().as_bytes())?;
    Ok(())
}

/// One CSV and SVG per ray angle, `vertical_scan.csv`/`.svg`, and
/// `transfer_summary.json`.
pub fn cmd_transfer(cfg: &RunConfig) -> Result<Report> {
    let p = degeneracy_params(cfg.alpha)?;
    let opts = TransferOptions {
        bessel_arg: cfg.bessel_arg,
        lambda_prefactor: true,
    };
    let mut out = OutputDir::create(&cfg.out, cfg.json)?;
    let mut failures = 0;
    let mut slopes = Vec::new();
    for &theta in &cfg.thetas {
        let lambdas = ray_lambdas(theta, (cfg.lambda_min, cfg.lambda_max), cfg.samples)?;
        let rows = transfer_rows(&lambdas, &p, cfg.cutoff, opts);
        failures += rows.iter().filter(|r| r.1.is_err()).count();
        let stem = ray_stem(theta);
        out.write_table(&stem, &transfer_table(&rows))?;
        let pts = rows
            .iter()
            .filter_map(|(l, r)| r.as_ref().ok().map(|s| (l.norm(), s.c_nu_estimate.norm())))
            .collect();
        let title = format!(
            "|c_nu probe| at x* = {}, arg λ = {:.6} rad, alpha = {}",
            fmt_f64(cfg.cutoff),
            theta,
            cfg.alpha
        );
        write_plot(&mut out, &format!("{stem}.svg"), &title, "|c_nu probe|", pts)?;
        slopes.push(json!({
            "theta": theta,
            "probe_slope": num_or_null(probe_slope_at(&p, theta).ok()),
        }));
    }

    let lambdas = vertical_lambdas(cfg.gamma, (0.0, cfg.lambda_max), cfg.samples)?;
    let rows = transfer_rows(&lambdas, &p, cfg.cutoff, opts);
    failures += rows.iter().filter(|r| r.1.is_err()).count();
    out.write_table("vertical_scan", &transfer_table(&rows))?;
    let pts = rows
        .iter()
        .filter_map(|(l, r)| r.as_ref().ok().map(|s| (l.norm(), s.h.norm())))
        .collect();
    let title = format!("|H| on Re λ = {}, alpha = {}", cfg.gamma, cfg.alpha);
    write_plot(&mut out, "vertical_scan.svg", &title, "|H|", pts)?;

    let ok: Vec<TransferSample> = rows.iter().filter_map(|r| r.1.clone().ok()).collect();
    let fit = boundedness_fit(&ok).ok();
    let family = cutoff_family(C::new(cfg.gamma, 0.0), &p, &FAMILY_CUTOFFS, CoefficientRule::Consistent)
        .context("cutoff family")?;
    let doc = json!({
        "alpha": cfg.alpha,
        "nu": p.nu(),
        "regime": Regime::of(&p).as_str(),
        "bessel_arg": cfg.bessel_arg.as_str(),
        "cutoff": cfg.cutoff,
        "vertical": {
            "gamma": cfg.gamma,
            "slope": num_or_null(fit.map(|f| f.slope)),
            "max_abs_h": num_or_null(fit.map(|f| f.max_abs_h)),
            "points": fit.map(|f| f.points),
            "bounded": fit.map(|f| f.bounded()),
        },
        "cutoff_family": {
            "lambda": [cfg.gamma, 0.0],
            "cutoffs": family.cutoffs,
            "abs_values": family.values,
            "ratios": family.ratios(),
            "increasing": family.increasing(),
            "growth_per_decade": family.growth_per_decade(),
            "power_law_growth_per_decade": 10f64.powf(cfg.alpha - 1.0),
        },
        "probe_slopes": slopes,
        "expected_probe_slope": 1.0 - cfg.alpha,
        "bessel_argument_mismatch": argument_mismatch(&rows, &p),
        "failed_samples": failures,
    });
    out.write_json("transfer_summary.json", &doc)?;
    let mut flags = Vec::new();
    if failures > 0 {
        flags.push(format!("failed-samples:{failures}"));
    }
    Ok(Report {
        files: out.written().to_vec(),
        flags,
    })
}
