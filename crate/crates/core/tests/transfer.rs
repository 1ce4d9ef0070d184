use std::f64::consts::PI;

use degwave_core::specfun::{mod_bessel_i, mod_bessel_k};
use degwave_core::spectrum::degeneracy_params;
use degwave_core::transfer::{
    boundary_coefficients, c2, c_nu_probe, coefficients_a1_b1, coefficients_a2_b2, cutoff_family, laplace_argument,
    laplace_solution, probe_value, scan_ray, scan_vertical, transfer_h, transfer_h_with, transfer_sample, BesselArg,
    CoefficientRule, Coefficients, ProbeVerdict, SecondKind, TransferOptions,
};
use degwave_core::ComplexValue as C;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn lambdas() -> Vec<C> {
    vec![
        C::new(0.5, 0.0),
        C::new(1.0, 2.0),
        C::new(2.3, -4.1),
        C::new(4.9, 0.7),
        C::new(0.8, 9.0),
    ]
}

#[test]
fn solution_satisfies_the_ode() {
    for alpha in [1.0, 1.2, 1.5, 1.8] {
        let p = degeneracy_params(alpha).unwrap();
        for l in lambdas() {
            let co = Coefficients {
                a: C::new(1.0, 0.0),
                b: C::new(0.0, 0.0),
                second: SecondKind::K,
            };
            for i in 1..=50 {
                let x = i as f64 / 51.0;
                let h = 1e-3 * x;
                let w = |x: f64| laplace_solution(x, l, &p, &co).unwrap();
                let (w2m, wm, w0, wp, w2p) = (w(x - 2.0 * h), w(x - h), w(x), w(x + h), w(x + 2.0 * h));
                let wxx = (-w2p + wp * 16.0 - w0 * 30.0 + wm * 16.0 - w2m) / (12.0 * h * h);
                let wx = (-w2p + wp * 8.0 - wm * 8.0 + w2m) / (12.0 * h);
                let t1 = wxx * x * x;
                let t2 = wx * alpha * x;
                let t3 = l * l * x.powf(2.0 - alpha) * w0;
                let scale = t1.norm() + t2.norm() + t3.norm();
                let res = (t1 + t2 - t3).norm();
                assert!(res < 1e-6 * scale, "alpha={alpha} l={l} x={x} rel={}", res / scale);
            }
        }
    }
}

#[test]
fn second_solutions_also_solve_the_ode() {
    for (alpha, kind) in [(1.2, SecondKind::IMinus), (1.5, SecondKind::K), (1.2, SecondKind::K)] {
        let p = degeneracy_params(alpha).unwrap();
        let l = C::new(1.3, 2.0);
        let co = Coefficients {
            a: C::new(0.0, 0.0),
            b: C::new(1.0, 0.0),
            second: kind,
        };
        for x in [0.05, 0.3, 0.77] {
            let h = 1e-3 * x;
            let w = |x: f64| laplace_solution(x, l, &p, &co).unwrap();
            let (wm, w0, wp) = (w(x - h), w(x), w(x + h));
            let t1 = (wp - w0 * 2.0 + wm) / (h * h) * x * x;
            let t2 = (wp - wm) / (2.0 * h) * alpha * x;
            let t3 = l * l * x.powf(2.0 - alpha) * w0;
            let scale = t1.norm() + t2.norm() + t3.norm();
            assert!((t1 + t2 - t3).norm() < 1e-6 * scale);
        }
    }
}

#[test]
fn boundary_conditions_hold() {
    for l in lambdas() {
        let p = degeneracy_params(1.5).unwrap();
        let co = coefficients_a1_b1(l, &p, C::new(0.3, -1.1)).unwrap();
        let at_one = laplace_solution(1.0, l, &p, &co).unwrap();
        let scale = (co.b * mod_bessel_k(1.0, laplace_argument(1.0, l, &p)).unwrap()).norm();
        assert!(at_one.norm() < 1e-10 * scale.max(1e-300), "l={l}");
        let p = degeneracy_params(1.2).unwrap();
        let co = coefficients_a2_b2(l, &p, C::new(0.3, -1.1), CoefficientRule::Consistent).unwrap();
        assert!(laplace_solution(1.0, l, &p, &co).unwrap().norm() < 1e-10 * co.b.norm());
    }
    // the displayed (A₂, B₂) do not vanish at x = 1
    let p = degeneracy_params(1.2).unwrap();
    let co = coefficients_a2_b2(C::new(1.0, 1.0), &p, C::new(1.0, 0.0), CoefficientRule::Verbatim).unwrap();
    assert!(laplace_solution(1.0, C::new(1.0, 1.0), &p, &co).unwrap().norm() > 1e-3);
}

#[test]
fn evaluation_is_linear_in_coefficients() {
    let p = degeneracy_params(1.5).unwrap();
    let l = C::new(1.0, 3.0);
    let a = Coefficients {
        a: C::new(1.0, 2.0),
        b: C::new(-0.5, 0.1),
        second: SecondKind::K,
    };
    let b = Coefficients {
        a: C::new(0.2, -1.0),
        b: C::new(3.0, 0.0),
        second: SecondKind::K,
    };
    let sum = Coefficients {
        a: a.a + b.a,
        b: a.b + b.b,
        second: SecondKind::K,
    };
    for x in [0.01, 0.4, 1.0] {
        let lhs = laplace_solution(x, l, &p, &sum).unwrap();
        let rhs = laplace_solution(x, l, &p, &a).unwrap() + laplace_solution(x, l, &p, &b).unwrap();
        assert!((lhs - rhs).norm() < 1e-13 * lhs.norm());
    }
}

#[test]
fn flux_at_origin_equals_c2() {
    // x^α ∂_x [x^{(1−α)/2} K_ν(z)] → c₂ as x → 0, checked by finite differences
    for alpha in [1.2, 1.5, 1.8] {
        let p = degeneracy_params(alpha).unwrap();
        for l in [C::new(1.0, 0.0), C::new(0.7, 2.0)] {
            let x = (1e-6f64).powf(1.0 / p.kappa());
            let h = 1e-4 * x;
            let flux =
                (probe_value(x + h, l, &p).unwrap() - probe_value(x - h, l, &p).unwrap()) / (2.0 * h) * x.powf(alpha);
            let c = c2(l, &p).unwrap();
            assert!(
                (flux - c).norm() < 1e-5 * c.norm(),
                "alpha={alpha} l={l} flux={flux} c2={c}"
            );
        }
    }
}

#[test]
fn bessel_ratio_decays_exponentially() {
    for alpha in [1.5, 1.8] {
        let p = degeneracy_params(alpha).unwrap();
        let m = p.nu() + 1.0;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut g = 2.0;
        while g <= 32.0 {
            let s = C::new(g, 3.0) * m;
            let r = mod_bessel_k(p.nu(), s).unwrap() / mod_bessel_i(p.nu(), s).unwrap();
            xs.push(g);
            ys.push(r.norm().ln());
            g *= 2.0;
        }
        let n = xs.len();
        let slope = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
        assert!((slope + 2.0 * m).abs() < 0.01 * 2.0 * m, "alpha={alpha} slope={slope}");
    }
}

#[test]
fn transfer_matches_boundary_value_at_matched_cutoff() {
    // ŵ(x*, λ) with θ̂ = 1 against H with c_ν = c_ν(x*), Bessel argument 2λ/(2−α)
    let p = degeneracy_params(1.5).unwrap();
    let opts = TransferOptions {
        bessel_arg: BesselArg::Besfu,
        lambda_prefactor: true,
    };
    for l in lambdas() {
        let cutoff = 1e-16;
        let co = boundary_coefficients(l, &p, C::new(1.0, 0.0), CoefficientRule::Consistent).unwrap();
        let w = laplace_solution(cutoff, l, &p, &co).unwrap();
        let h = transfer_h_with(l, &p, probe_value(cutoff, l, &p).unwrap(), opts).unwrap();
        assert!((w - h).norm() < 1e-6 * h.norm(), "l={l} w={w} h={h}");
        // the printed argument (ν+1)λ gives a different value
        let zero = C::new(0.0, 0.0);
        let verbatim = transfer_h(l, &p, zero).unwrap();
        let consistent = transfer_h_with(l, &p, zero, opts).unwrap();
        assert!((verbatim - consistent).norm() > 1e-6 * consistent.norm());
    }
}

#[test]
fn lambda_prefactor_variant() {
    let p = degeneracy_params(1.5).unwrap();
    let l = C::new(1.0, 4.0);
    let with = transfer_h_with(l, &p, C::new(0.5, 0.0), TransferOptions::VERBATIM).unwrap();
    let without = transfer_h_with(
        l,
        &p,
        C::new(0.5, 0.0),
        TransferOptions {
            lambda_prefactor: false,
            ..TransferOptions::VERBATIM
        },
    )
    .unwrap();
    assert!((without - with * l).norm() < 1e-12 * without.norm());
}

#[test]
fn probe_examples() {
    let p = degeneracy_params(1.5).unwrap();
    let l = C::from_polar(1.0, PI / 4.0);
    let xs: Vec<f64> = (2..=8).map(|k| 10f64.powi(-k)).collect();
    let seq = c_nu_probe(l, &p, &xs).unwrap();
    assert_eq!(seq.verdict, ProbeVerdict::Diverging);
    // α = 1: K₀(z) ≈ −ln(z/2) − γ_E with z = 2x^{1/2}
    let p = degeneracy_params(1.0).unwrap();
    let xs: Vec<f64> = (4..=12).map(|k| 10f64.powi(-k)).collect();
    let seq = c_nu_probe(C::new(1.0, 0.0), &p, &xs).unwrap();
    assert_eq!(seq.verdict, ProbeVerdict::Diverging);
    for (x, v) in seq.xs.iter().zip(&seq.values).skip(3) {
        let law = -(x.sqrt()).ln() - EULER_GAMMA;
        assert!((v.re - law).abs() < 1e-4 * law, "x={x}");
    }
}

#[test]
fn probe_is_continuous_in_arg() {
    let p = degeneracy_params(1.5).unwrap();
    for theta in [PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0] {
        let a = probe_value(1e-6, C::from_polar(2.0, theta), &p).unwrap();
        let b = probe_value(1e-6, C::from_polar(2.0, theta - 1e-6), &p).unwrap();
        assert!((a - b).norm() < 1e-4 * a.norm(), "theta={theta}");
    }
}

#[test]
fn conjugate_symmetry_and_real_axis() {
    let p = degeneracy_params(1.5).unwrap();
    let opts = TransferOptions::default();
    let a = transfer_h_with(C::new(1.0, 5.0), &p, C::new(3.0, 0.0), opts).unwrap();
    let b = transfer_h_with(C::new(1.0, -5.0), &p, C::new(3.0, 0.0), opts).unwrap();
    assert!((a.conj() - b).norm() < 1e-12 * a.norm());
    let scan = scan_vertical(1.0, (0.0, 4.0), 5, &p, 1e-6, opts).unwrap();
    let real = transfer_sample(C::new(1.0, 0.0), &p, 1e-6, opts).unwrap();
    assert_eq!(scan.samples[0].h, real.h);
    assert!(real.h.im.abs() < 1e-12 * real.h.norm());
}

#[test]
fn rays_depend_on_angle_continuously() {
    let p = degeneracy_params(1.5).unwrap();
    let opts = TransferOptions::default();
    let a = scan_ray(PI / 4.0, (0.5, 5.0), 10, &p, 1e-6, opts).unwrap();
    let b = scan_ray(PI / 6.0, (0.5, 5.0), 10, &p, 1e-6, opts).unwrap();
    let mut differs = false;
    for (x, y) in a.iter().zip(&b) {
        assert!((x.abs_lambda() - y.abs_lambda()).abs() < 1e-12);
        let (u, v) = (x.c_nu_estimate.norm(), y.c_nu_estimate.norm());
        differs |= u != v;
        assert!((u - v).abs() < 0.1 * u, "|λ|={} {u} vs {v}", x.abs_lambda());
    }
    assert!(differs);
    let edge = scan_ray(PI / 2.0, (0.5, 5.0), 4, &p, 1e-6, opts).unwrap();
    assert!(edge.iter().all(|s| s.outside_half_plane && s.lambda.re == 0.0));
}

#[test]
fn noninteger_cutoff_family_follows_power_law() {
    let p = degeneracy_params(1.2).unwrap();
    for l in [C::new(1.0, 0.0), C::new(1.0, 10.0), C::new(1.0, 60.0)] {
        for rule in [CoefficientRule::Verbatim, CoefficientRule::Consistent] {
            let fam = cutoff_family(l, &p, &[1e-16, 1e-18, 1e-20], rule).unwrap();
            assert!(fam.increasing());
            // |ŵ(x*)| ∝ x*^{1−α}: a factor 10^{α−1} per decade, up to O(x*^{α−1}) corrections
            let law = 10f64.powf(p.alpha() - 1.0);
            assert!(
                (fam.growth_per_decade() - law).abs() < 0.05 * law,
                "l={l} got {}",
                fam.growth_per_decade()
            );
        }
    }
}
