use degwave_core::fit::loglog_fit;
use degwave_core::specfun::{bessel_j, bessel_j_deriv};
use degwave_core::spectrum::{
    degeneracy_params, eigen_frequency, eigen_pairs, eigenfunction_eval, mode_norm_growth, EigenPair,
};

fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let fa0 = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) < 0.0) == (fa0 < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `∫₀¹ f(x) dx` after `x = y^{1/κ}`, midpoint rule with `points` nodes in `y`.
fn graded_integral<F: Fn(f64) -> f64>(kappa: f64, points: usize, f: F) -> f64 {
    let h = 1.0 / points as f64;
    let g = 1.0 / kappa;
    (0..points)
        .map(|i| {
            let y = (i as f64 + 0.5) * h;
            f(y.powf(g)) * g * y.powf(g - 1.0) * h
        })
        .sum()
}

#[test]
fn params_examples() {
    let p = degeneracy_params(1.0).unwrap();
    assert_eq!((p.nu(), p.kappa()), (0.0, 0.5));
    let p = degeneracy_params(1.5).unwrap();
    assert_eq!((p.nu(), p.kappa()), (1.0, 0.25));
    let p = degeneracy_params(1.2).unwrap();
    assert!((p.nu() - 0.2 / 0.8).abs() < 1e-15);
    assert!((p.kappa() - 0.4).abs() < 1e-15);
    for a in [0.99, 2.0, f64::NAN] {
        assert!(degeneracy_params(a).is_err());
    }
    // ν ∈ ℕ* exactly at α = 2 − 1/(m+1)
    for m in 1..6 {
        let p = degeneracy_params(2.0 - 1.0 / (m as f64 + 1.0)).unwrap();
        assert!(p.nu_is_positive_integer(), "m={m}");
    }
    assert!(!degeneracy_params(1.6).unwrap().nu_is_positive_integer());
}

#[test]
fn frequency_examples() {
    let j01 = bisect(|x| bessel_j(0.0, x).unwrap(), 2.0, 3.0);
    let b = eigen_frequency(&degeneracy_params(1.0).unwrap(), 1).unwrap();
    assert!((b - 0.5 * j01).abs() < 1e-10);
    assert!((b - 1.2024127788).abs() < 1e-9);
    let j11 = bisect(|x| bessel_j(1.0, x).unwrap(), 3.5, 4.0);
    let b = eigen_frequency(&degeneracy_params(1.5).unwrap(), 1).unwrap();
    assert!((b - 0.25 * j11).abs() < 1e-10);
    assert!((b - 0.9579264926).abs() < 1e-9);
    for alpha in [1.0, 1.2, 1.5, 1.8] {
        let p = degeneracy_params(alpha).unwrap();
        let bs: Vec<f64> = (1..=6).map(|n| eigen_frequency(&p, n).unwrap()).collect();
        assert!(bs.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn eigenfunction_boundary_values() {
    for alpha in [1.0, 1.2, 1.5, 1.8] {
        let p = degeneracy_params(alpha).unwrap();
        for n in 1..=8 {
            assert!(eigenfunction_eval(&p, n, 1.0).unwrap().abs() < 1e-9);
        }
        assert!(eigenfunction_eval(&p, 1, -0.1).is_err());
    }
    // α = 1: u_1(0) = √(2κ)/|J′_0(j_{0,1})| with the derivative from finite differences
    let p = degeneracy_params(1.0).unwrap();
    let j01 = bisect(|x| bessel_j(0.0, x).unwrap(), 2.0, 3.0);
    let h = 1e-6;
    let jp = (bessel_j(0.0, j01 + h).unwrap() - bessel_j(0.0, j01 - h).unwrap()) / (2.0 * h);
    let u0 = eigenfunction_eval(&p, 1, 0.0).unwrap();
    assert!((u0 - 1.0 / jp.abs()).abs() < 1e-8);
    assert!((u0 - 1.9262).abs() < 1e-4);
}

#[test]
fn origin_value_is_the_limit() {
    // u_n is continuous at 0 for every α in range; its value there is finite
    for alpha in [1.2, 1.5, 1.8] {
        let p = degeneracy_params(alpha).unwrap();
        let pair = EigenPair::new(&p, 2).unwrap();
        let at0 = pair.eval(0.0).unwrap();
        let near = pair.eval(1e-5f64.powf(1.0 / p.kappa())).unwrap();
        assert!(at0.is_finite());
        assert!((at0 - near).abs() < 1e-8 * at0.abs(), "alpha={alpha}: {at0} vs {near}");
    }
}

#[test]
fn normalization_and_orthogonality() {
    for alpha in [1.0, 1.2, 1.5] {
        let p = degeneracy_params(alpha).unwrap();
        let pairs = eigen_pairs(&p, 5).unwrap();
        for a in &pairs {
            for b in &pairs {
                let ip = graded_integral(p.kappa(), 10_000, |x| a.eval(x).unwrap() * b.eval(x).unwrap());
                if a.n == b.n {
                    assert!((ip - 1.0).abs() < 2e-3, "alpha={alpha} n={} norm={ip}", a.n);
                } else {
                    assert!(ip.abs() < 5e-3, "alpha={alpha} ({},{}) ip={ip}", a.n, b.n);
                }
            }
        }
    }
}

#[test]
fn ode_residual() {
    for alpha in [1.0, 1.2, 1.5, 1.8] {
        let p = degeneracy_params(alpha).unwrap();
        for pair in eigen_pairs(&p, 4).unwrap() {
            let sup = (0..=400)
                .map(|i| pair.eval(i as f64 / 400.0).unwrap().abs())
                .fold(0.0f64, f64::max);
            for i in 1..=100 {
                let x = i as f64 / 101.0;
                let h = 1e-4 * x;
                let dflux = (pair.flux(x + h).unwrap() - pair.flux(x - h).unwrap()) / (2.0 * h);
                let res = (dflux + pair.mu * pair.eval(x).unwrap()).abs();
                assert!(res < 1e-6 * pair.mu * sup, "alpha={alpha} n={} x={x} res={res}", pair.n);
            }
            // the flux itself agrees with x^α times a finite-difference slope
            let x = 0.37;
            let h = 1e-6;
            let fd = (pair.eval(x + h).unwrap() - pair.eval(x - h).unwrap()) / (2.0 * h);
            assert!((pair.flux(x).unwrap() - x.powf(alpha) * fd).abs() < 1e-6 * pair.beta * sup);
        }
    }
}

#[test]
fn weighted_neumann_trace() {
    for alpha in [1.0, 1.5, 1.8] {
        let p = degeneracy_params(alpha).unwrap();
        let pair = EigenPair::new(&p, 3).unwrap();
        let a = pair.flux(1e-4).unwrap().abs();
        let b = pair.flux(1e-6).unwrap().abs();
        assert!(b < a, "alpha={alpha}");
        assert!(b < 1e-4 * pair.beta * pair.normalization);
    }
}

#[test]
fn normalization_constant() {
    for alpha in [1.0, 1.5] {
        let p = degeneracy_params(alpha).unwrap();
        for pair in eigen_pairs(&p, 5).unwrap() {
            let jp = bessel_j_deriv(p.nu(), pair.zero).unwrap();
            assert!((pair.normalization - (2.0 * p.kappa()).sqrt() / jp.abs()).abs() < 1e-13);
        }
    }
}

#[test]
fn mode_norm_growth_is_twice_mu() {
    for alpha in [1.0, 1.5] {
        let p = degeneracy_params(alpha).unwrap();
        let mut values = Vec::new();
        let mut betas = Vec::new();
        for n in 1..=10 {
            let v = mode_norm_growth(&p, n).unwrap();
            let pair = EigenPair::new(&p, n).unwrap();
            // independent quadrature of ∫x^α u′² + β²∫u²
            let stiff = graded_integral(p.kappa(), 20_000, |x| {
                if x == 0.0 {
                    0.0
                } else {
                    let f = pair.flux(x).unwrap();
                    f * f / x.powf(alpha)
                }
            });
            let mass = graded_integral(p.kappa(), 20_000, |x| pair.eval(x).unwrap().powi(2));
            let oracle = stiff + pair.mu * mass;
            assert!(
                (v - oracle).abs() < 1e-3 * oracle,
                "alpha={alpha} n={n}: {v} vs {oracle}"
            );
            assert!((v - 2.0 * pair.mu).abs() < 1e-9 * v);
            values.push(v);
            betas.push(pair.beta);
        }
        assert!(values.windows(2).all(|w| w[1] > w[0]));
        let fit = loglog_fit(&betas, &values).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-6, "alpha={alpha} slope={}", fit.slope);
    }
}
