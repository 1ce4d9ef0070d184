use degwave_core::discretize::{assemble, build_mesh, damped_spectrum, OperatorMatrices};
use degwave_core::resolvent::{
    min_inverse_norm, mode_load, peak_near_eigenvalue, resolvent_norm, running_max_normalized, scan, solve_resolvent,
    Resolvent, ScanFlag,
};
use degwave_core::spectrum::{degeneracy_params, eigen_frequency, EigenPair};
use degwave_core::ComplexValue as C;

fn setup(alpha: f64, n: usize) -> (degwave_core::discretize::Mesh, OperatorMatrices) {
    let p = degeneracy_params(alpha).unwrap();
    let mesh = build_mesh(&p, n, None).unwrap();
    let mats = assemble(&mesh, &p);
    (mesh, mats)
}

fn pseudo(i: usize, salt: f64) -> f64 {
    ((i as f64 + 1.0) * 12.9898 + salt * 78.233).sin() * 43758.5453 % 1.0
}

#[test]
fn static_solve() {
    let (_, mats) = setup(1.5, 300);
    let res = Resolvent::new(&mats).unwrap();
    let f = vec![C::new(0.0, 0.0); mats.dim()];
    let g: Vec<C> = (0..mats.dim()).map(|i| C::new(pseudo(i, 1.0), 0.0)).collect();
    let sol = res.solve(0.0, &f, &g).unwrap();
    let fnorm = res.norm(&f, &g);
    let (r1, r2) = res.apply_shifted(0.0, &sol.u, &sol.v);
    let resid: Vec<C> = r1.iter().zip(&f).map(|(a, b)| a - b).collect();
    let resid2: Vec<C> = r2.iter().zip(&g).map(|(a, b)| a - b).collect();
    assert!(res.norm(&resid, &resid2) < 1e-10 * fnorm);
    assert!(sol.residual < 1e-10 * fnorm);
    // λ = 0 gives v = 0 and K u = M g up to the trace term, which vanishes with v
    assert!(sol.v.iter().all(|v| v.norm() < 1e-12 * fnorm));
    let mg = mats.mass.apply_complex(&g);
    let ku = mats.stiffness.apply_complex(&sol.u);
    for (a, b) in ku.iter().zip(&mg) {
        assert!((a - b).norm() < 1e-9 * fnorm);
    }
}

#[test]
fn random_solves_have_small_residuals() {
    let (_, mats) = setup(1.0, 400);
    for k in 0..12 {
        let lambda = 1.0 + 99.0 * (0.5 + 0.5 * pseudo(k, 3.0));
        let f: Vec<C> = (0..mats.dim())
            .map(|i| C::new(pseudo(i, k as f64), pseudo(i, 0.5 + k as f64)))
            .collect();
        let g: Vec<C> = (0..mats.dim())
            .map(|i| C::new(pseudo(i, 9.0 + k as f64), pseudo(i, 2.5 + k as f64)))
            .collect();
        let sol = solve_resolvent(&mats, lambda, &f, &g).unwrap();
        let res = Resolvent::new(&mats).unwrap();
        assert!(sol.residual < 1e-9 * res.norm(&f, &g), "lambda={lambda}");
        assert_eq!(sol.flag, ScanFlag::Clean);
    }
}

#[test]
fn mode_load_peaks_at_first_frequency() {
    let p = degeneracy_params(1.5).unwrap();
    let (mesh, mats) = setup(1.5, 2000);
    let pair = EigenPair::new(&p, 1).unwrap();
    let psi: Vec<f64> = mesh.free_nodes().iter().map(|&x| pair.eval(x).unwrap()).collect();
    let (f, g) = mode_load(&psi);
    let res = Resolvent::new(&mats).unwrap();
    let b1 = eigen_frequency(&p, 1).unwrap();
    let at = res.solve(b1, &f, &g).unwrap();
    let off = res.solve(b1 + 1.0, &f, &g).unwrap();
    assert!(res.norm(&at.u, &at.v) > 5.0 * res.norm(&off.u, &off.v));
}

#[test]
fn norm_is_even() {
    let (_, mats) = setup(1.0, 300);
    for l in [0.7, 3.3, 17.0, 42.5] {
        let a = resolvent_norm(&mats, l).unwrap().value;
        let b = resolvent_norm(&mats, -l).unwrap().value;
        assert!((a - b).abs() < 1e-8 * a, "l={l}");
    }
}

#[test]
fn peaks_are_local_maxima() {
    let (_, mats) = setup(1.5, 400);
    let res = Resolvent::new(&mats).unwrap();
    let spec = damped_spectrum(&mats, 0..3).unwrap();
    for e in &spec.eigen {
        let pk = peak_near_eigenvalue(&res, e).unwrap();
        let d = 10.0 * e.value.re.abs().max(1e-9);
        for l in [pk.record.lambda - d, pk.record.lambda + d, pk.record.lambda + 0.1] {
            assert!(res.operator_norm(l).unwrap().value < pk.record.norm);
        }
    }
}

#[test]
fn scan_properties() {
    let (_, mats) = setup(1.0, 200);
    let predicted: Vec<f64> = damped_spectrum(&mats, 0..6)
        .unwrap()
        .eigen
        .iter()
        .map(|e| e.value.im)
        .collect();
    let recs = scan(&mats, (1.0, 20.0), 0.5, &predicted).unwrap();
    assert!(recs.windows(2).all(|w| w[0].lambda < w[1].lambda));
    assert!(recs.iter().all(|r| r.norm.is_finite() && r.norm > 0.0));
    assert!(min_inverse_norm(&recs) > 0.0);
    // the boundedness proxy: max norm/λ² never grows beyond the first decade
    let run = running_max_normalized(&recs);
    let tail: Vec<f64> = run.iter().filter(|(l, _)| *l >= 10.0).map(|(_, m)| *m).collect();
    assert!(tail.windows(2).all(|w| w[1] <= w[0]));
}
