//! Gauss–Legendre quadrature.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // float math is inherent in core on recent toolchains
use num_traits::Float;

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre needs at least one node");
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let nf = n as f64;
        for i in 0..n {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = ((4 * i + 3) as f64 * PI / (4.0 * nf + 2.0)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d.is_finite() {
                dp = d;
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        Self { nodes, weights }
    }

    /// `∫_a^b f` split into `panels` equal subintervals.
    pub fn composite<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let mid = lo + 0.5 * h;
            let mut s = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                s += w * f(mid + 0.5 * h * x);
            }
            total += 0.5 * h * s;
        }
        total
    }
}

impl GaussLegendre {
    /// `∫_0^b f` for integrands with an algebraic singularity such as
    /// `y^{2ν+1}` at the origin: `panels` equal panels on `[h, b]` with
    /// `h = b/panels`, plus `levels` geometrically shrinking panels
    /// `[h 2^{−k−1}, h 2^{−k}]` that resolve the endpoint.
    pub fn composite_graded<F: FnMut(f64) -> f64>(&self, b: f64, panels: usize, levels: usize, mut f: F) -> f64 {
        let h = b / panels as f64;
        let mut total = self.composite(h, b, panels - 1, &mut f);
        let mut hi = h;
        for _ in 0..levels {
            let lo = 0.5 * hi;
            total += self.composite(lo, hi, 1, &mut f);
            hi = lo;
        }
        total
    }
}

/// `(P_n(x), P_n′(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        for n in 1..12 {
            let g = GaussLegendre::new(n);
            let wsum: f64 = g.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13);
            for deg in 0..(2 * n) {
                let got = g.composite(0.0, 1.0, 1, |x| x.powi(deg as i32));
                assert!((got - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn composite_smooth() {
        let g = GaussLegendre::new(8);
        let got = g.composite(0.0, PI, 16, |x| x.sin());
        assert!((got - 2.0).abs() < 1e-14);
    }

    #[test]
    fn graded_handles_endpoint_power() {
        let g = GaussLegendre::new(10);
        for p in [0.5, 1.5, 2.25, 3.0] {
            let got = g.composite_graded(1.0, 8, 60, |y| y.powf(p));
            assert!((got - 1.0 / (p + 1.0)).abs() < 1e-12, "p={p} got={got}");
        }
    }
}
