//! One-dimensional quadrature rules: Gauss–Legendre, Fejér's first rule and
//! an adaptive Gauss–Kronrod integrator.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1], nodes in decreasing order
/// (so that `acos` of them increases).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, d) = legendre_and_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        weights[i] = w;
        nodes[n - 1 - i] = -x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
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

/// Fejér's first rule on the midpoints θ_i = (i + ½)π/n for ∫₀^π f(θ) sin θ dθ.
///
/// Exact for polynomials in cos θ of degree ≤ n − 1; all weights are positive.
pub fn fejer_first(n: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let thetas: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * PI / nf).collect();
    let weights = thetas
        .iter()
        .map(|&t| {
            let s: f64 = (1..=n / 2)
                .map(|k| {
                    let kf = k as f64;
                    (2.0 * kf * t).cos() / (4.0 * kf * kf - 1.0)
                })
                .sum();
            2.0 / nf * (1.0 - 2.0 * s)
        })
        .collect();
    (thetas, weights)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive 15-point Gauss–Kronrod integration of `f` over [a, b].
///
/// Bisects the interval with the largest error estimate until the summed
/// estimate drops below `max(abs_tol, rel_tol·|I|)`. Integrable endpoint
/// singularities are fine because nodes never touch the endpoints.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut parts = vec![(a, b, gk15(&f, a, b))];
    for _ in 0..2000 {
        let total: f64 = parts.iter().map(|p| p.2 .0).sum();
        let err: f64 = parts.iter().map(|p| p.2 .1).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .expect("non-empty");
        let (lo, hi, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            parts.push((lo, hi, gk15(&f, lo, hi)));
            break;
        }
        parts.push((lo, mid, gk15(&f, lo, mid)));
        parts.push((mid, hi, gk15(&f, mid, hi)));
    }
    parts.sort_by(|x, y| x.0.total_cmp(&y.0));
    parts.iter().map(|p| p.2 .0).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cos_power_integral(k: u32) -> f64 {
        // ∫₀^π cos^k θ sin θ dθ = ∫_{-1}^{1} μ^k dμ
        if k % 2 == 1 {
            0.0
        } else {
            2.0 / (k as f64 + 1.0)
        }
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in [4usize, 7, 16, 33] {
            let (x, w) = gauss_legendre(n);
            for k in 0..(2 * n as u32) {
                let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                assert_abs_diff_eq!(s, cos_power_integral(k), epsilon = 1e-13);
            }
            assert!(x.windows(2).all(|p| p[0] > p[1]));
        }
    }

    #[test]
    fn fejer_exactness_and_positivity() {
        for n in [4usize, 9, 32] {
            let (t, w) = fejer_first(n);
            assert!(w.iter().all(|&w| w > 0.0));
            for k in 0..n as u32 {
                let s: f64 = t.iter().zip(&w).map(|(t, w)| w * t.cos().powi(k as i32)).sum();
                assert_abs_diff_eq!(s, cos_power_integral(k), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn adaptive_handles_log_endpoint() {
        // ∫₀¹ ln x dx = -1
        let v = integrate(|x: f64| x.ln(), 0.0, 1.0, 1e-14, 1e-14);
        assert_abs_diff_eq!(v, -1.0, epsilon = 1e-12);
        let v = integrate(|x: f64| x.sin(), 0.0, PI, 1e-15, 1e-15);
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-14);
    }
}
