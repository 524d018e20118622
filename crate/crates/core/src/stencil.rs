//! Finite-difference weights on arbitrary node sets.

/// Fornberg's algorithm: weights `c[k][j]` such that
/// f^{(k)}(z) ≈ Σ_j c[k][j] f(x_j) for k = 0..=order.
pub fn fd_weights(z: f64, x: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Fourth-order centered first derivative with step `h`.
pub fn centered_d1<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Sixth-order centered first derivative with step `h`.
pub fn centered_d1_6<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> f64 {
    let d = |k: f64| f(x + k * h) - f(x - k * h);
    (45.0 * d(1.0) - 9.0 * d(2.0) + d(3.0)) / (60.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn classic_stencils() {
        let w = fd_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_abs_diff_eq!(w[1][0], -0.5);
        assert_abs_diff_eq!(w[1][2], 0.5);
        assert_abs_diff_eq!(w[2][1], -2.0);
        let w = fd_weights(0.0, &[0.0, 1.0, 2.0, 3.0], 2);
        for (a, b) in w[2].iter().zip([2.0, -5.0, 4.0, -1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn centered_orders() {
        let f = |t: f64| t.powi(4) - 2.0 * t.powi(3);
        assert_abs_diff_eq!(centered_d1(&f, 0.7, 0.1), 4.0 * 0.7f64.powi(3) - 6.0 * 0.49, epsilon = 1e-12);
        let g = |t: f64| t.powi(6);
        assert_abs_diff_eq!(centered_d1_6(&g, 0.3, 0.1), 6.0 * 0.3f64.powi(5), epsilon = 1e-12);
    }

    #[test]
    fn exact_on_polynomials_nonuniform() {
        let x = [0.1, 0.25, 0.3, 0.55];
        let w = fd_weights(0.2, &x, 2);
        let f = |t: f64| 1.0 + 2.0 * t - 3.0 * t * t + t * t * t;
        let d1: f64 = w[1].iter().zip(&x).map(|(w, &t)| w * f(t)).sum();
        let d2: f64 = w[2].iter().zip(&x).map(|(w, &t)| w * f(t)).sum();
        assert_abs_diff_eq!(d1, 2.0 - 6.0 * 0.2 + 3.0 * 0.04, epsilon = 1e-12);
        assert_abs_diff_eq!(d2, -6.0 + 6.0 * 0.2, epsilon = 1e-11);
    }
}
