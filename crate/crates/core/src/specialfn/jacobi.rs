//! Jacobi polynomials P_n^{(σ,δ)}(x) by three-term recurrence.

/// P_n^{(σ,δ)}(x).
///
/// Falls back to the explicit binomial sum when the recurrence divides by zero,
/// which only happens for σ + δ a negative integer.
pub fn jacobi_p(n: usize, sigma: f64, delta: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let ab = sigma + delta;
    let mut p0 = 1.0;
    let mut p1 = (sigma + 1.0) + (ab + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let k = k as f64;
        let s = 2.0 * k + ab;
        let den = 2.0 * k * (k + ab) * (s - 2.0);
        if den == 0.0 {
            return explicit_sum(n, sigma, delta, x);
        }
        let p2 = ((s - 1.0) * (s * (s - 2.0) * x + sigma * sigma - delta * delta) * p1
            - 2.0 * (k + sigma - 1.0) * (k + delta - 1.0) * s * p0)
            / den;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// d/dx P_n^{(σ,δ)}(x) = (n + σ + δ + 1)/2 · P_{n−1}^{(σ+1,δ+1)}(x).
pub fn jacobi_p_dx(n: usize, sigma: f64, delta: f64, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    0.5 * (n as f64 + sigma + delta + 1.0) * jacobi_p(n - 1, sigma + 1.0, delta + 1.0, x)
}

/// Second x-derivative of P_n^{(σ,δ)}.
pub fn jacobi_p_d2x(n: usize, sigma: f64, delta: f64, x: f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    0.5 * (n as f64 + sigma + delta + 1.0) * jacobi_p_dx(n - 1, sigma + 1.0, delta + 1.0, x)
}

// Σ_s C(n+σ, n−s) C(n+δ, s) ((x−1)/2)^s ((x+1)/2)^{n−s}
fn explicit_sum(n: usize, sigma: f64, delta: f64, x: f64) -> f64 {
    let nf = n as f64;
    let lo = (x - 1.0) / 2.0;
    let hi = (x + 1.0) / 2.0;
    (0..=n)
        .map(|s| {
            binom(nf + sigma, n - s) * binom(nf + delta, s) * lo.powi(s as i32) * hi.powi((n - s) as i32)
        })
        .sum()
}

fn binom(r: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (r - j as f64) / (j as f64 + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre(n: usize, x: f64) -> f64 {
        let (mut p0, mut p1) = (1.0, x);
        if n == 0 {
            return 1.0;
        }
        for k in 1..n {
            let k = k as f64;
            let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
            p0 = p1;
            p1 = p2;
        }
        p1
    }

    #[test]
    fn low_orders() {
        assert_eq!(jacobi_p(0, 0.7, -0.3, 0.2), 1.0);
        assert!((jacobi_p(1, 2.0, 2.0, 1.0) - 3.0).abs() < 1e-15);
        assert!((jacobi_p(3, 0.0, 0.0, 0.5) + 0.4375).abs() < 1e-15);
        assert!((jacobi_p(2, 0.0, 0.0, 0.3) + 0.365).abs() < 1e-15);
    }

    #[test]
    fn legendre_special_case() {
        for n in 0..12 {
            for &x in &[-0.9, -0.2, 0.0, 0.45, 0.99] {
                assert!((jacobi_p(n, 0.0, 0.0, x) - legendre(n, x)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn recurrence_matches_explicit_sum() {
        for n in 0..9 {
            for &(s, d) in &[(0.5, 1.5), (-0.4, 2.2), (3.0, 0.0)] {
                for &x in &[-0.7, 0.1, 0.8] {
                    let a = jacobi_p(n, s, d, x);
                    let b = explicit_sum(n, s, d, x);
                    assert!((a - b).abs() < 1e-11 * b.abs().max(1.0), "n={n} s={s} d={d} x={x}");
                }
            }
        }
    }

    #[test]
    fn degenerate_parameters_use_the_sum() {
        // σ + δ = −2 makes the n = 2 recurrence denominator vanish
        let v = jacobi_p(2, -0.5, -1.5, 0.3);
        assert!((v - explicit_sum(2, -0.5, -1.5, 0.3)).abs() < 1e-14);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let (n, s, d) = (5, 1.2, 0.4);
        let h = 1e-5;
        for &x in &[-0.5, 0.3] {
            let fd1 = (jacobi_p(n, s, d, x + h) - jacobi_p(n, s, d, x - h)) / (2.0 * h);
            let fd2 = (jacobi_p(n, s, d, x + h) - 2.0 * jacobi_p(n, s, d, x) + jacobi_p(n, s, d, x - h)) / (h * h);
            assert!((jacobi_p_dx(n, s, d, x) - fd1).abs() < 1e-7 * fd1.abs().max(1.0));
            assert!((jacobi_p_d2x(n, s, d, x) - fd2).abs() < 1e-3 * fd2.abs().max(1.0));
        }
    }
}
