//! Sixth-order central finite differences, used only by residual oracles.

use num_complex::Complex64;

type C = Complex64;

/// f'(x) from a 7-point stencil.
pub fn d1_7pt<F: Fn(f64) -> C + ?Sized>(f: &F, x: f64, h: f64) -> C {
    let s = |k: f64| f(x + k * h);
    (-s(-3.0) + s(-2.0) * 9.0 - s(-1.0) * 45.0 + s(1.0) * 45.0 - s(2.0) * 9.0 + s(3.0)) / (60.0 * h)
}

/// f''(x) from a 7-point stencil.
pub fn d2_7pt<F: Fn(f64) -> C + ?Sized>(f: &F, x: f64, h: f64) -> C {
    let s = |k: f64| f(x + k * h);
    (s(-3.0) * 2.0 - s(-2.0) * 27.0 + s(-1.0) * 270.0 - s(0.0) * 490.0 + s(1.0) * 270.0 - s(2.0) * 27.0
        + s(3.0) * 2.0)
        / (180.0 * h * h)
}

/// Real-valued convenience wrapper around [`d1_7pt`].
pub fn d1_real<F: Fn(f64) -> f64 + ?Sized>(f: &F, x: f64, h: f64) -> f64 {
    d1_7pt(&|t| C::new(f(t), 0.0), x, h).re
}

/// Real-valued convenience wrapper around [`d2_7pt`].
pub fn d2_real<F: Fn(f64) -> f64 + ?Sized>(f: &F, x: f64, h: f64) -> f64 {
    d2_7pt(&|t| C::new(f(t), 0.0), x, h).re
}

/// (Hf)(x) for H = −d/dx (1/M) d/dx + V with finite-difference derivatives of f
/// and exact M, M'. Returns the value and the sum of magnitudes of its terms.
pub fn apply_hamiltonian<F: Fn(f64) -> f64 + ?Sized>(f: &F, m: f64, dm: f64, v: f64, x: f64, h: f64) -> (f64, f64) {
    let f0 = f(x);
    let f1 = d1_real(f, x, h);
    let f2 = d2_real(f, x, h);
    let terms = [-f2 / m, dm * f1 / (m * m), v * f0];
    (terms.iter().sum(), terms.iter().map(|t| t.abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_low_degree_polynomials() {
        let f = |x: f64| x.powi(6) - 2.0 * x.powi(3) + 1.0;
        let x = 0.7;
        assert!((d1_real(&f, x, 0.1) - (6.0 * x.powi(5) - 6.0 * x * x)).abs() < 1e-11);
        assert!((d2_real(&f, x, 0.1) - (30.0 * x.powi(4) - 12.0 * x)).abs() < 1e-10);
    }

    #[test]
    fn sixth_order_on_exponentials() {
        let f = |x: f64| x.exp();
        assert!((d1_real(&f, 0.2, 1e-2) - 0.2f64.exp()).abs() < 1e-12);
        assert!((d2_real(&f, 0.2, 1e-2) - 0.2f64.exp()).abs() < 1e-10);
    }
}
