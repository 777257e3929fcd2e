//! Complex log-gamma via Stirling's series with upward recurrence and reflection.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{is_nonpositive_integer, SpecialFnError};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Stirling coefficients B_{2k} / (2k (2k - 1)).
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Below this modulus the argument is shifted upward before Stirling's series is applied.
const STIRLING_THRESHOLD: f64 = 15.0;

/// Principal-branch log Γ(z).
///
/// The imaginary part is reduced into (-π, π], so `exp(log_gamma(z))` is Γ(z)
/// and for real positive `z` the result is real.
pub fn log_gamma(z: Complex64) -> Result<Complex64, SpecialFnError> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(SpecialFnError::NonFinite("log_gamma argument"));
    }
    if is_nonpositive_integer(z, 0.0) {
        return Err(SpecialFnError::PoleAtNonPositiveInteger(z));
    }
    let raw = log_gamma_continuous(z);
    Ok(Complex64::new(raw.re, wrap_phase(raw.im)))
}

/// Γ(z). Poles are reported as errors.
pub fn gamma(z: Complex64) -> Result<Complex64, SpecialFnError> {
    log_gamma(z).map(Complex64::exp)
}

/// 1/Γ(z), an entire function: exactly zero at the non-positive integers.
pub fn rgamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z, 0.0) {
        return Complex64::new(0.0, 0.0);
    }
    (-log_gamma_continuous(z)).exp()
}

/// sin(πz) with the integer part of Re z removed first, so that the result keeps
/// full relative accuracy close to the zeros.
pub fn sin_pi(z: Complex64) -> Complex64 {
    let n = z.re.round();
    let r = Complex64::new(z.re - n, z.im);
    let s = (r * PI).sin();
    if n.rem_euclid(2.0) == 1.0 {
        -s
    } else {
        s
    }
}

fn wrap_phase(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut t = theta - two_pi * (theta / two_pi).round();
    if t <= -PI {
        t += two_pi;
    }
    t
}

// log Γ on the branch that is continuous away from the negative real axis; only
// its exponential is used internally, so the branch does not matter there.
fn log_gamma_continuous(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = sin_pi(z);
        return Complex64::new(LN_PI, 0.0) - s.ln() - log_gamma_continuous(Complex64::new(1.0, 0.0) - z);
    }
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    while w.norm() < STIRLING_THRESHOLD {
        prod *= w;
        w += 1.0;
    }
    let shift = prod.ln();
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for coef in STIRLING {
        series += pow * coef;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + series - shift
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn known_values() {
        assert!(log_gamma(c(1.0)).unwrap().norm() < 1e-14);
        let half = log_gamma(c(0.5)).unwrap();
        assert!((half.re - 0.572_364_942_924_700_1).abs() < 1e-14);
        assert!(half.im.abs() < 1e-15);
        let five = log_gamma(c(5.0)).unwrap();
        assert!((five.re - 24f64.ln()).abs() < 1e-14 * 24f64.ln());
    }

    #[test]
    fn poles_are_errors() {
        assert!(matches!(log_gamma(c(0.0)), Err(SpecialFnError::PoleAtNonPositiveInteger(_))));
        assert!(matches!(log_gamma(c(-3.0)), Err(SpecialFnError::PoleAtNonPositiveInteger(_))));
        assert_eq!(rgamma(c(-2.0)), c(0.0));
    }

    #[test]
    fn negative_arguments_follow_reflection() {
        // Γ(-2.4) = Γ(0.6) / ((-2.4)(-1.4)(-0.4))
        let g06 = gamma(c(0.6)).unwrap().re;
        let expect = g06 / (-2.4 * -1.4 * -0.4);
        let got = gamma(c(-2.4)).unwrap();
        assert!((got.re - expect).abs() < 1e-13 * expect.abs());
        assert!(got.im.abs() < 1e-13 * expect.abs());
    }

    #[test]
    fn recurrence_holds_for_complex_arguments() {
        let z = Complex64::new(0.3, 2.7);
        let lhs = gamma(z + 1.0).unwrap();
        let rhs = z * gamma(z).unwrap();
        assert!((lhs - rhs).norm() < 1e-13 * lhs.norm());
    }

    #[test]
    fn reflection_is_accurate_next_to_poles() {
        let eps = 1e-6;
        // Γ(-10 + ε) ≈ 1 / (10! ε) (1 + ε ψ(11))
        let g = gamma(c(-10.0 + eps)).unwrap().re;
        let digamma_11 = 2.351_752_589_066_721_4;
        let approx = 1.0 / (3_628_800.0 * eps) * (1.0 + eps * digamma_11);
        assert!((g - approx).abs() < 1e-9 * approx.abs());
    }

    #[test]
    fn conjugation_symmetry() {
        let z = Complex64::new(-3.9, -5.0);
        let a = log_gamma(z).unwrap();
        let b = log_gamma(z.conj()).unwrap();
        assert!((a.conj() - b).norm() < 1e-13);
    }
}
