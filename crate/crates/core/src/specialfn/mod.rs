//! Special functions behind the solvable model: complex log-gamma, Gauss ₂F₁ with
//! complex parameters, and Jacobi polynomials.

mod gamma;
mod hyp2f1;
mod jacobi;

use num_complex::Complex64;

pub use gamma::{gamma, log_gamma, rgamma, sin_pi};
pub use hyp2f1::{
    gauss_2f1, gauss_2f1_dz, Expansion, Gauss2F1, Hyp2f1Config, Hyp2f1Value, Term, Variable,
};
pub use jacobi::{jacobi_p, jacobi_p_d2x, jacobi_p_dx};

/// Complex scalar used for every parameter that may leave the real line.
pub type ComplexScalar = Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecialFnError {
    #[error("gamma function pole at non-positive integer {0}")]
    PoleAtNonPositiveInteger(Complex64),
    #[error("2F1 lower parameter c = {0} is a non-positive integer")]
    PoleAtC(Complex64),
    #[error("2F1 series failed to converge after {terms} terms at z = {z}")]
    NonConvergence { terms: usize, z: f64 },
    #[error("2F1 argument z = {0} outside [0, 1)")]
    Domain(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

/// True when `z` lies within `tol` of one of 0, -1, -2, ...
pub fn is_nonpositive_integer(z: Complex64, tol: f64) -> bool {
    let n = z.re.round();
    n <= 0.0 && (z.re - n).abs() <= tol * n.abs().max(1.0) && z.im.abs() <= tol
}

/// True when `z` lies within `tol` of an integer (any sign).
pub fn is_near_integer(z: Complex64, tol: f64) -> bool {
    let n = z.re.round();
    (z.re - n).abs() <= tol * n.abs().max(1.0) && z.im.abs() <= tol
}
