use num_complex::Complex64;

use crate::specialfn::SpecialFnError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    SpecialFn(#[from] SpecialFnError),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unphysical parameters: {0}")]
    UnphysicalParameters(String),
    #[error("second seed branch needs 2 - c off the poles, got c = {0}")]
    SecondBranchPole(Complex64),
    #[error("potential has imaginary part {im:e} at x = {x}")]
    NonRealPotential { x: f64, im: f64 },
    #[error("factorization energy {mu} lies above the ground state {e0}")]
    MuAboveGround { mu: f64, e0: f64 },
    #[error("factorization energy {0} is not real")]
    ComplexMu(Complex64),
    #[error("seed solution vanishes at x = {0}")]
    SeedHasNode(f64),
    #[error("Wronskian vanishes at x = {0}")]
    WronskianNode(f64),
    #[error("eta has imaginary part {im:e} at x = {x}")]
    NonRealEta { x: f64, im: f64 },
    #[error("equal factorization energies (C2 = 0) are not supported")]
    DegenerateEnergies,
    #[error("factorization energies must be real and distinct or a complex-conjugate pair: {0}, {1}")]
    InvalidEnergyPair(Complex64, Complex64),
    #[error("normalizability test inconclusive: {0}")]
    Inconclusive(String),
    #[error("z = U2/U1 is not monotone on [{0}, {1}]")]
    NonMonotoneZ(f64, f64),
    #[error("mass is not positive at x = {0}")]
    NonPositiveMass(f64),
    #[error("non-finite sample at x = {0}")]
    NonFiniteSample(f64),
    #[error("box [{0}, {1}] is too large for double precision")]
    BoxTooLarge(f64, f64),
    #[error("requested {k} eigenvalues from a grid with {n} points")]
    OutOfRange { k: usize, n: usize },
    #[error("inverse iteration did not converge near {0}")]
    NonConvergence(f64),
    #[error("spectrum not converged: {0}")]
    UnconvergedInput(String),
    #[error("construction does not match the requested modification: {0}")]
    ModeMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
