//! The exactly solvable position-dependent-mass system.
//!
//! H = −d/dx (1/M) d/dx + V with
//! M(x) = (pλ²/4) sech²(pλx/2) and
//! V(x) = [((a+b−c)² − 1)p/4] e^{pλx} + [c(c−2)p/4] e^{−pλx}.
//! Solutions are hypergeometric in z = e^{pλx}/(1 + e^{pλx}).

mod bound;
mod classify;
mod jet;
mod seed;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bound::BoundState;
pub use classify::{classify_modification, find_seed_nodes, Modification, NODE_SCAN};
pub use jet::{wronskian, wronskian_atoms, Atom, ScaledJet, Solution, WronskianJet};
pub use seed::{seed_residual, Asymptote, SeedSolution};

type C = Complex64;

/// Tolerance on imaginary parts of quantities that must be real.
pub const REALITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub a: C,
    pub b: C,
    pub c: C,
    pub p: f64,
    pub lambda: f64,
    /// Weight of the first seed branch.
    pub alpha: C,
    /// Weight of the second seed branch.
    pub beta: C,
    /// Seed shift: the seed uses (a + ν, b − ν).
    pub nu: f64,
}

impl ModelParams {
    /// Real a, b, c with p = λ = 1, α = 1, β = 0, ν = 0.
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self::complex(C::new(a, 0.0), C::new(b, 0.0), C::new(c, 0.0))
    }

    pub fn complex(a: C, b: C, c: C) -> Self {
        Self {
            a,
            b,
            c,
            p: 1.0,
            lambda: 1.0,
            alpha: C::new(1.0, 0.0),
            beta: C::new(0.0, 0.0),
            nu: 0.0,
        }
    }

    pub fn with_weights(mut self, alpha: f64, beta: f64) -> Self {
        self.alpha = C::new(alpha, 0.0);
        self.beta = C::new(beta, 0.0);
        self
    }

    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }

    pub fn with_scale(mut self, p: f64, lambda: f64) -> Self {
        self.p = p;
        self.lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.a, self.b, self.c, self.alpha, self.beta]
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
            && self.nu.is_finite();
        if !finite {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if !(self.p > 0.0 && self.p.is_finite() && self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "p and lambda must be positive, got p = {}, lambda = {}",
                self.p, self.lambda
            )));
        }
        Ok(())
    }

    /// pλ, the rate in every exponential of the model.
    pub fn pl(&self) -> f64 {
        self.p * self.lambda
    }

    /// σ = c − 1
    pub fn sigma(&self) -> C {
        self.c - 1.0
    }

    /// δ = a + b − c
    pub fn delta(&self) -> C {
        self.a + self.b - self.c
    }

    /// Re σ > −1/2 and Re δ > −1/2.
    pub fn is_physical(&self) -> bool {
        self.c.re > 0.5 && self.delta().re + 0.5 > 0.0
    }

    /// (a + ν, b − ν)
    pub fn shifted_ab(&self) -> (C, C) {
        (self.a + self.nu, self.b - self.nu)
    }

    pub fn conjugate(&self) -> Self {
        Self {
            a: self.a.conj(),
            b: self.b.conj(),
            c: self.c.conj(),
            alpha: self.alpha.conj(),
            beta: self.beta.conj(),
            ..*self
        }
    }

    /// True when every complex parameter is real.
    pub fn is_real(&self) -> bool {
        let (a, b) = self.shifted_ab();
        [a, b, self.c, self.alpha, self.beta].iter().all(|v| v.im == 0.0)
    }

    /// M(x)
    pub fn mass(&self, x: f64) -> f64 {
        self.mass_jet(x)[0]
    }

    /// M, M', M'', M''' at x.
    pub fn mass_jet(&self, x: f64) -> [f64; 4] {
        let k = 0.5 * self.pl();
        let big_k = 0.25 * self.p * self.lambda * self.lambda;
        let (s, t) = sech2_tanh(k * x);
        let base = big_k * s;
        [
            base,
            base * k * (-2.0 * t),
            base * k * k * (6.0 * t * t - 2.0),
            base * k * k * k * (16.0 * t - 24.0 * t * t * t),
        ]
    }

    /// Coefficients (C₊, C₋) of e^{±pλx} in V.
    pub fn potential_coefficients(&self) -> (C, C) {
        let d = self.delta();
        let cp = (d * d - 1.0) * (self.p / 4.0);
        let cm = self.c * (self.c - 2.0) * (self.p / 4.0);
        (cp, cm)
    }

    /// V, V', V'' in complex arithmetic.
    pub fn potential_jet(&self, x: f64) -> [C; 3] {
        let (cp, cm) = self.potential_coefficients();
        let pl = self.pl();
        let ep = (pl * x).exp();
        let em = (-pl * x).exp();
        [
            cp * ep + cm * em,
            (cp * ep - cm * em) * pl,
            (cp * ep + cm * em) * (pl * pl),
        ]
    }

    /// V(x), required to be real.
    pub fn potential(&self, x: f64) -> Result<f64> {
        let v = self.potential_jet(x)[0];
        if v.im.abs() > REALITY_TOL * v.norm().max(1.0) {
            return Err(Error::NonRealPotential { x, im: v.im });
        }
        Ok(v.re)
    }

    /// Real σ and δ for the bound-state family.
    pub fn real_sigma_delta(&self) -> Result<(f64, f64)> {
        if !self.is_physical() {
            return Err(Error::UnphysicalParameters(format!(
                "need Re c > 1/2 and Re(a+b-c) > -1/2, got c = {}, a+b-c = {}",
                self.c,
                self.delta()
            )));
        }
        let (s, d) = (self.sigma(), self.delta());
        if s.im.abs() > 1e-12 || d.im.abs() > 1e-12 {
            return Err(Error::UnphysicalParameters(format!(
                "sigma = {s} and delta = {d} must be real"
            )));
        }
        Ok((s.re, d.re))
    }

    /// Eₙ = p[n² + n(σ+δ+1) + (σ+1)(δ+1)/2]
    pub fn energy(&self, n: usize) -> Result<f64> {
        let (s, d) = self.real_sigma_delta()?;
        let n = n as f64;
        Ok(self.p * (n * n + n * (s + d + 1.0) + (s + 1.0) * (d + 1.0) / 2.0))
    }

    /// μ = p[−a'b' + (a'+b'+1)c/2 − c²/2] for the shifted pair (a', b').
    pub fn factorization_energy(&self) -> C {
        let (a, b) = self.shifted_ab();
        let sum = self.a + self.b;
        (-a * b + (sum + 1.0) * self.c / 2.0 - self.c * self.c / 2.0) * self.p
    }

    pub fn bound_state(&self, n: usize) -> Result<BoundState> {
        BoundState::new(*self, n)
    }

    pub fn seed(&self) -> Result<SeedSolution> {
        SeedSolution::new(*self)
    }
}

/// M(x)
pub fn mass(params: &ModelParams, x: f64) -> f64 {
    params.mass(x)
}

/// V(x)
pub fn potential(params: &ModelParams, x: f64) -> Result<f64> {
    params.potential(x)
}

/// Eₙ
pub fn energy(params: &ModelParams, n: usize) -> Result<f64> {
    params.energy(n)
}

pub fn bound_state(params: &ModelParams, n: usize) -> Result<BoundState> {
    params.bound_state(n)
}

pub fn seed(params: &ModelParams) -> Result<SeedSolution> {
    params.seed()
}

/// (sech² u, tanh u) without overflow for large |u|.
fn sech2_tanh(u: f64) -> (f64, f64) {
    let e = (-2.0 * u.abs()).exp();
    let s = 4.0 * e / ((1.0 + e) * (1.0 + e));
    let t = (1.0 - e) / (1.0 + e);
    (s, if u < 0.0 { -t } else { t })
}

/// The logistic variable z(x) = e^{t}/(1+e^{t}), t = pλx, and what the
/// solutions need from it. `y = 1 − z` is computed directly so it keeps full
/// relative accuracy when z rounds to 1.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Logistic {
    pub z: f64,
    pub y: f64,
    pub ln_y: f64,
    /// softplus(t) = ln(1 + e^{t}) = −ln y
    pub softplus: f64,
    /// dz/dx
    pub dz: f64,
    /// d²z/dx²
    pub d2z: f64,
}

impl Logistic {
    pub fn new(pl: f64, x: f64) -> Self {
        let t = pl * x;
        let e = (-t.abs()).exp();
        let (z, y) = if t >= 0.0 {
            (1.0 / (1.0 + e), e / (1.0 + e))
        } else {
            (e / (1.0 + e), 1.0 / (1.0 + e))
        };
        let softplus = t.max(0.0) + e.ln_1p();
        let dz = pl * z * y;
        Self {
            z,
            y,
            ln_y: -softplus,
            softplus,
            dz,
            d2z: pl * dz * (y - z),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_values() {
        let m = ModelParams::new(5.0, 0.0, 3.0);
        assert!((m.mass(0.0) - 0.25).abs() < 1e-16);
        assert!((m.mass(10.0) - 0.25 / (5.0f64).cosh().powi(2)).abs() < 1e-18);
        assert!((m.mass(10.0) - 4.54e-5).abs() < 1e-7);
        let m4 = m.with_scale(4.0, 1.0);
        assert!((m4.mass(0.0) - 1.0 * 4.0 / 4.0 * 1.0).abs() < 1e-15);
        assert!(m.mass(800.0) >= 0.0 && m.mass(300.0) > 0.0);
    }

    #[test]
    fn mass_derivatives_match_finite_differences() {
        let m = ModelParams::new(1.0, 1.0, 1.0).with_scale(1.7, 0.8);
        let h = 1e-4;
        for &x in &[-3.0, -0.4, 0.0, 1.1, 4.0] {
            let j = m.mass_jet(x);
            for k in 0..3 {
                let fd = (m.mass_jet(x + h)[k] - m.mass_jet(x - h)[k]) / (2.0 * h);
                assert!((j[k + 1] - fd).abs() < 1e-7 * j[0].max(1e-3), "x={x} k={k}");
            }
        }
    }

    #[test]
    fn potential_values() {
        let m = ModelParams::new(5.0, 0.0, 3.0);
        assert!((m.potential(0.0).unwrap() - 1.5).abs() < 1e-15);
        let m = ModelParams::new(3.0, 5.0, 4.0);
        for &x in &[-2.0, 0.0, 1.3] {
            let expect = (23.0 * f64::cosh(x) + 7.0 * f64::sinh(x)) / 4.0;
            assert!((m.potential(x).unwrap() - expect).abs() < 1e-13 * expect);
        }
        let z = ModelParams::complex(C::new(6.1, -5.0), C::new(8.0, 5.0), C::new(4.1, 0.0));
        for &x in &[-5.0, 0.0, 5.0] {
            assert_eq!(z.potential_jet(x)[0].im, 0.0);
        }
        let bad = ModelParams::complex(C::new(6.1, -5.0), C::new(8.0, 4.0), C::new(4.1, 0.0));
        assert!(matches!(bad.potential(0.0), Err(Error::NonRealPotential { .. })));
    }

    #[test]
    fn energies() {
        let m = ModelParams::new(5.0, 0.0, 3.0);
        assert_eq!(m.energy(0).unwrap(), 4.5);
        assert_eq!(m.energy(1).unwrap(), 10.5);
        assert_eq!(m.energy(2).unwrap(), 18.5);
        let m = ModelParams::new(3.0, 5.0, 4.0);
        for n in 0..6 {
            let nf = n as f64;
            assert!((m.energy(n).unwrap() - (nf * nf + 8.0 * nf + 10.0)).abs() < 1e-12);
        }
        let m = ModelParams::new(2.8, 20.0, 4.4);
        for n in 0..6 {
            let nf = n as f64;
            assert!((m.energy(n).unwrap() - (nf * nf + 22.8 * nf + 42.68)).abs() < 1e-11);
        }
        assert!(matches!(
            ModelParams::new(1.0, 0.0, 0.3).energy(0),
            Err(Error::UnphysicalParameters(_))
        ));
    }

    #[test]
    fn factorization_energies() {
        let m = ModelParams::new(2.8, 20.0, 4.4);
        assert!((m.factorization_energy().re + 13.32).abs() < 1e-12);
        let z = ModelParams::complex(C::new(6.1, -5.0), C::new(8.0, 5.0), C::new(4.1, 0.0));
        let mu = z.factorization_energy();
        assert!((mu - C::new(-51.25, 9.5)).norm() < 1e-12);
        // μ₂ = μ₁ + ν(a − b) + ν²
        for nu in [7.2, 10.0] {
            let mu2 = m.with_nu(nu).factorization_energy().re;
            assert!((mu2 - (-13.32 + nu * (2.8 - 20.0) + nu * nu)).abs() < 1e-10);
            assert!((mu2 + 85.32).abs() < 1e-10);
        }
    }

    #[test]
    fn shift_leaves_the_hamiltonian_alone() {
        let m = ModelParams::new(2.8, 20.0, 4.4);
        let s = m.with_nu(7.2);
        for &x in &[-3.0, 0.5, 2.0] {
            assert_eq!(m.potential(x).unwrap(), s.potential(x).unwrap());
            assert_eq!(m.mass(x), s.mass(x));
        }
    }

    #[test]
    fn logistic_is_accurate_at_large_arguments() {
        let l = Logistic::new(1.0, 40.0);
        assert_eq!(l.z, 1.0);
        assert!((l.y - (-40f64).exp()).abs() < 1e-30);
        assert!((l.ln_y + 40.0).abs() < 1e-12);
        let l = Logistic::new(1.0, -40.0);
        assert!((l.z - (-40f64).exp()).abs() < 1e-30);
    }
}
