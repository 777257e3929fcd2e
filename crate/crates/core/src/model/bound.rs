//! Normalized bound states ψₙ of the model.

use num_complex::Complex64;

use super::jet::{Atom, Solution};
use super::{Logistic, ModelParams};
use crate::error::Result;
use crate::specialfn::{jacobi_p, jacobi_p_d2x, jacobi_p_dx, log_gamma};

type C = Complex64;

/// ψₙ(x) = N e^{pλ(σ+1)x/2} (1+e^{pλx})^{−(σ+δ+2)/2} P_n^{(σ,δ)}(−tanh(pλx/2)),
/// N² = pλ(2n+σ+δ+1) n! Γ(n+σ+δ+1) / (Γ(n+σ+1) Γ(n+δ+1)).
#[derive(Debug, Clone)]
pub struct BoundState {
    params: ModelParams,
    n: usize,
    sigma: f64,
    delta: f64,
    energy: f64,
    ln_norm: f64,
}

impl BoundState {
    pub fn new(params: ModelParams, n: usize) -> Result<Self> {
        params.validate()?;
        let (sigma, delta) = params.real_sigma_delta()?;
        let energy = params.energy(n)?;
        let nf = n as f64;
        let lg = |v: f64| log_gamma(C::new(v, 0.0)).map(|g| g.re);
        let ln_norm2 = params.pl().ln() + (2.0 * nf + sigma + delta + 1.0).ln() + lg(nf + 1.0)?
            + lg(nf + sigma + delta + 1.0)?
            - lg(nf + sigma + 1.0)?
            - lg(nf + delta + 1.0)?;
        Ok(Self {
            params,
            n,
            sigma,
            delta,
            energy,
            ln_norm: 0.5 * ln_norm2,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn energy_value(&self) -> f64 {
        self.energy
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// ψₙ(x) as a real number.
    pub fn psi(&self, x: f64) -> Result<f64> {
        Ok(self.value(x)?.re)
    }

    /// ψₙ'(x) as a real number.
    pub fn dpsi(&self, x: f64) -> Result<f64> {
        Ok(self.derivative(x)?.re)
    }
}

impl Solution for BoundState {
    fn atoms(&self, x: f64) -> Result<Vec<Atom>> {
        let pl = self.params.pl();
        let l = Logistic::new(pl, x);
        let (s, d, n) = (self.sigma, self.delta, self.n);
        let k = 0.5 * (s + d + 2.0);
        let rate = 0.5 * pl * (s + 1.0);
        let phi = [
            self.ln_norm + rate * x - k * l.softplus,
            rate - k * pl * l.z,
            -k * pl * l.dz,
        ];
        // argument −tanh(pλx/2) = 1 − 2z = y − z
        let u = l.y - l.z;
        let du = -2.0 * l.dz;
        let d2u = -2.0 * l.d2z;
        let p0 = jacobi_p(n, s, d, u);
        let p1 = jacobi_p_dx(n, s, d, u);
        let p2 = jacobi_p_d2x(n, s, d, u);
        let re = |v: f64| C::new(v, 0.0);
        Ok(vec![Atom {
            phi: phi.map(re),
            s: [re(p0), re(p1 * du), re(p2 * du * du + p1 * d2u)],
        }])
    }

    fn energy(&self) -> C {
        C::new(self.energy, 0.0)
    }

    fn is_real(&self) -> bool {
        true
    }
}
