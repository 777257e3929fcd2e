//! First-order intertwining ℒ = M^{−1/2} d/dx + A with A = −𝒰'/(√M 𝒰).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd;
use crate::model::{classify_modification, find_seed_nodes, Modification, ModelParams, SeedSolution, Solution};
use crate::numspec::{l_doubling, Normalizability, SpectralLaw};

/// A and A' from the mass jet, τ = u'/u and u''/u.
pub fn superpotential_jet(m: &[f64; 4], tau: f64, ratio2: f64) -> (f64, f64) {
    let [m0, m1, ..] = *m;
    let sm = m0.sqrt();
    let dtau = ratio2 - tau * tau;
    (-tau / sm, -dtau / sm + tau * m1 / (2.0 * m0 * sm))
}

/// V̄ = V + 2A'/√M − 3M'²/(4M³) + M''/(2M²).
pub fn partner_potential_from(m: &[f64; 4], v: f64, tau: f64, ratio2: f64) -> f64 {
    let [m0, m1, m2, _] = *m;
    let (_, da) = superpotential_jet(m, tau, ratio2);
    v + 2.0 * da / m0.sqrt() - 0.75 * m1 * m1 / (m0 * m0 * m0) + 0.5 * m2 / (m0 * m0)
}

/// Left-hand side of A'/√M − AM'/(2M^{3/2}) − A² + V − μ.
pub fn riccati_residual_from(m: &[f64; 4], v: f64, mu: f64, tau: f64, ratio2: f64) -> f64 {
    let [m0, m1, ..] = *m;
    let (a, da) = superpotential_jet(m, tau, ratio2);
    let sm = m0.sqrt();
    da / sm - a * m1 / (2.0 * m0 * sm) - a * a + v - mu
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorizationResiduals {
    /// max |(ℒ†ℒ − (H − μ))φ| relative to the size of (H − μ)φ
    pub lower: f64,
    /// max |(ℒℒ† − (H̄ − μ))φ| relative to the size of (H̄ − μ)φ
    pub upper: f64,
}

#[derive(Debug, Clone)]
pub struct FirstOrderPartner {
    params: ModelParams,
    seed: SeedSolution,
    mu: f64,
    modification: Modification,
}

impl FirstOrderPartner {
    /// Builds the partner from a real nodeless seed with μ ≤ E₀.
    pub fn new(seed: SeedSolution) -> Result<Self> {
        let modification = classify_modification(&seed)?;
        if modification == Modification::Invalid {
            let (lo, hi, n) = crate::model::NODE_SCAN;
            if let Some(&x) = find_seed_nodes(&seed, lo, hi, n)?.first() {
                return Err(Error::SeedHasNode(x));
            }
        }
        Ok(Self {
            params: *seed.params(),
            mu: seed.mu().re,
            seed,
            modification,
        })
    }

    pub fn from_params(params: ModelParams) -> Result<Self> {
        Self::new(SeedSolution::new(params)?)
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn seed(&self) -> &SeedSolution {
        &self.seed
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn modification(&self) -> Modification {
        self.modification
    }

    /// Spectrum of H̄ in terms of the spectrum of H.
    pub fn spectral_law(&self) -> Option<SpectralLaw> {
        match self.modification {
            Modification::DeleteGround => Some(SpectralLaw::ShiftByOne),
            Modification::StrictIso => Some(SpectralLaw::Equal),
            Modification::CreateBelowGround => Some(SpectralLaw::InsertOne(self.mu)),
            Modification::Invalid => None,
        }
    }

    /// (τ, 𝒰''/𝒰) at x.
    fn log_jet(&self, x: f64) -> Result<(f64, f64)> {
        let j = self.seed.jet(x)?;
        if j.is_near_zero(1e-13) {
            return Err(Error::SeedHasNode(x));
        }
        Ok((j.log_derivative().re, j.second_ratio().re))
    }

    /// A(x)
    pub fn superpotential(&self, x: f64) -> Result<f64> {
        let (tau, r2) = self.log_jet(x)?;
        Ok(superpotential_jet(&self.params.mass_jet(x), tau, r2).0)
    }

    /// A'(x)
    pub fn superpotential_derivative(&self, x: f64) -> Result<f64> {
        let (tau, r2) = self.log_jet(x)?;
        Ok(superpotential_jet(&self.params.mass_jet(x), tau, r2).1)
    }

    /// V̄(x)
    pub fn partner_potential(&self, x: f64) -> Result<f64> {
        let (tau, r2) = self.log_jet(x)?;
        let v = self.params.potential(x)?;
        Ok(partner_potential_from(&self.params.mass_jet(x), v, tau, r2))
    }

    /// Riccati residual at x, relative to max(1, |V − μ|).
    pub fn riccati_residual(&self, x: f64) -> Result<f64> {
        let (tau, r2) = self.log_jet(x)?;
        let v = self.params.potential(x)?;
        let r = riccati_residual_from(&self.params.mass_jet(x), v, self.mu, tau, r2);
        Ok(r.abs() / (v - self.mu).abs().max(1.0))
    }

    /// (ℒψ, (ℒψ)') at x for a solution ψ of H at its own energy.
    pub fn apply_l<S: Solution + ?Sized>(&self, psi: &S, x: f64) -> Result<(f64, f64)> {
        let (tau, r2) = self.log_jet(x)?;
        let m = self.params.mass_jet(x);
        let j = psi.jet(x)?;
        let scale = j.log_scale.exp();
        let (p0, p1, p2) = (j.v[0].re * scale, j.v[1].re * scale, j.v[2].re * scale);
        let sm = m[0].sqrt();
        let dtau = r2 - tau * tau;
        let g = (p1 - tau * p0) / sm;
        let dg = (p2 - dtau * p0 - tau * p1) / sm - m[1] / (2.0 * m[0]) * g;
        Ok((g, dg))
    }

    /// (ℒ†f)(x) = −(f/√M)' − τ f/√M from f and f'.
    pub fn apply_l_dagger(&self, f: f64, df: f64, x: f64) -> Result<f64> {
        let (tau, _) = self.log_jet(x)?;
        let m = self.params.mass_jet(x);
        let sm = m[0].sqrt();
        Ok(-(df / sm - f * m[1] / (2.0 * m[0] * sm)) - tau * f / sm)
    }

    /// ψ̄_μ = √M/𝒰, unnormalized.
    pub fn missing_state(&self, x: f64) -> Result<f64> {
        let j = self.seed.jet(x)?;
        if j.is_near_zero(1e-13) {
            return Err(Error::SeedHasNode(x));
        }
        let ln = 0.5 * self.params.mass(x).ln() - j.ln_abs();
        Ok(ln.exp().copysign(j.v[0].re))
    }

    /// (ψ̄_μ, ψ̄_μ') at x.
    pub fn missing_state_jet(&self, x: f64) -> Result<(f64, f64)> {
        let (tau, _) = self.log_jet(x)?;
        let m = self.params.mass_jet(x);
        let f = self.missing_state(x)?;
        Ok((f, f * (m[1] / (2.0 * m[0]) - tau)))
    }

    pub fn missing_state_normalizability(&self) -> Result<Normalizability> {
        l_doubling(|x| self.missing_state(x))
    }

    /// Residuals of ℒ†ℒ = H − μ and ℒℒ† = H̄ − μ applied to φ on `xs`.
    ///
    /// Compositions are differentiated with 7-point stencils of step `h`.
    pub fn factorization_residuals<F: Fn(f64) -> f64>(&self, phi: F, xs: &[f64], h: f64) -> Result<FactorizationResiduals> {
        let mut lower = (0.0f64, 0.0f64);
        let mut upper = (0.0f64, 0.0f64);
        for &x in xs {
            let m = self.params.mass_jet(x);
            // ℒφ as a function, then ℒ† of it
            let l_phi = |t: f64| -> f64 {
                let (tau, _) = self.log_jet(t).unwrap_or((f64::NAN, f64::NAN));
                (fd::d1_real(&phi, t, h) - tau * phi(t)) / self.params.mass(t).sqrt()
            };
            let ldl = self.apply_l_dagger(l_phi(x), fd::d1_real(&l_phi, x, h), x)?;
            let (hphi, scale) = fd::apply_hamiltonian(&phi, m[0], m[1], self.params.potential(x)?, x, h);
            let target = hphi - self.mu * phi(x);
            let d = finite((ldl - target).abs(), x)?;
            lower.0 = lower.0.max(d);
            lower.1 = lower.1.max(scale + (self.mu * phi(x)).abs());

            let ld_phi = |t: f64| -> f64 {
                self.apply_l_dagger(phi(t), fd::d1_real(&phi, t, h), t)
                    .unwrap_or(f64::NAN)
            };
            let (tau, _) = self.log_jet(x)?;
            let lld = (fd::d1_real(&ld_phi, x, h) - tau * ld_phi(x)) / m[0].sqrt();
            let vbar = self.partner_potential(x)?;
            let (hbar_phi, scale) = fd::apply_hamiltonian(&phi, m[0], m[1], vbar, x, h);
            let target = hbar_phi - self.mu * phi(x);
            let d = finite((lld - target).abs(), x)?;
            upper.0 = upper.0.max(d);
            upper.1 = upper.1.max(scale + (self.mu * phi(x)).abs());
        }
        Ok(FactorizationResiduals {
            lower: lower.0 / lower.1.max(f64::MIN_POSITIVE),
            upper: upper.0 / upper.1.max(f64::MIN_POSITIVE),
        })
    }

    /// max over `xs` of |H̄(ℒψ) − E(ℒψ)| relative to the size of its terms.
    pub fn intertwining_residual<S: Solution + ?Sized>(&self, psi: &S, xs: &[f64], h: f64) -> Result<f64> {
        let e = psi.energy().re;
        let g = |t: f64| self.apply_l(psi, t).map(|v| v.0).unwrap_or(f64::NAN);
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for &x in xs {
            let m = self.params.mass_jet(x);
            let (hg, scale) = fd::apply_hamiltonian(&g, m[0], m[1], self.partner_potential(x)?, x, h);
            let eg = e * g(x);
            num = num.max(finite((hg - eg).abs(), x)?);
            den = den.max(scale + eg.abs());
        }
        Ok(num / den.max(f64::MIN_POSITIVE))
    }
}

pub(crate) fn finite(v: f64, x: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteSample(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn partner(p: ModelParams) -> FirstOrderPartner {
        FirstOrderPartner::from_params(p).unwrap()
    }

    #[test]
    fn ground_state_superpotential_vanishes_at_origin() {
        let f = partner(ModelParams::new(5.0, 0.0, 3.0));
        assert!(f.superpotential(0.0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn constant_mass_limit() {
        let (a, _) = superpotential_jet(&[1.0, 0.0, 0.0, 0.0], 0.7, 2.0);
        assert_eq!(a, -0.7);
    }

    #[test]
    fn deletion_partner_value() {
        let f = partner(ModelParams::new(5.0, 0.0, 3.0));
        assert!((f.partner_potential(0.0).unwrap() - 6.5).abs() < 1e-12);
        assert_eq!(f.spectral_law(), Some(SpectralLaw::ShiftByOne));
    }

    #[test]
    fn kernel_and_missing_state() {
        let f = partner(ModelParams::new(3.0, 5.0, 4.0));
        for &x in &[-3.0, 0.0, 2.0] {
            let (g, _) = f.apply_l(f.seed(), x).unwrap();
            assert!(g.abs() < 1e-10 * f.seed().value(x).unwrap().norm().max(1.0));
            let (m, dm) = f.missing_state_jet(x).unwrap();
            assert!(f.apply_l_dagger(m, dm, x).unwrap().abs() < 1e-10 * m.abs());
        }
    }
}
