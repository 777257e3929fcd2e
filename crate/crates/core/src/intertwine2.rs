//! Second-order intertwining ℒ = (1/M) d²/dx² + η d/dx + γ built from two seeds.
//!
//! With P = 𝒰₁𝒰₂, W = 𝒰₁𝒰₂' − 𝒰₁'𝒰₂ and Δ = μ₁ − μ₂ the seed equations give
//! (W/M)' = ΔP, so W' = (M'/M)W + MΔP. Everything below is expressed through
//! q = P/W, which is scale free and finite wherever W has no zero.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd;
use crate::intertwine1::{finite, partner_potential_from};
use crate::model::{wronskian_atoms, ModelParams, SeedSolution, Solution, REALITY_TOL};
use crate::numspec::{l_doubling, Normalizability, SpectralLaw};

type C = Complex64;

/// Window and sample count for certifying that W has no zero.
pub const WRONSKIAN_SCAN: (f64, f64, usize) = (-30.0, 30.0, 4001);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SecondOrderCase {
    RealDistinct,
    ComplexConjugate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Modification2 {
    DeleteTwo,
    StrictIso,
    CreateTwo,
    Invalid,
}

/// η, η', η'', γ, V̄ at one point (complex; real for valid partners).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalData {
    pub m: [f64; 4],
    pub v: [C; 3],
    pub eta: [C; 3],
    pub gamma: C,
    pub vbar: C,
}

#[derive(Debug, Clone)]
pub struct SecondOrderPartner {
    params: ModelParams,
    first: SeedSolution,
    second: SeedSolution,
    mu1: C,
    mu2: C,
    case: SecondOrderCase,
    modification: Modification2,
}

fn same_hamiltonian(p: &ModelParams, q: &ModelParams) -> bool {
    let (a1, b1) = p.potential_coefficients();
    let (a2, b2) = q.potential_coefficients();
    let close = |u: C, v: C| (u - v).norm() <= 1e-12 * u.norm().max(v.norm()).max(1.0);
    p.p == q.p && p.lambda == q.lambda && close(a1, a2) && close(b1, b2)
}

impl SecondOrderPartner {
    /// Real distinct factorization energies μ₁ ≠ μ₂.
    pub fn real(first: SeedSolution, second: SeedSolution) -> Result<Self> {
        let (mu1, mu2) = (first.mu(), second.mu());
        let real = |m: C| m.im.abs() <= 1e-12 * m.norm().max(1.0);
        if !(real(mu1) && real(mu2) && first.is_real() && second.is_real()) {
            return Err(Error::InvalidEnergyPair(mu1, mu2));
        }
        let mut s = Self::build(first, second, SecondOrderCase::RealDistinct)?;
        s.modification = s.classify()?;
        Ok(s)
    }

    /// μ and μ̄ with Im μ ≠ 0; the partner seed is the conjugated one.
    pub fn complex(seed: SeedSolution) -> Result<Self> {
        let mu = seed.mu();
        if mu.im.abs() <= 1e-12 * mu.norm().max(1.0) {
            return Err(Error::InvalidEnergyPair(mu, mu.conj()));
        }
        seed.params().potential(0.0)?;
        let second = seed.conjugate()?;
        let mut s = Self::build(seed, second, SecondOrderCase::ComplexConjugate)?;
        // w' = |𝒰|² ≥ 0 makes the spectrum unchanged once W has no zero
        s.modification = Modification2::StrictIso;
        Ok(s)
    }

    pub fn from_params(first: ModelParams, second: ModelParams) -> Result<Self> {
        Self::real(SeedSolution::new(first)?, SeedSolution::new(second)?)
    }

    fn build(first: SeedSolution, second: SeedSolution, case: SecondOrderCase) -> Result<Self> {
        if !same_hamiltonian(first.params(), second.params()) {
            return Err(Error::ModeMismatch("seeds belong to different Hamiltonians".into()));
        }
        let (mu1, mu2) = (first.mu(), second.mu());
        let c2 = ((mu1 - mu2) / 2.0).powi(2);
        if c2.norm() <= 1e-24 * mu1.norm().max(1.0).powi(2) {
            return Err(Error::DegenerateEnergies);
        }
        let s = Self {
            params: *first.params(),
            first,
            second,
            mu1,
            mu2,
            case,
            modification: Modification2::Invalid,
        };
        let (lo, hi, n) = WRONSKIAN_SCAN;
        if let Some(&x) = s.wronskian_nodes(lo, hi, n)?.first() {
            return Err(Error::WronskianNode(x));
        }
        Ok(s)
    }

    fn classify(&self) -> Result<Modification2> {
        let (n1, n2) = self.zero_mode_normalizability()?;
        let (m1, m2) = (self.mu1.re, self.mu2.re);
        if n1.is_normalizable() && n2.is_normalizable() {
            return Ok(Modification2::CreateTwo);
        }
        if n1.is_normalizable() || n2.is_normalizable() {
            return Ok(Modification2::Invalid);
        }
        let (e0, e1) = (self.params.energy(0)?, self.params.energy(1)?);
        let tol = |e: f64| 1e-9 * e.abs().max(1.0);
        let is = |m: f64, e: f64| (m - e).abs() <= tol(e);
        if (is(m1, e0) && is(m2, e1)) || (is(m1, e1) && is(m2, e0)) {
            return Ok(Modification2::DeleteTwo);
        }
        if m1 < e0 - tol(e0) && m2 < e0 - tol(e0) {
            return Ok(Modification2::StrictIso);
        }
        Ok(Modification2::Invalid)
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn seeds(&self) -> (&SeedSolution, &SeedSolution) {
        (&self.first, &self.second)
    }

    pub fn mu(&self) -> (C, C) {
        (self.mu1, self.mu2)
    }

    /// C₁ = (μ₁ + μ₂)/2
    pub fn c1(&self) -> C {
        (self.mu1 + self.mu2) / 2.0
    }

    /// C₂ = ((μ₁ − μ₂)/2)²
    pub fn c2(&self) -> C {
        ((self.mu1 - self.mu2) / 2.0).powi(2)
    }

    pub fn case(&self) -> SecondOrderCase {
        self.case
    }

    pub fn modification(&self) -> Modification2 {
        self.modification
    }

    pub fn spectral_law(&self) -> Option<SpectralLaw> {
        match self.modification {
            Modification2::DeleteTwo => Some(SpectralLaw::ShiftByTwo),
            Modification2::StrictIso => Some(SpectralLaw::Equal),
            Modification2::CreateTwo => Some(SpectralLaw::InsertTwo(self.mu1.re, self.mu2.re)),
            Modification2::Invalid => None,
        }
    }

    /// W(𝒰₁, 𝒰₂) at x.
    pub fn wronskian(&self, x: f64) -> Result<C> {
        Ok(wronskian_atoms(&self.first.atoms(x)?, &self.second.atoms(x)?).value())
    }

    /// W'(x) from the atoms directly.
    pub fn wronskian_derivative(&self, x: f64) -> Result<C> {
        Ok(wronskian_atoms(&self.first.atoms(x)?, &self.second.atoms(x)?).derivative())
    }

    /// Zeros of W/(μ₁ − μ₂), which is real in both cases.
    ///
    /// Samples where W has lost its significant digits to cancellation are
    /// unresolved. In the complex case w = W/(M(μ − μ̄)) has w' = |𝒰|², so when
    /// the seed vanishes at an end w keeps one sign and unresolved samples are
    /// skipped; otherwise they count as zeros.
    pub fn wronskian_nodes(&self, lo: f64, hi: f64, samples: usize) -> Result<Vec<f64>> {
        use crate::model::Asymptote::VanishesAtEnd;
        let d = self.mu1 - self.mu2;
        let perturbed = self.first.is_perturbed() || self.second.is_perturbed();
        let resolve = if perturbed { 1e-3 } else { 1e-13 };
        let monotone = self.case == SecondOrderCase::ComplexConjugate
            && (self.first.left_asymptote() == VanishesAtEnd || self.first.right_asymptote() == VanishesAtEnd);
        let sample = |x: f64| -> Result<Option<f64>> {
            let w = wronskian_atoms(&self.first.atoms(x)?, &self.second.atoms(x)?);
            if w.w.norm() <= resolve * w.magnitude {
                return Ok(None);
            }
            Ok(Some((w.w / d).re / (w.magnitude / d.norm())))
        };
        let step = (hi - lo) / (samples.max(2) - 1) as f64;
        let mut nodes = Vec::new();
        let mut last: Option<(f64, f64)> = None;
        for i in 0..samples {
            let x = lo + i as f64 * step;
            let Some(v) = sample(x)? else {
                if !monotone {
                    nodes.push(x);
                    last = None;
                }
                continue;
            };
            if let Some((xa, va)) = last {
                if (va > 0.0) != (v > 0.0) {
                    let (mut a, mut b) = (xa, x);
                    while b - a > 1e-10 {
                        let m = 0.5 * (a + b);
                        match sample(m)? {
                            Some(vm) if (vm > 0.0) == (va > 0.0) => a = m,
                            Some(_) => b = m,
                            None => break,
                        }
                    }
                    nodes.push(0.5 * (a + b));
                }
            }
            last = Some((x, v));
        }
        Ok(nodes)
    }

    /// P/W, P'/W and P''/W with P = 𝒰₁𝒰₂.
    fn q_jet(&self, x: f64) -> Result<[C; 3]> {
        let a1 = self.first.atoms(x)?;
        let a2 = self.second.atoms(x)?;
        let j1 = crate::model::ScaledJet::from_atoms(&a1);
        let j2 = crate::model::ScaledJet::from_atoms(&a2);
        let w = wronskian_atoms(&a1, &a2);
        if w.w.norm() <= 1e-13 * w.magnitude {
            return Err(Error::WronskianNode(x));
        }
        let s = (j1.log_scale + j2.log_scale - w.log_scale).exp();
        let (u, v) = (j1.v, j2.v);
        let p0 = u[0] * v[0] * s / w.w;
        let p1 = (u[1] * v[0] + u[0] * v[1]) * s / w.w;
        let p2 = (u[2] * v[0] + u[1] * v[1] * 2.0 + u[0] * v[2]) * s / w.w;
        Ok([p0, p1, p2])
    }

    /// All local quantities at x.
    pub fn local(&self, x: f64) -> Result<LocalData> {
        let m = self.params.mass_jet(x);
        let [m0, m1, m2, m3] = m;
        let v = self.params.potential_jet(x);
        let [q, pw1, pw2] = self.q_jet(x)?;
        let d = self.mu1 - self.mu2;
        let r = m1 / m0;
        let dr = m2 / m0 - r * r;
        let wr = d * q * m0 + r; // W'/W
        let dq = pw1 - q * r - q * q * (d * m0);
        let d2q = pw2 - pw1 * wr - q * dr - dq * r - (q * q * m1 + q * dq * (2.0 * m0)) * d;
        let eta = [
            -q * d - m1 / (m0 * m0),
            -dq * d - m2 / (m0 * m0) + 2.0 * m1 * m1 / (m0 * m0 * m0),
            -d2q * d - m3 / (m0 * m0) + 6.0 * m1 * m2 / m0.powi(3) - 6.0 * m1.powi(3) / m0.powi(4),
        ];
        let gamma = eta[0] * eta[0] * (m0 / 2.0) + eta[0] * (m1 / (2.0 * m0)) - eta[1] / 2.0 - v[0]
            + m1 * m1 / m0.powi(3)
            - m2 / (2.0 * m0 * m0)
            + self.c1();
        let vbar = v[0] + eta[1] * 2.0 + eta[0] * r - 3.0 * m1 * m1 / m0.powi(3) + 2.0 * m2 / (m0 * m0);
        Ok(LocalData { m, v, eta, gamma, vbar })
    }

    fn check_real(&self, z: C, x: f64, scale: f64) -> Result<f64> {
        if z.im.abs() > REALITY_TOL * scale.max(1.0) {
            return Err(Error::NonRealEta { x, im: z.im });
        }
        Ok(z.re)
    }

    /// η = (μ₁ − μ₂)/(τ₁ − τ₂) − M'/M²
    pub fn eta(&self, x: f64) -> Result<f64> {
        let l = self.local(x)?;
        self.check_real(l.eta[0], x, l.eta[0].norm())
    }

    /// η = −W'/(MW) with W' taken from the atoms.
    pub fn eta_from_wronskian(&self, x: f64) -> Result<C> {
        let w = wronskian_atoms(&self.first.atoms(x)?, &self.second.atoms(x)?);
        if w.w.norm() <= 1e-13 * w.magnitude {
            return Err(Error::WronskianNode(x));
        }
        Ok(-w.dw / (w.w * self.params.mass(x)))
    }

    pub fn eta_derivative(&self, x: f64) -> Result<f64> {
        let l = self.local(x)?;
        self.check_real(l.eta[1], x, l.eta[1].norm())
    }

    pub fn gamma(&self, x: f64) -> Result<f64> {
        let l = self.local(x)?;
        self.check_real(l.gamma, x, l.gamma.norm())
    }

    /// V̄ in complex arithmetic, for reality diagnostics.
    pub fn partner_potential_complex(&self, x: f64) -> Result<C> {
        Ok(self.local(x)?.vbar)
    }

    /// V̄ = V + 2η' + (M'/M)η − 3M'²/M³ + 2M''/M²
    pub fn partner_potential(&self, x: f64) -> Result<f64> {
        let vbar = self.local(x)?.vbar;
        if vbar.im.abs() > REALITY_TOL * vbar.norm().max(1.0) {
            return Err(Error::NonRealPotential { x, im: vbar.im });
        }
        Ok(vbar.re)
    }

    /// (ℒψ)(x) = ψ''/M + ηψ' + γψ for a solution ψ given through atoms.
    pub fn apply_l<S: Solution + ?Sized>(&self, psi: &S, x: f64) -> Result<C> {
        let l = self.local(x)?;
        let j = psi.jet(x)?;
        let v = j.v;
        Ok((v[2] / l.m[0] + l.eta[0] * v[1] + l.gamma * v[0]) * j.log_scale.exp())
    }

    /// ℒf with finite-difference derivatives of f.
    pub fn apply_l_fn<F: Fn(f64) -> f64 + ?Sized>(&self, f: &F, x: f64, h: f64) -> Result<f64> {
        let l = self.local(x)?;
        let val = fd::d2_real(f, x, h) / l.m[0] + l.eta[0].re * fd::d1_real(f, x, h) + l.gamma.re * f(x);
        Ok(val)
    }

    /// ℒ†f = f''/M − (η + 2M'/M²)f' + (2M'²/M³ − M''/M² − η' + γ)f.
    pub fn apply_l_dagger_fn<F: Fn(f64) -> f64 + ?Sized>(&self, f: &F, x: f64, h: f64) -> Result<(f64, f64)> {
        let l = self.local(x)?;
        let [m0, m1, m2, _] = l.m;
        let terms = [
            fd::d2_real(f, x, h) / m0,
            -(l.eta[0].re + 2.0 * m1 / (m0 * m0)) * fd::d1_real(f, x, h),
            (2.0 * m1 * m1 / m0.powi(3) - m2 / (m0 * m0) - l.eta[1].re + l.gamma.re) * f(x),
        ];
        Ok((terms.iter().sum(), terms.iter().map(|t| t.abs()).sum()))
    }

    /// ψ̄_{μ₁} ∝ M𝒰₂/W and ψ̄_{μ₂} ∝ M𝒰₁/W (real case).
    pub fn zero_modes(&self, x: f64) -> Result<(f64, f64)> {
        let a1 = self.first.atoms(x)?;
        let a2 = self.second.atoms(x)?;
        let j1 = crate::model::ScaledJet::from_atoms(&a1);
        let j2 = crate::model::ScaledJet::from_atoms(&a2);
        let w = wronskian_atoms(&a1, &a2);
        if w.w.norm() <= 1e-13 * w.magnitude {
            return Err(Error::WronskianNode(x));
        }
        let lm = self.params.mass(x).ln();
        let mode = |j: &crate::model::ScaledJet| {
            let r = j.v[0] / w.w;
            (lm + j.log_scale - w.log_scale + r.norm().ln()).exp().copysign(r.re)
        };
        Ok((mode(&j2), mode(&j1)))
    }

    pub fn zero_mode_normalizability(&self) -> Result<(Normalizability, Normalizability)> {
        if self.case != SecondOrderCase::RealDistinct {
            return Err(Error::ModeMismatch("zero modes are defined for real distinct energies".into()));
        }
        Ok((
            l_doubling(|x| self.zero_modes(x).map(|m| m.0))?,
            l_doubling(|x| self.zero_modes(x).map(|m| m.1))?,
        ))
    }

    /// w = W(𝒰, 𝒰̄)/(M(μ − μ̄)), real and non-decreasing (complex case).
    pub fn monotone_w(&self, x: f64) -> Result<f64> {
        if self.case != SecondOrderCase::ComplexConjugate {
            return Err(Error::ModeMismatch("w is defined for complex conjugate energies".into()));
        }
        Ok((self.wronskian(x)? / (self.params.mass(x) * (self.mu1 - self.mu2))).re)
    }

    /// Relative residual of the ansatz η' = Mη² + 2(η + M'/M²)τ + (M'/M)η + 2M'²/M³ − M''/M² + ξ
    /// with τ = τ₁, ξ = μ₂ − μ₁ (`which` = 1) or τ = τ₂, ξ = μ₁ − μ₂ (`which` = 2).
    pub fn ansatz_residual(&self, x: f64, which: usize) -> Result<f64> {
        let l = self.local(x)?;
        let [m0, m1, m2, _] = l.m;
        let (seed, xi) = match which {
            1 => (&self.first, self.mu2 - self.mu1),
            _ => (&self.second, self.mu1 - self.mu2),
        };
        let j = seed.jet(x)?;
        if j.is_near_zero(1e-10) {
            return Err(Error::SeedHasNode(x));
        }
        let tau = j.log_derivative();
        let e = l.eta[0];
        let terms = [
            -l.eta[1],
            e * e * m0,
            (e + m1 / (m0 * m0)) * tau * 2.0,
            e * (m1 / m0),
            C::new(2.0 * m1 * m1 / m0.powi(3) - m2 / (m0 * m0), 0.0),
            xi,
        ];
        Ok(rel(&terms))
    }

    /// Relative residual of the integrated invariant with C₂ = ((μ₁ − μ₂)/2)².
    pub fn invariant_residual(&self, x: f64) -> Result<f64> {
        let l = self.local(x)?;
        let [m, m1, m2, m3] = l.m;
        let [e, e1, e2] = l.eta;
        let v = l.v[0];
        let c1 = self.c1();
        let terms = [
            e * e2 / 2.0,
            -e1 * e1 / 4.0,
            -e1 * e * e * m,
            e.powi(4) * (m * m / 4.0),
            -e * e * v * m,
            c1 * e * e * m,
            c1 * (m1 * m1 / m.powi(3)),
            c1 * e * (2.0 * m1 / m),
            -v * e * (2.0 * m1 / m),
            -v * (m1 * m1 / m.powi(3)),
            -e * e * (m2 / (2.0 * m)),
            e.powi(3) * (m1 / 2.0),
            e * (5.0 * m1.powi(3) / m.powi(4)),
            -e * e1 * (2.0 * m1 / m),
            e * e * (5.0 * m1 * m1 / (4.0 * m * m)),
            e2 * (m1 / (2.0 * m * m)),
            -e1 * (m2 / (2.0 * m * m)),
            e * (m3 / (2.0 * m * m)),
            -e * (4.0 * m1 * m2 / m.powi(3)),
            C::new(3.0 * m1.powi(4) / m.powi(6), 0.0),
            C::new(-5.0 * m1 * m1 * m2 / (2.0 * m.powi(5)), 0.0),
            C::new(-m2 * m2 / (4.0 * m.powi(4)), 0.0),
            C::new(m1 * m3 / (2.0 * m.powi(4)), 0.0),
            self.c2(),
        ];
        Ok(rel(&terms))
    }

    /// Relative residual of τ'/M + τ²/M − M'τ/M² − V + C₁ − ξ/2 for seed `which`.
    pub fn riccati_bracket(&self, x: f64, which: usize) -> Result<f64> {
        let [m0, m1, ..] = self.params.mass_jet(x);
        let v = self.params.potential_jet(x)[0];
        let (seed, xi) = match which {
            1 => (&self.first, self.mu2 - self.mu1),
            _ => (&self.second, self.mu1 - self.mu2),
        };
        let j = seed.jet(x)?;
        if j.is_near_zero(1e-10) {
            return Err(Error::SeedHasNode(x));
        }
        let tau = j.log_derivative();
        let dtau = j.second_ratio() - tau * tau;
        let terms = [dtau / m0, tau * tau / m0, -tau * (m1 / (m0 * m0)), -v, self.c1(), -xi / 2.0];
        Ok(rel(&terms))
    }

    /// Relative residual of γ(V̄ − V) + M'γ'/M² − γ''/M − ηV' − V''/M, with γ', γ''
    /// by finite differences.
    pub fn gamma_residual(&self, x: f64, h: f64) -> Result<f64> {
        let l = self.local(x)?;
        let [m0, m1, ..] = l.m;
        let g = |t: f64| self.local(t).map(|d| d.gamma.re).unwrap_or(f64::NAN);
        let dg = fd::d1_real(&g, x, h);
        let d2g = fd::d2_real(&g, x, h);
        let gamma = l.gamma.re;
        let terms = [
            gamma * (l.vbar.re - l.v[0].re),
            m1 * dg / (m0 * m0),
            -d2g / m0,
            -l.eta[0].re * l.v[1].re,
            -l.v[2].re / m0,
        ];
        let r = terms.iter().sum::<f64>().abs() / terms.iter().map(|t| t.abs()).sum::<f64>();
        finite(r, x)
    }

    /// max |H̄(ℒψ) − E(ℒψ)| over `xs` relative to the size of its terms.
    pub fn intertwining_residual<S: Solution + ?Sized>(&self, psi: &S, xs: &[f64], h: f64) -> Result<f64> {
        let e = psi.energy().re;
        let g = |t: f64| self.apply_l(psi, t).map(|v| v.re).unwrap_or(f64::NAN);
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for &x in xs {
            let l = self.local(x)?;
            let (hg, scale) = fd::apply_hamiltonian(&g, l.m[0], l.m[1], l.vbar.re, x, h);
            let eg = e * g(x);
            num = num.max(finite((hg - eg).abs(), x)?);
            den = den.max(scale + eg.abs());
        }
        Ok(num / den.max(f64::MIN_POSITIVE))
    }

    /// max |ℒHφ − H̄ℒφ| over `xs` relative to the size of the terms, all
    /// derivatives of compositions by finite differences.
    pub fn operator_residual<F: Fn(f64) -> f64>(&self, phi: F, xs: &[f64], h: f64) -> Result<f64> {
        let p = self.params;
        let h_phi = |t: f64| {
            let [m0, m1, ..] = p.mass_jet(t);
            fd::apply_hamiltonian(&phi, m0, m1, p.potential_jet(t)[0].re, t, h).0
        };
        let l_phi = |t: f64| self.apply_l_fn(&phi, t, h).unwrap_or(f64::NAN);
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for &x in xs {
            let lh = self.apply_l_fn(&h_phi, x, h)?;
            let l = self.local(x)?;
            let (hl, scale) = fd::apply_hamiltonian(&l_phi, l.m[0], l.m[1], l.vbar.re, x, h);
            num = num.max(finite((lh - hl).abs(), x)?);
            den = den.max(scale + lh.abs());
        }
        Ok(num / den.max(f64::MIN_POSITIVE))
    }
}

fn rel(terms: &[C]) -> f64 {
    let sum: C = terms.iter().sum();
    let size: f64 = terms.iter().map(|t| t.norm()).sum();
    sum.norm() / size.max(f64::MIN_POSITIVE)
}

/// Partner potential of two successive first-order steps: the first with seed
/// `first`, the second with the image of `second` under the first intertwiner.
pub fn chained_partner_potential<A, B>(params: &ModelParams, first: &A, second: &B, x: f64) -> Result<f64>
where
    A: Solution + ?Sized,
    B: Solution + ?Sized,
{
    let m = params.mass_jet(x);
    let v = params.potential(x)?;
    let j1 = first.jet(x)?;
    if j1.is_near_zero(1e-13) {
        return Err(Error::SeedHasNode(x));
    }
    let tau = j1.log_derivative().re;
    let r2 = j1.second_ratio().re;
    let v1 = partner_potential_from(&m, v, tau, r2);
    // φ = ℒ₁ψ up to the positive factor e^{scale}/√M
    let j2 = second.jet(x)?;
    let [p0, p1, p2] = j2.v.map(|z| z.re);
    let dtau = r2 - tau * tau;
    let g = p1 - tau * p0;
    let dg = p2 - dtau * p0 - tau * p1 - m[1] / (2.0 * m[0]) * g;
    if g.abs() <= 1e-13 * (p1.abs() + (tau * p0).abs()) {
        return Err(Error::SeedHasNode(x));
    }
    let tau2 = dg / g;
    let e = second.energy().re;
    let ratio2 = m[1] / m[0] * tau2 + m[0] * (v1 - e);
    Ok(partner_potential_from(&m, v1, tau2, ratio2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delete_two() -> SecondOrderPartner {
        let p = ModelParams::new(5.0, 0.0, 3.0);
        SecondOrderPartner::from_params(p, p.with_nu(1.0)).unwrap()
    }

    #[test]
    fn deletion_eta_vanishes_at_origin() {
        let s = delete_two();
        assert_eq!(s.modification(), Modification2::DeleteTwo);
        assert!(s.eta(0.0).unwrap().abs() < 1e-12);
        assert!((s.partner_potential(0.0).unwrap() - 13.5).abs() < 1e-10);
    }

    #[test]
    fn both_eta_forms_agree() {
        let s = delete_two();
        for &x in &[-5.0, -1.0, 0.3, 4.0] {
            let a = s.eta(x).unwrap();
            let b = s.eta_from_wronskian(x).unwrap();
            assert!((a - b.re).abs() < 1e-9 * a.abs().max(1.0), "x={x}: {a} {b}");
        }
    }

    #[test]
    fn equal_energies_rejected() {
        let p = ModelParams::new(5.0, 0.0, 3.0);
        let r = SecondOrderPartner::from_params(p, p.with_weights(2.0, 0.0));
        assert!(matches!(r, Err(Error::DegenerateEnergies)));
    }
}
