//! Type-A 𝒩-fold structure of the first- and second-order intertwiners, 𝒩 = 1, 2.
//!
//! All quantities are built from log-derivative ratios u⁽ᵏ⁾/u of the seeds so
//! that nothing overflows where the seeds grow like e^{±pλx}.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, Solution};

/// Default window on which z = 𝒰₂/𝒰₁ is sampled.
pub const Z_WINDOW: (f64, f64) = (-5.0, 5.0);

/// e^{φ}·[u, u', u'', u'''] for a solution of H u = μu. The third derivative
/// comes from differentiating u'' = (M'/M)u' + M(V − μ)u.
fn scaled_derivatives<S: Solution + ?Sized>(params: &ModelParams, u: &S, x: f64) -> Result<(f64, [C; 4], bool)> {
    let j = u.jet(x)?;
    let [m0, m1, m2, _] = params.mass_jet(x);
    let [v0, v1, _] = params.potential_jet(x);
    let mu = u.energy();
    let p = m1 / m0;
    let dp = m2 / m0 - p * p;
    let q = (v0 - mu) * m0;
    let dq = (v0 - mu) * m1 + v1 * m0;
    let [d0, d1, d2] = j.v;
    let d3 = dp * d1 + p * d2 + dq * d0 + q * d1;
    Ok((j.log_scale, [d0, d1, d2, d3], j.is_near_zero(1e-13)))
}

fn real_part(x: f64, c: C) -> Result<f64> {
    if !c.re.is_finite() || c.im.abs() > 1e-9 * c.re.abs().max(1.0) {
        return Err(Error::NonRealEta { x, im: c.im });
    }
    Ok(c.re)
}

/// [1, u'/u, u''/u, u'''/u]
fn ratios<S: Solution + ?Sized>(params: &ModelParams, u: &S, x: f64) -> Result<[f64; 4]> {
    let (_, d, zero) = scaled_derivatives(params, u, x)?;
    if zero {
        return Err(Error::SeedHasNode(x));
    }
    let mut out = [1.0; 4];
    for k in 1..4 {
        out[k] = real_part(x, d[k] / d[0])?;
    }
    Ok(out)
}

/// V⁺ − V⁻ = 2𝒩(W'/M − M'W/(2M²)).
pub fn potential_difference(n: usize, m: &[f64; 4], w: f64, dw: f64) -> f64 {
    let [m0, m1, ..] = *m;
    2.0 * n as f64 * (dw / m0 - m1 * w / (2.0 * m0 * m0))
}

/// W(x) = −(ln 𝒰)' + M'/(4M) for the one-fold supercharge.
pub fn superpotential_w<S: Solution + ?Sized>(params: &ModelParams, seed: &S, x: f64) -> Result<f64> {
    let r = ratios(params, seed, x)?;
    let [m0, m1, ..] = params.mass_jet(x);
    Ok(-r[1] + m1 / (4.0 * m0))
}

/// W'(x) for the one-fold supercharge.
pub fn superpotential_w_derivative<S: Solution + ?Sized>(params: &ModelParams, seed: &S, x: f64) -> Result<f64> {
    let r = ratios(params, seed, x)?;
    let [m0, m1, m2, _] = params.mass_jet(x);
    Ok(-(r[2] - r[1] * r[1]) + m2 / (4.0 * m0) - m1 * m1 / (4.0 * m0 * m0))
}

/// V⁺ − V⁻ with 𝒩 = 1.
pub fn one_fold_difference<S: Solution + ?Sized>(params: &ModelParams, seed: &S, x: f64) -> Result<f64> {
    let w = superpotential_w(params, seed, x)?;
    let dw = superpotential_w_derivative(params, seed, x)?;
    Ok(potential_difference(1, &params.mass_jet(x), w, dw))
}

/// Two-fold data from a pair of real seeds: z = 𝒰₂/𝒰₁ and 𝒲 = −ln 𝒰₁.
#[derive(Debug, Clone, Copy)]
pub struct TwoFold<'a, A: Solution + ?Sized, B: Solution + ?Sized> {
    params: &'a ModelParams,
    first: &'a A,
    second: &'a B,
}

/// Samples of B(z) and its affine fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BzReport {
    pub slope: f64,
    pub intercept: f64,
    /// μ₁ − μ₂
    pub expected_slope: f64,
    /// max |B − (s z + t)| over the samples, relative to max(1, max |B|)
    pub max_deviation: f64,
    pub samples: Vec<(f64, f64)>,
    pub pass: bool,
}

impl<'a, A: Solution + ?Sized, B: Solution + ?Sized> TwoFold<'a, A, B> {
    pub fn new(params: &'a ModelParams, first: &'a A, second: &'a B) -> Result<Self> {
        let (m1, m2) = (first.energy(), second.energy());
        if !first.is_real() || !second.is_real() || m1.im != 0.0 || m2.im != 0.0 {
            return Err(Error::InvalidEnergyPair(m1, m2));
        }
        if m1 == m2 {
            return Err(Error::DegenerateEnergies);
        }
        Ok(Self { params, first, second })
    }

    /// μ₁ − μ₂
    pub fn delta(&self) -> f64 {
        (self.first.energy() - self.second.energy()).re
    }

    /// [z, z', z'', z''']
    fn z_jet(&self, x: f64) -> Result<[f64; 4]> {
        let u = ratios(self.params, self.first, x)?;
        let (s1, d1, _) = scaled_derivatives(self.params, self.first, x)?;
        let (s2, d2, _) = scaled_derivatives(self.params, self.second, x)?;
        let k = (s2 - s1).exp();
        let mut v = [0.0; 4];
        for j in 0..4 {
            v[j] = real_part(x, d2[j] / d1[0] * k)?;
        }
        // 𝒰₁ · (1/𝒰₁)⁽ᵐ⁾
        let t = u[1];
        let g = [1.0, -t, 2.0 * t * t - u[2], -u[3] + 6.0 * t * u[2] - 6.0 * t * t * t];
        let binom = [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]];
        let mut z = [0.0; 4];
        for k in 0..4 {
            z[k] = (0..=k).map(|j| binom[k][j] * v[j] * g[k - j]).sum();
        }
        Ok(z)
    }

    /// z(x) = 𝒰₂/𝒰₁
    pub fn z(&self, x: f64) -> Result<f64> {
        Ok(self.z_jet(x)?[0])
    }

    /// d𝒲/dx = −𝒰₁'/𝒰₁
    pub fn gauge_derivative(&self, x: f64) -> Result<f64> {
        Ok(-ratios(self.params, self.first, x)?[1])
    }

    /// W = 𝒲' − z''/(2z') + M'/(2M).
    pub fn superpotential(&self, x: f64) -> Result<f64> {
        let z = self.z_jet(x)?;
        let [m0, m1, ..] = self.params.mass_jet(x);
        Ok(self.gauge_derivative(x)? - 0.5 * z[2] / z[1] + m1 / (2.0 * m0))
    }

    /// W'(x)
    pub fn superpotential_derivative(&self, x: f64) -> Result<f64> {
        let u = ratios(self.params, self.first, x)?;
        let z = self.z_jet(x)?;
        let [m0, m1, m2, _] = self.params.mass_jet(x);
        let zz = z[2] / z[1];
        let dzz = z[3] / z[1] - zz * zz;
        Ok(-(u[2] - u[1] * u[1]) - 0.5 * dzz + m2 / (2.0 * m0) - m1 * m1 / (2.0 * m0 * m0))
    }

    /// η = 2W/M − M'/M²
    pub fn eta(&self, x: f64) -> Result<f64> {
        let [m0, m1, ..] = self.params.mass_jet(x);
        Ok(2.0 * self.superpotential(x)? / m0 - m1 / (m0 * m0))
    }

    /// V⁺ − V⁻ with 𝒩 = 2.
    pub fn potential_difference(&self, x: f64) -> Result<f64> {
        let w = self.superpotential(x)?;
        let dw = self.superpotential_derivative(x)?;
        Ok(potential_difference(2, &self.params.mass_jet(x), w, dw))
    }

    /// B(z) = z''/M − z'M'/M² − (2z'²/M) d𝒲/dz, returned with z.
    pub fn b_of_z(&self, x: f64) -> Result<(f64, f64)> {
        let [z, dz, d2z, _] = self.z_jet(x)?;
        let [m0, m1, ..] = self.params.mass_jet(x);
        // d𝒲/dz = 𝒲'/z'
        let dwdz = self.gauge_derivative(x)? / dz;
        let b = d2z / m0 - dz * m1 / (m0 * m0) - 2.0 * dz * dz / m0 * dwdz;
        Ok((z, b))
    }

    /// Fits B(z) = s z + t on `xs` and checks s = μ₁ − μ₂, t = 0.
    pub fn bz_linearity(&self, xs: &[f64], tol: f64) -> Result<BzReport> {
        let samples = xs.iter().map(|&x| self.b_of_z(x)).collect::<Result<Vec<_>>>()?;
        let (lo, hi) = (xs.first().copied().unwrap_or(0.0), xs.last().copied().unwrap_or(0.0));
        let increasing = samples.windows(2).all(|w| w[1].0 > w[0].0);
        let decreasing = samples.windows(2).all(|w| w[1].0 < w[0].0);
        if samples.len() < 2 || !(increasing || decreasing) {
            return Err(Error::NonMonotoneZ(lo, hi));
        }
        let n = samples.len() as f64;
        let (sz, sb) = samples.iter().fold((0.0, 0.0), |(a, b), &(z, bz)| (a + z, b + bz));
        let (mz, mb) = (sz / n, sb / n);
        let (mut sxx, mut sxy) = (0.0, 0.0);
        for &(z, b) in &samples {
            sxx += (z - mz) * (z - mz);
            sxy += (z - mz) * (b - mb);
        }
        let slope = sxy / sxx;
        let intercept = mb - slope * mz;
        let scale = samples.iter().fold(1.0f64, |m, s| m.max(s.1.abs()));
        let max_deviation = samples
            .iter()
            .map(|&(z, b)| (b - slope * z - intercept).abs())
            .fold(0.0, f64::max)
            / scale;
        let d = self.delta();
        let pass = (slope - d).abs() <= tol * d.abs() && intercept.abs() <= tol * d.abs() && max_deviation <= tol;
        Ok(BzReport {
            slope,
            intercept,
            expected_slope: d,
            max_deviation,
            samples,
            pass,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w_vanishes_at_origin_for_symmetric_seed() {
        let p = ModelParams::new(5.0, 0.0, 3.0);
        let psi0 = p.bound_state(0).unwrap();
        assert!(superpotential_w(&p, &psi0, 0.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn slope_flips_with_seed_order() {
        let p = ModelParams::new(5.0, 0.0, 3.0);
        let (a, b) = (p.bound_state(0).unwrap(), p.bound_state(1).unwrap());
        let xs: Vec<f64> = (0..41).map(|i| -5.0 + 0.25 * i as f64).collect();
        let r = TwoFold::new(&p, &a, &b).unwrap().bz_linearity(&xs, 1e-6).unwrap();
        // ψ₁ vanishes at the origin, so the swapped pair is sampled on x > 0
        let right: Vec<f64> = xs.iter().copied().filter(|&x| x > 0.1).collect();
        let s = TwoFold::new(&p, &b, &a).unwrap().bz_linearity(&right, 1e-6).unwrap();
        assert!(r.pass && s.pass, "{r:?} {s:?}");
        assert!((r.slope + 6.0).abs() < 1e-6 && (s.slope - 6.0).abs() < 1e-6);
    }
}
