//! Two-branch seed solutions 𝒰 at the factorization energy μ.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::jet::{Atom, Solution};
use super::{Logistic, ModelParams};
use crate::error::{Error, Result};
use crate::specialfn::{is_near_integer, is_nonpositive_integer, log_gamma, Gauss2F1, Variable};

type C = Complex64;

/// Margin on asymptotic exponents below which the behaviour is called bounded.
const EXPONENT_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Asymptote {
    VanishesAtEnd,
    UnboundedAtEnd,
    BoundedNonzero,
}

#[derive(Debug, Clone)]
struct Branch {
    weight: C,
    /// φ = rate·x − k·softplus(pλx) before the hypergeometric power is factored out
    rate: C,
    k: C,
    f: Gauss2F1,
}

/// 𝒰 = α e^{cpλx/2}(1+e^{pλx})^{−(a'+b'+1)/2} ₂F₁(a', b'; c; z)
///   + β e^{(1−c/2)pλx}(1+e^{pλx})^{−(a'+b'−2c+3)/2} ₂F₁(a'−c+1, b'−c+1; 2−c; z)
/// with (a', b') = (a + ν, b − ν).
#[derive(Debug, Clone)]
pub struct SeedSolution {
    params: ModelParams,
    mu: C,
    branches: Vec<Branch>,
    left: Asymptote,
    right: Asymptote,
}

impl SeedSolution {
    pub fn new(params: ModelParams) -> Result<Self> {
        params.validate()?;
        let zero = C::new(0.0, 0.0);
        if params.alpha == zero && params.beta == zero {
            return Err(Error::InvalidParams("alpha and beta both zero".into()));
        }
        let c = params.c;
        if params.beta != zero && is_near_integer(c, 1e-12) {
            return Err(Error::SecondBranchPole(c));
        }
        if params.alpha != zero && is_nonpositive_integer(c, 1e-12) {
            return Err(Error::SpecialFn(crate::specialfn::SpecialFnError::PoleAtC(c)));
        }
        let (a, b) = params.shifted_ab();
        // The prefactors use the unshifted a + b: it is invariant under the
        // shift, and sharing it keeps shifted seeds on bitwise-identical scales.
        let sum = params.a + params.b;
        let pl = params.pl();
        let mut branches = Vec::with_capacity(2);
        if params.alpha != zero {
            branches.push(Branch {
                weight: params.alpha,
                rate: c * (0.5 * pl),
                k: (sum + 1.0) * 0.5,
                f: Gauss2F1::new(a, b, c)?,
            });
        }
        if params.beta != zero {
            let one = C::new(1.0, 0.0);
            branches.push(Branch {
                weight: params.beta,
                rate: (one - c * 0.5) * pl,
                k: (sum - c * 2.0 + 3.0) * 0.5,
                f: Gauss2F1::new(a - c + 1.0, b - c + 1.0, one * 2.0 - c)?,
            });
        }
        let left = left_asymptote(&params);
        let right = right_asymptote(&params)?;
        Ok(Self {
            mu: params.factorization_energy(),
            params,
            branches,
            left,
            right,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn mu(&self) -> C {
        self.mu
    }

    /// Behaviour as x → −∞.
    pub fn left_asymptote(&self) -> Asymptote {
        self.left
    }

    /// Behaviour as x → +∞.
    pub fn right_asymptote(&self) -> Asymptote {
        self.right
    }

    /// The seed built from conjugated parameters and weights.
    pub fn conjugate(&self) -> Result<Self> {
        Self::new(self.params.conjugate())
    }

    /// True when any branch goes through the perturbed logarithmic ₂F₁ case.
    pub fn is_perturbed(&self) -> bool {
        self.branches.iter().any(|b| b.f.is_perturbed())
    }
}

impl Solution for SeedSolution {
    fn atoms(&self, x: f64) -> Result<Vec<Atom>> {
        let pl = self.params.pl();
        let l = Logistic::new(pl, x);
        let mut out = Vec::with_capacity(self.branches.len());
        for br in &self.branches {
            let e = br.f.expansion_split(l.z, l.y)?;
            let phi = [
                br.rate * x - br.k * l.softplus,
                br.rate - br.k * (pl * l.z),
                -br.k * (pl * l.dz),
            ];
            out.push(hypergeometric_atom(phi, br.weight, &e.terms, &l, pl));
        }
        Ok(out)
    }

    fn energy(&self) -> C {
        self.mu
    }

    fn is_real(&self) -> bool {
        self.params.is_real()
    }
}

/// Atom for `weight · e^{φ} · Σ wⱼ y^{pⱼ} sⱼ(t)`, with the smallest power of y
/// moved into φ.
pub(crate) fn hypergeometric_atom(
    mut phi: [C; 3],
    weight: C,
    terms: &[crate::specialfn::Term],
    l: &Logistic,
    pl: f64,
) -> Atom {
    let zero = C::new(0.0, 0.0);
    let m0 = terms
        .iter()
        .filter(|t| t.weight != zero)
        .map(|t| t.power)
        .min_by(|p, q| p.re.total_cmp(&q.re))
        .unwrap_or(zero);
    if m0 != zero {
        phi[0] += m0 * l.ln_y;
        phi[1] -= m0 * (pl * l.z);
        phi[2] -= m0 * (pl * l.dz);
    }
    let mut s = [zero; 3];
    for t in terms {
        if t.weight == zero {
            continue;
        }
        let q = t.power - m0;
        let yq = if q == zero { C::new(1.0, 0.0) } else { (q * l.ln_y).exp() };
        let l1 = -q * (pl * l.z);
        let dl1 = -q * (pl * l.dz);
        let [s0, st, stt] = t.series;
        let (sx, sxx) = match t.variable {
            Variable::Z => (st * l.dz, stt * (l.dz * l.dz) + st * l.d2z),
            Variable::OneMinusZ => (-st * l.dz, stt * (l.dz * l.dz) - st * l.d2z),
        };
        let w = t.weight * weight * yq;
        s[0] += w * s0;
        s[1] += w * (l1 * s0 + sx);
        s[2] += w * ((l1 * l1 + dl1) * s0 + l1 * sx * 2.0 + sxx);
    }
    Atom { phi, s }
}

fn classify_exponent(re: f64) -> Asymptote {
    if re > EXPONENT_MARGIN {
        Asymptote::VanishesAtEnd
    } else if re < -EXPONENT_MARGIN {
        Asymptote::UnboundedAtEnd
    } else {
        Asymptote::BoundedNonzero
    }
}

// x → −∞: α e^{cpλx/2} + β e^{(1−c/2)pλx}; the smallest surviving exponent wins.
fn left_asymptote(p: &ModelParams) -> Asymptote {
    let zero = C::new(0.0, 0.0);
    let mut exps = Vec::with_capacity(2);
    if p.alpha != zero {
        exps.push(0.5 * p.c.re);
    }
    if p.beta != zero {
        exps.push(1.0 - 0.5 * p.c.re);
    }
    let min = exps.into_iter().fold(f64::INFINITY, f64::min);
    // e^{κx} vanishes at −∞ iff κ > 0
    classify_exponent(min)
}

// x → +∞: (A₁α + B₁β) e^{−(δ+1)pλx/2} + (A₂α + B₂β) e^{(δ−1)pλx/2}, δ = a + b − c.
fn right_asymptote(p: &ModelParams) -> Result<Asymptote> {
    let (a, b) = p.shifted_ab();
    let c = p.c;
    let d = p.a + p.b - c;
    let one = C::new(1.0, 0.0);
    if d.re.abs() <= EXPONENT_MARGIN {
        // both exponents are −1/2 (with a logarithm when δ = 0)
        return Ok(Asymptote::VanishesAtEnd);
    }
    let zero = C::new(0.0, 0.0);
    // coefficient of the dominant exponent; the other one always decays
    let (ca, cb) = if d.re > 0.0 {
        (
            gamma_ratio(&[c, d], &[a, b])?,
            if p.beta != zero {
                gamma_ratio(&[one * 2.0 - c, d], &[a - c + 1.0, b - c + 1.0])?
            } else {
                zero
            },
        )
    } else {
        (
            gamma_ratio(&[c, -d], &[c - b, c - a])?,
            if p.beta != zero {
                gamma_ratio(&[one * 2.0 - c, -d], &[one - a, one - b])?
            } else {
                zero
            },
        )
    };
    let ta = ca * p.alpha;
    let tb = cb * p.beta;
    let coef = ta + tb;
    if coef.norm() <= 1e-12 * (ta.norm() + tb.norm()) || coef == zero {
        return Ok(Asymptote::VanishesAtEnd);
    }
    // dominant exponent is (|Re δ| − 1)/2; a positive rate at +∞ means growth
    Ok(classify_exponent(-(d.re.abs() - 1.0) / 2.0))
}

fn gamma_ratio(num: &[C], den: &[C]) -> Result<C> {
    if den.iter().any(|&v| is_nonpositive_integer(v, 1e-12)) {
        return Ok(C::new(0.0, 0.0));
    }
    let mut acc = C::new(0.0, 0.0);
    for &v in num {
        acc += log_gamma(v)?;
    }
    for &v in den {
        acc -= log_gamma(v)?;
    }
    Ok(acc.exp())
}

/// Residual of −(𝒰'/M)' + V𝒰 − μ𝒰 relative to the size of its terms.
pub fn seed_residual<S: Solution + ?Sized>(params: &ModelParams, sol: &S, x: f64) -> Result<f64> {
    let j = sol.jet(x)?;
    let [m, dm, _, _] = params.mass_jet(x);
    let v = params.potential_jet(x)[0];
    let mu = sol.energy();
    // divide through by e^{scale}
    let terms = [
        -j.v[2] / m,
        j.v[1] * (dm / (m * m)),
        v * j.v[0],
        -mu * j.v[0],
    ];
    let sum: C = terms.iter().sum();
    let size: f64 = terms.iter().map(|t| t.norm()).sum();
    Ok(sum.norm() / size.max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::{d1_7pt, d2_7pt};

    fn seed(p: ModelParams) -> SeedSolution {
        SeedSolution::new(p).unwrap()
    }

    #[test]
    fn factorization_energy_is_stored() {
        let s = seed(ModelParams::new(2.8, 20.0, 4.4).with_weights(1.0, 1.0));
        assert!((s.mu().re + 13.32).abs() < 1e-12);
        let recomputed = s.params().factorization_energy();
        assert!((s.mu() - recomputed).norm() <= 1e-12 * recomputed.norm());
    }

    #[test]
    fn first_branch_closed_form() {
        // b = 0: 𝒰 = e^{cx/2} (1+e^x)^{−(a+b+1)/2}
        let s = seed(ModelParams::new(5.0, 0.0, 3.0));
        for &x in &[-3.0, 0.0, 2.5] {
            let expect = f64::exp(1.5 * x) / (1.0 + f64::exp(x)).powf(3.0);
            let got = s.value(x).unwrap();
            assert!((got.re - expect).abs() < 1e-14 * expect);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let cases = [
            ModelParams::new(2.8, 20.0, 4.4).with_weights(1.0, 1.0),
            ModelParams::new(2.8, 20.0, 4.4).with_weights(1.0, 1.0).with_nu(7.2),
            ModelParams::new(3.0, 5.0, 4.0),
            ModelParams::complex(C::new(6.1, -5.0), C::new(8.0, 5.0), C::new(4.1, 0.0)).with_nu(1.9),
            ModelParams::new(1.3, 0.7, 2.5).with_weights(0.4, -1.1).with_scale(2.0, 0.6),
        ];
        for p in cases {
            let s = seed(p);
            for &x in &[-4.0, -0.5, 0.0, 0.3, 1.7, 4.0] {
                let j = s.jet(x).unwrap();
                let f = |t: f64| s.value(t).unwrap();
                let d1 = d1_7pt(&f, x, 1e-2);
                let d2 = d2_7pt(&f, x, 1e-2);
                let scale = j.value().norm() + j.d1().norm() + j.d2().norm();
                assert!((j.d1() - d1).norm() < 1e-8 * scale, "{p:?} x={x}");
                assert!((j.d2() - d2).norm() < 1e-7 * scale, "{p:?} x={x}");
            }
        }
    }

    #[test]
    fn residual_vanishes() {
        let cases = [
            ModelParams::new(2.8, 20.0, 4.4).with_weights(1.0, 1.0),
            ModelParams::new(2.8, 20.0, 4.4).with_weights(1.0, 1.0).with_nu(10.0),
            ModelParams::new(5.0, 0.0, 3.0),
            ModelParams::new(3.0, 5.0, 4.0).with_nu(1.0),
            ModelParams::complex(C::new(6.1, -5.0), C::new(8.0, 5.0), C::new(4.1, 0.0)),
            ModelParams::new(1.3, 0.7, 2.5).with_weights(0.4, -1.1).with_scale(2.0, 0.6),
        ];
        for p in cases {
            let s = seed(p);
            for i in 0..=60 {
                let x = -30.0 + i as f64;
                let r = seed_residual(&p, &s, x).unwrap();
                assert!(r < 1e-8, "{p:?} x={x} r={r}");
            }
        }
    }

    #[test]
    fn polynomial_seed_is_a_bound_state() {
        // a' = a + ν, b' = b − ν = −2 gives the n = 2 level
        let p = ModelParams::new(5.0, 0.0, 3.0).with_nu(2.0);
        let s = seed(p);
        assert!((s.mu().re - p.energy(2).unwrap()).abs() < 1e-12);
        assert_eq!(s.left_asymptote(), Asymptote::VanishesAtEnd);
        assert_eq!(s.right_asymptote(), Asymptote::VanishesAtEnd);
        let psi = p.bound_state(2).unwrap();
        let r0 = s.value(0.3).unwrap().re / psi.value(0.3).unwrap().re;
        for &x in &[-5.0, -1.0, 2.0, 6.0] {
            let r = s.value(x).unwrap().re / psi.value(x).unwrap().re;
            assert!((r - r0).abs() < 1e-10 * r0.abs());
        }
    }

    #[test]
    fn asymptotes() {
        let s = seed(ModelParams::new(3.0, 5.0, 4.0));
        assert_eq!(s.left_asymptote(), Asymptote::VanishesAtEnd);
        assert_eq!(s.right_asymptote(), Asymptote::UnboundedAtEnd);
        let s = seed(ModelParams::new(2.8, 20.0, 4.4).with_weights(1.0, 1.0));
        assert_eq!(s.left_asymptote(), Asymptote::UnboundedAtEnd);
        assert_eq!(s.right_asymptote(), Asymptote::UnboundedAtEnd);
        // |a+b−c| = 1 sits on the boundary
        let s = seed(ModelParams::new(1.5, 1.5, 2.0));
        assert_eq!(s.right_asymptote(), Asymptote::BoundedNonzero);
    }

    #[test]
    fn second_branch_needs_noninteger_c() {
        let r = SeedSolution::new(ModelParams::new(3.0, 5.0, 4.0).with_weights(1.0, 1.0));
        assert!(matches!(r, Err(Error::SecondBranchPole(_))));
    }

    #[test]
    fn conjugate_seed_is_the_conjugate() {
        let p = ModelParams::complex(C::new(6.1, -5.0), C::new(8.0, 5.0), C::new(4.1, 0.0)).with_nu(1.9);
        let s = seed(p);
        let sc = s.conjugate().unwrap();
        for &x in &[-6.0, 0.0, 0.8, 5.0] {
            let a = s.jet(x).unwrap();
            let b = sc.jet(x).unwrap();
            assert_eq!(a.log_scale, b.log_scale);
            for k in 0..3 {
                assert_eq!(a.v[k].conj(), b.v[k], "x={x} k={k}");
            }
        }
    }
}
