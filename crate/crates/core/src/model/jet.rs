//! Log-scaled evaluation of solutions and their Wronskians.
//!
//! Model solutions grow or decay like e^{κx} with κ up to tens, so at |x| ≈ 40
//! their values leave the double range. Each solution is therefore evaluated as
//! a short list of [`Atom`]s, `e^{φ(x)} S(x)`, where φ carries the exponential
//! behaviour analytically and S stays of moderate size. Wronskians are formed
//! pairwise from atoms so that the leading exponential rates cancel exactly
//! instead of through subtraction of huge numbers.

use num_complex::Complex64;

use crate::error::Result;

type C = Complex64;

/// `e^{φ} S` with analytic first and second x-derivatives of φ and S.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    /// φ, φ', φ''
    pub phi: [C; 3],
    /// S, S', S''
    pub s: [C; 3],
}

impl Atom {
    /// (u, u', u'') multiplied by e^{-shift}.
    pub fn scaled(&self, shift: f64) -> [C; 3] {
        let e = (self.phi[0] - shift).exp();
        let [_, p1, p2] = self.phi;
        let [s0, s1, s2] = self.s;
        [
            e * s0,
            e * (p1 * s0 + s1),
            e * ((p2 + p1 * p1) * s0 + p1 * s1 * 2.0 + s2),
        ]
    }
}

/// Value and two derivatives stored as `e^{log_scale} · v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledJet {
    pub log_scale: f64,
    pub v: [C; 3],
    /// Σ |atom value| on the same scale; compared with |v[0]| to detect cancellation.
    pub magnitude: f64,
}

impl ScaledJet {
    pub fn from_atoms(atoms: &[Atom]) -> Self {
        let log_scale = atoms
            .iter()
            .map(|a| a.phi[0].re)
            .fold(f64::NEG_INFINITY, f64::max);
        if !log_scale.is_finite() {
            return Self {
                log_scale: 0.0,
                v: [C::new(0.0, 0.0); 3],
                magnitude: 0.0,
            };
        }
        let mut v = [C::new(0.0, 0.0); 3];
        let mut magnitude = 0.0;
        for a in atoms {
            let u = a.scaled(log_scale);
            magnitude += u[0].norm();
            for k in 0..3 {
                v[k] += u[k];
            }
        }
        Self { log_scale, v, magnitude }
    }

    pub fn value(&self) -> C {
        self.v[0] * self.log_scale.exp()
    }

    pub fn d1(&self) -> C {
        self.v[1] * self.log_scale.exp()
    }

    pub fn d2(&self) -> C {
        self.v[2] * self.log_scale.exp()
    }

    /// u'/u
    pub fn log_derivative(&self) -> C {
        self.v[1] / self.v[0]
    }

    /// u''/u
    pub fn second_ratio(&self) -> C {
        self.v[2] / self.v[0]
    }

    /// ln |u|
    pub fn ln_abs(&self) -> f64 {
        self.log_scale + self.v[0].norm().ln()
    }

    /// True when |u| is below `rel` times the size of its atoms.
    pub fn is_near_zero(&self, rel: f64) -> bool {
        self.v[0].norm() <= rel * self.magnitude
    }
}

/// W = u₁u₂' − u₁'u₂ and W' stored as `e^{log_scale} · (w, dw)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WronskianJet {
    pub log_scale: f64,
    pub w: C,
    pub dw: C,
    /// Σ over atom pairs of |e^{φa+φb}| |S T'| + |S' T| on the same scale.
    pub magnitude: f64,
}

impl WronskianJet {
    pub fn value(&self) -> C {
        self.w * self.log_scale.exp()
    }

    pub fn derivative(&self) -> C {
        self.dw * self.log_scale.exp()
    }
}

/// Wronskian of two solutions given as atom lists.
pub fn wronskian_atoms(first: &[Atom], second: &[Atom]) -> WronskianJet {
    let max_re = |atoms: &[Atom]| {
        atoms
            .iter()
            .map(|a| a.phi[0].re)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let log_scale = max_re(first) + max_re(second);
    let zero = C::new(0.0, 0.0);
    if !log_scale.is_finite() {
        return WronskianJet {
            log_scale: 0.0,
            w: zero,
            dw: zero,
            magnitude: 0.0,
        };
    }
    let (mut w, mut dw, mut magnitude) = (zero, zero, 0.0);
    for a in first {
        for b in second {
            let e = (a.phi[0] + b.phi[0] - log_scale).exp();
            let [s0, s1, s2] = a.s;
            let [t0, t1, t2] = b.s;
            let dphi = b.phi[1] - a.phi[1];
            let ddphi = b.phi[2] - a.phi[2];
            let q = s0 * t1 - s1 * t0 + dphi * s0 * t0;
            let dq = s0 * t2 - s2 * t0 + ddphi * s0 * t0 + dphi * (s1 * t0 + s0 * t1);
            let big_phi = a.phi[1] + b.phi[1];
            w += e * q;
            dw += e * (big_phi * q + dq);
            magnitude += e.norm() * ((s0 * t1).norm() + (s1 * t0).norm() + (dphi * s0 * t0).norm());
        }
    }
    WronskianJet {
        log_scale,
        w,
        dw,
        magnitude,
    }
}

/// A solution of the model equation at a fixed energy, evaluated through atoms.
pub trait Solution {
    fn atoms(&self, x: f64) -> Result<Vec<Atom>>;

    /// Energy of the solution: μ for seeds, Eₙ for bound states.
    fn energy(&self) -> C;

    /// True when the solution is real-valued for real x.
    fn is_real(&self) -> bool;

    fn jet(&self, x: f64) -> Result<ScaledJet> {
        Ok(ScaledJet::from_atoms(&self.atoms(x)?))
    }

    fn value(&self, x: f64) -> Result<C> {
        Ok(self.jet(x)?.value())
    }

    fn derivative(&self, x: f64) -> Result<C> {
        Ok(self.jet(x)?.d1())
    }

    fn second_derivative(&self, x: f64) -> Result<C> {
        Ok(self.jet(x)?.d2())
    }
}

/// Wronskian of two solutions at x.
pub fn wronskian<A: Solution + ?Sized, B: Solution + ?Sized>(a: &A, b: &B, x: f64) -> Result<WronskianJet> {
    Ok(wronskian_atoms(&a.atoms(x)?, &b.atoms(x)?))
}
