//! Gauss hypergeometric function ₂F₁(a, b; c; z) on 0 ≤ z < 1.
//!
//! The direct series is used for z ≤ 1/2. Above that the z → 1 − z connection
//! formula is applied, with its Γ-coefficients computed once per parameter set.
//! Every evaluation can also be returned as an [`Expansion`]: a short list of
//! terms `weight · (1 − z)^power · s(t)` with `t` either z or 1 − z, together with
//! the first two t-derivatives of each series. Callers that need the solution on
//! a logarithmic scale (large |x| in the model) factor the powers out themselves.

use num_complex::Complex64;

use super::{gamma::log_gamma, is_near_integer, is_nonpositive_integer, SpecialFnError};

type C = Complex64;

const INTEGER_TOL: f64 = 1e-12;
/// c − a − b closer than this to an integer puts the connection formula in its logarithmic case.
const LOG_CASE_WINDOW: f64 = 1e-8;
/// Parameter shift ε of the logarithmic case. Values at a ± ε and a ± 2ε are
/// combined so that the O(ε²) error cancels.
const LOG_CASE_SHIFT: f64 = 1e-4;
/// In the logarithmic case the direct series is kept up to this z, where the
/// perturbed connection formula has become accurate.
const LOG_CASE_SWITCH: f64 = 0.9;
/// After this many terms a non-decreasing term ratio is treated as stagnation.
const STAGNATION_START: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2f1Config {
    /// Summation stops once successive terms fall below this fraction of the partial sums.
    pub tolerance: f64,
    pub max_terms: usize,
}

impl Default for Hyp2f1Config {
    fn default() -> Self {
        Self {
            tolerance: 0.5 * f64::EPSILON,
            max_terms: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    Z,
    OneMinusZ,
}

/// One contribution `weight · (1 − z)^power · s(t)`.
///
/// `series` holds s, ds/dt and d²s/dt², with t = z or t = 1 − z per `variable`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub weight: C,
    pub power: C,
    pub variable: Variable,
    pub series: [C; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub terms: Vec<Term>,
    /// Set when the logarithmic case was approximated by parameter perturbation.
    pub perturbed: bool,
    /// Total number of series terms summed.
    pub terms_summed: usize,
}

impl Expansion {
    /// Value of the function given ln(1 − z).
    pub fn value(&self, ln_y: f64) -> C {
        self.terms
            .iter()
            .map(|t| t.weight * y_power(t.power, ln_y) * t.series[0])
            .sum()
    }

    /// F, dF/dz and d²F/dz² at a point with 1 − z = y > 0.
    pub fn z_derivatives(&self, y: f64) -> [C; 3] {
        let ln_y = y.ln();
        let mut out = [C::new(0.0, 0.0); 3];
        for t in &self.terms {
            let sign = match t.variable {
                Variable::Z => 1.0,
                Variable::OneMinusZ => -1.0,
            };
            let [s, st, stt] = t.series;
            let sz = st * sign;
            let p = t.power;
            let yp = y_power(p, ln_y);
            out[0] += t.weight * yp * s;
            out[1] += t.weight * yp * (sz - p * s / y);
            out[2] += t.weight * yp * (stt - p * sz * 2.0 / y + p * (p - 1.0) * s / (y * y));
        }
        out
    }
}

fn y_power(p: C, ln_y: f64) -> C {
    if p == C::new(0.0, 0.0) {
        C::new(1.0, 0.0)
    } else {
        (p * ln_y).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2f1Value {
    pub value: C,
    pub perturbed: bool,
    pub terms_summed: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Piece {
    weight: C,
    power: C,
    a: C,
    b: C,
    c: C,
}

#[derive(Debug, Clone, PartialEq)]
enum Plan {
    /// a or b is a non-positive integer: the series terminates.
    Polynomial,
    /// c − a or c − b is a non-positive integer: Euler's transformation terminates.
    EulerPolynomial,
    /// Direct series below 1/2, connection pieces in 1 − z above.
    Connection { pieces: Vec<Piece>, perturbed: bool },
}

/// A ₂F₁ with fixed parameters, ready to be evaluated at many points.
#[derive(Debug, Clone, PartialEq)]
pub struct Gauss2F1 {
    a: C,
    b: C,
    c: C,
    plan: Plan,
    config: Hyp2f1Config,
}

impl Gauss2F1 {
    pub fn new(a: C, b: C, c: C) -> Result<Self, SpecialFnError> {
        Self::with_config(a, b, c, Hyp2f1Config::default())
    }

    pub fn with_config(a: C, b: C, c: C, config: Hyp2f1Config) -> Result<Self, SpecialFnError> {
        for v in [a, b, c] {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(SpecialFnError::NonFinite("2F1 parameter"));
            }
        }
        if is_nonpositive_integer(c, INTEGER_TOL) {
            return Err(SpecialFnError::PoleAtC(c));
        }
        // The function is symmetric in (a, b); fixing the order makes the
        // evaluation path, and therefore the rounding, independent of it.
        let (a, b) = if order_key(b) < order_key(a) { (b, a) } else { (a, b) };
        let plan = if is_nonpositive_integer(a, INTEGER_TOL) || is_nonpositive_integer(b, INTEGER_TOL) {
            Plan::Polynomial
        } else if is_nonpositive_integer(c - a, INTEGER_TOL) || is_nonpositive_integer(c - b, INTEGER_TOL) {
            Plan::EulerPolynomial
        } else {
            let s = c - a - b;
            if is_near_integer(s, LOG_CASE_WINDOW) {
                let mut pieces = Vec::with_capacity(8);
                let e = LOG_CASE_SHIFT;
                for (shift, w) in [(e, 2.0 / 3.0), (-e, 2.0 / 3.0), (2.0 * e, -1.0 / 6.0), (-2.0 * e, -1.0 / 6.0)] {
                    let part = connection_pieces(a + shift, b, c, s - shift, c - a - shift, c - b)?;
                    pieces.extend(part.into_iter().map(|mut p| {
                        p.weight *= w;
                        p
                    }));
                }
                Plan::Connection { pieces, perturbed: true }
            } else {
                let pieces = connection_pieces(a, b, c, s, c - a, c - b)?.to_vec();
                Plan::Connection { pieces, perturbed: false }
            }
        };
        Ok(Self { a, b, c, plan, config })
    }

    pub fn params(&self) -> (C, C, C) {
        (self.a, self.b, self.c)
    }

    /// True when evaluations close to z = 1 go through the perturbed logarithmic case.
    pub fn is_perturbed(&self) -> bool {
        matches!(self.plan, Plan::Connection { perturbed: true, .. })
    }

    /// True when the function is a polynomial in z times a power of 1 − z.
    pub fn is_terminating(&self) -> bool {
        matches!(self.plan, Plan::Polynomial | Plan::EulerPolynomial)
    }

    pub fn expansion(&self, z: f64) -> Result<Expansion, SpecialFnError> {
        if !(z.is_finite() && (0.0..1.0).contains(&z)) {
            return Err(SpecialFnError::Domain(z));
        }
        self.expansion_split(z, 1.0 - z)
    }

    /// Expansion at a point given both z and y = 1 − z.
    ///
    /// Supplying y separately keeps full relative accuracy in the powers of 1 − z
    /// when z rounds to 1.
    pub fn expansion_split(&self, z: f64, y: f64) -> Result<Expansion, SpecialFnError> {
        if !(z.is_finite() && y.is_finite() && z >= 0.0 && y > 0.0 && z <= 1.0) {
            return Err(SpecialFnError::Domain(z));
        }
        let cfg = &self.config;
        match &self.plan {
            Plan::Polynomial => {
                let (series, n) = sum_series(self.a, self.b, self.c, z, cfg)?;
                Ok(single(C::new(0.0, 0.0), Variable::Z, series, n))
            }
            Plan::EulerPolynomial => {
                let (series, n) = sum_series(self.c - self.a, self.c - self.b, self.c, z, cfg)?;
                Ok(single(self.c - self.a - self.b, Variable::Z, series, n))
            }
            Plan::Connection { pieces, perturbed } => {
                let switch = if *perturbed { LOG_CASE_SWITCH } else { 0.5 };
                if z <= switch {
                    let (series, n) = sum_series(self.a, self.b, self.c, z, cfg)?;
                    return Ok(single(C::new(0.0, 0.0), Variable::Z, series, n));
                }
                let mut terms = Vec::with_capacity(pieces.len());
                let mut total = 0;
                for p in pieces {
                    if p.weight == C::new(0.0, 0.0) {
                        continue;
                    }
                    let (series, n) = sum_series(p.a, p.b, p.c, y, cfg)?;
                    total += n;
                    terms.push(Term {
                        weight: p.weight,
                        power: p.power,
                        variable: Variable::OneMinusZ,
                        series,
                    });
                }
                Ok(Expansion {
                    terms,
                    perturbed: *perturbed,
                    terms_summed: total,
                })
            }
        }
    }

    pub fn eval(&self, z: f64) -> Result<Hyp2f1Value, SpecialFnError> {
        let e = self.expansion(z)?;
        let value = e.value((1.0 - z).ln());
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(SpecialFnError::NonConvergence {
                terms: e.terms_summed,
                z,
            });
        }
        Ok(Hyp2f1Value {
            value,
            perturbed: e.perturbed,
            terms_summed: e.terms_summed,
        })
    }

    /// F, dF/dz, d²F/dz² from termwise differentiation.
    pub fn eval_with_derivatives(&self, z: f64) -> Result<[C; 3], SpecialFnError> {
        Ok(self.expansion(z)?.z_derivatives(1.0 - z))
    }
}

fn single(power: C, variable: Variable, series: [C; 3], n: usize) -> Expansion {
    Expansion {
        terms: vec![Term {
            weight: C::new(1.0, 0.0),
            power,
            variable,
            series,
        }],
        perturbed: false,
        terms_summed: n,
    }
}

fn order_key(z: C) -> (f64, f64, f64) {
    (z.re, z.im.abs(), z.im)
}

// Connection pieces for s = c − a − b, taking s, c − a and c − b as given so that
// the perturbed logarithmic case uses one consistent value of s throughout.
fn connection_pieces(a: C, b: C, c: C, s: C, ca: C, cb: C) -> Result<[Piece; 2], SpecialFnError> {
    let one = C::new(1.0, 0.0);
    let wa = gamma_ratio(&[c, s], &[ca, cb])?;
    let wb = gamma_ratio(&[c, -s], &[a, b])?;
    Ok([
        Piece {
            weight: wa,
            power: C::new(0.0, 0.0),
            a,
            b,
            c: one - s,
        },
        Piece {
            weight: wb,
            power: s,
            a: ca,
            b: cb,
            c: one + s,
        },
    ])
}

/// Π Γ(num) / Π Γ(den); exactly zero when a denominator argument is a pole.
fn gamma_ratio(num: &[C], den: &[C]) -> Result<C, SpecialFnError> {
    if den.iter().any(|&d| is_nonpositive_integer(d, 0.0)) {
        return Ok(C::new(0.0, 0.0));
    }
    if num.iter().chain(den).all(|v| v.im == 0.0) {
        // Keep real ratios exactly real: combine ln|Γ| with the sign of each factor.
        let mut acc = 0.0;
        let mut negative = false;
        for (&v, sign) in num.iter().map(|v| (v, 1.0)).chain(den.iter().map(|v| (v, -1.0))) {
            acc += sign * log_gamma(v)?.re;
            negative ^= v.re < 0.0 && v.re.floor().rem_euclid(2.0) == 1.0;
        }
        let m = acc.exp();
        return Ok(C::new(if negative { -m } else { m }, 0.0));
    }
    let mut acc = C::new(0.0, 0.0);
    for &n in num {
        acc += log_gamma(n)?;
    }
    for &d in den {
        acc -= log_gamma(d)?;
    }
    Ok(acc.exp())
}

/// Σ_k (a)_k (b)_k / ((c)_k k!) t^k together with its first two t-derivatives.
fn sum_series(a: C, b: C, c: C, t: f64, cfg: &Hyp2f1Config) -> Result<([C; 3], usize), SpecialFnError> {
    let mut s = [C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)];
    let mut coef = C::new(1.0, 0.0);
    let (mut tk1, mut tk) = (0.0, 1.0);
    let mut quiet = 0;
    let small = |x: C, total: C| x.norm() <= cfg.tolerance * total.norm();
    for k in 1..=cfg.max_terms {
        let j = (k - 1) as f64;
        coef = coef * (a + j) * (b + j) / ((c + j) * (j + 1.0));
        let tk2 = tk1;
        tk1 = tk;
        tk *= t;
        let kf = k as f64;
        let t0 = coef * tk;
        let t1 = coef * (kf * tk1);
        let t2 = coef * (kf * (kf - 1.0) * tk2);
        s[0] += t0;
        s[1] += t1;
        s[2] += t2;
        if coef == C::new(0.0, 0.0) {
            return Ok((s, k));
        }
        if !s.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(SpecialFnError::NonConvergence { terms: k, z: t });
        }
        let ratio = ((a + kf) * (b + kf) / ((c + kf) * (kf + 1.0))).norm() * t;
        if ratio < 1.0 && small(t0, s[0]) && small(t1, s[1]) && small(t2, s[2]) {
            quiet += 1;
            if quiet >= 2 {
                return Ok((s, k));
            }
        } else {
            quiet = 0;
        }
        if k > STAGNATION_START && ratio >= 1.0 {
            return Err(SpecialFnError::NonConvergence { terms: k, z: t });
        }
    }
    Err(SpecialFnError::NonConvergence {
        terms: cfg.max_terms,
        z: t,
    })
}

/// ₂F₁(a, b; c; z) for 0 ≤ z < 1.
pub fn gauss_2f1(a: C, b: C, c: C, z: f64) -> Result<C, SpecialFnError> {
    Ok(Gauss2F1::new(a, b, c)?.eval(z)?.value)
}

/// d/dz ₂F₁(a, b; c; z) = (ab/c) ₂F₁(a+1, b+1; c+1; z).
pub fn gauss_2f1_dz(a: C, b: C, c: C, z: f64) -> Result<C, SpecialFnError> {
    if is_nonpositive_integer(c, INTEGER_TOL) {
        return Err(SpecialFnError::PoleAtC(c));
    }
    let pref = a * b / c;
    if pref == C::new(0.0, 0.0) {
        if !(z.is_finite() && (0.0..1.0).contains(&z)) {
            return Err(SpecialFnError::Domain(z));
        }
        return Ok(pref);
    }
    Ok(pref * gauss_2f1(a + 1.0, b + 1.0, c + 1.0, z)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> C {
        C::new(x, 0.0)
    }

    #[test]
    fn value_at_origin_is_one() {
        let f = gauss_2f1(C::new(2.3, -1.0), r(-0.7), r(3.1), 0.0).unwrap();
        assert_eq!(f, r(1.0));
    }

    #[test]
    fn log_closed_form() {
        for &z in &[0.1, 0.5, 0.75, 0.95, 0.999] {
            let expect = -(1.0f64 - z).ln() / z;
            // c - a - b = 0: logarithmic case above z = 0.9
            let v = Gauss2F1::new(r(1.0), r(1.0), r(2.0)).unwrap().eval(z).unwrap();
            let got = v.value;
            let tol = if v.perturbed { 1e-10 } else { 1e-13 };
            assert!((got.re - expect).abs() < tol * expect, "z={z}: {got} vs {expect}");
            assert!(got.im.abs() < 1e-13 * expect);
        }
    }

    #[test]
    fn derivative_of_log_closed_form() {
        let z: f64 = 0.5;
        let expect = 1.0 / (z * (1.0 - z)) + (1.0 - z).ln() / (z * z);
        let got = gauss_2f1_dz(r(1.0), r(1.0), r(2.0), z).unwrap();
        assert!((got.re - expect).abs() < 1e-13 * expect);
        assert!((expect - 1.227_411_277_760_219).abs() < 1e-12);
    }

    #[test]
    fn derivative_at_origin() {
        let (a, b, c) = (C::new(1.5, 0.5), r(2.0), r(3.5));
        let got = gauss_2f1_dz(a, b, c, 0.0).unwrap();
        assert!((got - a * b / c).norm() < 1e-15);
    }

    #[test]
    fn termwise_derivatives_match_contiguous_form() {
        let (a, b, c) = (C::new(1.3, 0.4), C::new(-2.2, 0.1), r(2.7));
        let f = Gauss2F1::new(a, b, c).unwrap();
        for &z in &[0.2, 0.5, 0.7, 0.9] {
            let d = f.eval_with_derivatives(z).unwrap();
            let d1 = gauss_2f1_dz(a, b, c, z).unwrap();
            let d2 = a * b / c * gauss_2f1_dz(a + 1.0, b + 1.0, c + 1.0, z).unwrap();
            assert!((d[1] - d1).norm() < 1e-11 * d1.norm().max(1.0), "z={z}");
            assert!((d[2] - d2).norm() < 1e-10 * d2.norm().max(1.0), "z={z}");
        }
    }

    #[test]
    fn legendre_via_jacobi_connection() {
        // P2(x) = 2F1(-2, 3; 1; (1 - x)/2)
        let got = gauss_2f1(r(-2.0), r(3.0), r(1.0), 0.35).unwrap();
        assert!((got.re + 0.365).abs() < 1e-14);
    }

    #[test]
    fn poles_and_domain() {
        assert!(matches!(
            gauss_2f1(r(1.0), r(1.0), r(-2.0), 0.3),
            Err(SpecialFnError::PoleAtC(_))
        ));
        assert!(matches!(
            gauss_2f1(r(1.0), r(1.0), r(2.0), 1.0),
            Err(SpecialFnError::Domain(_))
        ));
        assert!(matches!(
            gauss_2f1(r(1.0), r(1.0), r(2.0), -0.1),
            Err(SpecialFnError::Domain(_))
        ));
    }

    #[test]
    fn tiny_iteration_cap_reports_nonconvergence() {
        let cfg = Hyp2f1Config {
            max_terms: 5,
            ..Default::default()
        };
        let f = Gauss2F1::with_config(r(1.5), r(2.5), r(3.3), cfg).unwrap();
        assert!(matches!(f.eval(0.4), Err(SpecialFnError::NonConvergence { .. })));
    }

    #[test]
    fn euler_terminating_case() {
        // 2F1(a, b; a; z) = (1 - z)^{-b}
        let (a, b) = (r(3.0), r(5.0));
        let c = r(4.0);
        // c - a = 1, c - b = -1: Euler form terminates
        let f = Gauss2F1::new(a, b, c).unwrap();
        assert!(f.is_terminating());
        for &z in &[0.3, 0.8, 0.99] {
            // 2F1(3,5;4;z) = (1-z)^{-4} 2F1(1,-1;4;z) = (1-z)^{-4} (1 - z/4)
            let expect = (1.0 - z / 4.0) / (1.0f64 - z).powi(4);
            let got = f.eval(z).unwrap().value;
            assert!((got.re - expect).abs() < 1e-13 * expect);
        }
    }

    #[test]
    fn logarithmic_case_is_flagged_and_accurate() {
        // c - a - b = 0: 2F1(1/2, 1/2; 1; z) = (2/π) K(z)
        let f = Gauss2F1::new(r(0.5), r(0.5), r(1.0)).unwrap();
        assert!(f.is_perturbed());
        let v = f.eval(0.9).unwrap();
        // K(m = 0.9) = 2.5780921133481733
        let expect = 2.0 / std::f64::consts::PI * 2.578_092_113_348_173_3;
        assert!((v.value.re - expect).abs() < 1e-13, "{} vs {expect}", v.value.re);
        let near_one = f.eval(0.99).unwrap();
        assert!(near_one.perturbed);
        // K(m = 0.99) = 3.6956373629898747
        let expect = 2.0 / std::f64::consts::PI * 3.695_637_362_989_874_7;
        assert!((near_one.value.re - expect).abs() < 1e-9 * expect);
        // the direct series agrees at the switching point
        let below = f.eval(0.9).unwrap().value;
        let above = f.eval(0.900_000_001).unwrap().value;
        assert!((below - above).norm() < 1e-8);
    }
}
