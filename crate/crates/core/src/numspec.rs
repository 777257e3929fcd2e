//! Numerical spectra of −d/dx (1/M) d/dx + V on a Dirichlet box.
//!
//! The operator is discretized in flux form, which gives a symmetric tridiagonal
//! matrix. Eigenvalues come from Sturm-sequence bisection, eigenvectors from
//! inverse iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of interior grid points.
pub const DEFAULT_GRID_N: usize = 8000;
/// Default box.
pub const DEFAULT_BOX: (f64, f64) = (-12.0, 12.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    /// Interior points; the boundary points carry the Dirichlet condition.
    pub n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::InvalidParams(format!("bad box [{x_min}, {x_max}]")));
        }
        if n == 0 {
            return Err(Error::InvalidParams("grid needs at least one interior point".into()));
        }
        Ok(Self { x_min, x_max, n })
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n + 1) as f64
    }

    /// i-th interior point, i = 0..n.
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (i + 1) as f64 * self.h()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// The grid with spacing halved: 2n + 1 interior points.
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * self.n + 1,
            ..*self
        }
    }
}

/// Symmetric tridiagonal matrix of the discretized operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedHamiltonian {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
    pub grid: Grid,
}

/// diag[i] = (w_{i−1/2} + w_{i+1/2})/h² + V(xᵢ), offdiag[i] = −w_{i+1/2}/h², w = 1/M at midpoints.
pub fn discretize<M, V>(mass: M, potential: V, grid: Grid) -> Result<DiscretizedHamiltonian>
where
    M: Fn(f64) -> f64,
    V: Fn(f64) -> Result<f64>,
{
    let h = grid.h();
    let h2 = h * h;
    // flux weights at the n + 1 midpoints between x_min, the interior points and x_max
    let mut w = Vec::with_capacity(grid.n + 1);
    for i in 0..=grid.n {
        let xm = grid.x_min + (i as f64 + 0.5) * h;
        let m = mass(xm);
        if m.is_nan() || m < 0.0 {
            return Err(Error::NonPositiveMass(xm));
        }
        let wi = 1.0 / m / h2;
        if m == 0.0 || !wi.is_finite() {
            return Err(Error::BoxTooLarge(grid.x_min, grid.x_max));
        }
        w.push(wi);
    }
    let mut diag = Vec::with_capacity(grid.n);
    for i in 0..grid.n {
        let x = grid.x(i);
        let v = potential(x)?;
        let d = w[i] + w[i + 1] + v;
        if !d.is_finite() {
            return Err(Error::NonFiniteSample(x));
        }
        diag.push(d);
    }
    let offdiag = w[1..grid.n].iter().map(|&wi| -wi).collect();
    Ok(DiscretizedHamiltonian { diag, offdiag, grid })
}

impl DiscretizedHamiltonian {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `lambda`.
    pub fn sturm_count(&self, lambda: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE * self.offdiag.iter().fold(1.0f64, |m, e| m.max(e * e));
        let mut count = 0;
        let mut q = self.diag[0] - lambda;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let e = self.offdiag[i - 1];
            q = self.diag[i] - lambda - e * e / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.offdiag[i - 1].abs();
            }
            if i + 1 < n {
                r += self.offdiag[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The j-th smallest eigenvalue (0-based) by bisection on the Sturm count.
    pub fn eigenvalue(&self, j: usize) -> Result<f64> {
        if j >= self.len() {
            return Err(Error::OutOfRange { k: j + 1, n: self.len() });
        }
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
        lo -= pad;
        hi += pad;
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            let tol = (1e-10 * mid.abs().max(1.0)).max(4.0 * f64::EPSILON * mid.abs());
            if hi - lo <= tol || mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Eigenvector for an eigenvalue estimate, normalized so that Σ vᵢ² h = 1
    /// and with its first significant component positive.
    pub fn eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.len();
        let h = self.grid.h();
        // a tiny shift keeps the factorization away from exact singularity
        let shift = lambda + 1e-13 * lambda.abs().max(1.0);
        let lu = TridiagLu::new(&self.diag, &self.offdiag, shift);
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        // a deterministic, non-symmetric start avoids starting orthogonal to the target
        for (i, vi) in v.iter_mut().enumerate() {
            *vi *= 1.0 + 0.1 * ((i as f64) * 0.618_033_988_749_895).fract();
        }
        let mut prev = v.clone();
        for it in 0..50 {
            lu.solve(&mut v);
            let norm = (v.iter().map(|x| x * x).sum::<f64>() * h).sqrt();
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::NonConvergence(lambda));
            }
            v.iter_mut().for_each(|x| *x /= norm);
            fix_sign(&mut v);
            let diff = v
                .iter()
                .zip(&prev)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                * h;
            if it > 0 && diff.sqrt() < 1e-12 {
                return Ok(v);
            }
            prev.clone_from(&v);
        }
        Err(Error::NonConvergence(lambda))
    }

    /// (Hv)ᵢ
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.offdiag[i] * v[i + 1];
                }
                s
            })
            .collect()
    }
}

fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-3 * max) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// LU factorization with partial pivoting of a shifted symmetric tridiagonal matrix.
struct TridiagLu {
    // after elimination row i has entries u0[i] (diagonal), u1[i], u2[i] (second superdiagonal)
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn new(diag: &[f64], off: &[f64], shift: f64) -> Self {
        let n = diag.len();
        let mut d: Vec<f64> = diag.iter().map(|x| x - shift).collect();
        let mut du: Vec<f64> = off.to_vec();
        let mut dl: Vec<f64> = off.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut mult = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let tiny = f64::MIN_POSITIVE.sqrt();
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                // no interchange
                let piv = if d[i] == 0.0 { tiny } else { d[i] };
                d[i] = piv;
                let m = dl[i] / piv;
                mult[i] = m;
                d[i + 1] -= m * du[i];
            } else {
                // swap rows i and i+1
                let m = d[i] / dl[i];
                mult[i] = m;
                swapped[i] = true;
                d[i] = dl[i];
                let tmp = d[i + 1];
                d[i + 1] = du[i] - m * tmp;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -m * du2[i];
                }
                du[i] = tmp;
            }
            dl[i] = 0.0;
        }
        if n > 0 && d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        Self {
            u0: d,
            u1: du,
            u2: du2,
            mult,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
                b[i + 1] -= self.mult[i] * b[i];
            } else {
                b[i + 1] -= self.mult[i] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.u1[i] * b[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * b[i + 2];
            }
            b[i] = s / self.u0[i];
        }
    }
}

/// Lowest eigenvalues of one discretization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub grid: Grid,
    /// Refinement history: eigenvalues at n, 2n+1 and 4n+3 interior points.
    pub levels: Vec<(usize, Vec<f64>)>,
    /// Richardson-extrapolated eigenvalues from the two finest levels.
    pub extrapolated: Vec<f64>,
    /// Observed convergence order per eigenvalue (NaN when below the noise floor).
    pub observed_order: Vec<f64>,
    pub converged: bool,
}

/// k smallest eigenvalues of a single matrix, without refinement.
pub fn eigenvalues_lowest(h: &DiscretizedHamiltonian, k: usize) -> Result<Spectrum> {
    if k > h.len() {
        return Err(Error::OutOfRange { k, n: h.len() });
    }
    let eigenvalues = (0..k).map(|j| h.eigenvalue(j)).collect::<Result<Vec<_>>>()?;
    Ok(Spectrum {
        eigenvalues: eigenvalues.clone(),
        grid: h.grid,
        levels: vec![(h.grid.n, eigenvalues)],
        extrapolated: Vec::new(),
        observed_order: Vec::new(),
        converged: false,
    })
}

/// k smallest eigenvalues on `grid`, with an h → h/2 → h/4 refinement check.
///
/// An eigenvalue counts as converged when the observed order log₂(Δ₁/Δ₂) lies in
/// [1.5, 2.5], or when both differences are already below the bisection noise.
pub fn converged_spectrum<M, V>(mass: M, potential: V, grid: Grid, k: usize) -> Result<Spectrum>
where
    M: Fn(f64) -> f64,
    V: Fn(f64) -> Result<f64>,
{
    let mut levels = Vec::with_capacity(3);
    let mut g = grid;
    for _ in 0..3 {
        let h = discretize(&mass, &potential, g)?;
        let s = eigenvalues_lowest(&h, k)?;
        levels.push((g.n, s.eigenvalues));
        g = g.refined();
    }
    let mut orders = Vec::with_capacity(k);
    let mut extrapolated = Vec::with_capacity(k);
    let mut converged = true;
    for j in 0..k {
        let (e0, e1, e2) = (levels[0].1[j], levels[1].1[j], levels[2].1[j]);
        let d1 = e0 - e1;
        let d2 = e1 - e2;
        let floor = 1e-9 * e2.abs().max(1.0);
        extrapolated.push(e2 + (e2 - e1) / 3.0);
        if d1.abs() <= floor && d2.abs() <= floor {
            orders.push(f64::NAN);
            continue;
        }
        let order = (d1 / d2).abs().log2();
        orders.push(order);
        if !(d1 * d2 > 0.0 && (1.5..=2.5).contains(&order)) {
            converged = false;
        }
    }
    Ok(Spectrum {
        eigenvalues: levels[0].1.clone(),
        grid,
        levels,
        extrapolated,
        observed_order: orders,
        converged,
    })
}

/// Strict sign changes of a sampled function, ignoring samples within
/// `1e-9 · max|v|` of zero.
pub fn count_nodes(samples: &[f64]) -> usize {
    let max = samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let thr = 1e-9 * max;
    let mut last = 0.0;
    let mut count = 0;
    for &v in samples {
        if v.abs() <= thr {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeScan {
    pub nodes: Vec<f64>,
    /// Intervals where both samples are tiny and of equal sign; a double zero may hide there.
    pub suspicious: Vec<(f64, f64)>,
}

/// Zeros of f on [lo, hi] from `samples` equispaced samples plus bisection to `xtol`.
///
/// A sample with |f| ≤ `zero_tol` counts as a zero.
pub fn scan_nodes<F>(f: F, lo: f64, hi: f64, samples: usize, zero_tol: f64, xtol: f64) -> Result<NodeScan>
where
    F: Fn(f64) -> Result<f64>,
{
    let samples = samples.max(2);
    let step = (hi - lo) / (samples - 1) as f64;
    let xs: Vec<f64> = (0..samples).map(|i| lo + i as f64 * step).collect();
    let vs = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let max = vs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut nodes = Vec::new();
    let mut suspicious = Vec::new();
    for i in 0..samples {
        if vs[i].abs() <= zero_tol {
            nodes.push(xs[i]);
            continue;
        }
        if i + 1 == samples || vs[i + 1].abs() <= zero_tol {
            continue;
        }
        if (vs[i] > 0.0) != (vs[i + 1] > 0.0) {
            let (mut a, mut b) = (xs[i], xs[i + 1]);
            let fa_pos = vs[i] > 0.0;
            while b - a > xtol {
                let m = 0.5 * (a + b);
                let fm = f(m)?;
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if (fm > 0.0) == fa_pos {
                    a = m;
                } else {
                    b = m;
                }
            }
            nodes.push(0.5 * (a + b));
        } else if vs[i].abs() < 1e-8 * max && vs[i + 1].abs() < 1e-8 * max {
            suspicious.push((xs[i], xs[i + 1]));
        }
    }
    Ok(NodeScan { nodes, suspicious })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: f64,
    /// Richardson estimate of the error of `value`.
    pub error: f64,
    pub intervals: usize,
}

/// Composite Simpson on [a, b], doubling the panel count until the Richardson
/// estimate falls below `rel_tol · max(1, |value|)`.
pub fn quad<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<Quadrature>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut n = 64usize;
    let h0 = (b - a) / n as f64;
    let mut samples = (0..=n).map(|i| f(a + i as f64 * h0)).collect::<Result<Vec<_>>>()?;
    let simpson = |s: &[f64], h: f64| {
        let m = s.len() - 1;
        let mut acc = s[0] + s[m];
        for (i, v) in s.iter().enumerate().take(m).skip(1) {
            acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        acc * h / 3.0
    };
    let mut prev = simpson(&samples, h0);
    loop {
        let h = (b - a) / (2 * n) as f64;
        let mut next = Vec::with_capacity(2 * n + 1);
        for i in 0..n {
            next.push(samples[i]);
            next.push(f(a + (2 * i + 1) as f64 * h)?);
        }
        next.push(samples[n]);
        n *= 2;
        samples = next;
        let cur = simpson(&samples, h);
        let err = (cur - prev).abs() / 15.0;
        if !cur.is_finite() {
            return Err(Error::NonFiniteSample(a));
        }
        if err <= rel_tol * cur.abs().max(1.0) || n >= 1 << 20 {
            return Ok(Quadrature {
                value: cur + (cur - prev) / 15.0,
                error: err,
                intervals: n,
            });
        }
        prev = cur;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Normalizability {
    Normalizable { norm2: f64 },
    Divergent { growth: f64 },
}

impl Normalizability {
    pub fn is_normalizable(&self) -> bool {
        matches!(self, Normalizability::Normalizable { .. })
    }
}

/// Decides square integrability of f on ℝ from ∫f² over [−L, L], L = 10, 20, 40.
///
/// Normalizable when the last two integrals agree to 1e−6 relative, divergent
/// when the last one exceeds the previous one tenfold, inconclusive otherwise.
pub fn l_doubling<F>(f: F) -> Result<Normalizability>
where
    F: Fn(f64) -> Result<f64>,
{
    let sq = |x: f64| f(x).map(|v| v * v);
    let mut vals = Vec::with_capacity(3);
    for l in [10.0, 20.0, 40.0] {
        vals.push(quad(&sq, -l, l, 1e-10)?.value);
    }
    let (i20, i40) = (vals[1], vals[2]);
    if !i40.is_finite() || i40 > 10.0 * i20 {
        return Ok(Normalizability::Divergent { growth: i40 / i20 });
    }
    if (i40 - i20).abs() <= 1e-6 * i40.abs() {
        return Ok(Normalizability::Normalizable { norm2: i40 });
    }
    Err(Error::Inconclusive(format!(
        "integrals over L = 10, 20, 40: {:e}, {:e}, {:e}",
        vals[0], i20, i40
    )))
}

/// Spectral relation expected between an original and a partner spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpectralLaw {
    Equal,
    ShiftByOne,
    ShiftByTwo,
    InsertOne(f64),
    InsertTwo(f64, f64),
}

impl SpectralLaw {
    /// Expected partner levels given original levels.
    pub fn expected(&self, original: &[f64]) -> Vec<f64> {
        let mut v: Vec<f64> = match *self {
            SpectralLaw::Equal => original.to_vec(),
            SpectralLaw::ShiftByOne => original.iter().skip(1).copied().collect(),
            SpectralLaw::ShiftByTwo => original.iter().skip(2).copied().collect(),
            SpectralLaw::InsertOne(m) => original.iter().copied().chain([m]).collect(),
            SpectralLaw::InsertTwo(m1, m2) => original.iter().copied().chain([m1, m2]).collect(),
        };
        v.sort_by(f64::total_cmp);
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawRow {
    pub index: usize,
    pub expected: f64,
    pub observed: f64,
    pub rel_dev: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub law: SpectralLaw,
    pub tol: f64,
    pub rows: Vec<LawRow>,
    pub pass: bool,
}

/// Compares the partner spectrum with the law applied to the original spectrum.
///
/// Deviations are relative to max(1, |expected|). Only levels present in both
/// lists are compared; inserted levels that fall outside the computed window
/// are therefore still checked as long as they are among the lowest.
pub fn verify_isospectral(original: &Spectrum, partner: &Spectrum, law: SpectralLaw, tol: f64) -> Result<LawReport> {
    for (name, s) in [("original", original), ("partner", partner)] {
        if !s.converged {
            return Err(Error::UnconvergedInput(format!(
                "{name} spectrum failed the refinement check (orders {:?})",
                s.observed_order
            )));
        }
    }
    Ok(compare_levels(&original.eigenvalues, &partner.eigenvalues, law, tol))
}

/// Law comparison on raw eigenvalue lists.
pub fn compare_levels(original: &[f64], partner: &[f64], law: SpectralLaw, tol: f64) -> LawReport {
    let expected = law.expected(original);
    // inserted levels can only be trusted up to the highest computed original level
    let rows: Vec<LawRow> = expected
        .iter()
        .zip(partner)
        .enumerate()
        .map(|(index, (&e, &o))| {
            let rel_dev = (o - e).abs() / e.abs().max(1.0);
            LawRow {
                index,
                expected: e,
                observed: o,
                rel_dev,
                pass: rel_dev <= tol,
            }
        })
        .collect();
    let pass = !rows.is_empty() && rows.iter().all(|r| r.pass);
    LawReport { law, tol, rows, pass }
}
