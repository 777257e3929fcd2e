//! Acceptance checks shared by the test harness and the command line.
//!
//! Every report records the numbers it was judged on; `pass` is recomputed
//! from them and never set independently.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::intertwine1::FirstOrderPartner;
use crate::intertwine2::{chained_partner_potential, SecondOrderPartner};
use crate::model::ModelParams;
use crate::numspec::{
    compare_levels, converged_spectrum, Grid, LawReport, SpectralLaw, DEFAULT_BOX, DEFAULT_GRID_N,
};
use crate::presets::{FigureId, FigurePreset, FIG6_NU, FIG6_NU_ALT};
use crate::specialfn::{gauss_2f1, jacobi_p};
use crate::typea::{one_fold_difference, TwoFold, Z_WINDOW};

/// Environment variable overriding the number of interior grid points.
pub const GRID_ENV: &str = "PDM_ISOSPEC_GRID_N";

/// Relative tolerance on eigenvalues.
pub const SPECTRUM_TOL: f64 = 1e-3;
/// Pointwise tolerance on closed forms and cross-formula agreements.
pub const POINTWISE_TOL: f64 = 1e-8;
/// Tolerance on operator identity residuals.
pub const IDENTITY_TOL: f64 = 1e-6;
/// Tolerance on the composition of two first-order deletions.
pub const COMPOSITION_TOL: f64 = 1e-7;
/// Tolerance on the B(z) fit.
pub const BZ_TOL: f64 = 1e-6;
/// Tolerance on special-function invariants.
pub const SPECIAL_TOL: f64 = 1e-10;
/// Bound on |Im V̄| in the complex case.
pub const IMAG_TOL: f64 = 1e-10;
/// Random parameter draws for the special-function invariants.
pub const SPECIAL_DRAWS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Numerics,
    FirstOrder,
    SecondOrder,
    Typea,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Numerics, Suite::FirstOrder, Suite::SecondOrder, Suite::Typea];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Numerics => "numerics",
            Suite::FirstOrder => "first-order",
            Suite::SecondOrder => "second-order",
            Suite::Typea => "typea",
        }
    }

    pub fn checks(&self) -> &'static [CheckId] {
        use CheckId::*;
        match self {
            Suite::Numerics => &[ModelSpectrum, SpecialFunctions],
            Suite::FirstOrder => &[FirstDeletion, FirstIso, FirstCreation, FirstIdentities],
            Suite::SecondOrder => &[
                SecondDeletion,
                SecondIso,
                SecondCreation,
                ComplexPair,
                SecondIdentities,
                Composition,
            ],
            Suite::Typea => &[TypeA],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A suite name or `all`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteSelector {
    All,
    One(Suite),
}

impl SuiteSelector {
    pub fn checks(&self) -> Vec<CheckId> {
        let mut v: Vec<CheckId> = match self {
            SuiteSelector::All => Suite::ALL.iter().flat_map(|s| s.checks().iter().copied()).collect(),
            SuiteSelector::One(s) => s.checks().to_vec(),
        };
        v.sort();
        v
    }
}

impl FromStr for SuiteSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(SuiteSelector::All);
        }
        Suite::ALL
            .iter()
            .find(|x| x.name() == s)
            .map(|&x| SuiteSelector::One(x))
            .ok_or_else(|| Error::InvalidParams(format!("unknown suite {s:?}")))
    }
}

/// Acceptance checks in report order. Criterion 9 is split into its first- and
/// second-order halves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckId {
    ModelSpectrum,
    FirstDeletion,
    FirstIso,
    FirstCreation,
    SecondDeletion,
    SecondIso,
    SecondCreation,
    ComplexPair,
    FirstIdentities,
    SecondIdentities,
    TypeA,
    Composition,
    SpecialFunctions,
}

impl CheckId {
    pub const ALL: [CheckId; 13] = [
        CheckId::ModelSpectrum,
        CheckId::FirstDeletion,
        CheckId::FirstIso,
        CheckId::FirstCreation,
        CheckId::SecondDeletion,
        CheckId::SecondIso,
        CheckId::SecondCreation,
        CheckId::ComplexPair,
        CheckId::FirstIdentities,
        CheckId::SecondIdentities,
        CheckId::TypeA,
        CheckId::Composition,
        CheckId::SpecialFunctions,
    ];

    /// Acceptance criterion number.
    pub fn criterion(&self) -> u8 {
        match self {
            CheckId::ModelSpectrum => 1,
            CheckId::FirstDeletion => 2,
            CheckId::FirstIso => 3,
            CheckId::FirstCreation => 4,
            CheckId::SecondDeletion => 5,
            CheckId::SecondIso => 6,
            CheckId::SecondCreation => 7,
            CheckId::ComplexPair => 8,
            CheckId::FirstIdentities | CheckId::SecondIdentities => 9,
            CheckId::TypeA => 10,
            CheckId::Composition => 11,
            CheckId::SpecialFunctions => 12,
        }
    }

    /// Short label such as `9a`.
    pub fn label(&self) -> String {
        match self {
            CheckId::FirstIdentities => "9a".into(),
            CheckId::SecondIdentities => "9b".into(),
            _ => self.criterion().to_string(),
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            CheckId::ModelSpectrum => "model spectrum a=5 b=0 c=3 and order-2 refinement",
            CheckId::FirstDeletion => "first-order deletion of E0",
            CheckId::FirstIso => "first-order strictly isospectral partner",
            CheckId::FirstCreation => "first-order creation of mu=-13.32",
            CheckId::SecondDeletion => "second-order deletion of E0, E1",
            CheckId::SecondIso => "second-order strictly isospectral partner",
            CheckId::SecondCreation => "second-order creation of -13.32, -85.32",
            CheckId::ComplexPair => "complex-conjugate factorization energies",
            CheckId::FirstIdentities => "first-order operator identities",
            CheckId::SecondIdentities => "second-order operator identities",
            CheckId::TypeA => "type-A 1- and 2-fold equivalence",
            CheckId::Composition => "two chained deletions equal the second-order deletion",
            CheckId::SpecialFunctions => "2F1 and Jacobi invariants on random draws",
        }
    }

    pub fn suite(&self) -> Suite {
        Suite::ALL
            .iter()
            .copied()
            .find(|s| s.checks().contains(self))
            .unwrap_or(Suite::Numerics)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub grid_n: usize,
    /// Multiplies every tolerance.
    pub tol_scale: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            grid_n: DEFAULT_GRID_N,
            tol_scale: 1.0,
        }
    }
}

impl VerifyConfig {
    /// Default configuration with the grid size taken from the environment.
    pub fn from_env() -> Result<Self> {
        let mut cfg = Self::default();
        if let Ok(s) = std::env::var(GRID_ENV) {
            cfg.grid_n = s
                .trim()
                .parse()
                .ok()
                .filter(|&n: &usize| n >= 10)
                .ok_or_else(|| Error::InvalidParams(format!("{GRID_ENV}={s:?} is not a grid size")))?;
        }
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(DEFAULT_BOX.0, DEFAULT_BOX.1, self.grid_n)
    }
}

/// One recorded number and the bound it was held to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub label: String,
    pub report: LawReport,
    pub observed_order: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub refinements: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: CheckId,
    pub label: String,
    pub criterion: u8,
    pub suite: Suite,
    pub description: String,
    pub inputs_digest: String,
    pub measurements: Vec<Measurement>,
    pub spectra: Vec<SpectrumTable>,
    pub grid: Option<GridMeta>,
    pub notes: Vec<String>,
    pub error: Option<String>,
    pub pass: bool,
}

impl VerificationReport {
    fn new(check: CheckId, inputs: &str) -> Self {
        let digest = Sha256::digest(inputs.as_bytes());
        Self {
            check,
            label: check.label(),
            criterion: check.criterion(),
            suite: check.suite(),
            description: check.description().into(),
            inputs_digest: digest.iter().map(|b| format!("{b:02x}")).collect(),
            measurements: Vec::new(),
            spectra: Vec::new(),
            grid: None,
            notes: Vec::new(),
            error: None,
            pass: false,
        }
    }

    fn measure(&mut self, name: impl Into<String>, value: f64, tol: f64) {
        self.measurements.push(Measurement {
            name: name.into(),
            value,
            tol,
            pass: value <= tol,
        });
    }

    fn finish(mut self) -> Self {
        self.pass = self.error.is_none()
            && !(self.measurements.is_empty() && self.spectra.is_empty())
            && self.measurements.iter().all(|m| m.pass)
            && self.spectra.iter().all(|s| s.converged && s.report.pass);
        self
    }

    /// Largest value/tol ratio among the measurements and spectra.
    pub fn worst_ratio(&self) -> f64 {
        let m = self.measurements.iter().map(|m| m.value / m.tol);
        let s = self
            .spectra
            .iter()
            .flat_map(|s| s.report.rows.iter().map(move |r| r.rel_dev / s.report.tol));
        m.chain(s).fold(0.0, f64::max)
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let detail = match &self.error {
            Some(e) => format!("error: {e}"),
            None => format!("worst value/tol = {:.3e}", self.worst_ratio()),
        };
        format!("[{status}] criterion {:<3} {} ({detail})", self.label, self.description)
    }
}

fn xs(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn max_over<F: Fn(f64) -> Result<f64>>(xs: &[f64], f: F) -> Result<f64> {
    let mut m = 0.0f64;
    for &x in xs {
        let v = f(x)?;
        if !v.is_finite() {
            return Err(Error::NonFiniteSample(x));
        }
        m = m.max(v);
    }
    Ok(m)
}

struct Ctx {
    cfg: VerifyConfig,
    grid: Grid,
}

impl Ctx {
    fn tol(&self, t: f64) -> f64 {
        t * self.cfg.tol_scale
    }

    fn spectrum<V: Fn(f64) -> Result<f64>>(&self, p: &ModelParams, v: V, k: usize) -> Result<crate::numspec::Spectrum> {
        converged_spectrum(|x| p.mass(x), v, self.grid, k)
    }

    fn table(&self, r: &mut VerificationReport, label: &str, s: &crate::numspec::Spectrum, reference: &[f64], law: SpectralLaw) {
        let report = compare_levels(reference, &s.eigenvalues, law, self.tol(SPECTRUM_TOL));
        if r.grid.is_none() {
            r.grid = Some(GridMeta {
                x_min: s.grid.x_min,
                x_max: s.grid.x_max,
                n: s.grid.n,
                refinements: s.levels.iter().map(|l| l.0).collect(),
            });
        }
        r.spectra.push(SpectrumTable {
            label: label.into(),
            report,
            observed_order: s.observed_order.clone(),
            converged: s.converged,
        });
    }
}

/// Runs the checks of `selector`, in fixed order, concurrently.
pub fn run_suite(selector: SuiteSelector, cfg: VerifyConfig) -> Vec<VerificationReport> {
    let checks = selector.checks();
    std::thread::scope(|s| {
        let handles: Vec<_> = checks.iter().map(|&c| s.spawn(move || run_check(c, cfg))).collect();
        handles
            .into_iter()
            .zip(&checks)
            .map(|(h, &c)| {
                h.join().unwrap_or_else(|_| {
                    let mut r = VerificationReport::new(c, "");
                    r.error = Some("check panicked".into());
                    r.finish()
                })
            })
            .collect()
    })
}

pub fn run_check(check: CheckId, cfg: VerifyConfig) -> VerificationReport {
    let inputs = format!("{check:?} grid_n={} tol_scale={}", cfg.grid_n, cfg.tol_scale);
    let mut r = VerificationReport::new(check, &inputs);
    let outcome = cfg.grid().and_then(|grid| {
        let ctx = Ctx { cfg, grid };
        match check {
            CheckId::ModelSpectrum => model_spectrum(&ctx, &mut r),
            CheckId::FirstDeletion => first_deletion(&ctx, &mut r),
            CheckId::FirstIso => first_iso(&ctx, &mut r),
            CheckId::FirstCreation => first_creation(&ctx, &mut r),
            CheckId::SecondDeletion => second_deletion(&ctx, &mut r),
            CheckId::SecondIso => second_iso(&ctx, &mut r),
            CheckId::SecondCreation => second_creation(&ctx, &mut r),
            CheckId::ComplexPair => complex_pair(&ctx, &mut r),
            CheckId::FirstIdentities => first_identities(&ctx, &mut r),
            CheckId::SecondIdentities => second_identities(&ctx, &mut r),
            CheckId::TypeA => type_a(&ctx, &mut r),
            CheckId::Composition => composition(&ctx, &mut r),
            CheckId::SpecialFunctions => special_functions(&ctx, &mut r),
        }
    });
    if let Err(e) = outcome {
        r.error = Some(e.to_string());
    }
    r.finish()
}

fn analytic(p: &ModelParams, k: usize) -> Result<Vec<f64>> {
    (0..k).map(|n| p.energy(n)).collect()
}

fn model_spectrum(ctx: &Ctx, r: &mut VerificationReport) -> Result<()> {
    let p = ModelParams::new(5.0, 0.0, 3.0);
    let s = ctx.spectrum(&p, |x| p.potential(x), 3)?;
    ctx.table(r, "H vs 4.5, 10.5, 18.5", &s, &[4.5, 10.5, 18.5], SpectralLaw::Equal);
    for (j, o) in s.observed_order.iter().enumerate() {
        r.measure(format!("|observed order - 2|, level {j}"), (o - 2.0).abs(), 0.5);
    }
    Ok(())
}

fn first_deletion(ctx: &Ctx, r: &mut VerificationReport) -> Result<()> {
    let (a, b, c) = (5.0, 0.0, 3.0);
    let p = ModelParams::new(a, b, c);
    let f = FirstOrderPartner::from_params(p)?;
    let closed = |x: f64| {
        (c * c - 1.0) / 4.0 * (-x).exp() + (a + b - c) * (2.0 + a + b - c) / 4.0 * x.exp() + (a + b) / 2.0
    };
    let dev = max_over(&xs(-10.0, 10.0, 401), |x| Ok(rel(f.partner_potential(x)?, closed(x))))?;
    r.measure("max rel |Vbar - closed form| on [-10,10]", dev, ctx.tol(POINTWISE_TOL));
    let s = ctx.spectrum(&p, |x| f.partner_potential(x), 3)?;
    ctx.table(r, "Hbar vs 10.5, 18.5, 28.5", &s, &[10.5, 18.5, 28.5], SpectralLaw::Equal);
    let o = ctx.spectrum(&p, |x| p.potential(x), 4)?;
    ctx.table(r, "Hbar vs numerical H, shift by one", &s, &o.eigenvalues, SpectralLaw::ShiftByOne);
    Ok(())
}

fn first_iso(ctx: &Ctx, r: &mut VerificationReport) -> Result<()> {
    let p = ModelParams::new(3.0, 5.0, 4.0);
    let f = FirstOrderPartner::from_params(p)?;
    let expect = [10.0, 19.0, 30.0, 43.0];
    let o = ctx.spectrum(&p, |x| p.potential(x), 4)?;
    let s = ctx.spectrum(&p, |x| f.partner_potential(x), 4)?;
    ctx.table(r, "H vs n^2+8n+10", &o, &expect, SpectralLaw::Equal);
    ctx.table(r, "Hbar vs n^2+8n+10", &s, &expect, SpectralLaw::Equal);
    ctx.table(r, "Hbar vs numerical H", &s, &o.eigenvalues, SpectralLaw::Equal);
    Ok(())
}

fn first_creation(ctx: &Ctx, r: &mut VerificationReport) -> Result<()> {
    let p = ModelParams::new(2.8, 20.0, 4.4).with_weights(1.0, 1.0);
    let f = FirstOrderPartner::from_params(p)?;
    r.measure("|mu + 13.32|", (f.mu() + 13.32).abs(), ctx.tol(1e-9));
    let s = ctx.spectrum(&p, |x| f.partner_potential(x), 4)?;
    ctx.table(r, "Hbar vs {-13.32} + E_n", &s, &analytic(&p, 3)?, SpectralLaw::InsertOne(-13.32));
    let o = ctx.spectrum(&p, |x| p.potential(x), 3)?;
    ctx.table(r, "Hbar vs {mu} + numerical H", &s, &o.eigenvalues, SpectralLaw::InsertOne(f.mu()));
    let normalizable = f.missing_state_normalizability()?.is_normalizable();
    r.measure("missing state normalizable by L-doubling (0 = yes)", if normalizable { 0.0 } else { 1.0 }, 0.0);
    Ok(())
}

fn second_deletion(ctx: &Ctx, r: &mut VerificationReport) -> Result<()> {
    let (a, b, c) = (5.0, 0.0, 3.0);
    let p = ModelParams::new(a, b, c);
    let s2 = SecondOrderPartner::from_params(p, p.with_nu(1.0))?;
    let s1 = a + b;
    let closed = |x: f64| {
        (c * c - 2.0 * c * (s1 + 2.0) + (s1 + 1.0) * (s1 + 3.0)) / 4.0 * x.exp()
            + c * (c + 2.0) / 4.0 * (-x).exp()
            + (s1 + 1.0)
    };
    let dev = max_over(&xs(-10.0, 10.0, 401), |x| Ok(rel(s2.partner_potential(x)?, closed(x))))?;
    r.measure("max rel |Vbar - closed form| on [-10,10]", dev, ctx.tol(POINTWISE_TOL));
    let s = ctx.spectrum(&p, |x| s2.partner_potential(x), 2)?;
    ctx.table(r, "Hbar vs E2, E3", &s, &[18.5, 28.5], SpectralLaw::Equal);
    Ok(())
}

fn second_iso(ctx: &Ctx, r: &mut VerificationReport) -> Result<()> {
    let p = ModelParams::new(3.0, 5.0, 4.0);
    let s2 = SecondOrderPartner::from_params(p, p.with_nu(1.0))?;
    let closed = |x: f64| 1.0 + 0.75 * (9.0 * x.cosh() - 7.0 * x.sinh());
    let dev = max_over(&xs(-10.0, 10.0, 401), |x| Ok(rel(s2.partner_potential(x)?, closed(x))))?;
    r.measure("max rel |Vbar - closed form| on [-10,10]", dev, ctx.tol(POINTWISE_TOL));
    let o = ctx.spectrum(&p, |x| p.potential(x), 4)?;
    let s = ctx.spectrum(&p, |x| s2.partner_potential(x), 4)?;
    ctx.table(r, "Hbar vs n^2+8n+10", &s, &[10.0, 19.0, 30.0, 43.0], SpectralLaw::Equal);
    ctx.table(r, "Hbar vs numerical H", &s, &o.eigenvalues, SpectralLaw::Equal);
    Ok(())
}

fn second_creation(ctx: &Ctx, r: &mut VerificationReport) -> Result<()> {
    let base = FigurePreset::get(FigureId::Fig6);
    let p = base.params;
    let reference = analytic(&p, 2)?;
    let law = SpectralLaw::InsertTwo(-13.32, -85.32);
    let mut any = false;
    // the law is required for at least one ν; the other is reported in the notes
    for nu in [FIG6_NU, FIG6_NU_ALT] {
        let attempt = base.with_nu(nu).second_order_partner().and_then(|s2| {
            let s2 = s2.ok_or_else(|| Error::InvalidParams("fig6 has no second-order partner".into()))?;
            ctx.spectrum(&p, |x| s2.partner_potential(x), 4)
        });
        match attempt {
            Ok(s) => {
                let ok = s.converged && compare_levels(&reference, &s.eigenvalues, law, ctx.tol(SPECTRUM_TOL)).pass;
                r.notes.push(format!("nu = {nu}: levels {:?}, law holds: {ok}", s.eigenvalues));
                if ok && !any {
                    ctx.table(r, &format!("Hbar (nu = {nu}) vs {{-85.32, -13.32}} + E_n"), &s, &reference, law);
                }
                any |= ok;
            }
            Err(e) => r.notes.push(format!("nu = {nu}: {e}")),
        }
    }
    r.measure("no admissible nu reproduces the law (0 = some nu does)", if any { 0.0 } else { 1.0 }, 0.0);
    Ok(())
}

fn complex_pair(ctx: &Ctx, r: &mut VerificationReport) -> Result<()> {
    let fig = FigurePreset::get(FigureId::Fig7);
    let s2 = fig
        .second_order_partner()?
        .ok_or_else(|| Error::InvalidParams("fig7 has no second-order partner".into()))?;
    let p = fig.params;
    let im = max_over(&xs(-10.0, 10.0, 401), |x| Ok(s2.partner_potential_complex(x)?.im.abs()))?;
    r.measure("max |Im Vbar| on [-10,10]", im, ctx.tol(IMAG_TOL));
    let mu = s2.mu().0;
    r.measure("|mu - (-51.25 + 9.5i)|", (mu - C::new(-51.25, 9.5)).norm(), ctx.tol(1e-9));
    let o = ctx.spectrum(&p, |x| p.potential(x), 4)?;
    let s = ctx.spectrum(&p, |x| s2.partner_potential(x), 4)?;
    ctx.table(r, "Hbar vs numerical H", &s, &o.eigenvalues, SpectralLaw::Equal);
    Ok(())
}

fn first_presets() -> [ModelParams; 3] {
    [
        ModelParams::new(5.0, 0.0, 3.0),
        ModelParams::new(3.0, 5.0, 4.0),
        ModelParams::new(2.8, 20.0, 4.4).with_weights(1.0, 1.0),
    ]
}

fn second_presets() -> Result<Vec<(String, SecondOrderPartner)>> {
    let mut v = Vec::new();
    for id in [FigureId::Fig4, FigureId::Fig5, FigureId::Fig6, FigureId::Fig7] {
        let fig = FigurePreset::get(id);
        let s = fig.second_order_partner()?.expect("preset has a second-order partner");
        v.push((id.to_string(), s));
    }
    let alt = FigurePreset::get(FigureId::Fig6).with_nu(FIG6_NU_ALT);
    v.push(("fig6 nu=10".into(), alt.second_order_partner()?.expect("preset has a second-order partner")));
    Ok(v)
}

const IDENTITY_GRID: (f64, f64, usize) = (-6.0, 6.0, 49);
const FD_STEP: f64 = 5e-3;

fn first_identities(ctx: &Ctx, r: &mut VerificationReport) -> Result<()> {
    let grid = xs(IDENTITY_GRID.0, IDENTITY_GRID.1, IDENTITY_GRID.2);
    let tol = ctx.tol(IDENTITY_TOL);
    let (mut fact, mut inter, mut ric) = (0.0f64, 0.0f64, 0.0f64);
    for p in first_presets() {
        let f = FirstOrderPartner::from_params(p)?;
        let g = f.factorization_residuals(|x: f64| (-x * x).exp(), &grid, FD_STEP)?;
        fact = fact.max(g.lower).max(g.upper);
        let psi0 = p.bound_state(0)?;
        let g = f.factorization_residuals(|x: f64| psi0.psi(x).unwrap_or(f64::NAN), &grid, FD_STEP)?;
        fact = fact.max(g.lower).max(g.upper);
        for n in 0..4 {
            inter = inter.max(f.intertwining_residual(&p.bound_state(n)?, &grid, FD_STEP)?);
        }
        ric = ric.max(max_over(&grid, |x| f.riccati_residual(x))?);
    }
    r.measure("factorization residuals", fact, tol);
    r.measure("first-order intertwining residual", inter, tol);
    r.measure("Riccati residual", ric, tol);
    Ok(())
}

fn second_identities(ctx: &Ctx, r: &mut VerificationReport) -> Result<()> {
    let grid = xs(IDENTITY_GRID.0, IDENTITY_GRID.1, IDENTITY_GRID.2);
    let tol = ctx.tol(IDENTITY_TOL);
    let (mut ans, mut inv, mut gam, mut op, mut inter) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (name, s) in second_presets()? {
        ans = ans.max(max_over(&grid, |x| s.ansatz_residual(x, 1))?);
        inv = inv.max(max_over(&grid, |x| s.invariant_residual(x))?);
        gam = gam.max(max_over(&grid, |x| s.gamma_residual(x, 1e-2))?);
        op = op.max(s.operator_residual(|x: f64| (-x * x).exp(), &grid, FD_STEP)?);
        if s.params().is_real() {
            let p = *s.params();
            // deleted levels lie in the kernel of the intertwiner
            let levels = if name == "fig4" { 2..6 } else { 0..4 };
            for n in levels {
                inter = inter.max(s.intertwining_residual(&p.bound_state(n)?, &grid, FD_STEP)?);
            }
        }
    }
    r.measure("ansatz residual", ans, tol);
    r.measure("integrated invariant residual", inv, tol);
    r.measure("gamma equation residual", gam, tol);
    r.measure("factorization residual", op, tol);
    r.measure("second-order intertwining residual", inter, tol);
    Ok(())
}

fn type_a(ctx: &Ctx, r: &mut VerificationReport) -> Result<()> {
    let grid = xs(-10.0, 10.0, 201);
    let tol = ctx.tol(POINTWISE_TOL);
    let mut one = 0.0f64;
    for p in first_presets() {
        let f = FirstOrderPartner::from_params(p)?;
        one = one.max(max_over(&grid, |x| {
            let want = f.partner_potential(x)? - p.potential(x)?;
            Ok(rel(one_fold_difference(&p, f.seed(), x)?, want))
        })?);
    }
    r.measure("N=1: V+ - V- vs Vbar - V", one, tol);
    let (mut eta, mut two) = (0.0f64, 0.0f64);
    for (_, s) in second_presets()? {
        if !s.params().is_real() {
            continue;
        }
        let p = *s.params();
        let (u1, u2) = s.seeds();
        let t = TwoFold::new(&p, u1, u2)?;
        eta = eta.max(max_over(&grid, |x| Ok(rel(t.eta(x)?, s.eta(x)?)))?);
        two = two.max(max_over(&grid, |x| {
            let want = s.partner_potential(x)? - p.potential(x)?;
            Ok(rel(t.potential_difference(x)?, want))
        })?);
    }
    r.measure("N=2: eta from W vs eta from the Wronskian", eta, tol);
    r.measure("N=2: V+ - V- vs Vbar - V", two, tol);
    let p = ModelParams::new(5.0, 0.0, 3.0);
    let (a, b) = (p.bound_state(0)?, p.bound_state(1)?);
    let bz = TwoFold::new(&p, &a, &b)?.bz_linearity(&xs(Z_WINDOW.0, Z_WINDOW.1, 101), ctx.tol(BZ_TOL))?;
    let d = bz.expected_slope.abs();
    r.measure("B(z) slope - (mu1 - mu2), relative", (bz.slope - bz.expected_slope).abs() / d, ctx.tol(BZ_TOL));
    r.measure("B(z) intercept, relative", bz.intercept.abs() / d, ctx.tol(BZ_TOL));
    r.measure("B(z) fit deviation", bz.max_deviation, ctx.tol(BZ_TOL));
    r.notes.push(format!("B(z) slope {} intercept {:e}", bz.slope, bz.intercept));
    Ok(())
}

fn composition(ctx: &Ctx, r: &mut VerificationReport) -> Result<()> {
    let p = ModelParams::new(5.0, 0.0, 3.0);
    let s = SecondOrderPartner::from_params(p, p.with_nu(1.0))?;
    let (psi0, psi1) = (p.bound_state(0)?, p.bound_state(1)?);
    let dev = max_over(&xs(-10.0, 10.0, 201), |x| {
        Ok(rel(chained_partner_potential(&p, &psi0, &psi1, x)?, s.partner_potential(x)?))
    })?;
    r.measure("max rel |chained - direct| on [-10,10]", dev, ctx.tol(COMPOSITION_TOL));
    Ok(())
}

/// Residuals of the ₂F₁ and Jacobi invariants over random parameter draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialFunctionResiduals {
    pub contiguous: f64,
    pub symmetry: f64,
    pub conjugation: f64,
    pub jacobi_connection: f64,
}

/// Deterministic draws seeded by `seed`.
pub fn special_function_residuals(draws: usize, seed: u64) -> Result<SpecialFunctionResiduals> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SpecialFunctionResiduals {
        contiguous: 0.0,
        symmetry: 0.0,
        conjugation: 0.0,
        jacobi_connection: 0.0,
    };
    for _ in 0..draws {
        let a = C::new(rng.gen_range(-3.0..4.0), rng.gen_range(-2.0..2.0));
        let b = C::new(rng.gen_range(-3.0..4.0), rng.gen_range(-2.0..2.0));
        let c = C::new(rng.gen_range(0.5..5.0), rng.gen_range(-1.0..1.0));
        let z = rng.gen_range(0.0..0.9);
        // c F(a,b;c) − c F(a−1,b;c) − b z F(a,b+1;c+1) = 0
        let terms = [
            c * gauss_2f1(a, b, c, z)?,
            -c * gauss_2f1(a - 1.0, b, c, z)?,
            -b * z * gauss_2f1(a, b + 1.0, c + 1.0, z)?,
        ];
        let scale = terms.iter().map(|t| t.norm()).sum::<f64>().max(1.0);
        out.contiguous = out.contiguous.max((terms[0] + terms[1] + terms[2]).norm() / scale);
        let f = gauss_2f1(a, b, c, z)?;
        let g = gauss_2f1(b, a, c, z)?;
        out.symmetry = out.symmetry.max((f - g).norm() / f.norm().max(1.0));
        let h = gauss_2f1(a.conj(), b.conj(), c.conj(), z)?;
        out.conjugation = out.conjugation.max((h - f.conj()).norm() / f.norm().max(1.0));

        let n = rng.gen_range(0..=10usize);
        let sigma = rng.gen_range(-0.9..8.0);
        let delta = rng.gen_range(-0.9..8.0);
        let x = rng.gen_range(-0.95..1.0);
        let zz = (1.0 - x) / 2.0;
        let (ua, ub, uc) = (-(n as f64), n as f64 + sigma + delta + 1.0, sigma + 1.0);
        let pref: f64 = (1..=n).map(|k| (sigma + k as f64) / k as f64).product();
        let f = gauss_2f1(C::new(ua, 0.0), C::new(ub, 0.0), C::new(uc, 0.0), zz)?;
        // size of the terminating series, for a cancellation-free scale
        let mut term = 1.0f64;
        let mut size = 1.0f64;
        for k in 0..n {
            let k = k as f64;
            term *= (ua + k) * (ub + k) / ((uc + k) * (k + 1.0)) * zz;
            size += term.abs();
        }
        let p = jacobi_p(n, sigma, delta, x);
        out.jacobi_connection = out
            .jacobi_connection
            .max((p - pref * f.re).abs() / (pref.abs() * size).max(1.0));
    }
    Ok(out)
}

fn special_functions(ctx: &Ctx, r: &mut VerificationReport) -> Result<()> {
    let res = special_function_residuals(SPECIAL_DRAWS, 0x5eed)?;
    let tol = ctx.tol(SPECIAL_TOL);
    r.measure("contiguous relation in a", res.contiguous, tol);
    r.measure("symmetry in a, b", res.symmetry, tol);
    r.measure("conjugation symmetry", res.conjugation, tol);
    r.measure("Jacobi connection", res.jacobi_connection, tol);
    Ok(())
}
