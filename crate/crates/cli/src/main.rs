//! `pdm-isospec`: figure data, partner potentials, spectra and verification reports.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C;
use serde::Serialize;

use pdm_isospec::intertwine1::FirstOrderPartner;
use pdm_isospec::intertwine2::{Modification2, SecondOrderPartner};
use pdm_isospec::model::{Modification, ModelParams, SeedSolution};
use pdm_isospec::numspec::{converged_spectrum, verify_isospectral, LawReport, SpectralLaw};
use pdm_isospec::presets::{FigureId, FigurePreset, FIGURE_SAMPLES};
use pdm_isospec::verify::{run_suite, SuiteSelector, VerifyConfig};

#[derive(Parser)]
#[command(name = "pdm-isospec", version, about = "Isospectral partners of a position-dependent-mass model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the potentials of a preset figure as CSV.
    Figure {
        #[arg(value_parser = parse_figure)]
        id: FigureId,
        #[arg(long)]
        out: Option<PathBuf>,
        /// ν of the second seed (fig4 to fig6 only).
        #[arg(long)]
        nu: Option<f64>,
    },
    /// Sample V and its partner potential.
    Partner {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
        range: (f64, f64),
        #[arg(long, default_value_t = 801)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare analytic and numerical spectra of H and its partner.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(short, long, default_value_t = 4)]
        k: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run the acceptance checks and emit JSON-lines reports.
    Verify {
        #[arg(long, default_value = "all", value_parser = ["all", "first-order", "second-order", "typea", "numerics"])]
        suite: String,
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Delete,
    Iso,
    Create,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_parser = ["1", "2"])]
    order: String,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    a: C,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    b: C,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    c: C,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    beta: f64,
    /// Seed shift: first order uses it directly, second order pairs ν = 0 with ν.
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<f64>,
    /// Expected spectral modification; construction fails if it differs.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

enum Partner {
    First(FirstOrderPartner),
    Second(SecondOrderPartner),
}

impl Partner {
    fn potential(&self, x: f64) -> pdm_isospec::Result<f64> {
        match self {
            Partner::First(f) => f.partner_potential(x),
            Partner::Second(s) => s.partner_potential(x),
        }
    }

    fn law(&self) -> Option<SpectralLaw> {
        match self {
            Partner::First(f) => f.spectral_law(),
            Partner::Second(s) => s.spectral_law(),
        }
    }

    fn mode(&self) -> Option<Mode> {
        match self {
            Partner::First(f) => match f.modification() {
                Modification::DeleteGround => Some(Mode::Delete),
                Modification::StrictIso => Some(Mode::Iso),
                Modification::CreateBelowGround => Some(Mode::Create),
                Modification::Invalid => None,
            },
            Partner::Second(s) => match s.modification() {
                Modification2::DeleteTwo => Some(Mode::Delete),
                Modification2::StrictIso => Some(Mode::Iso),
                Modification2::CreateTwo => Some(Mode::Create),
                Modification2::Invalid => None,
            },
        }
    }
}

impl ModelArgs {
    fn params(&self) -> ModelParams {
        ModelParams::complex(self.a, self.b, self.c).with_weights(self.alpha, self.beta)
    }

    fn build(&self) -> Result<Partner> {
        let p = self.params();
        p.validate()?;
        let partner = if self.order == "1" {
            Partner::First(FirstOrderPartner::from_params(p.with_nu(self.nu.unwrap_or(0.0)))?)
        } else if p.is_real() {
            let nu = self.nu.ok_or_else(|| anyhow!("--order 2 needs --nu for the second seed"))?;
            Partner::Second(SecondOrderPartner::from_params(p, p.with_nu(nu))?)
        } else {
            let seed = SeedSolution::new(p)?;
            if let Some(nu) = self.nu {
                let shifted = p.with_nu(nu).factorization_energy();
                if (shifted - seed.mu().conj()).norm() > 1e-9 * seed.mu().norm().max(1.0) {
                    bail!(
                        "seed shifted by nu = {nu} has energy {shifted}, not the conjugate of {}",
                        seed.mu()
                    );
                }
            }
            Partner::Second(SecondOrderPartner::complex(seed)?)
        };
        if let Some(want) = self.mode {
            if partner.mode() != Some(want) {
                bail!(pdm_isospec::Error::ModeMismatch(format!(
                    "requested {}, construction gives {}",
                    mode_name(Some(want)),
                    mode_name(partner.mode())
                )));
            }
        }
        Ok(partner)
    }
}

fn mode_name(m: Option<Mode>) -> &'static str {
    match m {
        Some(Mode::Delete) => "delete",
        Some(Mode::Iso) => "iso",
        Some(Mode::Create) => "create",
        None => "invalid",
    }
}

fn parse_figure(s: &str) -> Result<FigureId, String> {
    s.parse().map_err(|e: pdm_isospec::Error| e.to_string())
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{lo}: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{hi}: {e}"))?;
    if !(lo < hi) {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

/// Parses `RE`, `IMi` or `RE+IMi` / `RE-IMi`.
fn parse_complex(s: &str) -> Result<C, String> {
    let t = s.trim();
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| C::new(re, 0.0)).map_err(|e| format!("{s}: {e}"));
    };
    // the sign that separates the parts is not at the start and not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|e| format!("{s}: {e}"))?;
    let im: f64 = im.parse().map_err(|e| format!("{s}: {e}"))?;
    Ok(C::new(re, im))
}

/// C-style `%.12e`.
fn fmt_e(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    format!("{mant}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

fn writer(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_csv(out: Option<&Path>, header: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(writer(out)?);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| fmt_e(v)))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct FigureSidecar<'a> {
    figure: String,
    params: &'a ModelParams,
    second: Option<pdm_isospec::presets::SecondSeeds>,
    range: (f64, f64),
    rows: usize,
    max_abs_vbar: f64,
    max_imag_vbar: f64,
    notes: &'a str,
}

fn cmd_figure(id: FigureId, out: Option<&Path>, nu: Option<f64>) -> Result<()> {
    let mut preset = FigurePreset::get(id);
    if let Some(nu) = nu {
        preset = preset.with_nu(nu);
    }
    let data = preset.sample(FIGURE_SAMPLES)?;
    let max_abs_vbar = data
        .rows
        .iter()
        .flat_map(|r| r[2..].iter().map(|v| v.abs()))
        .fold(0.0, f64::max);
    if max_abs_vbar > 1e6 {
        bail!("|Vbar| reaches {max_abs_vbar:e} on the figure range, which signals a pole");
    }
    write_csv(out, &data.header, &data.rows)?;
    if let Some(path) = out {
        let side = FigureSidecar {
            figure: id.to_string(),
            params: &preset.params,
            second: preset.second,
            range: preset.range,
            rows: data.rows.len(),
            max_abs_vbar,
            max_imag_vbar: data.max_imag,
            notes: preset.notes,
        };
        let mut p = path.as_os_str().to_owned();
        p.push(".json");
        std::fs::write(&p, serde_json::to_string_pretty(&side)? + "\n")?;
    }
    Ok(())
}

fn cmd_partner(model: &ModelArgs, range: (f64, f64), samples: usize, out: Option<&Path>) -> Result<()> {
    if samples < 2 {
        bail!("--samples must be at least 2");
    }
    let partner = model.build()?;
    let p = model.params();
    let mut rows = Vec::with_capacity(samples);
    for i in 0..samples {
        let x = range.0 + (range.1 - range.0) * i as f64 / (samples - 1) as f64;
        rows.push(vec![x, p.potential(x)?, partner.potential(x)?]);
    }
    let header = ["x", "V", "Vbar"].map(String::from);
    write_csv(out, &header, &rows)
}

#[derive(Serialize)]
struct SpectrumReport {
    params: ModelParams,
    order: String,
    modification: &'static str,
    grid_n: usize,
    analytic: Option<Vec<f64>>,
    original: Vec<f64>,
    partner: Vec<f64>,
    law: Option<LawReport>,
    pass: bool,
}

fn cmd_spectrum(model: &ModelArgs, k: usize, json: Option<&Path>) -> Result<bool> {
    if k == 0 {
        bail!("-k must be positive");
    }
    let partner = model.build()?;
    let p = model.params();
    let grid = VerifyConfig::from_env()?.grid()?;
    let original = converged_spectrum(|x| p.mass(x), |x| p.potential(x), grid, k + 2)?;
    let bar = converged_spectrum(|x| p.mass(x), |x| partner.potential(x), grid, k)?;
    let analytic = (0..k + 2).map(|n| p.energy(n)).collect::<pdm_isospec::Result<Vec<_>>>().ok();
    let law = match partner.law() {
        Some(l) => Some(verify_isospectral(&original, &bar, l, 1e-3)?),
        None => None,
    };
    let pass = law.as_ref().is_some_and(|l| l.pass);
    let mut out = io::stdout().lock();
    writeln!(out, "modification: {}  grid n = {}", mode_name(partner.mode()), grid.n)?;
    writeln!(out, "{:>3} {:>16} {:>16} {:>16}", "n", "analytic E_n", "H", "Hbar")?;
    for n in 0..k + 2 {
        let cell = |v: Option<f64>| v.map_or(String::from("-"), |v| format!("{v:.6}"));
        writeln!(
            out,
            "{n:>3} {:>16} {:>16} {:>16}",
            cell(analytic.as_ref().map(|a| a[n])),
            cell(Some(original.eigenvalues[n])),
            cell(bar.eigenvalues.get(n).copied())
        )?;
    }
    if let Some(l) = &law {
        writeln!(out, "law {:?}: {}", l.law, if l.pass { "pass" } else { "FAIL" })?;
    }
    if let Some(path) = json {
        let report = SpectrumReport {
            params: p,
            order: model.order.clone(),
            modification: mode_name(partner.mode()),
            grid_n: grid.n,
            analytic,
            original: original.eigenvalues,
            partner: bar.eigenvalues,
            law,
            pass,
        };
        std::fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
    }
    Ok(pass)
}

fn cmd_verify(suite: &str, tol_scale: f64, json: Option<&Path>) -> Result<bool> {
    if !(tol_scale > 0.0 && tol_scale.is_finite()) {
        bail!("--tol-scale must be positive");
    }
    let selector: SuiteSelector = suite.parse()?;
    let cfg = VerifyConfig {
        tol_scale,
        ..VerifyConfig::from_env()?
    };
    let reports = run_suite(selector, cfg);
    let mut lines = writer(json)?;
    for r in &reports {
        writeln!(lines, "{}", serde_json::to_string(r)?)?;
        if json.is_some() {
            println!("{}", r.summary());
        }
    }
    lines.flush()?;
    Ok(reports.iter().all(|r| r.pass))
}

fn broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        let io = c.downcast_ref::<io::Error>().or_else(|| match c.downcast_ref::<csv::Error>()?.kind() {
            csv::ErrorKind::Io(e) => Some(e),
            _ => None,
        });
        io.is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Figure { id, out, nu } => cmd_figure(*id, out.as_deref(), *nu).map(|_| true),
        Command::Partner {
            model,
            range,
            samples,
            out,
        } => cmd_partner(model, *range, *samples, out.as_deref()).map(|_| true),
        Command::Spectrum { model, k, json } => cmd_spectrum(model, *k, json.as_deref()),
        Command::Verify { suite, tol_scale, json } => cmd_verify(suite, *tol_scale, json.as_deref()),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        // a closed stdout (for example `| head`) is not an error
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("6.1-5i").unwrap(), C::new(6.1, -5.0));
        assert_eq!(parse_complex("8+5i").unwrap(), C::new(8.0, 5.0));
        assert_eq!(parse_complex("4.1").unwrap(), C::new(4.1, 0.0));
        assert_eq!(parse_complex("-3i").unwrap(), C::new(0.0, -3.0));
        assert_eq!(parse_complex("1e-3+2E+1i").unwrap(), C::new(1e-3, 20.0));
        assert_eq!(parse_complex("-2-i").unwrap(), C::new(-2.0, -1.0));
        assert!(parse_complex("x+1i").is_err());
    }

    #[test]
    fn c_style_exponent() {
        assert_eq!(fmt_e(1.5), "1.500000000000e+00");
        assert_eq!(fmt_e(-0.00123), "-1.230000000000e-03");
        assert_eq!(fmt_e(0.0), "0.000000000000e+00");
        assert_eq!(fmt_e(2.5e120), "2.500000000000e+120");
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-10:10").unwrap(), (-10.0, 10.0));
        assert!(parse_range("3:1").is_err());
        assert!(parse_range("3").is_err());
    }
}
