//! One line per acceptance criterion on the default grid (n = 8000, box [-12, 12]).

use std::process::ExitCode;
use std::time::Instant;

use pdm_isospec::verify::{run_suite, SuiteSelector, VerificationReport, VerifyConfig};

fn main() -> ExitCode {
    let cfg = match VerifyConfig::from_env() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::FAILURE;
        }
    };
    let start = Instant::now();
    let reports = run_suite(SuiteSelector::All, cfg);
    println!("acceptance: grid n = {}, tol scale = {}", cfg.grid_n, cfg.tol_scale);
    let mut failed = 0;
    for criterion in 1..=12u8 {
        let parts: Vec<&VerificationReport> = reports.iter().filter(|r| r.criterion == criterion).collect();
        let pass = !parts.is_empty() && parts.iter().all(|r| r.pass);
        if !pass {
            failed += 1;
        }
        let detail: Vec<String> = parts
            .iter()
            .map(|r| match &r.error {
                Some(e) => format!("{}: error {e}", r.label),
                None => format!("{}: worst value/tol {:.2e}", r.label, r.worst_ratio()),
            })
            .collect();
        let what: Vec<&str> = parts.iter().map(|r| r.description.as_str()).collect();
        println!(
            "criterion {criterion:>2} {}  {}  [{}]",
            if pass { "PASS" } else { "FAIL" },
            what.join(" + "),
            detail.join("; ")
        );
        if !pass {
            for r in &parts {
                for m in r.measurements.iter().filter(|m| !m.pass) {
                    println!("    {}: {} = {:e} > {:e}", r.label, m.name, m.value, m.tol);
                }
                for s in &r.spectra {
                    if !(s.converged && s.report.pass) {
                        println!("    {}: {} converged={} rows={:?}", r.label, s.label, s.converged, s.report.rows);
                    }
                }
                for n in &r.notes {
                    println!("    {}: {n}", r.label);
                }
            }
        }
    }
    println!("acceptance: {} of 12 criteria pass ({:.1} s)", 12 - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
