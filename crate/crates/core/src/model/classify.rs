//! Which spectral modification a seed produces at first order.

use serde::{Deserialize, Serialize};

use super::jet::Solution;
use super::seed::{Asymptote, SeedSolution};
use crate::error::{Error, Result};
use crate::numspec::scan_nodes;

/// Node search window and sample count for seeds.
pub const NODE_SCAN: (f64, f64, usize) = (-30.0, 30.0, 2001);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Modification {
    DeleteGround,
    StrictIso,
    CreateBelowGround,
    Invalid,
}

/// Zeros of a solution on [lo, hi].
///
/// Real solutions are scanned for sign changes of the scale-free value; complex
/// ones for samples where |u| has cancelled to rounding level.
pub fn find_seed_nodes<S: Solution + ?Sized>(sol: &S, lo: f64, hi: f64, samples: usize) -> Result<Vec<f64>> {
    if sol.is_real() {
        let f = |x: f64| -> Result<f64> {
            let j = sol.jet(x)?;
            if j.is_near_zero(1e-13) {
                return Ok(0.0);
            }
            Ok(j.v[0].re / j.magnitude)
        };
        Ok(scan_nodes(f, lo, hi, samples, 0.0, 1e-10)?.nodes)
    } else {
        let mut out = Vec::new();
        let step = (hi - lo) / (samples.max(2) - 1) as f64;
        for i in 0..samples {
            let x = lo + i as f64 * step;
            if sol.jet(x)?.is_near_zero(1e-13) {
                out.push(x);
            }
        }
        Ok(out)
    }
}

/// First-order modification produced by `seed`.
pub fn classify_modification(seed: &SeedSolution) -> Result<Modification> {
    let mu = seed.mu();
    if mu.im.abs() > 1e-12 * mu.norm().max(1.0) {
        return Err(Error::ComplexMu(mu));
    }
    let mu = mu.re;
    let e0 = seed.params().energy(0)?;
    let tol = 1e-9 * e0.abs().max(1.0);
    if mu > e0 + tol {
        return Err(Error::MuAboveGround { mu, e0 });
    }
    let (lo, hi, n) = NODE_SCAN;
    if !find_seed_nodes(seed, lo, hi, n)?.is_empty() {
        return Ok(Modification::Invalid);
    }
    use Asymptote::*;
    let ends = (seed.left_asymptote(), seed.right_asymptote());
    if (mu - e0).abs() <= tol {
        return Ok(if ends == (VanishesAtEnd, VanishesAtEnd) {
            Modification::DeleteGround
        } else {
            Modification::Invalid
        });
    }
    Ok(match ends {
        (VanishesAtEnd, UnboundedAtEnd) | (UnboundedAtEnd, VanishesAtEnd) => Modification::StrictIso,
        (UnboundedAtEnd, UnboundedAtEnd) => Modification::CreateBelowGround,
        _ => Modification::Invalid,
    })
}
