//! Parameter sets of the seven plotting presets fig1..fig7.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intertwine1::FirstOrderPartner;
use crate::intertwine2::SecondOrderPartner;
use crate::model::{ModelParams, SeedSolution};

/// Rows written per figure.
pub const FIGURE_SAMPLES: usize = 801;

/// ν of the two-level creation figure. ν = 10 gives the same μ₂.
pub const FIG6_NU: f64 = 7.2;
pub const FIG6_NU_ALT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        FigureId::Fig1,
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
    ];
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = FigureId::ALL.iter().position(|x| x == self).unwrap_or(0) + 1;
        write!(f, "fig{n}")
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .iter()
            .copied()
            .find(|id| id.to_string() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidParams(format!("unknown figure {s:?}, expected fig1..fig7")))
    }
}

/// How the second-order partner of a figure is seeded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SecondSeeds {
    /// 𝒰₁ from the preset parameters, 𝒰₂ from the same parameters shifted by ν.
    Real { nu: f64 },
    /// 𝒰 and its conjugate; the conjugate coincides with the seed shifted by ν.
    ComplexConjugate { nu: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FigurePreset {
    pub id: FigureId,
    pub params: ModelParams,
    /// Whether a first-order partner (seeded by `params`) is drawn.
    pub first_order: bool,
    pub second: Option<SecondSeeds>,
    pub range: (f64, f64),
    pub notes: &'static str,
}

/// One sampled figure: column names and rows of real values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureData {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// max |Im V̄| over the rows; zero for real constructions
    pub max_imag: f64,
}

impl FigurePreset {
    pub fn get(id: FigureId) -> Self {
        let range = (-6.0, 6.0);
        let delete = ModelParams::new(5.0, 0.0, 3.0);
        let iso = ModelParams::new(3.0, 5.0, 4.0);
        let create = ModelParams::new(2.8, 20.0, 4.4).with_weights(1.0, 1.0);
        let (params, first_order, second, notes) = match id {
            FigureId::Fig1 => (delete, true, None, "first-order partner deleting E0 = 4.5"),
            FigureId::Fig2 => (iso, true, None, "first-order strictly isospectral partner"),
            FigureId::Fig3 => (create, true, None, "first-order partner creating mu = -13.32"),
            FigureId::Fig4 => (
                delete,
                true,
                Some(SecondSeeds::Real { nu: 1.0 }),
                "partners deleting E0 = 4.5, then E0 and E1 = 10.5",
            ),
            FigureId::Fig5 => (
                iso,
                true,
                Some(SecondSeeds::Real { nu: 1.0 }),
                "first- and second-order strictly isospectral partners",
            ),
            FigureId::Fig6 => (
                create,
                true,
                Some(SecondSeeds::Real { nu: FIG6_NU }),
                "partners creating -13.32, then -13.32 and -85.32 (nu = 10 gives the same mu2)",
            ),
            FigureId::Fig7 => (
                ModelParams::complex(C::new(6.1, -5.0), C::new(8.0, 5.0), C::new(4.1, 0.0)),
                false,
                Some(SecondSeeds::ComplexConjugate { nu: 1.9 }),
                "complex pair mu = -51.25 +/- 9.5i, strictly isospectral",
            ),
        };
        Self {
            id,
            params,
            first_order,
            second,
            range,
            notes,
        }
    }

    /// Replaces ν of a real second-order construction.
    pub fn with_nu(mut self, nu: f64) -> Self {
        if let Some(SecondSeeds::Real { .. }) = self.second {
            self.second = Some(SecondSeeds::Real { nu });
        }
        self
    }

    pub fn first_order_partner(&self) -> Result<Option<FirstOrderPartner>> {
        if !self.first_order {
            return Ok(None);
        }
        FirstOrderPartner::from_params(self.params).map(Some)
    }

    pub fn second_order_partner(&self) -> Result<Option<SecondOrderPartner>> {
        match self.second {
            None => Ok(None),
            Some(SecondSeeds::Real { nu }) => {
                SecondOrderPartner::from_params(self.params, self.params.with_nu(nu)).map(Some)
            }
            Some(SecondSeeds::ComplexConjugate { .. }) => {
                SecondOrderPartner::complex(SeedSolution::new(self.params)?).map(Some)
            }
        }
    }

    /// Samples V and the partner potentials on `samples` equally spaced points.
    pub fn sample(&self, samples: usize) -> Result<FigureData> {
        let first = self.first_order_partner()?;
        let second = self.second_order_partner()?;
        let mut header = vec!["x".to_string(), "V".to_string(), "Vbar".to_string()];
        if first.is_some() && second.is_some() {
            header.push("Vbar2".to_string());
        }
        let (lo, hi) = self.range;
        let mut rows = Vec::with_capacity(samples);
        let mut max_imag = 0.0f64;
        for i in 0..samples {
            let x = if samples > 1 {
                lo + (hi - lo) * i as f64 / (samples - 1) as f64
            } else {
                lo
            };
            let mut row = vec![x, self.params.potential(x)?];
            if let Some(f) = &first {
                row.push(f.partner_potential(x)?);
            }
            if let Some(s) = &second {
                let v = s.partner_potential_complex(x)?;
                max_imag = max_imag.max(v.im.abs());
                row.push(s.partner_potential(x)?);
            }
            rows.push(row);
        }
        Ok(FigureData { header, rows, max_imag })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in FigureId::ALL {
            assert_eq!(id.to_string().parse::<FigureId>().unwrap(), id);
        }
        assert!("fig8".parse::<FigureId>().is_err());
    }

    #[test]
    fn fig1_at_origin() {
        let d = FigurePreset::get(FigureId::Fig1).sample(FIGURE_SAMPLES).unwrap();
        let mid = &d.rows[FIGURE_SAMPLES / 2];
        assert_eq!(mid[0], 0.0);
        assert!((mid[1] - 1.5).abs() < 1e-12 && (mid[2] - 6.5).abs() < 1e-10, "{mid:?}");
    }

    #[test]
    fn fig2_at_origin() {
        let d = FigurePreset::get(FigureId::Fig2).sample(3).unwrap();
        assert!((d.rows[1][1] - 5.75).abs() < 1e-12);
    }
}
