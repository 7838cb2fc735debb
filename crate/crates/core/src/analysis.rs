//! Drivers that turn discretized spectra into theorem-level evidence.

pub mod appendix;
pub mod discrete;
pub mod effective;
pub mod fit;
pub mod hardy;
pub mod sweeps;

use serde::{Deserialize, Serialize};

use crate::assembly::GridSpec;
use crate::error::{invalid, Result};

pub use appendix::{kriz_instances, limit_ratio_check, KrizInstance, LimitRatioCheck};
pub use discrete::{
    detect_discrete_spectrum, trial_function_certificate, DiscreteSpectrum, SpectrumSetting,
    TrialGap,
};
pub use effective::{effective_eigenvalues_fe, ProjectedLimit};
pub use fit::{loglog_fit, LogLogFit};
pub use hardy::{hardy_constant, lemma1_samples, HardyResult, Lemma1Sample};
pub use sweeps::{resolvent_sweep, scaled_strip_sweep, thin_strip_sweep, ResolventRoute, ThinMode};

pub const SCHEMA_VERSION: u32 = 1;

/// Threshold `(pi / 2 eps)^2` of the essential spectrum.
pub fn threshold(eps: f64) -> f64 {
    (std::f64::consts::FRAC_PI_2 / eps).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremTag {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
    LA1,
    TA2,
}

impl std::fmt::Display for TheoremTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

/// Grid choice as a function of `eps`: `cells_s x cells_t` cells on `[-L, L] x [0, 1]`.
/// Without a fixed `cells_t`, the transverse resolution follows `ceil(8 / eps)`
/// clamped to `[16, 256]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPolicy {
    pub half_length: f64,
    pub cells_s: usize,
    pub cells_t: Option<usize>,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self {
            half_length: 10.0,
            cells_s: 400,
            cells_t: Some(20),
        }
    }
}

impl GridPolicy {
    pub const AUTO_PER_INV_EPS: f64 = 8.0;
    pub const AUTO_MIN: usize = 16;
    pub const AUTO_MAX: usize = 256;

    pub fn auto(half_length: f64, cells_s: usize) -> Self {
        Self {
            half_length,
            cells_s,
            cells_t: None,
        }
    }

    pub fn auto_cells_t(eps: f64) -> usize {
        ((Self::AUTO_PER_INV_EPS / eps).ceil() as usize).clamp(Self::AUTO_MIN, Self::AUTO_MAX)
    }

    pub fn cells_t_for(&self, eps: f64) -> usize {
        self.cells_t.unwrap_or_else(|| Self::auto_cells_t(eps))
    }

    pub fn check(&self) -> Result<()> {
        if !(self.half_length > 0.0 && self.half_length.is_finite()) {
            return Err(invalid("half_length", "must be positive"));
        }
        if self.cells_s < 7 {
            return Err(invalid("cells_s", "must be at least 7"));
        }
        if matches!(self.cells_t, Some(c) if c < 7) {
            return Err(invalid("cells_t", "must be at least 7"));
        }
        Ok(())
    }

    pub fn grid_for(&self, eps: f64) -> Result<GridSpec> {
        self.check()?;
        GridSpec::new(
            self.half_length,
            self.cells_s + 1,
            self.cells_t_for(eps) + 1,
        )
    }

    /// Same `s` spacing on `[-factor L, factor L]`.
    pub fn extended(&self, factor: f64) -> Self {
        Self {
            half_length: factor * self.half_length,
            cells_s: (factor * self.cells_s as f64).round() as usize,
            cells_t: self.cells_t,
        }
    }

    /// Spacings divided by `factor` in both directions.
    pub fn refined(&self, factor: f64, eps: f64) -> Self {
        Self {
            half_length: self.half_length,
            cells_s: (factor * self.cells_s as f64).ceil() as usize,
            cells_t: Some((factor * self.cells_t_for(eps) as f64).ceil() as usize),
        }
    }
}

/// Per-`eps` record of a sweep. Quantities that do not apply are `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub epsilon: f64,
    pub cells_s: usize,
    pub cells_t: usize,
    /// Lowest eigenvalues of the strip form.
    pub lambda: Vec<f64>,
    /// `(pi / 2 eps)^2`.
    pub threshold: f64,
    /// Transverse ground level of the discretization, replacing the threshold in remainders.
    pub discrete_threshold: f64,
    pub effective: Option<f64>,
    /// `eps (lambda_1 - threshold)` for bent sweeps, `lambda_1(eps y) - threshold_y` for scaled ones.
    pub scaled: Option<f64>,
    pub remainder: Option<f64>,
    pub reference: Option<f64>,
    pub hardy_constant: Option<f64>,
    pub gap_norm: Option<f64>,
    pub converged: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub exponent: f64,
    pub residual: f64,
}

impl From<LogLogFit> for FitSummary {
    fn from(f: LogLogFit) -> Self {
        Self {
            exponent: f.slope,
            residual: f.residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub passed: bool,
    pub criterion: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub scenario: String,
    pub theorem: TheoremTag,
    pub records: Vec<SweepRecord>,
    pub fit: Option<FitSummary>,
    pub verdict: Verdict,
    /// Scenario-specific data that does not fit the per-`eps` records.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

impl SweepReport {
    pub fn new(
        scenario: &str,
        theorem: TheoremTag,
        mut records: Vec<SweepRecord>,
        fit: Option<FitSummary>,
        verdict: Verdict,
    ) -> Self {
        records.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
        Self {
            schema_version: SCHEMA_VERSION,
            scenario: scenario.to_string(),
            theorem,
            records,
            fit,
            verdict,
            details: None,
        }
    }

    pub fn with_details(mut self, details: serde_json::Value) -> Self {
        self.details = Some(details);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed
    }
}

/// Fixed CSV header shared by every theorem tag.
pub const CSV_COLUMNS: [&str; 16] = [
    "scenario",
    "theorem",
    "epsilon",
    "cells_s",
    "cells_t",
    "lambda_1",
    "lambda_all",
    "threshold",
    "discrete_threshold",
    "effective",
    "scaled",
    "remainder",
    "reference",
    "hardy_constant",
    "gap_norm",
    "converged",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.12e}")).unwrap_or_default()
}

impl SweepReport {
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.records
            .iter()
            .map(|r| {
                vec![
                    self.scenario.clone(),
                    self.theorem.to_string(),
                    format!("{}", r.epsilon),
                    r.cells_s.to_string(),
                    r.cells_t.to_string(),
                    opt(r.lambda.first().copied()),
                    r.lambda
                        .iter()
                        .map(|x| format!("{x:.12e}"))
                        .collect::<Vec<_>>()
                        .join(";"),
                    format!("{:.12e}", r.threshold),
                    format!("{:.12e}", r.discrete_threshold),
                    opt(r.effective),
                    opt(r.scaled),
                    opt(r.remainder),
                    opt(r.reference),
                    opt(r.hardy_constant),
                    opt(r.gap_norm),
                    r.converged.to_string(),
                ]
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_policy() {
        assert_eq!(GridPolicy::auto_cells_t(0.1), 80);
        assert_eq!(GridPolicy::auto_cells_t(0.9), 16);
        assert_eq!(GridPolicy::auto_cells_t(0.01), 256);
        let g = GridPolicy::default().grid_for(0.1).unwrap();
        assert_eq!((g.n_s, g.n_t), (401, 21));
        let e = GridPolicy::default().extended(2.0);
        assert_eq!(e.cells_s, 800);
        assert!((e.grid_for(0.1).unwrap().hs() - g.hs()).abs() < 1e-15);
        assert!(GridPolicy {
            cells_s: 3,
            ..Default::default()
        }
        .check()
        .is_err());
    }

    #[test]
    fn records_sorted_descending() {
        let recs = [0.05, 0.2, 0.1]
            .iter()
            .map(|&e| SweepRecord {
                epsilon: e,
                ..Default::default()
            })
            .collect();
        let r = SweepReport::new(
            "x",
            TheoremTag::T5,
            recs,
            None,
            Verdict {
                passed: true,
                criterion: String::new(),
                detail: String::new(),
            },
        );
        let eps: Vec<f64> = r.records.iter().map(|r| r.epsilon).collect();
        assert_eq!(eps, vec![0.2, 0.1, 0.05]);
        assert_eq!(r.csv_rows()[0].len(), CSV_COLUMNS.len());
    }
}
