//! α sweeps for the S_x, S_p and U curves.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use entropic_core::{make_packet, total_uncertainty, EntropyError, EntropyReport, QuadratureConfig};

use crate::format::{round_sig, sig};

pub const CSV_HEADER: &str = "alpha,s_x,s_p,u_total,gap";
pub const SIG_DIGITS: usize = 12;
const MAX_POINTS: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSpec {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub step: f64,
    pub format: SweepFormat,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SweepSpecError {
    #[error("alpha_min must exceed 1/2 for a normalizable packet, got {0}")]
    NotNormalizable(f64),
    #[error("alpha_max ({max}) must not be below alpha_min ({min})")]
    Reversed { min: f64, max: f64 },
    #[error("step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("grid would have more than 1e6 points")]
    TooManyPoints,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepSpecError> {
        if !(self.alpha_min > 0.5) || !self.alpha_min.is_finite() {
            return Err(SweepSpecError::NotNormalizable(self.alpha_min));
        }
        if !(self.alpha_max >= self.alpha_min) || !self.alpha_max.is_finite() {
            return Err(SweepSpecError::Reversed { min: self.alpha_min, max: self.alpha_max });
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(SweepSpecError::BadStep(self.step));
        }
        if (self.alpha_max - self.alpha_min) / self.step > MAX_POINTS {
            return Err(SweepSpecError::TooManyPoints);
        }
        Ok(())
    }

    /// `alpha_min + i·step` up to and including `alpha_max` (within a small
    /// allowance for the rounding of `step`).
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.alpha_max - self.alpha_min) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.alpha_min + i as f64 * self.step).collect()
    }
}

/// Evaluates every grid point; rows come back in α order whatever order
/// the workers finish in.
pub fn run(spec: &SweepSpec, cfg: &QuadratureConfig) -> Result<Vec<EntropyReport>, EntropyError> {
    spec.grid()
        .par_iter()
        .map(|&alpha| total_uncertainty(&make_packet(alpha)?, cfg))
        .collect()
}

#[derive(Serialize)]
struct Row {
    alpha: f64,
    s_x: f64,
    s_p: f64,
    u_total: f64,
    gap: f64,
}

pub fn render(rows: &[EntropyReport], format: SweepFormat) -> String {
    match format {
        SweepFormat::Csv => {
            let mut out = String::new();
            out.push_str(CSV_HEADER);
            out.push('\n');
            for r in rows {
                let cells = [r.alpha, r.s_x, r.s_p, r.u_total, r.gap].map(|v| sig(v, SIG_DIGITS));
                writeln!(out, "{}", cells.join(",")).expect("writing to a String");
            }
            out
        }
        SweepFormat::Json => {
            let rows: Vec<Row> = rows
                .iter()
                .map(|r| Row {
                    alpha: round_sig(r.alpha, SIG_DIGITS),
                    s_x: round_sig(r.s_x, SIG_DIGITS),
                    s_p: round_sig(r.s_p, SIG_DIGITS),
                    u_total: round_sig(r.u_total, SIG_DIGITS),
                    gap: round_sig(r.gap, SIG_DIGITS),
                })
                .collect();
            let mut out = serde_json::to_string_pretty(&rows).expect("rows serialize");
            out.push('\n');
            out
        }
    }
}
