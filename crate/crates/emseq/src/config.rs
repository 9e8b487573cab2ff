//! Thresholds and gate parameters for the verifiers.
//!
//! Asymptotic o(n) claims are checked through finite proxies: a residual
//! series must be nonincreasing over a trailing window of checkpoints and
//! its final value must sit below a threshold. Defaults here are pinned;
//! a key=value config file can override them.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::EmError;

#[derive(Debug, Clone, Serialize)]
pub struct Thresholds {
    /// Final-checkpoint gate for the R_n deficit and occurrence residuals.
    pub residual_final: f64,
    /// Final-checkpoint gate for the bad-word fraction B_n/n.
    pub bad_fraction_final: f64,
    /// Residual series must be nonincreasing over this many trailing checkpoints.
    pub trend_window: usize,
    /// Slack c in the identity check |R_n| >= n - alpha(n) - c.
    pub rn_slack: u64,
    /// Lower gate for min over k of i_k / 2^(k/2).
    pub growth_ik_min: f64,
    /// Band for alpha(n) / log2(n).
    pub alpha_log_min: f64,
    pub alpha_log_max: f64,
    /// Single-bit frequency band.
    pub freq1_min: f64,
    pub freq1_max: f64,
    /// Length-2 frequency band.
    pub freq2_min: f64,
    pub freq2_max: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            residual_final: 0.05,
            bad_fraction_final: 0.05,
            trend_window: 3,
            rn_slack: 2,
            growth_ik_min: 0.25,
            alpha_log_min: 0.5,
            alpha_log_max: 3.0,
            freq1_min: 0.25,
            freq1_max: 0.75,
            freq2_min: 1.0 / 25.0,
            freq2_max: 8.0 / 11.0,
        }
    }
}

impl Thresholds {
    /// Parses `key = value` lines; `#` starts a comment; unknown keys error.
    pub fn parse(text: &str) -> Result<Self, EmError> {
        let mut t = Thresholds::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| EmError::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim();
            let bad = |e: &dyn std::fmt::Display| {
                EmError::Config(format!("line {}: bad value for {key}: {e}", lineno + 1))
            };
            match key {
                "residual_final" => t.residual_final = value.parse().map_err(|e| bad(&e))?,
                "bad_fraction_final" => t.bad_fraction_final = value.parse().map_err(|e| bad(&e))?,
                "trend_window" => t.trend_window = value.parse().map_err(|e| bad(&e))?,
                "rn_slack" => t.rn_slack = value.parse().map_err(|e| bad(&e))?,
                "growth_ik_min" => t.growth_ik_min = value.parse().map_err(|e| bad(&e))?,
                "alpha_log_min" => t.alpha_log_min = value.parse().map_err(|e| bad(&e))?,
                "alpha_log_max" => t.alpha_log_max = value.parse().map_err(|e| bad(&e))?,
                "freq1_min" => t.freq1_min = value.parse().map_err(|e| bad(&e))?,
                "freq1_max" => t.freq1_max = value.parse().map_err(|e| bad(&e))?,
                "freq2_min" => t.freq2_min = value.parse().map_err(|e| bad(&e))?,
                "freq2_max" => t.freq2_max = value.parse().map_err(|e| bad(&e))?,
                other => {
                    return Err(EmError::Config(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(t)
    }

    pub fn from_file(path: &Path) -> Result<Self, EmError> {
        Thresholds::parse(&fs::read_to_string(path)?)
    }
}
