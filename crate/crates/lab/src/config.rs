//! Run configuration: period matrix, seed, tolerances and sample counts.

use std::path::Path;

use coble_core::fit::{MIN_CUBIC_SAMPLES, MIN_QUADRIC_SAMPLES};
use coble_core::dual::MIN_SPAN_SAMPLES;
use coble_core::theta::{PeriodMatrix, ThetaError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid period matrix: {0}")]
    Tau(#[from] ThetaError),
    #[error("{name} = {value} is outside (0, 1)")]
    Tolerance { name: &'static str, value: f64 },
    #[error("{name} = {got} is below the minimum of {min}")]
    SampleCount { name: &'static str, min: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<JsonComplex> for Complex64 {
    fn from(c: JsonComplex) -> Self {
        Complex64::new(c.re, c.im)
    }
}

impl From<Complex64> for JsonComplex {
    fn from(c: Complex64) -> Self {
        JsonComplex { re: c.re, im: c.im }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleCounts {
    /// Jacobian samples for the quadric fit.
    pub quadric: usize,
    /// Jacobian samples for the cubic fit.
    pub cubic: usize,
    /// Fresh samples for every held-out residual check.
    pub held_out: usize,
    /// Samples of each `X_a`.
    pub theta_divisor: usize,
    /// Dual images per invariant sextic for the sextic fit (at least 3).
    pub sextic_factor: usize,
    /// Random points of each `P⁴_a` mapped by the dual map.
    pub span_images: usize,
    /// Random lines per degree count.
    pub degree_trials: usize,
    /// Random points for equivariance checks.
    pub equivariance: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        Self {
            quadric: 120,
            cubic: 20,
            held_out: 50,
            theta_divisor: 30,
            sextic_factor: 3,
            span_images: 20,
            degree_trials: 5,
            equivariance: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub tau: [[JsonComplex; 2]; 2],
    pub seed: u64,
    pub tol_series: f64,
    pub tol_rank: f64,
    pub samples: SampleCounts,
    /// Shifts `a` for the `X_a` checks; when empty, `random_shifts` shifts are
    /// drawn from the seed.
    pub a_shifts: Vec<[JsonComplex; 2]>,
    pub random_shifts: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let tau = PeriodMatrix::reference().tau();
        Self {
            tau: tau.map(|row| row.map(JsonComplex::from)),
            seed: 20_240_607,
            tol_series: coble_core::theta::DEFAULT_SERIES_TOL,
            tol_rank: coble_core::fit::DEFAULT_RANK_TOL,
            samples: SampleCounts::default(),
            a_shifts: Vec::new(),
            random_shifts: 3,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn period_matrix(&self) -> Result<PeriodMatrix, ThetaError> {
        PeriodMatrix::new(self.tau.map(|row| row.map(Complex64::from)))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.period_matrix()?;
        for (name, value) in [("tol_series", self.tol_series), ("tol_rank", self.tol_rank)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(ConfigError::Tolerance { name, value });
            }
        }
        let s = &self.samples;
        for (name, min, got) in [
            ("samples.quadric", MIN_QUADRIC_SAMPLES, s.quadric),
            ("samples.cubic", MIN_CUBIC_SAMPLES, s.cubic),
            ("samples.held_out", 1, s.held_out),
            ("samples.theta_divisor", MIN_SPAN_SAMPLES, s.theta_divisor),
            ("samples.sextic_factor", 3, s.sextic_factor),
            ("samples.span_images", 5, s.span_images),
            ("samples.degree_trials", 1, s.degree_trials),
            ("samples.equivariance", 1, s.equivariance),
        ] {
            if got < min {
                return Err(ConfigError::SampleCount { name, min, got });
            }
        }
        if self.a_shifts.is_empty() && self.random_shifts == 0 {
            return Err(ConfigError::SampleCount { name: "random_shifts", min: 1, got: 0 });
        }
        Ok(())
    }
}
