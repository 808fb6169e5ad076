//! JSON problem description.

use std::path::Path;

use serde::Deserialize;

use gauss_frames::frame::SpectrumConfig;
use gauss_frames::gaussian::{GaussianWindow, HBAR_TF};
use gauss_frames::linalg;
use gauss_frames::symplectic::ComplexSymmetricPair;
use gauss_frames::tolerances::Tolerances;
use gauss_frames::{Error, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub n: usize,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(rename = "X")]
    pub x: Vec<Vec<f64>>,
    #[serde(rename = "Y")]
    pub y: Vec<Vec<f64>>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub lattice: LatticeSection,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub spectrum: SpectrumSection,
}

fn default_hbar() -> f64 {
    HBAR_TF
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Samples per configuration axis; 1024 for `n = 1`, 64 otherwise.
    pub points_per_axis: Option<usize>,
    /// Half-width of Wigner dumps in units of the widest standard deviation.
    pub extent_sigmas: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Radius {
    Value(f64),
    Keyword(String),
}

impl Default for Radius {
    fn default() -> Self {
        Radius::Keyword("auto".into())
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    #[serde(default)]
    pub truncation_radius: Radius,
}

/// Optional overrides of the spectrum estimator settings.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    pub extent_sigmas: Option<f64>,
    pub central_fraction: Option<f64>,
    pub concentration_threshold: Option<f64>,
    pub max_iterations: Option<usize>,
    pub rel_tol: Option<f64>,
    pub dense_limit: Option<usize>,
}

pub const DEFAULT_EXTENT_SIGMAS: f64 = 10.0;

impl ProblemConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ProblemConfig = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::InvalidDimension("n must be positive".into()));
        }
        let square = |m: &Vec<Vec<f64>>| m.len() == n && m.iter().all(|r| r.len() == n);
        if !square(&self.x) || !square(&self.y) {
            return Err(Error::InvalidDimension(format!("X and Y must be {n} x {n}")));
        }
        if self.alpha.len() != n || self.beta.len() != n {
            return Err(Error::InvalidDimension(format!("alpha and beta must have {n} entries")));
        }
        if self.alpha.iter().chain(&self.beta).any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidConfig("alpha and beta entries must be positive".into()));
        }
        if !(self.hbar > 0.0) || !self.hbar.is_finite() {
            return Err(Error::InvalidConfig("hbar must be positive".into()));
        }
        if let Some(e) = self.grid.extent_sigmas {
            if !(e > 0.0) || !e.is_finite() {
                return Err(Error::InvalidConfig("grid.extent_sigmas must be positive".into()));
            }
        }
        match &self.lattice.truncation_radius {
            Radius::Value(r) if !(*r > 0.0) || !r.is_finite() => {
                return Err(Error::InvalidConfig("lattice.truncation_radius must be positive".into()))
            }
            Radius::Keyword(k) if k != "auto" => {
                return Err(Error::InvalidConfig(format!("lattice.truncation_radius must be a number or \"auto\", got {k:?}")))
            }
            _ => {}
        }
        // Structural checks of the window.
        self.window()?;
        Ok(())
    }

    pub fn pair(&self) -> Result<ComplexSymmetricPair> {
        ComplexSymmetricPair::new(linalg::from_rows(&self.x)?, linalg::from_rows(&self.y)?, &self.tolerances)
    }

    pub fn window(&self) -> Result<GaussianWindow> {
        GaussianWindow::new(self.pair()?, self.hbar, &self.tolerances)
    }

    pub fn points_per_axis(&self) -> usize {
        self.grid.points_per_axis.unwrap_or(if self.n == 1 { 1024 } else { 64 })
    }

    pub fn extent_sigmas(&self) -> f64 {
        self.grid.extent_sigmas.unwrap_or(DEFAULT_EXTENT_SIGMAS)
    }

    /// Explicit truncation radius, or `None` for "auto".
    pub fn truncation_radius(&self) -> Option<f64> {
        match self.lattice.truncation_radius {
            Radius::Value(r) => Some(r),
            Radius::Keyword(_) => None,
        }
    }

    pub fn spectrum_config(&self) -> SpectrumConfig {
        let d = SpectrumConfig::default();
        let s = &self.spectrum;
        SpectrumConfig {
            points_per_axis: self.points_per_axis(),
            extent_sigmas: s.extent_sigmas,
            central_fraction: s.central_fraction.unwrap_or(d.central_fraction),
            concentration_threshold: s.concentration_threshold.unwrap_or(d.concentration_threshold),
            max_iterations: s.max_iterations.unwrap_or(d.max_iterations),
            rel_tol: s.rel_tol.unwrap_or(d.rel_tol),
            dense_limit: s.dense_limit.unwrap_or(d.dense_limit),
        }
    }
}
