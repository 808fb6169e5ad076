use serde::Serialize;

use crate::lattice::ThresholdVerdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EstimatorMethod {
    #[serde(rename = "operator-spectrum")]
    OperatorSpectrum,
    #[serde(rename = "adjoint-series")]
    AdjointSeries,
}

impl EstimatorMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorMethod::OperatorSpectrum => "operator-spectrum",
            EstimatorMethod::AdjointSeries => "adjoint-series",
        }
    }
}

/// Agreement between the primary estimate and an independent one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheckRecord {
    pub route: String,
    pub a_est: f64,
    pub b_est: f64,
    /// `max(|Δa|/a, |Δb|/b)` relative to the primary estimate.
    pub relative_gap: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Bound on the neglected part of the lattice sum relative to `‖ψ‖²`.
    pub truncation_tail: f64,
    pub tail_warning: bool,
    /// "conclusive" or "inconclusive-lower".
    pub lower_status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points_per_axis: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_subspace_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_solver: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series_terms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub off_diagonal_sum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheckRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameBoundsReport {
    pub a_est: f64,
    pub b_est: f64,
    pub method: EstimatorMethod,
    pub lattice_points_used: usize,
    pub threshold_verdicts: ThresholdVerdict,
    pub diagnostics: Diagnostics,
}

impl FrameBoundsReport {
    pub fn condition(&self) -> f64 {
        self.b_est / self.a_est
    }
}

/// `max(|Δa|/a, |Δb|/b)`, using the first pair as reference.
pub fn relative_gap(a_ref: f64, b_ref: f64, a: f64, b: f64) -> f64 {
    let rel = |r: f64, v: f64| {
        if r == 0.0 && v == 0.0 {
            0.0
        } else {
            (r - v).abs() / r.abs().max(f64::MIN_POSITIVE)
        }
    };
    rel(a_ref, a).max(rel(b_ref, b))
}
